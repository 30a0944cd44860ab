"""Objective evaluation: mel-cepstral distortion and log-F0 RMSE under DTW alignment."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.fft import dct

from .errors import ConfigError, ShapeError
from .features import MelSpectrogram, StftConfig, extract_f0, mel_spectrogram
from .io import Waveform

MCD_CONSTANT = 10.0 / math.log(10.0) * math.sqrt(2.0)
DEFAULT_N_COEFFS = 25


@dataclass
class MetricReport:
    mcd: Optional[float] = None
    f0_rmse: Optional[float] = None
    n_aligned_frames: int = 0
    n_voiced_pairs: int = 0

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def mel_cepstra(mel: MelSpectrogram, n_coeffs: int = DEFAULT_N_COEFFS) -> np.ndarray:
    """Orthonormal DCT-II of each log-mel frame, coefficients 1..n_coeffs."""
    frames = mel.frames if isinstance(mel, MelSpectrogram) else np.asarray(mel, float)
    if not 1 <= n_coeffs < frames.shape[1] + 1:
        raise ConfigError(f"n_coeffs={n_coeffs} exceeds {frames.shape[1]} mel bands")
    c = dct(frames, type=2, norm="ortho", axis=1)
    out = np.zeros((frames.shape[0], n_coeffs))
    kept = c[:, 1 : n_coeffs + 1]
    out[:, : kept.shape[1]] = kept
    return out


def dtw_path(x: np.ndarray, y: np.ndarray) -> list[tuple[int, int]]:
    """Euclidean-cost DTW with steps (1,0), (0,1), (1,1); returns the aligned index pairs."""
    cost = np.linalg.norm(x[:, None, :] - y[None, :, :], axis=-1)
    n, m = cost.shape
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        row, prev = acc[i], acc[i - 1]
        c = cost[i - 1]
        diag_up = np.minimum(prev[:-1], prev[1:])
        for j in range(1, m + 1):
            best = diag_up[j - 1] if diag_up[j - 1] < row[j - 1] else row[j - 1]
            row[j] = c[j - 1] + best

    path = []
    i, j = n, m
    while i > 0 and j > 0:
        path.append((i - 1, j - 1))
        moves = (acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
        step = int(np.argmin(moves))
        if step == 0:
            i, j = i - 1, j - 1
        elif step == 1:
            i -= 1
        else:
            j -= 1
    return path[::-1]


def _check_pair(ref: Waveform, syn: Waveform) -> None:
    if ref.sample_rate != syn.sample_rate:
        raise ShapeError(f"sample rates differ: {ref.sample_rate} vs {syn.sample_rate}")


def _aligned_cepstra(ref, syn, cfg, n_coeffs):
    _check_pair(ref, syn)
    c_ref = mel_cepstra(mel_spectrogram(ref, cfg), n_coeffs)
    c_syn = mel_cepstra(mel_spectrogram(syn, cfg), n_coeffs)
    return c_ref, c_syn, dtw_path(c_ref, c_syn)


def _mcd_on_path(c_ref, c_syn, path) -> float:
    i, j = np.array(path).T
    return float(MCD_CONSTANT * np.mean(np.linalg.norm(c_ref[i] - c_syn[j], axis=1)))


def _f0_rmse_on_path(ref, syn, cfg, path) -> tuple[float, int]:
    p_ref, v_ref = extract_f0(ref, cfg)
    p_syn, v_syn = extract_f0(syn, cfg)
    i, j = np.array(path).T
    both = v_ref[i] & v_syn[j]
    if not both.any():
        return 0.0, 0
    diff = p_ref[i][both] - p_syn[j][both]
    return float(np.sqrt(np.mean(diff**2))), int(both.sum())


def mcd(ref: Waveform, syn: Waveform, cfg: StftConfig = StftConfig(),
        n_coeffs: int = DEFAULT_N_COEFFS) -> MetricReport:
    c_ref, c_syn, path = _aligned_cepstra(ref, syn, cfg, n_coeffs)
    return MetricReport(mcd=_mcd_on_path(c_ref, c_syn, path), n_aligned_frames=len(path))


def log_f0_rmse(ref: Waveform, syn: Waveform, cfg: StftConfig = StftConfig(),
                n_coeffs: int = DEFAULT_N_COEFFS) -> MetricReport:
    _, _, path = _aligned_cepstra(ref, syn, cfg, n_coeffs)
    rmse, pairs = _f0_rmse_on_path(ref, syn, cfg, path)
    return MetricReport(f0_rmse=rmse, n_aligned_frames=len(path), n_voiced_pairs=pairs)


def evaluate(ref: Waveform, syn: Waveform, cfg: StftConfig = StftConfig(),
             n_coeffs: int = DEFAULT_N_COEFFS) -> MetricReport:
    """Both metrics sharing one DTW path."""
    c_ref, c_syn, path = _aligned_cepstra(ref, syn, cfg, n_coeffs)
    rmse, pairs = _f0_rmse_on_path(ref, syn, cfg, path)
    return MetricReport(
        mcd=_mcd_on_path(c_ref, c_syn, path),
        f0_rmse=rmse,
        n_aligned_frames=len(path),
        n_voiced_pairs=pairs,
    )
