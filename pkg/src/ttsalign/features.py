"""Frame-level feature extraction: log-mel spectrogram, F0 and energy.

All three extractors share the same framing (Hann window, reflect padding of
``fft_size // 2`` on both sides), so a waveform of ``L`` samples always yields
``1 + L // hop_size`` frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, EmptyAudioError
from .io import Waveform

LOG_FLOOR = 1e-10

F0_MIN_HZ = 70.0
F0_MAX_HZ = 400.0
CLARITY_THRESHOLD = 0.3
RMS_THRESHOLD = 1e-4
# among autocorrelation peaks this close to the best one, the shortest lag wins
OCTAVE_TOLERANCE = 0.95


@dataclass(frozen=True)
class StftConfig:
    fft_size: int = 1024
    hop_size: int = 256
    window_size: Optional[int] = None
    n_mels: int = 80
    fmin: float = 0.0
    fmax: Optional[float] = None

    @property
    def win_length(self) -> int:
        return self.fft_size if self.window_size is None else self.window_size

    def resolved_fmax(self, sample_rate: int) -> float:
        return sample_rate / 2 if not self.fmax else float(self.fmax)

    def validate(self, sample_rate: int) -> None:
        if self.hop_size < 1 or not self.hop_size <= self.win_length <= self.fft_size:
            raise ConfigError(
                "need 1 <= hop_size <= window_size <= fft_size, got "
                f"{self.hop_size}, {self.win_length}, {self.fft_size}"
            )
        if self.n_mels < 1:
            raise ConfigError(f"n_mels must be >= 1, got {self.n_mels}")
        fmax = self.resolved_fmax(sample_rate)
        if not 0 <= self.fmin < fmax <= sample_rate / 2:
            raise ConfigError(
                f"need 0 <= fmin < fmax <= sample_rate/2, got fmin={self.fmin}, fmax={fmax}"
            )


@dataclass(frozen=True)
class MelSpectrogram:
    frames: np.ndarray  # (T, n_mels)
    config: StftConfig = field(default_factory=StftConfig)
    sample_rate: int = 22050

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class FrameVariance:
    pitch: np.ndarray  # log-Hz, 0 where unvoiced
    voicing: np.ndarray
    energy: np.ndarray


def n_frames(n_samples: int, hop_size: int) -> int:
    return 1 + n_samples // hop_size


def hann_window(win_length: int, fft_size: int) -> np.ndarray:
    """Periodic Hann window of ``win_length`` zero-padded to ``fft_size``, centred."""
    n = np.arange(win_length)
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * n / win_length)
    left = (fft_size - win_length) // 2
    return np.pad(w, (left, fft_size - win_length - left))


def _check(w: Waveform, cfg: StftConfig) -> None:
    if len(w) < 1:
        raise EmptyAudioError("waveform is empty")
    cfg.validate(w.sample_rate)


def frame_signal(samples: np.ndarray, cfg: StftConfig) -> np.ndarray:
    """Reflect-pad and cut into overlapping ``(T, fft_size)`` frames."""
    pad = cfg.fft_size // 2
    x = np.pad(samples, pad, mode="reflect") if len(samples) > 1 else np.pad(samples, pad, mode="edge")
    count = n_frames(len(samples), cfg.hop_size)
    idx = np.arange(cfg.fft_size)[None, :] + cfg.hop_size * np.arange(count)[:, None]
    return x[idx]


def stft_magnitude(w: Waveform, cfg: StftConfig) -> np.ndarray:
    """Magnitude STFT, shape ``(T, fft_size // 2 + 1)``."""
    _check(w, cfg)
    frames = frame_signal(w.samples, cfg) * hann_window(cfg.win_length, cfg.fft_size)
    return np.abs(np.fft.rfft(frames, n=cfg.fft_size, axis=1))


# Slaney-style mel scale: linear below 1 kHz, logarithmic above.
_F_SP = 200.0 / 3
_MIN_LOG_HZ = 1000.0
_MIN_LOG_MEL = _MIN_LOG_HZ / _F_SP
_LOGSTEP = np.log(6.4) / 27.0


def hz_to_mel(f):
    f = np.asarray(f, dtype=np.float64)
    log_part = _MIN_LOG_MEL + np.log(np.maximum(f, _MIN_LOG_HZ) / _MIN_LOG_HZ) / _LOGSTEP
    return np.where(f >= _MIN_LOG_HZ, log_part, f / _F_SP)


def mel_to_hz(m):
    m = np.asarray(m, dtype=np.float64)
    log_part = _MIN_LOG_HZ * np.exp(_LOGSTEP * (m - _MIN_LOG_MEL))
    return np.where(m >= _MIN_LOG_MEL, log_part, _F_SP * m)


def mel_band_edges(cfg: StftConfig, sample_rate: int) -> np.ndarray:
    """``n_mels + 2`` frequencies; filter k spans edges[k]..edges[k+2], peaking at edges[k+1]."""
    lo, hi = hz_to_mel(cfg.fmin), hz_to_mel(cfg.resolved_fmax(sample_rate))
    return mel_to_hz(np.linspace(lo, hi, cfg.n_mels + 2))


def mel_filterbank(cfg: StftConfig, sample_rate: int) -> np.ndarray:
    """Triangular, area-normalised filters, shape ``(n_mels, fft_size // 2 + 1)``."""
    edges = mel_band_edges(cfg, sample_rate)
    freqs = np.fft.rfftfreq(cfg.fft_size, d=1.0 / sample_rate)
    lower, center, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs[None, :] - lower) / (center - lower)
    falling = (upper - freqs[None, :]) / (upper - center)
    tri = np.maximum(0.0, np.minimum(rising, falling))
    return tri * (2.0 / (upper - lower))


def mel_spectrogram(w: Waveform, cfg: StftConfig = StftConfig()) -> MelSpectrogram:
    mag = stft_magnitude(w, cfg)
    mel = mag @ mel_filterbank(cfg, w.sample_rate).T
    return MelSpectrogram(np.log(np.maximum(mel, LOG_FLOOR)), cfg, w.sample_rate)


def extract_energy(w: Waveform, cfg: StftConfig = StftConfig()) -> np.ndarray:
    """Per-frame L2 norm of the magnitude spectrum."""
    return np.linalg.norm(stft_magnitude(w, cfg), axis=1)


def _nccf(frames: np.ndarray, lags: np.ndarray) -> np.ndarray:
    """Normalised cross-correlation of each frame with its lagged self, ``(T, len(lags))``."""
    size = frames.shape[1]
    sq = np.concatenate([np.zeros((frames.shape[0], 1)), np.cumsum(frames**2, axis=1)], axis=1)
    out = np.zeros((frames.shape[0], len(lags)))
    for k, lag in enumerate(lags):
        num = np.einsum("ij,ij->i", frames[:, : size - lag], frames[:, lag:])
        e_head = sq[:, size - lag]
        e_tail = sq[:, size] - sq[:, lag]
        den = np.sqrt(e_head * e_tail)
        out[:, k] = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return out


def _pick_lag(r: np.ndarray, lags: np.ndarray) -> tuple[float, float]:
    best = int(np.argmax(r))
    peak = r[best]
    # guard against octave errors: multiples of the period score almost as high
    for k in range(1, len(r) - 1):
        if r[k] >= OCTAVE_TOLERANCE * peak and r[k] >= r[k - 1] and r[k] >= r[k + 1]:
            best = k
            break
    lag = float(lags[best])
    if 0 < best < len(r) - 1:
        a, b, c = r[best - 1], r[best], r[best + 1]
        denom = a - 2 * b + c
        if denom < 0:
            lag += 0.5 * (a - c) / denom
    return lag, float(r[best])


def extract_f0(w: Waveform, cfg: StftConfig = StftConfig()) -> tuple[np.ndarray, np.ndarray]:
    """Autocorrelation pitch tracker on the STFT framing.

    Returns ``(pitch, voicing)`` where pitch is natural-log Hz on voiced frames
    and 0 elsewhere.
    """
    _check(w, cfg)
    sr = w.sample_rate
    frames = frame_signal(w.samples, cfg)
    frames = frames - frames.mean(axis=1, keepdims=True)
    # one extra lag on each side so peaks at the band edges are still local maxima
    min_lag = max(1, int(np.floor(sr / F0_MAX_HZ)) - 1)
    max_lag = min(cfg.fft_size // 2, int(np.ceil(sr / F0_MIN_HZ)) + 1)
    count = frames.shape[0]
    pitch = np.zeros(count)
    voicing = np.zeros(count, dtype=bool)
    if max_lag <= min_lag + 1:
        return pitch, voicing

    lags = np.arange(min_lag, max_lag + 1)
    rms = np.sqrt(np.mean(frames**2, axis=1))
    r = _nccf(frames, lags)
    for t in range(count):
        if rms[t] < RMS_THRESHOLD:
            continue
        lag, clarity = _pick_lag(r[t], lags)
        f0 = sr / lag
        if clarity >= CLARITY_THRESHOLD and F0_MIN_HZ * 0.95 <= f0 <= F0_MAX_HZ * 1.05:
            voicing[t] = True
            pitch[t] = np.log(f0)
    return pitch, voicing


def frame_variance(w: Waveform, cfg: StftConfig = StftConfig()) -> FrameVariance:
    pitch, voicing = extract_f0(w, cfg)
    return FrameVariance(pitch=pitch, voicing=voicing, energy=extract_energy(w, cfg))
