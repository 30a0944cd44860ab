"""Token-level variance targets, the variance loss and duration-driven upsampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import softmax

from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class TokenVariance:
    pitch: np.ndarray
    energy: np.ndarray


@dataclass(frozen=True)
class UpsampleConfig:
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")


def _durations(durations) -> np.ndarray:
    d = np.asarray(durations)
    if d.ndim != 1 or d.size == 0:
        raise ShapeError("durations must be a non-empty 1-D sequence")
    if not np.all(d == np.round(d)) or np.any(d < 1):
        raise ShapeError(f"durations must be positive integers, got {d.tolist()}")
    return d.astype(np.int64)


def token_average(frame_values, durations, voicing=None) -> np.ndarray:
    """Average frame values over each token's span.

    With ``voicing`` only voiced frames contribute and a span without any
    voiced frame yields 0.
    """
    x = np.asarray(frame_values, dtype=np.float64)
    d = _durations(durations)
    if x.ndim != 1 or d.sum() != x.size:
        raise ShapeError(f"durations sum to {d.sum()} but there are {x.size} frames")
    token = np.repeat(np.arange(d.size), d)
    if voicing is None:
        weight = np.ones_like(x)
    else:
        weight = np.asarray(voicing, dtype=bool).astype(np.float64)
        if weight.shape != x.shape:
            raise ShapeError("voicing and frame_values lengths differ")
    sums = np.bincount(token, weights=x * weight, minlength=d.size)
    counts = np.bincount(token, weights=weight, minlength=d.size)
    return np.divide(sums, counts, out=np.zeros(d.size), where=counts > 0)


def token_variance(pitch, energy, voicing, durations) -> TokenVariance:
    """Voiced-only averaging for pitch, plain averaging for energy."""
    return TokenVariance(
        pitch=token_average(pitch, durations, voicing=voicing),
        energy=token_average(energy, durations),
    )


def variance_loss(d, p, e, d_hat, p_hat, e_hat) -> float:
    """Sum of L2 norms of the duration, pitch and energy residuals."""
    pairs = [(d, d_hat), (p, p_hat), (e, e_hat)]
    arrays = [(np.asarray(a, float), np.asarray(b, float)) for a, b in pairs]
    n = arrays[0][0].shape
    for a, b in arrays:
        if a.shape != n or b.shape != n:
            raise ShapeError("all variance sequences must have the same length")
    return float(sum(np.linalg.norm(a - b) for a, b in arrays))


def upsample_weights(durations, cfg: UpsampleConfig = UpsampleConfig()) -> np.ndarray:
    """``T x N`` softmax weights of each frame over token centres."""
    d = _durations(durations)
    centers = np.cumsum(d) - d / 2.0
    q = np.arange(d.sum()) + 0.5
    energy = -((q[:, None] - centers[None, :]) ** 2) / (2.0 * cfg.sigma**2)
    return softmax(energy, axis=1)


def gaussian_upsample(h, durations, cfg: UpsampleConfig = UpsampleConfig()) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.ndim == 1:
        h = h[:, None]
    w = upsample_weights(durations, cfg)
    if w.shape[1] != h.shape[0]:
        raise ShapeError(f"{h.shape[0]} token rows but {w.shape[1]} durations")
    return w @ h


def repeat_upsample(h, durations) -> np.ndarray:
    """Hard length regulation: repeat row i ``durations[i]`` times."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim == 1:
        h = h[:, None]
    d = _durations(durations)
    if d.size != h.shape[0]:
        raise ShapeError(f"{h.shape[0]} token rows but {d.size} durations")
    return np.repeat(h, d, axis=0)


def expand_to_frames(token_values, durations, sigma: Optional[float] = None) -> np.ndarray:
    """Convenience: expand a per-token sequence to frames (hard repeat unless ``sigma``)."""
    if sigma is None:
        return repeat_upsample(token_values, durations)[:, 0]
    return gaussian_upsample(token_values, durations, UpsampleConfig(sigma))[:, 0]
