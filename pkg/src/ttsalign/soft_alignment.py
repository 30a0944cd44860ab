"""Pairwise token/frame distances, softmax soft alignment and the beta-binomial prior."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import betaln, gammaln, log_softmax

from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class SoftAlignment:
    """``N x T`` token-given-frame distribution; every column is normalised."""

    probs: np.ndarray
    in_log_domain: bool = True

    @property
    def log_probs(self) -> np.ndarray:
        if self.in_log_domain:
            return self.probs
        with np.errstate(divide="ignore"):
            return np.log(self.probs)

    @property
    def linear(self) -> np.ndarray:
        return np.exp(self.probs) if self.in_log_domain else self.probs

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape


@dataclass(frozen=True)
class BetaBinomialPrior:
    log_prior: np.ndarray
    omega: float = 1.0


def _as_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty rows x dim matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} contains non-finite entries")
    return arr


def distance_matrix(h_enc, m_enc) -> np.ndarray:
    """Euclidean distance between every token row of ``h_enc`` and frame row of ``m_enc``.

    Returns an ``N x T`` matrix.
    """
    h = _as_matrix(h_enc, "h_enc")
    m = _as_matrix(m_enc, "m_enc")
    if h.shape[1] != m.shape[1]:
        raise ShapeError(f"embedding widths differ: {h.shape[1]} vs {m.shape[1]}")
    return np.linalg.norm(h[:, None, :] - m[None, :, :], axis=-1)


def soft_align(D, prior: Optional[BetaBinomialPrior] = None) -> SoftAlignment:
    """Column-wise softmax of ``-D``, fused with ``prior`` in log space when given."""
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or not np.all(np.isfinite(D)):
        raise ShapeError("distance matrix must be a finite 2-D array")
    logits = -D
    if prior is not None:
        if prior.log_prior.shape != D.shape:
            raise ShapeError(
                f"prior shape {prior.log_prior.shape} does not match distances {D.shape}"
            )
        logits = logits + prior.log_prior
    return SoftAlignment(log_softmax(logits, axis=0), in_log_domain=True)


def beta_binomial_prior(n_tokens: int, n_frames: int, omega: float = 1.0) -> BetaBinomialPrior:
    """Static near-diagonal prior over tokens for each frame.

    Column ``j`` is the BetaBinomial(n=N-1, a=omega*(j+1), b=omega*(T-j)) pmf
    evaluated at token indices ``0..N-1``.
    """
    if n_tokens < 1 or n_frames < 1:
        raise ConfigError(f"need N >= 1 and T >= 1, got N={n_tokens}, T={n_frames}")
    if not omega > 0:
        raise ConfigError(f"omega must be positive, got {omega}")
    n = n_tokens - 1
    k = np.arange(n_tokens)[:, None]
    j = np.arange(n_frames)[None, :]
    a = omega * (j + 1)
    b = omega * (n_frames - j)
    log_comb = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    log_pmf = log_comb + betaln(k + a, n - k + b) - betaln(a, b)
    return BetaBinomialPrior(log_pmf, float(omega))
