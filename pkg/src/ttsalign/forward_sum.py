"""Forward-sum likelihood of all monotonic alignments and its gradient.

A valid alignment assigns every frame to one token, visits tokens in order,
starts at the first token, ends at the last and skips none. Equivalently it is
a composition of the ``T`` frames into ``N`` positive durations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError, NoValidAlignmentError, NumericalError, ShapeError

MAX_ENUMERATION_FRAMES = 16


@dataclass(frozen=True)
class ForwardSumResult:
    log_likelihood: float
    loss: float
    grad: np.ndarray  # d loss / d log_probs, equals -posterior occupancy

    @property
    def occupancy(self) -> np.ndarray:
        return -self.grad


def check_lattice(log_probs) -> np.ndarray:
    lp = np.asarray(log_probs, dtype=np.float64)
    if lp.ndim != 2 or lp.shape[0] < 1:
        raise ShapeError(f"lattice must be an N x T matrix, got shape {lp.shape}")
    n, t = lp.shape
    if t < n:
        raise NoValidAlignmentError(f"no valid alignment: {t} frames for {n} tokens")
    if np.any(np.isnan(lp)) or np.any(lp == np.inf):
        raise ShapeError("lattice holds NaN or +inf entries")
    return lp


def forward_log_alpha(lp: np.ndarray) -> np.ndarray:
    """``alpha[n, t]``: log mass of partial alignments ending at token n on frame t."""
    n_tok, n_frm = lp.shape
    alpha = np.full((n_tok, n_frm), -np.inf)
    alpha[0, 0] = lp[0, 0]
    for t in range(1, n_frm):
        prev = alpha[:, t - 1]
        advance = np.concatenate(([-np.inf], prev[:-1]))
        alpha[:, t] = lp[:, t] + np.logaddexp(prev, advance)
    return alpha


def backward_log_beta(lp: np.ndarray) -> np.ndarray:
    """``beta[n, t]``: log mass of completions from (n, t), excluding frame t's own score."""
    n_tok, n_frm = lp.shape
    beta = np.full((n_tok, n_frm), -np.inf)
    beta[-1, -1] = 0.0
    for t in range(n_frm - 2, -1, -1):
        nxt = beta[:, t + 1] + lp[:, t + 1]
        advance = np.concatenate((nxt[1:], [-np.inf]))
        beta[:, t] = np.logaddexp(nxt, advance)
    return beta


def forward_sum(log_probs) -> ForwardSumResult:
    lp = check_lattice(log_probs)
    alpha = forward_log_alpha(lp)
    log_z = alpha[-1, -1]
    if not np.isfinite(log_z):
        raise NumericalError("every monotonic alignment has zero probability")
    beta = backward_log_beta(lp)
    with np.errstate(invalid="ignore"):
        occupancy = np.exp(alpha + beta - log_z)
    occupancy = np.nan_to_num(occupancy, nan=0.0)
    return ForwardSumResult(float(log_z), float(-log_z), -occupancy)


def enumerate_alignments(n_tokens: int, n_frames: int) -> list[list[int]]:
    """All duration vectors of ``n_tokens`` positive parts summing to ``n_frames``, lexicographic."""
    if not 1 <= n_tokens <= n_frames <= MAX_ENUMERATION_FRAMES:
        raise ConfigError(
            f"enumeration needs 1 <= N <= T <= {MAX_ENUMERATION_FRAMES}, "
            f"got N={n_tokens}, T={n_frames}"
        )
    out = []
    for cuts in itertools.combinations(range(1, n_frames), n_tokens - 1):
        bounds = (0,) + cuts + (n_frames,)
        out.append([bounds[i + 1] - bounds[i] for i in range(n_tokens)])
    return sorted(out)


def durations_to_path(durations) -> np.ndarray:
    """Token index for every frame."""
    return np.repeat(np.arange(len(durations)), durations)


def path_log_score(log_probs, durations) -> float:
    lp = np.asarray(log_probs, dtype=np.float64)
    path = durations_to_path(durations)
    return float(lp[path, np.arange(lp.shape[1])].sum())


def brute_force_log_likelihood(log_probs) -> float:
    """Reference ``log P`` by summing over every alignment; small lattices only."""
    lp = check_lattice(log_probs)
    scores = [path_log_score(lp, d) for d in enumerate_alignments(*lp.shape)]
    return float(logsumexp(scores))
