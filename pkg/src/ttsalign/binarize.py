"""Monotonic alignment search, durations and the alignment losses built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .errors import NumericalError, SaturationError, ShapeError
from .forward_sum import ForwardSumResult, check_lattice, forward_sum
from .soft_alignment import SoftAlignment

Reduction = Literal["sum", "mean"]


@dataclass(frozen=True)
class HardAlignment:
    mask: np.ndarray  # N x T, one 1 per column
    durations: np.ndarray

    @classmethod
    def from_durations(cls, durations) -> "HardAlignment":
        d = np.asarray(durations, dtype=np.int64)
        if d.ndim != 1 or d.size == 0 or np.any(d < 1):
            raise ShapeError(f"durations must be positive integers, got {durations!r}")
        path = np.repeat(np.arange(d.size), d)
        mask = np.zeros((d.size, path.size), dtype=np.int8)
        mask[path, np.arange(path.size)] = 1
        return cls(mask, d)

    @property
    def path(self) -> np.ndarray:
        return np.argmax(self.mask, axis=0)


def mas(log_probs) -> HardAlignment:
    """Most probable monotonic, complete alignment (Viterbi).

    On ties the backtrace takes the diagonal (token-advancing) move.
    """
    lp = check_lattice(log_probs)
    n_tok, n_frm = lp.shape
    q = np.full((n_tok, n_frm), -np.inf)
    q[0, 0] = lp[0, 0]
    for t in range(1, n_frm):
        prev = q[:, t - 1]
        advance = np.concatenate(([-np.inf], prev[:-1]))
        q[:, t] = lp[:, t] + np.maximum(prev, advance)
    if not np.isfinite(q[-1, -1]):
        raise NumericalError("every monotonic alignment has zero probability")

    path = np.empty(n_frm, dtype=np.int64)
    n = n_tok - 1
    path[-1] = n
    for t in range(n_frm - 1, 0, -1):
        if n > 0 and (n == t or q[n - 1, t - 1] >= q[n, t - 1]):
            n -= 1
        path[t - 1] = n
    return HardAlignment.from_durations(np.bincount(path, minlength=n_tok))


def binarization_loss(
    soft: Union[SoftAlignment, np.ndarray],
    hard: HardAlignment,
    reduction: Reduction = "sum",
) -> float:
    """Cross-entropy of the soft alignment against the hard path, ``-sum(A_hard * log A_soft)``.

    ``soft`` may be a SoftAlignment or a raw log-probability matrix.
    Raises SaturationError when the hard path crosses a zero-probability cell.
    """
    log_soft = soft.log_probs if isinstance(soft, SoftAlignment) else np.asarray(soft, float)
    if log_soft.shape != hard.mask.shape:
        raise ShapeError(f"soft shape {log_soft.shape} != hard shape {hard.mask.shape}")
    picked = log_soft[hard.path, np.arange(log_soft.shape[1])]
    if np.any(picked == -np.inf):
        raise SaturationError("hard path selects a cell with zero soft probability")
    total = -float(picked.sum())
    if reduction == "mean":
        return total / log_soft.shape[1]
    if reduction != "sum":
        raise ValueError(f"unknown reduction {reduction!r}")
    return total


@dataclass(frozen=True)
class AlignmentLoss:
    total: float
    forward_sum_loss: float
    binarization_loss: float
    hard: HardAlignment
    forward: ForwardSumResult

    def __iter__(self):
        # unpacks as (L_align, hard alignment, forward-sum result)
        return iter((self.total, self.hard, self.forward))


def alignment_loss(log_probs, reduction: Reduction = "sum") -> AlignmentLoss:
    """``L_align = L_forward_sum + L_bin`` on one lattice, with the intermediates."""
    lp = check_lattice(log_probs)
    fs = forward_sum(lp)
    hard = mas(lp)
    l_bin = binarization_loss(lp, hard, reduction=reduction)
    return AlignmentLoss(fs.loss + l_bin, fs.loss, l_bin, hard, fs)
