"""Synthetic alignment recovery by gradient descent on the alignment loss.

Token embeddings are fixed; frame embeddings start as noisy copies of their
planted tokens and are treated as free parameters. Each step computes
distances, the prior-fused soft alignment, ``L_forward_sum + L_bin`` and the
exact gradient with respect to the frame embeddings, then takes a plain
gradient-descent step. The run stops once the MAS durations have been stable
for ``patience`` consecutive steps.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.special import log_softmax

from .binarize import alignment_loss
from .errors import ConfigError, DataError, DivergenceError
from .forward_sum import forward_sum
from .soft_alignment import beta_binomial_prior, distance_matrix


@dataclass(frozen=True)
class DemoConfig:
    n_tokens: int = 10
    n_frames: int = 40
    dim: int = 16
    steps: int = 500
    step_size: float = 0.5
    seed: int = 0
    omega: float = 1.0
    use_prior: bool = True
    noise: float = 0.3
    patience: int = 25

    def __post_init__(self):
        if not 1 <= self.n_tokens <= self.n_frames:
            raise ConfigError("need n_frames >= n_tokens >= 1")
        if self.steps < 1 or not self.step_size > 0 or self.dim < 1:
            raise ConfigError("need steps >= 1, step_size > 0 and dim >= 1")
        if self.noise < 0 or self.patience < 1:
            raise ConfigError("need noise >= 0 and patience >= 1")


@dataclass
class DemoReport:
    seed: int
    planted_durations: list
    recovered_durations: list
    loss_trace: list = field(repr=False)
    max_abs_duration_error: int
    initial_max_abs_duration_error: int
    converged: bool
    steps_to_converge: Optional[int]
    steps_run: int

    @property
    def recovered(self) -> bool:
        return self.converged and self.max_abs_duration_error <= 1

    def to_dict(self) -> dict:
        out = asdict(self)
        out["recovered"] = self.recovered
        return out


def random_composition(rng: np.random.Generator, total: int, parts: int) -> np.ndarray:
    """Uniformly random vector of ``parts`` positive integers summing to ``total``."""
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False))
    return np.diff(np.concatenate(([0], cuts, [total])))


def plant_instance(cfg: DemoConfig):
    """Returns ``(h_enc, m_enc, planted_durations)``, deterministic in ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    h = rng.standard_normal((cfg.n_tokens, cfg.dim))
    durations = random_composition(rng, cfg.n_frames, cfg.n_tokens)
    m = np.repeat(h, durations, axis=0) + cfg.noise * rng.standard_normal((cfg.n_frames, cfg.dim))
    return h, m, durations


def _distance_grad(h, m, D, grad_D):
    """Chain ``dL/dD`` through ``D[i, j] = |h_i - m_j|`` to ``dL/dm``; zero where D = 0."""
    scale = np.divide(grad_D, D, out=np.zeros_like(D), where=D > 0)
    return scale.sum(axis=0)[:, None] * m - scale.T @ h


def objective(m, h, log_prior=None, binarization=True):
    """Alignment loss and its gradient with respect to the frame embeddings ``m``.

    Returns ``(loss, grad_m, AlignmentLoss)``. With ``binarization=False`` only
    the forward-sum term is used. The hard path is held constant.
    """
    D = distance_matrix(h, m)
    logits = -D if log_prior is None else log_prior - D
    lp = log_softmax(logits, axis=0)
    if binarization:
        res = alignment_loss(lp)
        loss = res.total
        grad_lp = res.forward.grad - res.hard.mask
    else:
        fs = forward_sum(lp)
        res = None
        loss = fs.loss
        grad_lp = fs.grad
    # back through the column-wise log-softmax
    grad_logits = grad_lp - np.exp(lp) * grad_lp.sum(axis=0, keepdims=True)
    return loss, _distance_grad(h, m, D, -grad_logits), res


def run_demo(cfg: DemoConfig = DemoConfig()) -> DemoReport:
    h, m, planted = plant_instance(cfg)
    log_prior = (
        beta_binomial_prior(cfg.n_tokens, cfg.n_frames, cfg.omega).log_prior
        if cfg.use_prior else None
    )
    trace: list[float] = []
    durations = None
    initial = None
    stable_since = 0
    converged = False
    step = 0
    for step in range(cfg.steps):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                loss, grad, res = objective(m, h, log_prior)
        except DataError as exc:
            if step == 0:
                raise
            raise DivergenceError(f"alignment lattice degenerated at step {step}: {exc}", step) from exc
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise DivergenceError(f"non-finite alignment loss at step {step}", step)
        trace.append(float(loss))
        current = res.hard.durations
        if initial is None:
            initial = current
        if durations is None or not np.array_equal(current, durations):
            durations = current
            stable_since = step
        if step - stable_since + 1 >= cfg.patience:
            converged = True
            break
        with np.errstate(over="ignore", invalid="ignore"):
            m = m - cfg.step_size * grad
        if not np.all(np.isfinite(m)):
            raise DivergenceError(f"frame embeddings diverged at step {step}", step)

    return DemoReport(
        seed=cfg.seed,
        planted_durations=[int(x) for x in planted],
        recovered_durations=[int(x) for x in durations],
        loss_trace=trace,
        max_abs_duration_error=int(np.max(np.abs(durations - planted))),
        initial_max_abs_duration_error=int(np.max(np.abs(initial - planted))),
        converged=converged,
        steps_to_converge=stable_since if converged else None,
        steps_run=step + 1,
    )


def sweep(cfg: DemoConfig, seeds) -> list[DemoReport]:
    return [run_demo(replace(cfg, seed=int(s))) for s in seeds]
