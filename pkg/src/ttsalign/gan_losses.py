"""Least-squares GAN objectives, feature matching, mel L1 and loss composition.

Score reduction: every function below takes the outputs of one discriminator
group (e.g. all sub-discriminators of a multi-period discriminator) and
reduces them by a global mean over all elements. Sum the results across
groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError, ShapeError
from .features import StftConfig, mel_spectrogram
from .io import Waveform


@dataclass(frozen=True)
class LossWeights:
    lambda_fm: float = 2.0
    lambda_mel: float = 45.0
    lambda_var: float = 1.0
    lambda_align: float = 2.0

    def __post_init__(self):
        for name in ("lambda_fm", "lambda_mel", "lambda_var", "lambda_align"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")


@dataclass
class DiscriminatorOutputs:
    scores: list = field(default_factory=list)
    features: list = field(default_factory=list)


def _flatten_scores(scores) -> np.ndarray:
    if isinstance(scores, DiscriminatorOutputs):
        scores = scores.scores
    if isinstance(scores, np.ndarray) or np.isscalar(scores):
        parts = [np.ravel(scores)]
    else:
        parts = [np.ravel(np.asarray(s, dtype=np.float64)) for s in scores]
    flat = np.concatenate(parts) if parts else np.empty(0)
    if flat.size == 0:
        raise ShapeError("empty discriminator scores")
    return flat.astype(np.float64)


def lsgan_generator_loss(fake_scores) -> float:
    return float(np.mean((_flatten_scores(fake_scores) - 1.0) ** 2))


def lsgan_discriminator_loss(real_scores, fake_scores) -> float:
    real = _flatten_scores(real_scores)
    fake = _flatten_scores(fake_scores)
    return float(np.mean((real - 1.0) ** 2) + np.mean(fake**2))


def feature_matching_loss(real_features, fake_features) -> float:
    """Sum over sub-discriminators of the layer-averaged mean absolute feature difference."""
    if isinstance(real_features, DiscriminatorOutputs):
        real_features = real_features.features
    if isinstance(fake_features, DiscriminatorOutputs):
        fake_features = fake_features.features
    if len(real_features) != len(fake_features):
        raise ShapeError("real and fake feature lists differ in length")
    total = 0.0
    for real_layers, fake_layers in zip(real_features, fake_features):
        if len(real_layers) != len(fake_layers) or not real_layers:
            raise ShapeError("sub-discriminator layer counts differ or are empty")
        per_layer = []
        for r, f in zip(real_layers, fake_layers):
            r, f = np.asarray(r, float), np.asarray(f, float)
            if r.shape != f.shape:
                raise ShapeError(f"feature shapes differ: {r.shape} vs {f.shape}")
            per_layer.append(np.mean(np.abs(r - f)))
        total += float(np.mean(per_layer))
    return total


def mel_l1_loss(wave_a: Waveform, wave_b: Waveform, cfg: StftConfig = StftConfig()) -> float:
    if wave_a.sample_rate != wave_b.sample_rate or len(wave_a) != len(wave_b):
        raise ShapeError("waveforms must share length and sample rate")
    a = mel_spectrogram(wave_a, cfg).frames
    b = mel_spectrogram(wave_b, cfg).frames
    return float(np.mean(np.abs(a - b)))


def _finite(*values: float) -> None:
    if not all(math.isfinite(v) for v in values):
        raise NumericalError(f"non-finite loss component in {values}")


def generator_loss(adv: float, fm: float, mel: float, w: LossWeights = LossWeights()) -> float:
    _finite(adv, fm, mel)
    return adv + w.lambda_fm * fm + w.lambda_mel * mel


def total_loss(l_g: float, l_var: float, l_align: float, w: LossWeights = LossWeights()) -> float:
    _finite(l_g, l_var, l_align)
    return l_g + w.lambda_var * l_var + w.lambda_align * l_align
