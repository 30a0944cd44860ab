import numpy as np
import pytest

from ttsalign.io import Waveform

SR = 22050


def sine(freq, seconds=1.0, amp=0.5, sr=SR):
    t = np.arange(int(round(seconds * sr))) / sr
    return Waveform(amp * np.sin(2 * np.pi * freq * t), sr)


def random_log_lattice(rng, n, t):
    """Column-normalised random log-probabilities."""
    logits = rng.normal(scale=2.0, size=(n, t))
    return logits - np.log(np.exp(logits).sum(axis=0, keepdims=True))


def compositions(total, parts):
    """Independent recursive enumeration of positive compositions."""
    if parts == 1:
        return [[total]]
    out = []
    for first in range(1, total - parts + 2):
        out += [[first] + rest for rest in compositions(total - first, parts - 1)]
    return out


def path_score(lp, durations):
    """Sequential sum of lattice entries along the hard path."""
    score = 0.0
    t = 0
    for token, d in enumerate(durations):
        for _ in range(d):
            score += lp[token, t]
            t += 1
    return score


def utterance(seed=0, seconds=1.0, sr=SR):
    """Synthetic speech-like signal: gliding harmonic tone with amplitude envelope and pauses."""
    rng = np.random.default_rng(seed)
    n = int(seconds * sr)
    t = np.arange(n) / sr
    f0 = 140 + 40 * np.sin(2 * np.pi * 1.3 * t)
    phase = 2 * np.pi * np.cumsum(f0) / sr
    x = sum(np.sin(k * phase) / k for k in range(1, 6))
    env = np.clip(np.sin(2 * np.pi * 2.0 * t), 0, None) ** 0.5
    x = 0.3 * env * x + 0.003 * rng.standard_normal(n)
    return Waveform(x, sr)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
