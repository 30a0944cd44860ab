import math

import numpy as np
import pytest
from scipy.special import log_softmax

from conftest import compositions, path_score, random_log_lattice
from ttsalign.errors import ConfigError, NoValidAlignmentError, NumericalError, ShapeError
from ttsalign.forward_sum import enumerate_alignments, forward_sum


def brute_log_likelihood(lp):
    scores = [path_score(lp, d) for d in compositions(lp.shape[1], lp.shape[0])]
    top = max(scores)
    return top + math.log(sum(math.exp(s - top) for s in scores))


class TestEnumerate:
    def test_examples(self):
        assert enumerate_alignments(2, 3) == [[1, 2], [2, 1]]
        assert enumerate_alignments(1, 5) == [[5]]
        assert len(enumerate_alignments(3, 5)) == math.comb(4, 2) == 6

    @pytest.mark.parametrize("n,t", [(1, 1), (2, 6), (4, 9), (5, 12)])
    def test_against_recursive(self, n, t):
        got = enumerate_alignments(n, t)
        assert got == sorted(compositions(t, n))
        assert len(got) == math.comb(t - 1, n - 1)

    @pytest.mark.parametrize("n,t", [(0, 3), (4, 3), (2, 17)])
    def test_out_of_range(self, n, t):
        with pytest.raises(ConfigError):
            enumerate_alignments(n, t)


class TestForwardSum:
    def test_single_token(self):
        res = forward_sum(np.zeros((1, 3)))
        assert res.log_likelihood == 0.0 and res.loss == 0.0

    def test_two_by_three(self, rng):
        lp = random_log_lattice(rng, 2, 3)
        a = np.exp(lp)
        expected = a[0, 0] * a[0, 1] * a[1, 2] + a[0, 0] * a[1, 1] * a[1, 2]
        assert forward_sum(lp).log_likelihood == pytest.approx(math.log(expected), abs=1e-12)

    def test_matches_brute_force(self, rng):
        for n in range(1, 6):
            for t in range(n, 9):
                lp = random_log_lattice(rng, n, t)
                assert abs(forward_sum(lp).log_likelihood - brute_log_likelihood(lp)) <= 1e-9

    def test_diagonal(self, rng):
        lp = random_log_lattice(rng, 6, 6)
        assert forward_sum(lp).log_likelihood == pytest.approx(np.trace(lp), abs=1e-12)

    def test_gradient_finite_differences(self, rng):
        lp = random_log_lattice(rng, 4, 7)
        grad = forward_sum(lp).grad
        eps = 1e-5
        fd = np.zeros_like(lp)
        for idx in np.ndindex(lp.shape):
            up, down = lp.copy(), lp.copy()
            up[idx] += eps
            down[idx] -= eps
            fd[idx] = (forward_sum(up).loss - forward_sum(down).loss) / (2 * eps)
        assert np.max(np.abs(fd - grad)) / np.max(np.abs(grad)) <= 1e-4

    def test_grad_range_and_occupancy(self, rng):
        res = forward_sum(random_log_lattice(rng, 5, 13))
        assert np.all(res.grad <= 0) and np.all(res.grad >= -1)
        np.testing.assert_allclose(-res.grad.sum(axis=0), 1.0, atol=1e-6)

    def test_log_likelihood_nonpositive(self, rng):
        for _ in range(20):
            assert forward_sum(random_log_lattice(rng, 3, 10)).log_likelihood <= 1e-12

    def test_monotone_improvement(self, rng):
        # descend on column logits, lattice = column log-softmax of the logits
        for _ in range(100):
            logits = rng.normal(scale=2.0, size=(4, 9))
            lp = log_softmax(logits, axis=0)
            res = forward_sum(lp)
            grad_logits = res.grad - np.exp(lp) * res.grad.sum(axis=0, keepdims=True)
            stepped = log_softmax(logits - 1e-3 * grad_logits, axis=0)
            assert forward_sum(stepped).loss <= res.loss + 1e-12

    def test_long_utterance_is_stable(self, rng):
        res = forward_sum(random_log_lattice(rng, 80, 600))
        assert np.isfinite(res.loss) and np.all(np.isfinite(res.grad))
        np.testing.assert_allclose(-res.grad.sum(axis=0), 1.0, atol=1e-6)

    def test_neg_inf_entries_allowed(self, rng):
        lp = random_log_lattice(rng, 3, 6)
        lp[2, 0] = -np.inf  # unreachable cell anyway
        lp[0, 3] = -np.inf
        assert forward_sum(lp).log_likelihood == pytest.approx(brute_log_likelihood(lp), abs=1e-9)

    def test_errors(self):
        with pytest.raises(NoValidAlignmentError):
            forward_sum(np.zeros((4, 3)))
        with pytest.raises(ShapeError):
            forward_sum(np.array([[0.0, np.nan]]))
        with pytest.raises(NumericalError):
            forward_sum(np.full((2, 3), -np.inf))
