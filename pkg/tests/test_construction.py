import itertools

import numpy as np
import pytest

from polarkit import (CodeSpec, PuncturingPattern, ReliabilityVector,
                      bec_bhattacharyya, bit_reversal_permutation,
                      frozen_complement, ga_llr_means, noise_variance,
                      select_information_set)
from polarkit.construction import ga_phi, ga_phi_inv


def analytic_n4_pattern1(eps):
    return np.array([1.0, 2 * eps - eps**2, eps + eps**2 - eps**3, eps**3])


def test_bec_n4_analytic_values():
    spec = CodeSpec(4, 2)
    for eps in (0.1, 0.3, 0.5, 0.9):
        z = bec_bhattacharyya(spec, eps, PuncturingPattern(4, (1,)))
        assert np.allclose(z.values, analytic_n4_pattern1(eps), atol=1e-12)


def test_bec_first_and_last_pattern_equivalent():
    for n in (4, 8):
        spec = CodeSpec(n, n // 2)
        for eps in (0.2, 0.5, 0.8):
            z1 = bec_bhattacharyya(spec, eps, PuncturingPattern(n, (1,)))
            zn = bec_bhattacharyya(spec, eps, PuncturingPattern(n, (n,)))
            assert np.allclose(z1.values, zn.values, atol=1e-12)


def test_bec_perfect_channel():
    z = bec_bhattacharyya(CodeSpec(4, 2), 0.0, PuncturingPattern(4, ()))
    assert np.array_equal(z.values, np.zeros(4))


def test_bec_epsilon_validation():
    with pytest.raises(ValueError):
        bec_bhattacharyya(CodeSpec(4, 2), 1.5, PuncturingPattern(4, ()))


def test_bec_erasure_conservation():
    # the pairwise recursion preserves the metric sum layer by layer
    rng = np.random.default_rng(3)
    for n in (4, 16, 64):
        spec = CodeSpec(n, n // 2)
        n_p = int(rng.integers(0, n // 2))
        punct = tuple(sorted(rng.choice(np.arange(1, n + 1), size=n_p,
                                        replace=False))) if n_p else ()
        eps = float(rng.uniform(0.1, 0.9))
        z = bec_bhattacharyya(spec, eps, PuncturingPattern(n, punct))
        leaf_sum = n_p * 1.0 + (n - n_p) * eps
        assert np.isclose(z.values.sum(), leaf_sum, atol=1e-9)


def brute_force_bec_erasure(spec, eps, pattern):
    """Independent oracle: enumerate every erasure configuration of the coded
    bits and propagate known/erased flags through the decoding tree."""
    n = spec.n_mother
    perm = bit_reversal_permutation(spec.m)
    p_erase = np.full(n, eps)
    p_erase[pattern.zero_based()] = 1.0

    def walk(erased):
        if erased.size == 1:
            return erased.astype(float)
        half = erased.size // 2
        a, b = erased[:half], erased[half:]
        return np.concatenate([walk(a | b), walk(a & b)])

    total = np.zeros(n)
    for mask in itertools.product([False, True], repeat=n):
        mask = np.array(mask)
        prob = np.prod(np.where(mask, p_erase, 1.0 - p_erase))
        if prob == 0.0:
            continue
        total += prob * walk(mask[perm])
    return total


def test_bec_against_enumeration_oracle():
    spec = CodeSpec(4, 2)
    for punct in ((), (1,), (2,), (3,)):
        for eps in (0.3, 0.7):
            expected = brute_force_bec_erasure(spec, eps, PuncturingPattern(4, punct))
            got = bec_bhattacharyya(spec, eps, PuncturingPattern(4, punct))
            assert np.allclose(got.values, expected, atol=1e-12), (punct, eps)


def test_ga_phi_basics():
    assert ga_phi(0.0) == 1.0
    xs = np.linspace(0.01, 40, 200)
    for x in (0.5, 3.0, 9.0, 15.0, 60.0):
        assert abs(ga_phi_inv(ga_phi(x)) - x) < 1e-6 * max(x, 1.0)
    # decreasing within each piece
    vals = [ga_phi(x) for x in xs]
    assert vals[0] > vals[-1]


def test_ga_n2_trivial_cases():
    spec = CodeSpec(2, 1)
    rel = ga_llr_means(spec, 0.0, PuncturingPattern(2, ()), 0.5)
    mu = 2.0 / noise_variance(0.0, 0.5)
    assert np.isclose(rel.values[1], 2 * mu, rtol=1e-12)  # lower = sum
    rel_p = ga_llr_means(spec, 0.0, PuncturingPattern(2, (1,)), 0.5)
    assert rel_p.values[0] == 0.0  # upper branch dies with an erased leaf


def test_ga_n4_pattern1_signs():
    spec = CodeSpec(4, 2)
    rel = ga_llr_means(spec, 2.0, PuncturingPattern(4, (1,)), 0.75)
    assert rel.values[0] == 0.0
    assert np.all(rel.values[1:] > 0.0)


def test_ga_monotone_in_design_snr():
    rng = np.random.default_rng(9)
    spec = CodeSpec(16, 8)
    for _ in range(5):
        n_p = int(rng.integers(1, 6))
        punct = tuple(sorted(rng.choice(np.arange(1, 17), size=n_p, replace=False)))
        lo = ga_llr_means(spec, 1.0, PuncturingPattern(16, punct), 0.6)
        hi = ga_llr_means(spec, 3.0, PuncturingPattern(16, punct), 0.6)
        assert np.all(hi.values >= lo.values - 1e-9)


def test_noise_variance_example():
    assert noise_variance(0.0, 0.5) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        noise_variance(1.0, 0.0)


def test_select_information_set_examples():
    eps = 0.5
    rel = ReliabilityVector(analytic_n4_pattern1(eps), "bhattacharyya")
    assert select_information_set(rel, 2) == (3, 4)
    assert select_information_set(rel, 4) == (1, 2, 3, 4)
    flat = ReliabilityVector(np.ones(4), "bhattacharyya")
    assert select_information_set(flat, 2) == (1, 2)
    with pytest.raises(ValueError):
        select_information_set(rel, 5)


def test_select_information_set_llr_kind():
    rel = ReliabilityVector(np.array([0.5, 3.0, 2.0, 3.0]), "llr_mean")
    assert select_information_set(rel, 2) == (2, 4)
    assert select_information_set(rel, 3) == (2, 3, 4)


def test_select_is_deterministic():
    rng = np.random.default_rng(1)
    vals = rng.uniform(size=32)
    rel = ReliabilityVector(vals, "bhattacharyya")
    picks = {select_information_set(rel, 10) for _ in range(5)}
    assert len(picks) == 1


def test_frozen_complement():
    spec = CodeSpec(8, 4)
    assert frozen_complement(spec, (4, 6, 7, 8)) == (1, 2, 3, 5)


def test_reliability_vector_kind_validation():
    with pytest.raises(ValueError):
        ReliabilityVector(np.ones(4), "nonsense")
