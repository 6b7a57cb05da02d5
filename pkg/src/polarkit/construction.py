"""Per-bit-channel reliability under puncturing and information-set selection.

Two metrics are supported: exact Bhattacharyya parameters for the BEC, and
LLR means propagated with the Gaussian approximation for BPSK over AWGN.
Both walk the same recursion as the decoder: leaf metrics sit on the coded
bits, are permuted by bit reversal, and evolve layer by layer back to the
input bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CodeSpec, bit_reversal_permutation
from .puncturing import PuncturingPattern

BHATTACHARYYA = "bhattacharyya"
LLR_MEAN = "llr_mean"


@dataclass(frozen=True)
class ReliabilityVector:
    """Per input-bit-channel reliability metric, in input order.

    kind 'bhattacharyya': lower is better.  kind 'llr_mean': higher is better.
    """

    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in (BHATTACHARYYA, LLR_MEAN):
            raise ValueError(f"unknown reliability kind {self.kind!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))


def _check_pattern(spec: CodeSpec, pattern: PuncturingPattern) -> None:
    if pattern.n_mother != spec.n_mother:
        raise ValueError(f"pattern is for N={pattern.n_mother}, "
                         f"code has N={spec.n_mother}")


def _evolve(leaves: np.ndarray, upper, lower) -> np.ndarray:
    """Run the polar recursion from coded-bit metrics to input-bit metrics.

    ``upper(a, b)`` combines a pair into the degraded (first-decoded) branch,
    ``lower(a, b)`` into the upgraded one.  Leaves must already be in
    bit-reversed order; the result is in natural input order.
    """
    if leaves.size == 1:
        return leaves
    half = leaves.size // 2
    a, b = leaves[:half], leaves[half:]
    return np.concatenate([_evolve(upper(a, b), upper, lower),
                           _evolve(lower(a, b), upper, lower)])


def bec_bhattacharyya(spec: CodeSpec, epsilon: float,
                      pattern: PuncturingPattern) -> ReliabilityVector:
    """Exact Bhattacharyya parameters of the input bit-channels over a BEC.

    Punctured coded bits behave as erased with probability 1; the remaining
    leaves carry ``epsilon``.  The pairwise recursion
    Z_upper = Za + Zb - Za*Zb, Z_lower = Za*Zb is exact for the BEC.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    _check_pattern(spec, pattern)
    z = np.full(spec.n_mother, float(epsilon))
    z[pattern.zero_based()] = 1.0
    z = z[bit_reversal_permutation(spec.m)]
    values = _evolve(z, lambda a, b: a + b - a * b, lambda a, b: a * b)
    return ReliabilityVector(values, BHATTACHARYYA)


# ---------------------------------------------------------------------------
# Gaussian approximation.  phi is the standard two-piece mean transform:
#   phi(x) = exp(-0.4527 x^0.86 + 0.0218)            for 0 < x < 10
#   phi(x) = sqrt(pi/x) exp(-x/4) (1 - 10/(7x))      for x >= 10
# with phi(0) = 1, inverted by bisection.
# ---------------------------------------------------------------------------

_PHI_SPLIT = 10.0


def ga_phi(x: float) -> float:
    if x < 0:
        raise ValueError("phi is defined for x >= 0")
    if x == 0.0:
        return 1.0
    if x < _PHI_SPLIT:
        return math.exp(-0.4527 * x ** 0.86 + 0.0218)
    return math.sqrt(math.pi / x) * math.exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x))


def ga_phi_inv(y: float, rel_tol: float = 1e-9) -> float:
    """Numerical inverse of ga_phi on (0, 1] by bisection."""
    if y >= 1.0:
        return 0.0
    if y <= 0.0:
        raise ValueError("phi_inv needs y in (0, 1]")
    lo, hi = 0.0, 1.0
    while ga_phi(hi) > y:
        hi *= 2.0
        if hi > 1e9:  # phi underflows long before this
            return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ga_phi(mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * max(hi, 1.0):
            break
    return 0.5 * (lo + hi)


def _ga_upper(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    pa = np.array([ga_phi(x) for x in a])
    pb = np.array([ga_phi(x) for x in b])
    # 1 - (1-pa)(1-pb), written to survive pa, pb below double precision
    target = pa + pb - pa * pb
    floor = np.minimum(a, b)  # exact limit once phi underflows entirely
    return np.array([ga_phi_inv(t) if t > 0.0 else lim
                     for t, lim in zip(target, floor)])


def noise_variance(ebn0_db: float, effective_rate: float) -> float:
    """BPSK noise variance for a given Eb/N0 and rate: 1/(2 R 10^(Eb/N0/10))."""
    if not effective_rate > 0:
        raise ValueError(f"effective_rate must be > 0, got {effective_rate}")
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return 1.0 / (2.0 * effective_rate * 10.0 ** (ebn0_db / 10.0))


def ga_llr_means(spec: CodeSpec, design_ebn0_db: float,
                 pattern: PuncturingPattern,
                 effective_rate: float) -> ReliabilityVector:
    """Mean decision LLRs of the input bit-channels under the Gaussian
    approximation, with punctured coded bits entering at mean 0."""
    _check_pattern(spec, pattern)
    sigma2 = noise_variance(design_ebn0_db, effective_rate)
    if sigma2 == 0.0:
        raise ValueError("design Eb/N0 must be finite for the GA construction")
    mu = np.full(spec.n_mother, 2.0 / sigma2)
    mu[pattern.zero_based()] = 0.0
    mu = mu[bit_reversal_permutation(spec.m)]
    values = _evolve(mu, _ga_upper, lambda a, b: a + b)
    return ReliabilityVector(values, LLR_MEAN)


def select_information_set(reliability: ReliabilityVector, k: int) -> tuple[int, ...]:
    """The k most reliable input positions (1-based, sorted ascending).

    Ties break toward the lower index, so selection is deterministic.
    """
    n = reliability.values.size
    if not 0 < k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if reliability.kind == BHATTACHARYYA:
        order = np.argsort(reliability.values, kind="stable")
    else:
        order = np.argsort(-reliability.values, kind="stable")
    chosen = np.sort(order[:k]) + 1
    return tuple(int(i) for i in chosen)


def frozen_complement(spec: CodeSpec, info_set) -> tuple[int, ...]:
    """Input positions not in the information set (1-based, ascending)."""
    info = set(info_set)
    return tuple(i for i in range(1, spec.n_mother + 1) if i not in info)
