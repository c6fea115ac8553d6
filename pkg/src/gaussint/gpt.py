"""Gaussian product theorem: composite exponent, center and prefactor.

Displacements follow ``PA = P - A`` so that ``x - A_x = x_P + PA_x`` and the
binomial expansion carries no alternating signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis_core import LMAX


@dataclass(frozen=True)
class GaussianPair:
    alpha1: float
    alpha2: float
    A: np.ndarray
    B: np.ndarray
    gamma: float
    P: np.ndarray
    K: float
    PA: np.ndarray
    PB: np.ndarray
    AB2: float

    @property
    def AB(self) -> np.ndarray:
        return self.A - self.B

    def relative_to(self, C) -> np.ndarray:
        """P - C, formed as PA + (A - C) to keep digits far from the origin."""
        return self.PA + (self.A - np.asarray(C, dtype=float))


def make_pair(alpha1: float, A, alpha2: float, B) -> GaussianPair:
    if not (alpha1 > 0 and alpha2 > 0):
        raise ValueError("exponents must be positive")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    gamma = alpha1 + alpha2
    P = (alpha1 * A + alpha2 * B) / gamma
    d = A - B
    ab2 = float(d @ d)
    K = math.exp(-alpha1 * alpha2 * ab2 / gamma)
    # PA and PB from the separation directly; P - A loses digits when A is large
    PA = -(alpha2 / gamma) * d
    PB = (alpha1 / gamma) * d
    return GaussianPair(alpha1, alpha2, A, B, gamma, P, K, PA, PB, ab2)


@lru_cache(maxsize=None)
def _pascal(nmax: int) -> tuple[tuple[int, ...], ...]:
    rows = [(1,)]
    for n in range(1, nmax + 1):
        prev = rows[-1]
        rows.append(tuple(1 if k in (0, n) else prev[k - 1] + prev[k] for k in range(n + 1)))
    return tuple(rows)


def binom(n: int, k: int) -> int:
    # table grows past the default size only when a caller asks for it
    table = _pascal(max(2 * LMAX, n))
    return table[n][k]


def _check(k: int, l1: int, l2: int) -> None:
    if l1 < 0 or l2 < 0:
        raise ValueError("angular momenta must be non-negative")
    if not 0 <= k <= l1 + l2:
        raise ValueError(f"k={k} outside 0..{l1 + l2}")


def binomial_prefactor(k: int, l1: int, l2: int, pa: float, pb: float) -> float:
    """Coefficient of x^k in (x + pa)^l1 (x + pb)^l2, as a constrained double sum."""
    _check(k, l1, l2)
    total = 0.0
    for i in range(l1 + 1):
        j = k - i
        if 0 <= j <= l2:
            total += binom(l1, i) * pa ** (l1 - i) * binom(l2, j) * pb ** (l2 - j)
    return total


def binomial_prefactor_single_sum(k: int, l1: int, l2: int, pa: float, pb: float) -> float:
    """Same coefficient as :func:`binomial_prefactor`, summed over q = i - j.

    q runs from max(-k, k - 2*l2) to min(k, 2*l1 - k) in steps of 2 with the
    parity of k, so that i = (k+q)/2 and j = (k-q)/2 are integers.
    """
    _check(k, l1, l2)
    qlo = max(-k, k - 2 * l2)
    if (k + qlo) % 2:
        qlo += 1
    qhi = min(k, 2 * l1 - k)
    total = 0.0
    for q in range(qlo, qhi + 1, 2):
        i = (k + q) // 2
        j = (k - q) // 2
        total += binom(l1, i) * binom(l2, j) * pa ** (l1 - i) * pb ** (l2 - j)
    return total


def product_expansion(pair: GaussianPair, n1, n2, points: np.ndarray) -> np.ndarray:
    """Evaluate G1*G2 via the expanded product form at (..., 3) points."""
    r = np.asarray(points, dtype=float) - pair.P
    out = pair.K * np.exp(-pair.gamma * np.einsum("...i,...i->...", r, r))
    for axis in range(3):
        l1, l2 = n1[axis], n2[axis]
        poly = sum(
            binomial_prefactor_single_sum(k, l1, l2, pair.PA[axis], pair.PB[axis]) * r[..., axis] ** k
            for k in range(l1 + l2 + 1)
        )
        out = out * poly
    return out
