"""Rys quadrature for the weight exp(-T t^2) on [0, 1].

Working in u = t^2 the weight's moments are exactly the Boys values,
m_k = F_k(T). The three-term recurrence of the orthonormal polynomials is
recovered from those moments by Chebyshev's algorithm, and the Gauss rule
follows from the eigen-decomposition of the resulting Jacobi matrix. Nodes
are mapped back with t = sqrt(u).

Moment-based construction loses accuracy quickly as n grows, which is why
the supported range stops at ten points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .boys import boys_values

N_MAX = 10


@dataclass(frozen=True)
class RysRule:
    n: int
    T: float
    nodes: np.ndarray
    weights: np.ndarray

    def integrate_even(self, m: int) -> float:
        """sum_i t_i^(2m) W_i, which equals F_m(T) for m <= 2n - 1."""
        return float(np.sum(self.nodes ** (2 * m) * self.weights))


def _chebyshev(moments: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Recurrence coefficients (a_k, b_k), k < n, from 2n raw moments."""
    a = np.zeros(n)
    b = np.zeros(n)
    prev = np.zeros(2 * n)
    cur = moments[: 2 * n].astype(float).copy()
    a[0] = cur[1] / cur[0]
    b[0] = cur[0]
    for k in range(1, n):
        nxt = np.zeros(2 * n)
        for l in range(k, 2 * n - k):
            nxt[l] = cur[l + 1] - a[k - 1] * cur[l] - b[k - 1] * prev[l]
        a[k] = nxt[k + 1] / nxt[k] - cur[k] / cur[k - 1]
        b[k] = nxt[k] / cur[k - 1]
        prev, cur = cur, nxt
    return a, b


def rys_rule(n: int, T: float) -> RysRule:
    if not 1 <= n <= N_MAX:
        raise ValueError(f"Rys rule supports 1 <= n <= {N_MAX}, got {n}")
    T = float(T)
    moments = boys_values(2 * n - 1, T)
    a, b = _chebyshev(moments, n)
    if np.any(b[1:] <= 0):
        raise ArithmeticError(f"moment sequence lost positivity at n={n}, T={T}")
    u, vecs = eigh_tridiagonal(a, np.sqrt(b[1:]))
    weights = b[0] * vecs[0] ** 2
    return RysRule(n, T, np.sqrt(u), weights)


def eri_ssss_via_rys(geom) -> float:
    """(ss|ss) from a one-point rule: C0 * W_1, with C0 the (ss|ss) prefactor."""
    rule = rys_rule(1, geom.T)
    c0 = (
        2.0 * math.pi**2.5 * geom.K1 * geom.K2
        / (geom.zeta * geom.eta * math.sqrt(geom.zeta + geom.eta))
    )
    return c0 * float(rule.weights[0])
