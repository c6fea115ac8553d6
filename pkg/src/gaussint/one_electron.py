"""Overlap, kinetic-energy and nuclear-attraction integrals.

Primitive routines take a :class:`~gaussint.gpt.GaussianPair` and two
angular-momentum triples and work on *unnormalized* primitives. Contraction
and normalization happen in the ``*_contracted`` helpers and the matrix
driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis_core import (
    AngularMomentumIndex,
    BasisFunction,
    ContractedShell,
    Molecule,
    basis_functions,
    double_factorial,
)
from .boys import boys_values
from .gpt import GaussianPair, binomial_prefactor_single_sum, make_pair


@dataclass(frozen=True)
class SymmetricMatrix:
    """Packed lower triangle, row-major: (0,0), (1,0), (1,1), (2,0), ..."""

    dimension: int
    packed: np.ndarray

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if len(self.packed) != self.dimension * (self.dimension + 1) // 2:
            raise ValueError("packed length does not match dimension")

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SymmetricMatrix":
        dense = np.asarray(dense, dtype=float)
        return cls(dense.shape[0], dense[np.tril_indices(dense.shape[0])].copy())

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        if i < j:
            i, j = j, i
        return float(self.packed[i * (i + 1) // 2 + j])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dimension, self.dimension))
        out[np.tril_indices(self.dimension)] = self.packed
        return out + np.tril(out, -1).T


def _index(n) -> tuple[int, int, int]:
    return tuple(n) if not isinstance(n, AngularMomentumIndex) else n.as_tuple()


# The kinetic forms subtract overlaps of similar size (the ket form most of
# all when the ket exponent dominates), so the polynomial sums run in extended
# precision and only the finished integral is rounded to float.
_EXT = np.longdouble


@dataclass(frozen=True)
class _ExtPair:
    alpha1: np.longdouble
    alpha2: np.longdouble
    gamma: np.longdouble
    PA: tuple
    PB: tuple
    K: float


def _extend(pair: GaussianPair) -> _ExtPair:
    a1, a2 = _EXT(pair.alpha1), _EXT(pair.alpha2)
    g = a1 + a2
    d = np.asarray(pair.A, dtype=_EXT) - np.asarray(pair.B, dtype=_EXT)
    return _ExtPair(a1, a2, g, tuple(-(a2 / g) * d), tuple((a1 / g) * d), pair.K)


def _overlap_1d(l1: int, l2: int, pa, pb, gamma):
    total = _EXT(0)
    for i in range((l1 + l2) // 2 + 1):
        total += (
            binomial_prefactor_single_sum(2 * i, l1, l2, pa, pb)
            * double_factorial(2 * i - 1)
            / (2 * gamma) ** i
        )
    return total * np.sqrt(_EXT(np.pi) / gamma)


def _overlap_ext(ep: _ExtPair, n1, n2):
    if min(n1) < 0 or min(n2) < 0:
        return _EXT(0)
    out = _EXT(ep.K)
    for axis in range(3):
        out *= _overlap_1d(n1[axis], n2[axis], ep.PA[axis], ep.PB[axis], ep.gamma)
    return out


def overlap_prim_ss(pair: GaussianPair) -> float:
    return pair.K * (math.pi / pair.gamma) ** 1.5


def overlap_prim(pair: GaussianPair, n1, n2) -> float:
    """<n1|n2> over unnormalized primitives; zero if any index is negative."""
    return float(_overlap_ext(_extend(pair), _index(n1), _index(n2)))


def _shift(n, axis: int, by: int) -> tuple[int, int, int]:
    m = list(n)
    m[axis] += by
    return tuple(m)


def kinetic_prim_asym(pair: GaussianPair, n1, n2, alpha2: float | None = None) -> float:
    """Kinetic energy by letting -1/2 d^2/dx^2 act on the ket only."""
    n1, n2 = _index(n1), _index(n2)
    ep = _extend(pair)
    a2 = ep.alpha2 if alpha2 is None else _EXT(alpha2)
    s00 = _overlap_ext(ep, n1, n2)
    total = _EXT(0)
    for axis in range(3):
        l2 = n2[axis]
        ix = a2 * (2 * l2 + 1) * s00 - 2 * a2 * a2 * _overlap_ext(ep, n1, _shift(n2, axis, 2))
        if l2 >= 2:
            ix -= _EXT(0.5) * l2 * (l2 - 1) * _overlap_ext(ep, n1, _shift(n2, axis, -2))
        total += ix
    return float(total)


def kinetic_prim_sym(
    pair: GaussianPair, n1, n2, alpha1: float | None = None, alpha2: float | None = None
) -> float:
    """Kinetic energy as 1/2 <grad a|grad b>; symmetric in bra and ket by construction."""
    n1, n2 = _index(n1), _index(n2)
    ep = _extend(pair)
    a1 = ep.alpha1 if alpha1 is None else _EXT(alpha1)
    a2 = ep.alpha2 if alpha2 is None else _EXT(alpha2)
    total = _EXT(0)
    for axis in range(3):
        l1, l2 = n1[axis], n2[axis]
        up1, up2 = _shift(n1, axis, 1), _shift(n2, axis, 1)
        ix = 2 * a1 * a2 * _overlap_ext(ep, up1, up2)
        if l1 and l2:
            ix += _EXT(0.5) * l1 * l2 * _overlap_ext(ep, _shift(n1, axis, -1), _shift(n2, axis, -1))
        if l2:
            ix -= a1 * l2 * _overlap_ext(ep, up1, _shift(n2, axis, -1))
        if l1:
            ix -= a2 * l1 * _overlap_ext(ep, _shift(n1, axis, -1), up2)
        total += ix
    return float(total)


def nuclear_prim_ss(pair: GaussianPair, C) -> float:
    """<s|1/r_C|s>; the F_0 form covers P == C without a branch."""
    pc = pair.relative_to(C)
    T = pair.gamma * float(pc @ pc)
    return 2.0 * pair.K * math.pi / pair.gamma * boys_values(0, T)[0]


def nuclear_prim(pair: GaussianPair, n1, n2, C, alpha1=None, alpha2=None) -> float:
    """<n1|1/r_C|n2> via the one-electron Obara-Saika recurrence.

    Auxiliary integrals [a|b]^(m) start from (2 pi K / gamma) F_m(gamma PC^2)
    and are raised on either center:

        [a+1_i|b]^(m) = PA_i [a|b]^(m) - PC_i [a|b]^(m+1)
                        + a_i/(2 gamma) ([a-1_i|b]^(m) - [a-1_i|b]^(m+1))
                        + b_i/(2 gamma) ([a|b-1_i]^(m) - [a|b-1_i]^(m+1))

    and the mirror relation with PB on the ket. ``alpha1``/``alpha2`` are
    accepted for signature symmetry with the kinetic routines; the pair
    already carries them.
    """
    n1, n2 = _index(n1), _index(n2)
    C = np.asarray(C, dtype=float)
    g = pair.gamma
    PC = pair.relative_to(C)
    PA, PB = pair.PA, pair.PB
    L = sum(n1) + sum(n2)
    base = 2.0 * math.pi * pair.K / g * boys_values(L, g * float(PC @ PC))
    inv2g = 0.5 / g
    memo: dict[tuple, np.ndarray] = {}

    def aux(a: tuple, b: tuple) -> np.ndarray:
        # returns orders m = 0 .. L - |a| - |b|
        key = (a, b)
        if key in memo:
            return memo[key]
        if sum(b) > 0:
            i = next(k for k in range(3) if b[k] > 0)
            bm = _shift(b, i, -1)
            top = L - sum(a) - sum(b) + 1
            prev = aux(a, bm)
            val = PB[i] * prev[:top] - PC[i] * prev[1 : top + 1]
            if bm[i] > 0:
                t = aux(a, _shift(bm, i, -1))
                val += bm[i] * inv2g * (t[:top] - t[1 : top + 1])
            if a[i] > 0:
                t = aux(_shift(a, i, -1), bm)
                val += a[i] * inv2g * (t[:top] - t[1 : top + 1])
        elif sum(a) > 0:
            i = next(k for k in range(3) if a[k] > 0)
            am = _shift(a, i, -1)
            top = L - sum(a) + 1
            prev = aux(am, b)
            val = PA[i] * prev[:top] - PC[i] * prev[1 : top + 1]
            if am[i] > 0:
                t = aux(_shift(am, i, -1), b)
                val += am[i] * inv2g * (t[:top] - t[1 : top + 1])
        else:
            val = base
        memo[key] = val
        return val

    return float(aux(n1, n2)[0])


def _contract(kind: str, f1: BasisFunction, f2: BasisFunction, C=None) -> float:
    s1, s2 = f1.shell, f2.shell
    n1, n2 = f1.index.as_tuple(), f2.index.as_tuple()
    c1, c2 = f1.coefficients, f2.coefficients
    total = 0.0
    for a1, ca in zip(s1.exponents, c1):
        for a2, cb in zip(s2.exponents, c2):
            pair = make_pair(a1, s1.center, a2, s2.center)
            if kind == "overlap":
                v = overlap_prim(pair, n1, n2)
            elif kind == "kinetic":
                v = kinetic_prim_sym(pair, n1, n2)
            elif kind == "kinetic_asym":
                v = kinetic_prim_asym(pair, n1, n2)
            else:
                v = nuclear_prim(pair, n1, n2, C)
            total += ca * cb * v
    return total


def overlap_contracted(f1: BasisFunction, f2: BasisFunction) -> float:
    return _contract("overlap", f1, f2)


def kinetic_contracted(f1: BasisFunction, f2: BasisFunction, form: str = "sym") -> float:
    return _contract("kinetic" if form == "sym" else "kinetic_asym", f1, f2)


def nuclear_contracted(f1: BasisFunction, f2: BasisFunction, C) -> float:
    """Positive <f1|1/r_C|f2>; the caller supplies -Z."""
    return _contract("nuclear", f1, f2, C)


def potential_element(f1: BasisFunction, f2: BasisFunction, molecule: Molecule) -> float:
    return -sum(a.charge * nuclear_contracted(f1, f2, a.position) for a in molecule.atoms)


def _shell_pair_blocks(sa: ContractedShell, sb: ContractedShell, molecule: Molecule):
    comps_a = [n.as_tuple() for n in sa.components]
    comps_b = [n.as_tuple() for n in sb.components]
    S = np.zeros((sa.size, sb.size))
    T = np.zeros_like(S)
    V = np.zeros_like(S)
    ca, cb = sa.coefficient_matrix, sb.coefficient_matrix
    for p, a1 in enumerate(sa.exponents):
        for q, a2 in enumerate(sb.exponents):
            pair = make_pair(a1, sa.center, a2, sb.center)
            for i, n1 in enumerate(comps_a):
                for j, n2 in enumerate(comps_b):
                    w = ca[i, p] * cb[j, q]
                    S[i, j] += w * overlap_prim(pair, n1, n2)
                    T[i, j] += w * kinetic_prim_sym(pair, n1, n2)
                    V[i, j] -= w * sum(
                        atom.charge * nuclear_prim(pair, n1, n2, atom.position)
                        for atom in molecule.atoms
                    )
    return S, T, V


def build_matrices(
    shells: Sequence[ContractedShell], molecule: Molecule
) -> tuple[SymmetricMatrix, SymmetricMatrix, SymmetricMatrix]:
    """S, T and V = -sum_C Z_C <i|1/r_C|j> over the whole basis."""
    n = sum(s.size for s in shells)
    S, T, V = (np.zeros((n, n)) for _ in range(3))
    offsets = np.cumsum([0] + [s.size for s in shells])
    for a, sa in enumerate(shells):
        for b in range(a + 1):
            sb = shells[b]
            blocks = _shell_pair_blocks(sa, sb, molecule)
            ra = slice(offsets[a], offsets[a + 1])
            rb = slice(offsets[b], offsets[b + 1])
            for full, blk in zip((S, T, V), blocks):
                full[ra, rb] = blk
                full[rb, ra] = blk.T
    return tuple(SymmetricMatrix.from_dense(M) for M in (S, T, V))


def matrix_element(kind: str, shells: Sequence[ContractedShell], i: int, j: int, molecule: Molecule) -> float:
    """One element computed from scratch, for symmetry checks."""
    funcs = basis_functions(shells)
    if kind == "overlap":
        return overlap_contracted(funcs[i], funcs[j])
    if kind == "kinetic":
        return kinetic_contracted(funcs[i], funcs[j])
    if kind == "nuclear":
        return potential_element(funcs[i], funcs[j], molecule)
    raise ValueError(f"unknown integral kind {kind!r}")
