"""Electron-repulsion integrals over Cartesian Gaussian shell quartets.

Two production paths share only the (ss|ss)^(m) seed:

* ``os``  -- the four-center Obara-Saika recurrence applied to every
  primitive quartet, then contracted.
* ``hgp`` -- Head-Gordon/Pople: vertical recurrence to [e0|f0] per primitive
  quartet, contraction of those, then the geometry-only horizontal transfer
  applied once per contracted class.

Classes are dense ``(na, nb, nc, nd)`` arrays in canonical component order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .basis_core import ContractedShell, basis_offsets, cartesian_tuples, component_position, ncart
from .boys import boys_values
from .gpt import GaussianPair, binomial_prefactor, make_pair

TWO_PI_52 = 2.0 * math.pi**2.5


@dataclass(frozen=True)
class QuartetGeometry:
    bra: GaussianPair
    ket: GaussianPair
    zeta: float
    eta: float
    rho: float
    P: np.ndarray
    Q: np.ndarray
    W: np.ndarray
    T: float
    PQ: np.ndarray

    @property
    def K1(self) -> float:
        return self.bra.K

    @property
    def K2(self) -> float:
        return self.ket.K

    @property
    def prefactor(self) -> float:
        return TWO_PI_52 * self.K1 * self.K2 / (self.zeta * self.eta * math.sqrt(self.zeta + self.eta))

    @property
    def WP(self) -> np.ndarray:
        return -(self.eta / (self.zeta + self.eta)) * self.PQ

    @property
    def WQ(self) -> np.ndarray:
        return (self.zeta / (self.zeta + self.eta)) * self.PQ

    @property
    def AB(self) -> np.ndarray:
        return self.bra.AB

    @property
    def CD(self) -> np.ndarray:
        return self.ket.AB


def make_quartet(bra: GaussianPair, ket: GaussianPair) -> QuartetGeometry:
    zeta, eta = bra.gamma, ket.gamma
    rho = zeta * eta / (zeta + eta)
    W = (zeta * bra.P + eta * ket.P) / (zeta + eta)
    # built from center differences so a common offset cancels exactly
    pq = (bra.A - ket.A) + bra.PA - ket.PA
    return QuartetGeometry(bra, ket, zeta, eta, rho, bra.P, ket.P, W, rho * float(pq @ pq), pq)


def quartet_from_primitives(alphas: Sequence[float], centers: Sequence) -> QuartetGeometry:
    a, b, c, d = alphas
    A, B, C, D = centers
    return make_quartet(make_pair(a, A, b, B), make_pair(c, C, d, D))


def base_values(geom: QuartetGeometry, m_max: int, fm: np.ndarray | None = None) -> np.ndarray:
    """(00|00)^(m) for m = 0..m_max; ``fm`` replaces the Boys values if given."""
    if fm is None:
        fm = boys_values(m_max, geom.T)
    else:
        fm = np.asarray(fm, dtype=float)[: m_max + 1]
    return geom.prefactor * fm


def eri_ssss(geom: QuartetGeometry) -> float:
    return float(base_values(geom, 0)[0])


@dataclass(frozen=True)
class EriClass:
    shells: tuple
    values: np.ndarray

    @property
    def size(self) -> int:
        return self.values.size


# ---------------------------------------------------------------------------
# four-center Obara-Saika


def _shifted(n: tuple, i: int, by: int) -> tuple:
    m = list(n)
    m[i] += by
    return tuple(m)


def os_full_class(
    geom: QuartetGeometry, la: int, lb: int, lc: int, ld: int, fm: np.ndarray | None = None
) -> np.ndarray:
    """Primitive class [ab|cd] by the general OS relation on all four centers.

    The relations for B, C and D are the A relation with the centers
    relabeled; no horizontal transfer is involved.
    """
    L = la + lb + lc + ld
    base = base_values(geom, L, fm)
    zeta, eta, rho = geom.zeta, geom.eta, geom.rho
    shift = (geom.bra.PA, geom.bra.PB, geom.ket.PA, geom.ket.PB)
    wshift = (geom.WP, geom.WP, geom.WQ, geom.WQ)
    same_half = (0.5 / zeta, 0.5 / zeta, 0.5 / eta, 0.5 / eta)
    same_ratio = (rho / zeta, rho / zeta, rho / eta, rho / eta)
    cross_half = 0.5 / (zeta + eta)
    memo: dict[tuple, np.ndarray] = {((0, 0, 0),) * 4: base}

    def aux(key: tuple) -> np.ndarray:
        hit = memo.get(key)
        if hit is not None:
            return hit
        # reduce b, then a, then d, then c
        for k in (1, 0, 3, 2):
            if any(key[k]):
                break
        i = next(ax for ax in range(3) if key[k][ax] > 0)
        low = list(key)
        low[k] = _shifted(key[k], i, -1)
        low = tuple(low)
        top = L - sum(map(sum, key)) + 1
        prev = aux(low)
        val = shift[k][i] * prev[:top] + wshift[k][i] * prev[1 : top + 1]
        partner = k ^ 1
        for c in (k, partner):
            n = low[c][i]
            if n:
                t2 = list(low)
                t2[c] = _shifted(low[c], i, -1)
                t = aux(tuple(t2))
                val = val + n * same_half[k] * (t[:top] - same_ratio[k] * t[1 : top + 1])
        for c in ((2, 3) if k < 2 else (0, 1)):
            n = low[c][i]
            if n:
                t2 = list(low)
                t2[c] = _shifted(low[c], i, -1)
                t = aux(tuple(t2))
                val = val + n * cross_half * t[1 : top + 1]
        memo[key] = val
        return val

    out = np.empty((ncart(la), ncart(lb), ncart(lc), ncart(ld)))
    ca, cb, cc, cd = (cartesian_tuples(l) for l in (la, lb, lc, ld))
    for p, a in enumerate(ca):
        for q, b in enumerate(cb):
            for r, c in enumerate(cc):
                for s, d in enumerate(cd):
                    out[p, q, r, s] = aux((a, b, c, d))[0]
    return out


# ---------------------------------------------------------------------------
# Head-Gordon/Pople vertical and horizontal relations


@lru_cache(maxsize=None)
def _level_tables(lam: int):
    """Index helpers for one angular-momentum level.

    Returns (axis, dec1, cnt, dec2, dec_pos, dec_cnt, inc_pos):
      axis[k]    -- axis used to build component k from level lam-1
      dec1[k]    -- position of comp - 1_axis in level lam-1
      cnt[k]     -- (comp - 1_axis)[axis], the prefactor count for the -2 term
      dec2[k]    -- position of comp - 2_axis in level lam-2 (0 if unused)
      dec_pos    -- (3, n) position of comp - 1_i in level lam-1 (0 if comp_i == 0)
      dec_cnt    -- (3, n) comp_i
      inc_pos    -- (3, n) position of comp + 1_i in level lam+1
    """
    comps = cartesian_tuples(lam)
    n = len(comps)
    axis = np.zeros(n, dtype=np.intp)
    dec1 = np.zeros(n, dtype=np.intp)
    dec2 = np.zeros(n, dtype=np.intp)
    cnt = np.zeros(n)
    dec_pos = np.zeros((3, n), dtype=np.intp)
    dec_cnt = np.zeros((3, n))
    inc_pos = np.zeros((3, n), dtype=np.intp)
    up = component_position(lam + 1)
    for k, t in enumerate(comps):
        for i in range(3):
            inc_pos[i, k] = up[_shifted(t, i, 1)]
            if t[i] > 0:
                dec_pos[i, k] = component_position(lam - 1)[_shifted(t, i, -1)]
                dec_cnt[i, k] = t[i]
        if lam == 0:
            continue
        i = next(ax for ax in range(3) if t[ax] > 0)
        axis[k] = i
        dec1[k] = component_position(lam - 1)[_shifted(t, i, -1)]
        cnt[k] = t[i] - 1
        if t[i] >= 2:
            dec2[k] = component_position(lam - 2)[_shifted(t, i, -2)]
    return axis, dec1, cnt, dec2, dec_pos, dec_cnt, inc_pos


def _vrr_blocks(
    geom: QuartetGeometry, le_max: int, lf_max: int, fm: np.ndarray | None = None
) -> dict[tuple[int, int], np.ndarray]:
    """All [e0|f0]^(m) blocks, shape (n_e, n_f, n_m), for le <= le_max, lf <= lf_max."""
    L = le_max + lf_max
    zeta, eta, rho = geom.zeta, geom.eta, geom.rho
    PA, QC = geom.bra.PA, geom.ket.PA
    WP, WQ = geom.WP, geom.WQ
    cross = 0.5 / (zeta + eta)
    blocks = {(0, 0): base_values(geom, L, fm).reshape(1, 1, L + 1)}

    # e = 0 column, raised on C
    for lf in range(1, lf_max + 1):
        M = L - lf + 1
        axis, dec1, cnt, dec2, *_ = _level_tables(lf)
        prev = blocks[(0, lf - 1)][:, dec1, :]
        new = QC[axis][None, :, None] * prev[:, :, :M] + WQ[axis][None, :, None] * prev[:, :, 1 : M + 1]
        if lf >= 2:
            p2 = blocks[(0, lf - 2)][:, dec2, :]
            new += (cnt * (0.5 / eta))[None, :, None] * (p2[:, :, :M] - (rho / eta) * p2[:, :, 1 : M + 1])
        blocks[(0, lf)] = new

    # raise on A for every column
    for le in range(1, le_max + 1):
        axis, dec1, cnt, dec2, *_ = _level_tables(le)
        for lf in range(lf_max + 1):
            M = L - le - lf + 1
            prev = blocks[(le - 1, lf)][dec1]
            new = PA[axis][:, None, None] * prev[:, :, :M] + WP[axis][:, None, None] * prev[:, :, 1 : M + 1]
            if le >= 2:
                p2 = blocks[(le - 2, lf)][dec2]
                new += (cnt * (0.5 / zeta))[:, None, None] * (p2[:, :, :M] - (rho / zeta) * p2[:, :, 1 : M + 1])
            if lf >= 1:
                _, _, _, _, fpos, fcnt, _ = _level_tables(lf)
                p3 = blocks[(le - 1, lf - 1)]
                rows = dec1[:, None]
                cols = fpos[axis]  # (n_e, n_f)
                new += (cross * fcnt[axis])[:, :, None] * p3[rows, cols, 1 : M + 1]
            blocks[(le, lf)] = new
    return blocks


def os_vrr_class(
    geom: QuartetGeometry, le_max: int, lf_max: int, fm: np.ndarray | None = None
) -> dict[tuple[int, int], np.ndarray]:
    """[e0|f0]^(0) for 0 <= le <= le_max and 0 <= lf <= lf_max."""
    return {k: v[:, :, 0] for k, v in _vrr_blocks(geom, le_max, lf_max, fm).items()}


def vrr_table(
    geom: QuartetGeometry, la: int, lb: int, lc: int, ld: int, fm: np.ndarray | None = None
) -> dict[tuple[int, int], np.ndarray]:
    """The slice of the VRR pyramid that the horizontal transfer consumes."""
    full = _vrr_blocks(geom, la + lb, lc + ld, fm)
    return {
        (le, lf): full[(le, lf)][:, :, 0]
        for le in range(la, la + lb + 1)
        for lf in range(lc, lc + ld + 1)
    }


def _hrr_step(upper: np.ndarray, lower: np.ndarray, lam_low: int, jb: int, shift: np.ndarray) -> np.ndarray:
    """(a, b+1_i| = (a+1_i, b| + shift_i (a, b| along axes 0 (a) and 1 (b)."""
    axis, dec1, *_ = _level_tables(jb)
    inc_pos = _level_tables(lam_low)[6]
    rows = inc_pos[axis].T  # (n_a, n_b)
    cols = dec1[None, :]
    step = shift[axis].reshape((1, -1) + (1,) * (lower.ndim - 2))
    return upper[rows, cols] + step * lower[:, dec1]


def hrr_transfer(
    table: dict[tuple[int, int], np.ndarray],
    AB,
    CD,
    la: int,
    lb: int,
    lc: int,
    ld: int,
) -> np.ndarray:
    """Build (ab|cd) from (e0|f0), la <= le <= la+lb, lc <= lf <= lc+ld.

    Only geometric shifts enter, so the table may already be contracted.
    """
    AB = np.asarray(AB, dtype=float)
    CD = np.asarray(CD, dtype=float)
    for le in range(la, la + lb + 1):
        for lf in range(lc, lc + ld + 1):
            if (le, lf) not in table:
                raise KeyError(f"HRR table is missing the ({le},{lf}) block")

    # bra transfer, one f level at a time; arrays are (n_e, n_b, n_f)
    bra = {}
    for lf in range(lc, lc + ld + 1):
        cur = {le: table[(le, lf)][:, None, :] for le in range(la, la + lb + 1)}
        for jb in range(1, lb + 1):
            cur = {
                le: _hrr_step(cur[le + 1], cur[le], le, jb, AB)
                for le in range(la, la + lb - jb + 1)
            }
        bra[lf] = cur[la]

    # ket transfer on the last two axes: arrays (n_f, n_d, n_a, n_b)
    cur = {lf: np.moveaxis(bra[lf], 2, 0)[:, None, :, :] for lf in bra}
    for jd in range(1, ld + 1):
        cur = {
            lf: _hrr_step(cur[lf + 1], cur[lf], lf, jd, CD)
            for lf in range(lc, lc + ld - jd + 1)
        }
    return np.transpose(cur[lc], (2, 3, 0, 1)).copy()


def hgp_primitive_class(
    geom: QuartetGeometry, la: int, lb: int, lc: int, ld: int, fm: np.ndarray | None = None
) -> np.ndarray:
    table = vrr_table(geom, la, lb, lc, ld, fm)
    return hrr_transfer(table, geom.AB, geom.CD, la, lb, lc, ld)


# ---------------------------------------------------------------------------
# contracted classes


def _scales(shells: Sequence[ContractedShell]) -> np.ndarray:
    sa, sb, sc, sd = (s.component_scales for s in shells)
    return np.einsum("i,j,k,l->ijkl", sa, sb, sc, sd)


def _primitive_pairs(s1: ContractedShell, s2: ContractedShell):
    w1, w2 = s1.primitive_weights, s2.primitive_weights
    return [
        (w1[p] * w2[q], make_pair(a1, s1.center, a2, s2.center))
        for p, a1 in enumerate(s1.exponents)
        for q, a2 in enumerate(s2.exponents)
    ]


def compute_class_contracted(
    sa: ContractedShell,
    sb: ContractedShell,
    sc: ContractedShell,
    sd: ContractedShell,
    backend: str = "hgp",
) -> EriClass:
    shells = (sa, sb, sc, sd)
    la, lb, lc, ld = (s.lam for s in shells)
    if backend == "hgp" and (lb > la or ld > lc):
        # the transfer step amplifies rounding by |AB|^lb; always move
        # angular momentum onto the lower shell and transpose back
        bra = (sb, sa) if lb > la else (sa, sb)
        ket = (sd, sc) if ld > lc else (sc, sd)
        vals = compute_class_contracted(*bra, *ket, backend=backend).values
        if lb > la:
            vals = vals.transpose(1, 0, 2, 3)
        if ld > lc:
            vals = vals.transpose(0, 1, 3, 2)
        return EriClass(shells, np.ascontiguousarray(vals))
    bra_pairs = _primitive_pairs(sa, sb)
    ket_pairs = _primitive_pairs(sc, sd)
    if backend == "os":
        acc = np.zeros((sa.size, sb.size, sc.size, sd.size))
        for wb, pb in bra_pairs:
            for wk, pk in ket_pairs:
                acc += (wb * wk) * os_full_class(make_quartet(pb, pk), la, lb, lc, ld)
    elif backend == "hgp":
        table: dict[tuple[int, int], np.ndarray] = {}
        for wb, pb in bra_pairs:
            for wk, pk in ket_pairs:
                for key, blk in vrr_table(make_quartet(pb, pk), la, lb, lc, ld).items():
                    if key in table:
                        table[key] += (wb * wk) * blk
                    else:
                        table[key] = (wb * wk) * blk
        AB = np.subtract(sa.center, sb.center)
        CD = np.subtract(sc.center, sd.center)
        acc = hrr_transfer(table, AB, CD, la, lb, lc, ld)
    elif backend == "ssss":
        if la or lb or lc or ld:
            raise ValueError("ssss backend only handles s shells")
        acc = np.zeros((1, 1, 1, 1))
        for wb, pb in bra_pairs:
            for wk, pk in ket_pairs:
                acc += (wb * wk) * eri_ssss(make_quartet(pb, pk))
    else:
        raise ValueError(f"unknown ERI backend {backend!r}")
    return EriClass(shells, acc * _scales(shells))


# ---------------------------------------------------------------------------
# screening


def _moment_bound_1d(l1: int, l2: int, pa: float, pb: float, gamma: float) -> float:
    # |x_A^l1 x_B^l2| <= sum_k f_k(|PA|,|PB|) |x_P|^k and
    # |t|^k exp(-gamma t^2 / 2) <= (k / (e gamma))^(k/2)
    total = 0.0
    for k in range(l1 + l2 + 1):
        peak = (k / (math.e * gamma)) ** (k / 2) if k else 1.0
        total += binomial_prefactor(k, l1, l2, abs(pa), abs(pb)) * peak
    return total


def pair_bounds(s1: ContractedShell, s2: ContractedShell) -> list[tuple[float, float]]:
    """Per primitive pair: (gamma, B) with |phi_i phi_j| <= B exp(-gamma r_P^2 / 2)."""
    sc1, sc2 = np.abs(s1.component_scales), np.abs(s2.component_scales)
    comps1, comps2 = cartesian_tuples(s1.lam), cartesian_tuples(s2.lam)
    out = []
    for w, pair in _primitive_pairs(s1, s2):
        best = 0.0
        for i, n1 in enumerate(comps1):
            for j, n2 in enumerate(comps2):
                m = sc1[i] * sc2[j]
                for ax in range(3):
                    m *= _moment_bound_1d(n1[ax], n2[ax], pair.PA[ax], pair.PB[ax], pair.gamma)
                best = max(best, m)
        out.append((pair.gamma, abs(w) * pair.K * best))
    return out


def quartet_bound(bra: list[tuple[float, float]], ket: list[tuple[float, float]]) -> float:
    """Rigorous upper bound on every |(ab|cd)| in the class.

    Each pair density is majorized by a Gaussian of half the exponent, whose
    Coulomb interaction is at most 2 pi^(5/2) / (z' e' sqrt(z' + e')).
    """
    total = 0.0
    for zeta, b1 in bra:
        if b1 == 0.0:
            continue
        for eta, b2 in ket:
            z, e = 0.5 * zeta, 0.5 * eta
            total += TWO_PI_52 / (z * e * math.sqrt(z + e)) * b1 * b2
    return total


# ---------------------------------------------------------------------------
# whole-basis driver


@dataclass
class EriResult:
    records: list[tuple[int, int, int, int, float]]
    quartets_computed: int = 0
    quartets_screened: int = 0
    dimension: int = 0
    values: dict = field(default_factory=dict, repr=False)


def canonical_index(i: int, j: int, k: int, l: int) -> tuple[int, int, int, int]:
    if i < j:
        i, j = j, i
    if k < l:
        k, l = l, k
    if (i * (i + 1) // 2 + j) < (k * (k + 1) // 2 + l):
        i, j, k, l = k, l, i, j
    return i, j, k, l


def canonical_quartets(nshell: int):
    for a in range(nshell):
        for b in range(a + 1):
            for c in range(a + 1):
                for d in range(c + 1 if c < a else b + 1):
                    yield a, b, c, d


def thread_count() -> int:
    raw = os.environ.get("GAUSSINT_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("GAUSSINT_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def compute_all(
    shells: Sequence[ContractedShell],
    backend: str = "hgp",
    screen_threshold: float = 1e-14,
    threads: int | None = None,
) -> EriResult:
    """Unique ERIs (ij|kl) with i>=j, k>=l, ij>=kl, sorted by (i, j, k, l)."""
    if screen_threshold < 0:
        raise ValueError("screen threshold must be non-negative")
    offsets = basis_offsets(shells)
    dim = sum(s.size for s in shells)
    bounds = {
        (a, b): pair_bounds(shells[a], shells[b]) for a in range(len(shells)) for b in range(a + 1)
    }
    quartets = list(canonical_quartets(len(shells)))
    todo, screened = [], 0
    for q in quartets:
        a, b, c, d = q
        if quartet_bound(bounds[(a, b)], bounds[(c, d)]) < screen_threshold:
            screened += 1
        else:
            todo.append(q)

    def work(q):
        return q, compute_class_contracted(*(shells[x] for x in q), backend=backend).values

    nthreads = thread_count() if threads is None else max(1, threads)
    if nthreads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(pool.map(work, todo))
    else:
        results = [work(q) for q in todo]

    values: dict[tuple[int, int, int, int], float] = {}
    for (a, b, c, d), block in results:
        oa, ob, oc, od = offsets[a], offsets[b], offsets[c], offsets[d]
        for p, q_, r, s in np.ndindex(block.shape):
            key = canonical_index(oa + p, ob + q_, oc + r, od + s)
            if key not in values:
                values[key] = float(block[p, q_, r, s])
    records = [(*k, values[k]) for k in sorted(values)]
    return EriResult(records, len(todo), screened, dim, values)


def eri_tensor(shells: Sequence[ContractedShell], backend: str = "hgp") -> np.ndarray:
    """Dense (n, n, n, n) tensor without screening, filled from the unique set."""
    res = compute_all(shells, backend, 0.0)
    n = res.dimension
    out = np.zeros((n, n, n, n))
    for i, j, k, l, v in res.records:
        for p, q, r, s in {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                           (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}:
            out[p, q, r, s] = v
    return out
