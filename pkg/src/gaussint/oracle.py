"""Independent reference values for the test suite.

Nothing here calls into :mod:`gaussint.eri` or :mod:`gaussint.one_electron`.

ERI oracle
----------
(ss|ss) is a function of the centers only through AB, CD and PQ::

    G = c0 * exp(-mu_ab AB^2) * exp(-mu_cd CD^2) * F_0(rho PQ^2)

Higher angular momentum comes from the Gaussian differential relation

    phi(n + 1_i) = (d/dR_i phi(n) + n_i phi(n - 1_i)) / (2 alpha)

so every target integral is a linear combination of partial derivatives of
G with respect to (AB, CD, PQ). Those combinations separate by Cartesian
axis; the derivatives themselves are evaluated in closed form (Hermite
polynomials for the exponential factors, a Faa di Bruno expansion for
F_0(rho PQ^2) using dF_m/dT = -F_{m+1}).

One-electron oracle
-------------------
Brute-force quadrature of the integrand evaluated point by point:
Gauss-Hermite tensor grids centered on the product center for overlap and
kinetic energy, and a spherical product grid centered on the nucleus for
1/r_C, with point counts doubled until two successive estimates agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .basis_core import ContractedShell, PrimitiveGaussian, cartesian_tuples, ncart
from .boys import boys_values


class ConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# ERI by differentiation of (ss|ss)


@dataclass(frozen=True)
class DerivativeSeed:
    """A primitive quartet and the angular-momentum index wanted on each center."""

    exponents: tuple[float, float, float, float]
    centers: tuple
    indices: tuple[tuple[int, int, int], ...]

    @property
    def total_order(self) -> int:
        return sum(sum(n) for n in self.indices)


def _axis_operator(a: int, b: int, c: int, d: int, alphas: tuple[float, ...]):
    """Per-axis operator as {(p, q, r): coeff} meaning d^p/dAB d^q/dCD d^r/dPQ."""
    al, be, ga, de = alphas
    zeta, eta = al + be, ga + de
    # d/dR for each center in terms of (AB, CD, PQ) derivatives
    chain = (
        ((1, 0, 0, 1.0), (0, 0, 1, al / zeta)),
        ((1, 0, 0, -1.0), (0, 0, 1, be / zeta)),
        ((0, 1, 0, 1.0), (0, 0, 1, -ga / eta)),
        ((0, 1, 0, -1.0), (0, 0, 1, -de / eta)),
    )

    @lru_cache(maxsize=None)
    def op(n: tuple[int, int, int, int]) -> tuple:
        if not any(n):
            return (((0, 0, 0), 1.0),)
        k = next(i for i in range(4) if n[i] > 0)
        low = list(n)
        low[k] -= 1
        out: dict[tuple[int, int, int], float] = {}
        inv = 0.5 / alphas[k]
        for (p, q, r), coef in op(tuple(low)):
            for dp, dq, dr, f in chain[k]:
                key = (p + dp, q + dq, r + dr)
                out[key] = out.get(key, 0.0) + inv * f * coef
        if low[k] > 0:
            lower = list(low)
            lower[k] -= 1
            for key, coef in op(tuple(lower)):
                out[key] = out.get(key, 0.0) + inv * low[k] * coef
        return tuple(out.items())

    return op((a, b, c, d))


def _gauss_derivs(mu: float, x: float, nmax: int) -> np.ndarray:
    """d^n/dx^n exp(-mu x^2) divided by exp(-mu x^2), n = 0..nmax."""
    h = np.zeros(nmax + 1)
    h[0] = 1.0
    if nmax >= 1:
        h[1] = -2.0 * mu * x
    for n in range(1, nmax):
        h[n + 1] = -2.0 * mu * x * h[n] - 2.0 * mu * n * h[n - 1]
    return h


def _quadratic_chain(rho: float, x: float, tmax: int) -> np.ndarray:
    """A[t, s]: d^t/dx^t f(rho x^2 + c) = sum_s A[t, s] f^(s)."""
    A = np.zeros((tmax + 1, tmax + 1))
    for t in range(tmax + 1):
        for j in range(t // 2 + 1):
            A[t, t - j] = (
                math.factorial(t)
                / (math.factorial(j) * math.factorial(t - 2 * j))
                * (2.0 * rho * x) ** (t - 2 * j)
                * rho**j
            )
    return A


class _QuartetOracle:
    def __init__(self, exponents: Sequence[float], centers: Sequence):
        self.alphas = tuple(float(a) for a in exponents)
        A, B, C, D = (np.asarray(c, dtype=float) for c in centers)
        al, be, ga, de = self.alphas
        zeta, eta = al + be, ga + de
        self.zeta, self.eta = zeta, eta
        self.rho = zeta * eta / (zeta + eta)
        self.mu_ab = al * be / zeta
        self.mu_cd = ga * de / eta
        self.AB = A - B
        self.CD = C - D
        self.PQ = (al * A + be * B) / zeta - (ga * C + de * D) / eta
        self.c0 = (
            2.0 * math.pi**2.5 / (zeta * eta * math.sqrt(zeta + eta))
            * math.exp(-self.mu_ab * float(self.AB @ self.AB))
            * math.exp(-self.mu_cd * float(self.CD @ self.CD))
        )
        self.T = self.rho * float(self.PQ @ self.PQ)
        self._axis_cache: dict = {}
        self._fm = None

    def _prepare(self, lmax_axis: int, lsum: int):
        self.h_ab = [_gauss_derivs(self.mu_ab, self.AB[i], lmax_axis) for i in range(3)]
        self.h_cd = [_gauss_derivs(self.mu_cd, self.CD[i], lmax_axis) for i in range(3)]
        self.chain = [_quadratic_chain(self.rho, self.PQ[i], lmax_axis) for i in range(3)]
        fm = boys_values(lsum, self.T)
        self.signed_fm = fm * (-1.0) ** np.arange(lsum + 1)

    def _axis_poly(self, axis: int, n: tuple[int, int, int, int]) -> np.ndarray:
        """Coefficients u[s] of f^(s)(T) contributed by one axis."""
        key = (axis, n)
        hit = self._axis_cache.get(key)
        if hit is not None:
            return hit
        total = sum(n)
        w = np.zeros(total + 1)
        for (p, q, r), coef in _axis_operator(*n, self.alphas):
            w[r] += coef * self.h_ab[axis][p] * self.h_cd[axis][q]
        u = w @ self.chain[axis][: total + 1, : total + 1]
        self._axis_cache[key] = u
        return u

    def coefficients(self, a, b, c, d) -> np.ndarray:
        """C_m such that the integral is sum_m C_m F_m(T)."""
        polys = [self._axis_poly(i, (a[i], b[i], c[i], d[i])) for i in range(3)]
        c_s = np.convolve(np.convolve(polys[0], polys[1]), polys[2])
        return self.c0 * c_s * (-1.0) ** np.arange(len(c_s))

    def value(self, a, b, c, d) -> float:
        polys = [self._axis_poly(i, (a[i], b[i], c[i], d[i])) for i in range(3)]
        c_s = np.convolve(np.convolve(polys[0], polys[1]), polys[2])
        return self.c0 * float(c_s @ self.signed_fm[: len(c_s)])


def eri_by_differentiation(
    exponents: Sequence[float], centers: Sequence, la: int, lb: int, lc: int, ld: int
) -> np.ndarray:
    """Primitive class (ab|cd), shape (na, nb, nc, nd), over unnormalized Gaussians."""
    q = _QuartetOracle(exponents, centers)
    q._prepare(la + lb + lc + ld, la + lb + lc + ld)
    out = np.empty((ncart(la), ncart(lb), ncart(lc), ncart(ld)))
    for p, a in enumerate(cartesian_tuples(la)):
        for r_, b in enumerate(cartesian_tuples(lb)):
            for s, c in enumerate(cartesian_tuples(lc)):
                for t, d in enumerate(cartesian_tuples(ld)):
                    out[p, r_, s, t] = q.value(a, b, c, d)
    return out


def eri_seed_value(seed: DerivativeSeed) -> float:
    q = _QuartetOracle(seed.exponents, seed.centers)
    L = seed.total_order
    q._prepare(L, L)
    return q.value(*seed.indices)


def eri_fm_coefficients(seed: DerivativeSeed) -> np.ndarray:
    """The C_m of the expansion sum_m C_m F_m(T) for one integral."""
    q = _QuartetOracle(seed.exponents, seed.centers)
    L = seed.total_order
    q._prepare(L, L)
    return q.coefficients(*seed.indices)


def eri_contracted_by_differentiation(shells: Sequence[ContractedShell]) -> np.ndarray:
    """Contracted, normalized class built from oracle primitive classes."""
    sa, sb, sc, sd = shells
    lams = [s.lam for s in shells]
    out = np.zeros(tuple(s.size for s in shells))
    for i, a in enumerate(sa.exponents):
        for j, b in enumerate(sb.exponents):
            for k, c in enumerate(sc.exponents):
                for l, d in enumerate(sd.exponents):
                    prim = eri_by_differentiation(
                        (a, b, c, d), [s.center for s in shells], *lams
                    )
                    coef = np.einsum(
                        "p,q,r,s->pqrs",
                        sa.coefficient_matrix[:, i],
                        sb.coefficient_matrix[:, j],
                        sc.coefficient_matrix[:, k],
                        sd.coefficient_matrix[:, l],
                    )
                    out += coef * prim
    return out


def coulomb_ssss_same_center(exponents: Sequence[float]) -> float:
    """(ss|ss) for four s primitives on one center by radial quadrature.

    The ket density exp(-eta r^2) has potential (pi/eta)^(3/2) erf(sqrt(eta) r)/r;
    integrate it against the bra density over r.
    """
    a, b, c, d = exponents
    zeta, eta = a + b, c + d
    pref = (math.pi / eta) ** 1.5

    def f(r):
        pot = pref * (special.erf(math.sqrt(eta) * r) / r if r > 0 else 2.0 * math.sqrt(eta / math.pi))
        return 4.0 * math.pi * r * r * math.exp(-zeta * r * r) * pot

    val, _ = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


# ---------------------------------------------------------------------------
# one-electron quadrature


def _laplacian(g: PrimitiveGaussian, pts: np.ndarray) -> np.ndarray:
    d = pts - np.asarray(g.center)
    a = g.exponent
    r2 = np.einsum("...i,...i->...", d, d)
    env = np.exp(-a * r2)
    mono = [d[..., i] ** g.index[i] for i in range(3)]
    total = np.zeros(pts.shape[:-1])
    for i in range(3):
        l = g.index[i]
        x = d[..., i]
        second = -2.0 * a * (2 * l + 1) * x**l + 4.0 * a * a * x ** (l + 2)
        if l >= 2:
            second = second + l * (l - 1) * x ** (l - 2)
        others = mono[(i + 1) % 3] * mono[(i + 2) % 3]
        total += second * others
    return total * env


def _hermite_grid(center: np.ndarray, gamma: float, n: int):
    t, w = np.polynomial.hermite.hermgauss(n)
    x = t / math.sqrt(gamma)
    wx = w * np.exp(t * t) / math.sqrt(gamma)
    grids = np.meshgrid(x, x, x, indexing="ij")
    pts = np.stack([g + c for g, c in zip(grids, center)], axis=-1)
    wts = np.einsum("i,j,k->ijk", wx, wx, wx)
    return pts, wts


def _frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    e3 = axis
    helper = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(e3, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(e3, e1), e3


def _spherical_panel(C, frame, r_span, th_span, n: int):
    """One (r, theta) panel around C: Gauss-Legendre in r and theta, trapezoid in phi.

    Weights include r^2 sin(theta) dr dtheta dphi.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    (r0, r1), (t0, t1) = r_span, th_span
    r = 0.5 * (r1 - r0) * x + 0.5 * (r1 + r0)
    wr = 0.5 * (r1 - r0) * w * r * r
    th = 0.5 * (t1 - t0) * x + 0.5 * (t1 + t0)
    wth = 0.5 * (t1 - t0) * w * np.sin(th)
    nphi = 2 * n
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    e1, e2, e3 = frame
    st, ct = np.sin(th), np.cos(th)
    dirs = (
        st[:, None, None] * np.cos(phi)[None, :, None] * e1
        + st[:, None, None] * np.sin(phi)[None, :, None] * e2
        + ct[:, None, None] * e3
    )  # (n, nphi, 3)
    pts = C + r[:, None, None, None] * dirs[None]
    wts = wr[:, None, None] * wth[None, :, None] * (2.0 * math.pi / nphi)
    return pts, np.broadcast_to(wts, pts.shape[:-1])


def _chunks(C, axis, radii, thetas, n):
    # one panel at a time keeps the point arrays small
    frame = _frame(axis)
    for r_span in zip(radii[:-1], radii[1:]):
        for th_span in zip(thetas[:-1], thetas[1:]):
            yield _spherical_panel(C, frame, r_span, th_span, n)


def _nuclear_estimate(g1, g2, C, P, gamma, n):
    pc = P - C
    dist = float(np.linalg.norm(pc))
    axis = pc / dist if dist > 1e-12 else np.array([0.0, 0.0, 1.0])
    lmax = sum(g1.index) + sum(g2.index)
    reach = (12.0 + lmax) / math.sqrt(gamma)
    width = 3.0 / math.sqrt(gamma)
    radii = sorted({0.0, max(0.0, dist - width), dist, dist + width, dist + reach})
    radii = [r for i, r in enumerate(radii) if i == 0 or r > radii[i - 1] + 1e-12]
    # a distant, compact charge is seen from C inside a narrow cone about
    # the axis: grade the polar panels toward it
    thetas = [0.0]
    cone = width / dist if dist > 0 else math.pi
    while cone < math.pi / 2:
        thetas.append(cone)
        cone *= 2.0
    thetas.append(math.pi)
    total = mass = 0.0
    for pts, wts in _chunks(C, axis, radii, thetas, n):
        r = np.linalg.norm(pts - C, axis=-1)
        vals = wts * g1(pts) * g2(pts) / r
        total += float(np.sum(vals))
        mass += float(np.sum(np.abs(vals)))
    return total, mass


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    points: int


def quadrature_one_electron_detailed(
    kind: str,
    g1: PrimitiveGaussian,
    g2: PrimitiveGaussian,
    C=None,
    tol: float = 1e-10,
    n0: int = 16,
    nmax: int = 128,
) -> QuadratureResult:
    """Numerical <g1|op|g2> over unnormalized primitives.

    Point counts double from ``n0`` until successive estimates differ by at
    most ``tol`` relative, or by no more than round-off on the integrand's
    absolute mass (integrals that vanish by symmetry); past ``nmax`` a
    :class:`ConvergenceError` is raised.
    """
    if kind not in ("overlap", "kinetic", "nuclear"):
        raise ValueError(f"unknown integral kind {kind!r}")
    A = np.asarray(g1.center, dtype=float)
    B = np.asarray(g2.center, dtype=float)
    gamma = g1.exponent + g2.exponent
    P = (g1.exponent * A + g2.exponent * B) / gamma
    if kind == "nuclear":
        if C is None:
            raise ValueError("nuclear kind needs a nucleus position")
        C = np.asarray(C, dtype=float)

    def estimate(n: int) -> tuple[float, float]:
        if kind == "nuclear":
            return _nuclear_estimate(g1, g2, C, P, gamma, n)
        pts, wts = _hermite_grid(P, gamma, n)
        if kind == "overlap":
            vals = wts * g1(pts) * g2(pts)
        else:
            vals = wts * g1(pts) * (-0.5) * _laplacian(g2, pts)
        return float(np.sum(vals)), float(np.sum(np.abs(vals)))

    n = n0
    prev, _ = estimate(n)
    while True:
        n *= 2
        if n > nmax:
            raise ConvergenceError(f"{kind} quadrature did not converge by n={nmax}")
        cur, mass = estimate(n)
        err = abs(cur - prev)
        if err <= tol * abs(cur) or err <= 1e-14 * mass:
            return QuadratureResult(cur, err, n)
        prev = cur


def quadrature_one_electron(kind: str, g1: PrimitiveGaussian, g2: PrimitiveGaussian, C=None, **kw) -> float:
    return quadrature_one_electron_detailed(kind, g1, g2, C, **kw).value


def quadrature_self_overlap(g, n: int = 16) -> float:
    """Self-overlap of a primitive or contracted function on a spherical grid.

    The grid sits on the function's center with geometric radial panels
    running from well inside the tightest exponent to beyond the most
    diffuse one; ``n`` is the per-panel and polar node count.
    """
    if isinstance(g, PrimitiveGaussian):
        center, exps = g.center, (g.exponent,)
    else:
        center, exps = g.shell.center, g.shell.exponents
    center = np.asarray(center, dtype=float)
    lo = 0.02 / math.sqrt(max(exps))
    hi = 9.0 / math.sqrt(min(exps))
    radii = [0.0] + list(np.geomspace(lo, hi, 24))
    total = 0.0
    for pts, wts in _chunks(center, np.array([0.0, 0.0, 1.0]), radii, [0.0, math.pi], n):
        total += float(np.sum(wts * g(pts) ** 2))
    return total
