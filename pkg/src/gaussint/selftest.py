"""Small embedded invariant corpus run by ``gaussint --selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from . import eri, oracle
from .basis_core import cartesian_tuples
from .boys import boys_values, config
from .gpt import make_pair
from .one_electron import kinetic_prim_asym, kinetic_prim_sym
from .rys import rys_rule

DEFAULT_SEED = 20240101


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name:<18} worst={self.worst:.2e} tol={self.tolerance:.0e}"


def _random_index(rng, lam_max: int) -> tuple[int, int, int]:
    lam = int(rng.integers(0, lam_max + 1))
    comps = cartesian_tuples(lam)
    return comps[int(rng.integers(len(comps)))]


def kinetic_identity(rng, cases: int = 200) -> float:
    worst = 0.0
    for _ in range(cases):
        a1, a2 = np.exp(rng.uniform(math.log(0.05), math.log(50.0), 2))
        A, B = rng.uniform(-2.5, 2.5, (2, 3))
        n1, n2 = _random_index(rng, 4), _random_index(rng, 4)
        pair = make_pair(a1, A, a2, B)
        s = kinetic_prim_sym(pair, n1, n2)
        t = kinetic_prim_asym(pair, n1, n2)
        worst = max(worst, abs(s - t) / max(abs(s), 1e-300))
    return worst


def boys_erf(rng) -> float:
    worst = 0.0
    for T in (1e-8, 0.1, 1.0, 10.0, 100.0):
        exact = 0.5 * math.sqrt(math.pi / T) * special.erf(math.sqrt(T))
        worst = max(worst, abs(boys_values(0, T)[0] - exact) / exact)
    return worst


def rys_exactness(rng) -> float:
    worst = 0.0
    for n in range(1, 7):
        for T in (0.0, 0.1, 1.0, 10.0, 100.0):
            rule = rys_rule(n, T)
            fm = boys_values(2 * n - 1, T)
            for m in range(2 * n):
                worst = max(worst, abs(rule.integrate_even(m) - fm[m]) / fm[m])
    return worst


def backend_triangle(rng, cases: int = 12) -> float:
    worst = 0.0
    for _ in range(cases):
        ls = [int(x) for x in rng.integers(0, 3, 4)]
        alphas = np.exp(rng.uniform(math.log(0.1), math.log(10.0), 4))
        centers = rng.uniform(-1.5, 1.5, (4, 3))
        geom = eri.quartet_from_primitives(alphas, centers)
        a = eri.os_full_class(geom, *ls)
        b = eri.hgp_primitive_class(geom, *ls)
        c = oracle.eri_by_differentiation(alphas, centers, *ls)
        scale = max(np.abs(c).max(), 1e-300)
        worst = max(worst, *(np.abs(x - y).max() / scale for x, y in ((a, b), (a, c), (b, c))))
    return worst


SUITES: tuple[tuple[str, Callable, float], ...] = (
    ("kinetic-identity", kinetic_identity, 1e-12),
    ("boys-erf", boys_erf, 1e-13),
    ("rys-exactness", rys_exactness, 1e-10),
    ("backend-triangle", backend_triangle, 1e-10),
)


def run(seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    out = []
    for k, (name, fn, tol) in enumerate(SUITES):
        rng = np.random.default_rng([seed, k])
        worst = float(fn(rng))
        out.append(SuiteResult(name, worst <= tol, worst, tol))
    return out


def report(results: list[SuiteResult]) -> str:
    lines = [f"selftest boys_t_switch={config.t_switch:g}"]
    lines += [r.line() for r in results]
    npass = sum(r.passed for r in results)
    lines.append(f"{npass}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"
