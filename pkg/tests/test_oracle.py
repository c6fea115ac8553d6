from __future__ import annotations

import ast
import math
from pathlib import Path

import numpy as np
import pytest

import gaussint.oracle as oracle
from gaussint.basis_core import PrimitiveGaussian, primitive_norm
from gaussint.boys import boys_values
from gaussint.eri import eri_ssss, quartet_from_primitives

S0 = (0, 0, 0)


def test_oracle_imports_no_engine_module():
    tree = ast.parse(Path(oracle.__file__).read_text())
    imported = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            imported.add(node.module or "")
        elif isinstance(node, ast.Import):
            imported.update(a.name for a in node.names)
    assert not any(m.endswith(("eri", "one_electron", "gpt")) for m in imported)


def test_ssss_is_zero_order(rng):
    alphas = [0.9, 1.7, 0.4, 2.1]
    centers = rng.uniform(-1, 1, (4, 3))
    val = oracle.eri_by_differentiation(alphas, centers, 0, 0, 0, 0)[0, 0, 0, 0]
    assert val == pytest.approx(eri_ssss(quartet_from_primitives(alphas, centers)), rel=1e-14)


def test_px_is_scaled_derivative(rng):
    alphas = np.array([0.9, 1.7, 0.4, 2.1])
    centers = rng.uniform(-1, 1, (4, 3))
    h = 1e-4

    def ssss(A):
        cs = centers.copy()
        cs[0] = A
        return oracle.eri_by_differentiation(alphas, cs, 0, 0, 0, 0)[0, 0, 0, 0]

    e = np.array([h, 0, 0])
    fd = (-ssss(centers[0] + 2 * e) + 8 * ssss(centers[0] + e) - 8 * ssss(centers[0] - e) + ssss(centers[0] - 2 * e)) / (12 * h)
    px = oracle.eri_by_differentiation(alphas, centers, 1, 0, 0, 0)[0, 0, 0, 0]
    assert px == pytest.approx(fd / (2 * alphas[0]), rel=1e-8)


def test_seed_and_coefficients(rng):
    seed = oracle.DerivativeSeed((1.0, 0.5, 0.8, 1.3), tuple(map(tuple, rng.uniform(-1, 1, (4, 3)))),
                                 ((1, 0, 0), (0, 1, 1), (0, 0, 0), (2, 0, 0)))
    assert seed.total_order == 5
    cm = oracle.eri_fm_coefficients(seed)
    assert len(cm) == 6
    q = oracle._QuartetOracle(seed.exponents, seed.centers)
    fm = boys_values(5, q.T)
    assert float(cm @ fm) == pytest.approx(oracle.eri_seed_value(seed), rel=1e-13)


def test_charge_cloud_radial():
    N = primitive_norm(1.0, S0)
    assert N**4 * oracle.coulomb_ssss_same_center([1.0] * 4) == pytest.approx(2 / math.sqrt(math.pi), abs=1e-12)
    g = quartet_from_primitives([0.3, 1.1, 2.0, 0.7], [(0.2, 0.1, 0.0)] * 4)
    assert oracle.coulomb_ssss_same_center([0.3, 1.1, 2.0, 0.7]) == pytest.approx(eri_ssss(g), rel=1e-12)


def test_quadrature_examples():
    g = PrimitiveGaussian(1.0, S0)
    N2 = primitive_norm(1.0, S0) ** 2
    assert N2 * oracle.quadrature_one_electron("overlap", g, g) == pytest.approx(1.0, abs=1e-8)
    assert N2 * oracle.quadrature_one_electron("kinetic", g, g) == pytest.approx(1.5, abs=1e-7)
    assert N2 * oracle.quadrature_one_electron("nuclear", g, g, (0, 0, 0)) == pytest.approx(1.59576912, abs=1e-6)


def test_quadrature_reports_error_and_refines():
    g1 = PrimitiveGaussian(0.8, (1, 0, 1), (0, 0, 0))
    g2 = PrimitiveGaussian(1.5, (0, 1, 0), (0.3, 0.4, -0.2))
    res = oracle.quadrature_one_electron_detailed("nuclear", g1, g2, (0.1, 0.5, 0.2))
    assert res.error <= 1e-10 * abs(res.value) or res.error <= 1e-14
    assert res.points >= 32


def test_quadrature_diagnostic():
    g1 = PrimitiveGaussian(50.0, (2, 0, 0), (0, 0, 0))
    g2 = PrimitiveGaussian(0.05, (0, 2, 0), (2.5, 2.5, 2.5))
    with pytest.raises(oracle.ConvergenceError):
        oracle.quadrature_one_electron("nuclear", g1, g2, (-2.5, -2.5, -2.5), tol=1e-15, nmax=32)


def test_quadrature_argument_checks():
    g = PrimitiveGaussian(1.0, S0)
    with pytest.raises(ValueError):
        oracle.quadrature_one_electron("dipole", g, g)
    with pytest.raises(ValueError):
        oracle.quadrature_one_electron("nuclear", g, g)
