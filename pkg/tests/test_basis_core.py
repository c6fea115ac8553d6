from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussint import oracle
from gaussint.basis_core import (
    AngularMomentumIndex,
    BasisFunction,
    BasisParseError,
    ContractedShell,
    DegenerateContractionError,
    Molecule,
    PrimitiveGaussian,
    build_basis,
    cartesian_tuples,
    contracted_norm,
    double_factorial,
    enumerate_cartesian_components,
    load_basis,
    load_builtin,
    make_atom,
    ncart,
    parse_xyz,
    primitive_norm,
    serialize_basis,
)

from conftest import STO3G_H


@pytest.mark.parametrize("k, expected", [(-1, 1), (0, 1), (1, 1), (5, 15), (7, 105), (6, 48)])
def test_double_factorial(k, expected):
    assert double_factorial(k) == expected


def test_double_factorial_domain():
    with pytest.raises(ValueError):
        double_factorial(-2)


def test_index_arithmetic():
    n = AngularMomentumIndex(1, 0, 2)
    assert n.lam == 3
    assert n.increment(0).as_tuple() == (2, 0, 2)
    assert n.decrement(2).as_tuple() == (1, 0, 1)
    with pytest.raises(ValueError):
        n.decrement(1)
    with pytest.raises(ValueError):
        AngularMomentumIndex(-1, 0, 0)


@pytest.mark.parametrize(
    "alpha, n, expected",
    [
        (1.0, (0, 0, 0), 0.71270547),
        (1.0, (1, 0, 0), 1.42541094),
        (0.5, (0, 0, 0), 0.42377721),
    ],
)
def test_primitive_norm_values(alpha, n, expected):
    assert primitive_norm(alpha, n) == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("lam", [0, 1, 2, 3, 4])
def test_normalized_primitive_quadrature(alpha, lam):
    comps = cartesian_tuples(lam)
    for n in (comps[0], comps[len(comps) // 2], comps[-1]):
        g = PrimitiveGaussian(alpha, n)
        s = oracle.quadrature_self_overlap(g)
        assert primitive_norm(alpha, n) ** 2 * s == pytest.approx(1.0, abs=1e-8)


def test_contracted_norm_single_and_split():
    ref = primitive_norm(1.0, (0, 0, 0))
    assert contracted_norm([(1.0, 1.0)], (0, 0, 0)) == pytest.approx(ref, rel=1e-14)
    assert contracted_norm([(1.0, 0.5), (1.0, 0.5)], (0, 0, 0)) == pytest.approx(ref, rel=1e-14)


@given(st.floats(0.05, 50.0), st.integers(0, 4))
def test_contracted_norm_reduces_to_primitive(alpha, lam):
    for n in cartesian_tuples(lam):
        assert contracted_norm([(alpha, 1.0)], n) == pytest.approx(primitive_norm(alpha, n), rel=1e-14)


def test_contracted_norm_degenerate():
    with pytest.raises(DegenerateContractionError):
        contracted_norm([(1.0, 0.0), (2.0, 0.0)], (0, 0, 0))


def test_sto3g_hydrogen_normalized_by_quadrature():
    shell = ContractedShell((0.0, 0.0, 0.0), 0, *zip(*STO3G_H))
    f = BasisFunction(shell, 0)
    assert oracle.quadrature_self_overlap(f) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("lam", range(9))
def test_component_enumeration(lam):
    comps = enumerate_cartesian_components(lam)
    tuples = [c.as_tuple() for c in comps]
    assert len(comps) == ncart(lam) == (lam + 1) * (lam + 2) // 2
    assert len(set(tuples)) == len(tuples)
    assert all(sum(t) == lam for t in tuples)
    assert tuples == sorted(tuples, reverse=True)


def test_component_order_d():
    assert cartesian_tuples(1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert cartesian_tuples(2) == ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))


def test_shell_canonicalizes_exponent_order():
    sh = ContractedShell((0, 0, 0), 1, (0.5, 2.0, 1.0), (0.1, 0.2, 0.3))
    assert sh.exponents == (2.0, 1.0, 0.5)
    assert sh.coefficients == (0.2, 0.3, 0.1)
    assert sh.size == 3
    with pytest.raises(ValueError):
        ContractedShell((0, 0, 0), 0, (1.0, 1.0), (0.5, 0.5))
    with pytest.raises(ValueError):
        ContractedShell((0, 0, 0), 5, (1.0,), (1.0,))


@pytest.mark.parametrize("lam", [0, 1, 2, 3, 4])
def test_coefficient_factorization(lam, rng):
    from conftest import random_shell

    sh = random_shell(rng, lam)
    np.testing.assert_allclose(
        sh.coefficient_matrix, np.outer(sh.component_scales, sh.primitive_weights), rtol=1e-14
    )


MINIMAL = "H 0\nS 1 1.00\n1.0 1.0\n****\n"


def test_load_minimal():
    lib = load_basis(MINIMAL)
    (t,) = lib["H"]
    assert (t.lam, t.exponents, t.coefficients) == (0, (1.0,), (1.0,))


def test_builtin_sto3g_hydrogen():
    lib = load_builtin("sto-3g")
    (t,) = lib["H"]
    assert t.lam == 0
    assert t.exponents == tuple(a for a, _ in STO3G_H)
    assert list(t.exponents) == sorted(t.exponents, reverse=True)


SP_TEXT = """! comment line
C     0
S   3   1.00
      0.7161683735D+02       0.1543289673D+00
      0.1304509632D+02       0.5353281423D+00
      0.3530512160D+01       0.4446345422D+00
SP   3   1.00
      0.2941249355D+01      -0.9996722919D-01       0.1559162750D+00
      0.6834830964D+00       0.3995128261D+00       0.6076837186D+00
      0.2222899159D+00       0.7001154689D+00       0.3919573931D+00
****
"""


def test_sp_shell_splits_and_round_trips():
    lib = load_basis(SP_TEXT)
    lams = [t.lam for t in lib["C"]]
    assert lams == [0, 0, 1]
    assert lib["C"][1].exponents == lib["C"][2].exponents
    assert lib["C"][2].coefficients[0] == pytest.approx(0.1559162750)
    again = load_basis(serialize_basis(lib))
    assert again.shells == lib.shells
    assert load_basis(serialize_basis(again)).shells == again.shells


def test_scale_factor_squares_exponents():
    lib = load_basis("H 0\nS 1 1.24\n3.0 1.0\n****\n")
    assert lib["H"][0].exponents[0] == pytest.approx(3.0 * 1.24**2)


@pytest.mark.parametrize(
    "text, line",
    [
        ("H 0\nX 1 1.00\n1.0 1.0\n****\n", 2),
        ("H 0\nS 1 1.00\n-1.0 1.0\n****\n", 3),
        ("H 0\nS 2 1.00\n1.0 1.0\n", 3),
        ("H 0\nS 1 1.00\n1.0 abc\n****\n", 3),
        ("H 0\nH 1 1.00\n1.0 1.0\n****\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(BasisParseError) as err:
        load_basis(text)
    assert err.value.line == line


def test_build_basis_counts():
    lib = load_builtin("sto-3g")
    h2 = Molecule((make_atom("H", (0, 0, 0)), make_atom("H", (0, 0, 1.4))))
    assert sum(s.size for s in build_basis(h2, lib)) == 2
    he_lib = load_basis("He 0\nS 1 1.00\n1.0 1.0\nD 1 1.00\n0.8 1.0\n****\n")
    he = Molecule((make_atom("He", (0, 0, 0)),))
    assert sum(s.size for s in build_basis(he, he_lib)) == 7
    with pytest.raises(KeyError):
        build_basis(Molecule((make_atom("Li", (0, 0, 0)),)), he_lib)
    with pytest.raises(ValueError):
        Molecule(())


def test_parse_xyz_units():
    text = "2\nwater-free\nH 0 0 0\nh 0 0 0.52917721092\n"
    bohr = parse_xyz(text)
    ang = parse_xyz(text, angstrom=True)
    assert bohr.atoms[1].symbol == "H"
    assert ang.atoms[1].position[2] == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(BasisParseError) as err:
        parse_xyz("3\nshort\nH 0 0 0\n")
    assert err.value.line == 4
