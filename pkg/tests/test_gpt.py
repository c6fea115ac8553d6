from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussint.basis_core import PrimitiveGaussian
from gaussint.gpt import (
    binomial_prefactor,
    binomial_prefactor_single_sum,
    make_pair,
    product_expansion,
)

from conftest import log_uniform, random_index


def test_coincident_pair():
    p = make_pair(1.0, (0, 0, 0), 1.0, (0, 0, 0))
    assert p.gamma == 2.0 and p.K == 1.0
    np.testing.assert_array_equal(p.P, 0.0)


def test_midpoint_and_arithmetic():
    p = make_pair(0.7, (1, 2, 3), 0.7, (3, 2, 1))
    np.testing.assert_allclose(p.P, (2, 2, 2))
    q = make_pair(1.0, (0, 0, 0), 2.0, (0, 0, 3))
    assert q.gamma == 3.0
    np.testing.assert_allclose(q.P, (0, 0, 2), atol=1e-15)
    assert q.K == pytest.approx(math.exp(-6.0), rel=1e-15)


def test_rejects_bad_exponent():
    with pytest.raises(ValueError):
        make_pair(0.0, (0, 0, 0), 1.0, (0, 0, 0))


coord = st.floats(-3, 3)
vec = st.tuples(coord, coord, coord)


@given(st.floats(0.05, 50), vec, st.floats(0.05, 50), vec)
def test_pair_invariants_and_swap(a1, A, a2, B):
    p = make_pair(a1, A, a2, B)
    q = make_pair(a2, B, a1, A)
    assert p.gamma == a1 + a2
    np.testing.assert_allclose(p.gamma * p.P, a1 * np.array(A) + a2 * np.array(B), rtol=1e-14, atol=1e-13)
    assert 0 < p.K <= 1
    assert p.gamma == q.gamma and p.K == q.K
    np.testing.assert_allclose(p.P, q.P, rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(p.PA, q.PB, rtol=1e-14, atol=1e-14)


def test_binomial_examples():
    assert binomial_prefactor(0, 0, 0, 0.3, 0.8) == 1.0
    pa, pb = 0.3, -0.7
    assert binomial_prefactor(0, 1, 1, pa, pb) == pytest.approx(pa * pb)
    assert binomial_prefactor(1, 1, 1, pa, pb) == pytest.approx(-0.4)
    assert binomial_prefactor(2, 1, 1, pa, pb) == 1.0
    assert [binomial_prefactor(k, 2, 0, 0.5, 9.0) for k in range(3)] == [0.25, 1.0, 1.0]
    with pytest.raises(ValueError):
        binomial_prefactor(3, 1, 1, pa, pb)


def test_single_sum_matches_double_sum_exhaustive(rng):
    for l1 in range(5):
        for l2 in range(5):
            for _ in range(3):
                pa, pb = rng.uniform(-2, 2, 2)
                for k in range(l1 + l2 + 1):
                    a = binomial_prefactor(k, l1, l2, pa, pb)
                    b = binomial_prefactor_single_sum(k, l1, l2, pa, pb)
                    assert b == pytest.approx(a, rel=1e-13, abs=1e-13)
                assert binomial_prefactor_single_sum(l1 + l2, l1, l2, pa, pb) == 1.0


def test_matches_polynomial_multiplication(rng):
    for l1 in range(5):
        for l2 in range(5):
            pa, pb = rng.uniform(-2, 2, 2)
            poly = np.polynomial.polynomial
            ref = poly.polymul(poly.polypow([pa, 1.0], l1), poly.polypow([pb, 1.0], l2))
            got = [binomial_prefactor_single_sum(k, l1, l2, pa, pb) for k in range(l1 + l2 + 1)]
            np.testing.assert_allclose(got, ref, rtol=1e-13, atol=1e-13)


def test_product_reconstruction(rng):
    for _ in range(50):
        a1, a2 = log_uniform(rng, 0.1, 5.0, 2)
        A, B = rng.uniform(-1.5, 1.5, (2, 3))
        n1, n2 = random_index(rng, 2), random_index(rng, 2)
        pts = rng.uniform(-2.5, 2.5, (100, 3))
        direct = PrimitiveGaussian(a1, n1, A)(pts) * PrimitiveGaussian(a2, n2, B)(pts)
        expanded = product_expansion(make_pair(a1, A, a2, B), n1, n2, pts)
        np.testing.assert_allclose(expanded, direct, rtol=1e-12, atol=1e-12 * np.abs(direct).max())


def test_relative_to_is_shift_invariant():
    A, B, C = np.array([0.3, -0.2, 1.1]), np.array([-0.4, 0.9, 0.2]), np.array([0.1, 0.1, 0.1])
    s = np.array([5.3, -7.1, 2.9])
    p = make_pair(0.8, A, 2.3, B)
    q = make_pair(0.8, A + s, 2.3, B + s)
    np.testing.assert_allclose(p.relative_to(C), p.P - C, atol=1e-15)
    np.testing.assert_allclose(q.relative_to(C + s), p.relative_to(C), atol=4e-15)
    same = make_pair(1.1, A + s, 0.7, A + s)
    np.testing.assert_array_equal(same.relative_to(A + s), 0.0)
