from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from gaussint import boys as boys_mod
from gaussint.boys import boys, boys_values


def reference(m, T):
    # lower incomplete gamma at 30 digits
    if T == 0:
        return 1.0 / (2 * m + 1)
    a = mpmath.mpf(m) + 0.5
    with mpmath.workdps(30):
        return float(mpmath.gammainc(a, 0, T) / (2 * mpmath.mpf(T) ** a))


def test_zero_argument():
    assert boys_values(0, 0.0)[0] == 1.0
    np.testing.assert_array_equal(boys_values(3, 0.0), [1, 1 / 3, 1 / 5, 1 / 7])
    for m, v in enumerate(boys_values(16, 0.0)):
        assert abs(v - 1 / (2 * m + 1)) <= 1e-15


def test_f0_at_one_by_quadrature():
    ref, _ = integrate.quad(lambda t: math.exp(-t * t), 0, 1, epsabs=1e-15)
    assert boys_values(0, 1.0)[0] == pytest.approx(ref, abs=1e-13)
    assert ref == pytest.approx(0.74682413, abs=1e-8)


@pytest.mark.parametrize("T", [1e-8, 0.1, 1.0, 10.0, 100.0])
def test_f0_erf_form(T):
    exact = 0.5 * math.sqrt(math.pi / T) * math.erf(math.sqrt(T))
    assert boys_values(0, T)[0] == pytest.approx(exact, rel=1e-13)


@given(st.integers(0, 24), st.floats(0.0, 200.0))
def test_against_incomplete_gamma(m, T):
    got = boys_values(m, T)
    ref = np.array([reference(k, T) for k in range(m + 1)])
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("T", [0.0, 1e-6, 0.3, 2.0, 15.0, 29.9, 30.0, 31.0, 75.0, 400.0])
def test_table_invariants(T):
    f = boys_values(20, T)
    assert np.all(f > 0) and np.all(f <= 1)
    if T > 0:
        assert np.all(np.diff(f) < 0)
    e = math.exp(-T)
    for m in range(20):
        down = (2 * T * f[m + 1] + e) / (2 * m + 1)
        assert abs(down - f[m]) <= 1e-14 * f[m]


def test_large_t_asymptote():
    for T in (50.0, 80.0, 200.0, 1e4):
        assert boys_values(0, T)[0] * 2 * math.sqrt(T / math.pi) == pytest.approx(1.0, abs=1e-10)


def test_monotone_in_t():
    Ts = np.linspace(0, 60, 121)
    vals = np.array([boys_values(6, T) for T in Ts])
    assert np.all(np.diff(vals, axis=0) < 0)


@pytest.mark.parametrize("T", [0.5, 5.0])
def test_derivative_identity(T):
    h = 1e-5
    fp, fm, f0 = boys_values(6, T + h), boys_values(6, T - h), boys_values(7, T)
    deriv = (fp - fm) / (2 * h)
    np.testing.assert_allclose(deriv, -f0[1:], rtol=1e-6)


def test_domain_errors():
    for bad in (-1.0, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            boys(2, bad)
    with pytest.raises(ValueError):
        boys(-1, 1.0)


def test_table_type():
    t = boys(4, 2.0)
    assert len(t) == 5 and t.T == 2.0
    assert t[2] == t.values[2]


@pytest.mark.parametrize("switch", [1e-3, 5.0, 30.0, 1e3])
def test_switch_override_is_harmless(switch):
    Ts = [0.01, 1.0, 12.0, 33.0, 90.0, 700.0]
    base = [boys_values(16, T) for T in Ts]
    with boys_mod.override(t_switch=switch):
        assert boys_mod.config.t_switch == switch
        moved = [boys_values(16, T) for T in Ts]
    assert boys_mod.config.t_switch == boys_mod.T_SWITCH
    for a, b in zip(base, moved):
        np.testing.assert_allclose(a, b, rtol=1e-13)
