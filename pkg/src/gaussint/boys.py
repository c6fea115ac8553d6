"""Boys function F_m(T) = int_0^1 t^(2m) exp(-T t^2) dt.

The top order is evaluated directly (series below ``t_switch``, asymptotic
form above it) and lower orders are filled by downward recursion, which is
stable for every T. Upward recursion is never used.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import numpy as np

T_SWITCH = 30.0
SERIES_TOL = 1e-16
SERIES_MAX_TERMS = 5000


@dataclass
class BoysConfig:
    t_switch: float = T_SWITCH
    series_tol: float = SERIES_TOL


config = BoysConfig()


@contextlib.contextmanager
def override(t_switch: float | None = None, series_tol: float | None = None):
    """Temporarily change the evaluation constants (used by the selftest)."""
    saved = BoysConfig(config.t_switch, config.series_tol)
    if t_switch is not None:
        if not t_switch >= 0:
            raise ValueError("t_switch must be non-negative")
        config.t_switch = float(t_switch)
    if series_tol is not None:
        config.series_tol = float(series_tol)
    try:
        yield config
    finally:
        config.t_switch, config.series_tol = saved.t_switch, saved.series_tol


@dataclass(frozen=True)
class BoysTable:
    T: float
    values: np.ndarray

    def __getitem__(self, m: int) -> float:
        return float(self.values[m])

    def __len__(self) -> int:
        return len(self.values)


def _series(m: int, T: float, tol: float) -> float:
    # F_m(T) = exp(-T) * sum_k (2T)^k / ((2m+1)(2m+3)...(2m+2k+1))
    term = 1.0 / (2 * m + 1)
    total = term
    for k in range(1, SERIES_MAX_TERMS):
        term *= 2.0 * T / (2 * m + 2 * k + 1)
        total += term
        if term < tol * total:
            return math.exp(-T) * total
    raise ArithmeticError(f"Boys series did not converge for m={m}, T={T}")


def _asymptotic(m: int, T: float) -> float:
    return math.exp(
        math.lgamma(m + 0.5) - (m + 0.5) * math.log(T)
    ) / 2.0


def _asymptotic_ok(m: int, T: float, tol: float) -> bool:
    # dropped tail is ~ exp(-T)/(2T - 2m - 1); compare against the leading term
    if T <= m + 0.5:
        return False
    tail = math.exp(-T) / (2.0 * T - 2.0 * m - 1.0)
    return tail <= tol * _asymptotic(m, T)


def boys(m_max: int, T: float) -> BoysTable:
    """F_0(T) .. F_{m_max}(T)."""
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    T = float(T)
    if not math.isfinite(T) or T < 0:
        raise ValueError(f"Boys argument must be finite and >= 0, got {T}")
    values = np.empty(m_max + 1)
    if T == 0.0:
        values[:] = 1.0 / (2.0 * np.arange(m_max + 1) + 1.0)
        return BoysTable(T, values)
    tol = config.series_tol
    if T >= config.t_switch and _asymptotic_ok(m_max, T, tol):
        values[m_max] = _asymptotic(m_max, T)
    else:
        values[m_max] = _series(m_max, T, tol)
    emt = math.exp(-T)
    for m in range(m_max - 1, -1, -1):
        values[m] = (2.0 * T * values[m + 1] + emt) / (2 * m + 1)
    return BoysTable(T, values)


def boys_values(m_max: int, T: float) -> np.ndarray:
    return boys(m_max, T).values
