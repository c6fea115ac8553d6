from __future__ import annotations

import math

import numpy as np
import pytest

from gaussint.basis_core import ContractedShell, cartesian_tuples

STO3G_H = (
    (3.425250914, 0.1543289673),
    (0.6239137298, 0.5353281423),
    (0.1688554040, 0.4446345422),
)


def log_uniform(rng, lo, hi, size=None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def random_index(rng, lam_max):
    lam = int(rng.integers(0, lam_max + 1))
    comps = cartesian_tuples(lam)
    return comps[int(rng.integers(len(comps)))]


def random_shell(rng, lam, nprim=3, center=None, lo=0.1, hi=10.0):
    exps = sorted(log_uniform(rng, lo, hi, nprim), reverse=True)
    coefs = rng.uniform(0.1, 1.0, nprim)
    if center is None:
        center = rng.uniform(-1.5, 1.5, 3)
    return ContractedShell(tuple(center), lam, tuple(exps), tuple(coefs))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
