"""Shared random-instance helpers for the tests."""

from __future__ import annotations

import numpy as np

from dual_bbgky.hamiltonian import random_hermitian, random_spec
from dual_bbgky.tensor import ManyBodyOperator


def rand_op(rng, labels, d=2, hermitian=False) -> ManyBodyOperator:
    dim = d ** len(labels)
    if hermitian:
        m = random_hermitian(rng, dim)
    else:
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return ManyBodyOperator(tuple(labels), m, d)


def rand_psd(rng, labels, d=2) -> ManyBodyOperator:
    a = rand_op(rng, labels, d).matrix
    m = a @ a.conj().T
    return ManyBodyOperator(tuple(labels), m / np.trace(m).real, d)


def seeded_specs(count, N=4, orders=(2, 3), seed=1234):
    """``count`` seeded random systems at d=2 with 2- and 3-body potentials."""
    return [random_spec(np.random.default_rng([seed, i]), 2, N, orders) for i in range(count)]
