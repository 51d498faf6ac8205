from __future__ import annotations

import itertools

import numpy as np
import pytest

from dual_bbgky.errors import AbsentPotentialError, CapacityError, ValidationError
from dual_bbgky.hamiltonian import (
    PAULI_X,
    PAULI_Z,
    InteractionPotential,
    SystemSpec,
    build_H,
    hamiltonian_on,
    liouville_observable,
    liouville_state,
    n_int,
    n_int_state,
    preset_spec,
    random_spec,
)
from dual_bbgky.tensor import ManyBodyOperator, check_symmetry, embed, hermitian_expm
from helpers import rand_op

SWAP = np.eye(4)[[0, 2, 1, 3]]


def test_H0_is_zero():
    spec = preset_spec("pair-zz", 3)
    H0 = build_H(spec, 0)
    assert H0.matrix.shape == (1, 1) and H0.matrix[0, 0] == 0


def test_free_H2():
    rng = np.random.default_rng(0)
    spec = random_spec(rng, 2, 3, ()).free_part()
    h = spec.h1
    assert np.allclose(build_H(spec, 2).matrix, np.kron(h, np.eye(2)) + np.kron(np.eye(2), h))


def test_term_counts():
    # identity one-body and pair terms make H_n count its terms
    spec = SystemSpec(2, 4, np.eye(2), (InteractionPotential(2, np.eye(4), 2), InteractionPotential(3, np.eye(8), 2)))
    for n in range(1, 5):
        expected = n + n * (n - 1) // 2 + n * (n - 1) * (n - 2) // 6
        assert np.allclose(build_H(spec, n).matrix, expected * np.eye(2 ** n))


def test_H3_pair_terms_explicit():
    rng = np.random.default_rng(1)
    spec = random_spec(rng, 2, 3, (2,))
    phi, h = spec.potential(2).phi, spec.h1
    I2 = np.eye(2)
    P23 = np.kron(I2, SWAP)
    one = np.kron(np.kron(h, I2), I2) + np.kron(np.kron(I2, h), I2) + np.kron(np.kron(I2, I2), h)
    pair = np.kron(phi, I2) + np.kron(I2, phi) + P23 @ np.kron(phi, I2) @ P23
    assert np.allclose(build_H(spec, 3).matrix, one + pair)


def test_H_symmetric_and_hermitian():
    rng = np.random.default_rng(2)
    spec = random_spec(rng, 2, 4, (2, 3))
    for n in range(1, 5):
        H = build_H(spec, n)
        assert H.is_hermitian()
        assert check_symmetry(H) <= 1e-12


def test_capacity_and_validation():
    with pytest.raises(CapacityError):
        build_H(preset_spec("free", 2), 3)
    with pytest.raises(CapacityError):
        SystemSpec(2, 9, np.eye(2))
    with pytest.raises(ValidationError) as exc:
        SystemSpec(2, 2, np.array([[0, 1], [0, 0]]))
    assert exc.value.field == "h1"
    with pytest.raises(ValidationError):
        InteractionPotential(2, np.kron(PAULI_Z, np.eye(2)), 2)  # Z (x) I is not slot-symmetric
    sym = InteractionPotential(2, np.kron(PAULI_Z, np.eye(2)), 2, symmetrize=True)
    assert np.allclose(sym.phi, 0.5 * (np.kron(PAULI_Z, np.eye(2)) + np.kron(np.eye(2), PAULI_Z)))
    with pytest.raises(ValidationError):
        InteractionPotential(2, np.array([[0, 1, 0, 0], [0] * 4, [0] * 4, [0] * 4]), 2)
    with pytest.raises(ValidationError):
        SystemSpec(2, 2, np.eye(2), (InteractionPotential(3, np.eye(8), 2),))
    zz = InteractionPotential(2, np.kron(PAULI_Z, PAULI_Z), 2)
    with pytest.raises(ValidationError):
        SystemSpec(2, 3, np.eye(2), (zz, zz))


def test_liouville_examples():
    rng = np.random.default_rng(3)
    spec = random_spec(rng, 2, 3, (2, 3))
    for n in (1, 2, 3):
        Y = tuple(range(1, n + 1))
        assert np.abs(liouville_observable(spec, build_H(spec, n)).matrix).max() < 1e-12
        assert np.abs(liouville_observable(spec, ManyBodyOperator.identity(Y, 2)).matrix).max() == 0
        f = rand_op(rng, Y)
        assert np.allclose((liouville_state(spec, f) + liouville_observable(spec, f)).matrix, 0)
        assert abs(liouville_state(spec, f).trace()) < 1e-12


def test_liouville_on_general_labels():
    rng = np.random.default_rng(4)
    spec = random_spec(rng, 2, 3, (2,))
    g = rand_op(rng, (2, 3))
    H = hamiltonian_on(spec, (2, 3))
    assert np.allclose(H.matrix, build_H(spec, 2).matrix)
    expected = -1j * (g.matrix @ H.matrix - H.matrix @ g.matrix)
    assert np.allclose(liouville_observable(spec, g).matrix, expected)


def test_liouville_finite_difference():
    rng = np.random.default_rng(5)
    spec = random_spec(rng, 2, 3, (2, 3), hbar=0.7)
    g = rand_op(rng, (1, 2, 3), hermitian=True)
    H = build_H(spec, 3).matrix
    eps = 1e-6

    def G(t):
        U = hermitian_expm(H, t / spec.hbar)
        return U @ g.matrix @ U.conj().T

    fd = (G(eps) - G(-eps)) / (2 * eps)
    L = liouville_observable(spec, g)
    assert np.abs(fd - L.matrix).max() < 1e-8
    assert L.is_hermitian()


def test_liouville_is_derivation():
    rng = np.random.default_rng(6)
    spec = random_spec(rng, 2, 3, (2, 3))
    for _ in range(5):
        g, h = rand_op(rng, (1, 2, 3)), rand_op(rng, (1, 2, 3))
        lhs = liouville_observable(spec, g @ h)
        rhs = liouville_observable(spec, g) @ h + g @ liouville_observable(spec, h)
        assert np.abs((lhs - rhs).matrix).max() < 1e-11


def test_n_int_examples():
    spec = preset_spec("pair-zz", 3)
    assert np.abs(n_int(spec, 2, (1, 3), ManyBodyOperator.identity((1, 2, 3), 2)).matrix).max() == 0
    diag = ManyBodyOperator((1, 2, 3), np.diag(np.arange(8.0)), 2)
    assert np.abs(n_int(spec, 2, (2, 3), diag).matrix).max() == 0
    with pytest.raises(AbsentPotentialError):
        n_int(spec, 3, (1, 2, 3), diag)


def test_n_int_definition():
    rng = np.random.default_rng(7)
    spec = random_spec(rng, 2, 3, (2,), hbar=1.3)
    g = rand_op(rng, (1, 2, 3))
    P = embed(spec.potential(2).operator.relabel((1, 3)), (1, 2, 3)).matrix
    expected = (-1j / 1.3) * (g.matrix @ P - P @ g.matrix)
    assert np.allclose(n_int(spec, 2, (1, 3), g).matrix, expected)
    assert np.allclose(n_int_state(spec, 2, (1, 3), g).matrix, -expected)


def test_sum_rule():
    rng = np.random.default_rng(8)
    spec = random_spec(rng, 2, 3, (2, 3))
    Y = (1, 2, 3)
    g = rand_op(rng, Y)
    lhs = liouville_observable(spec, g) - liouville_observable(spec.free_part(), g)
    rhs = ManyBodyOperator.zeros(Y, 2)
    for k in spec.orders:
        for slots in itertools.combinations(Y, k):
            rhs = rhs + n_int(spec, k, slots, g)
    assert np.abs((lhs - rhs).matrix).max() < 1e-12


def test_presets():
    assert preset_spec("free", 3).orders == ()
    zz = preset_spec("pair-zz", 3)
    assert zz.orders == (2,) and np.allclose(zz.potential(2).phi, np.kron(PAULI_Z, PAULI_Z))
    assert np.allclose(zz.h1, PAULI_X + 0.3 * PAULI_Z)
    a, b = preset_spec("pair+triple-random", 3, seed=5), preset_spec("pair+triple-random", 3, seed=5)
    assert a.orders == (2, 3) and np.array_equal(a.potential(3).phi, b.potential(3).phi)
    with pytest.raises(ValidationError):
        preset_spec("nope", 2)


def test_unitary_cache_is_read_only():
    spec = preset_spec("pair-zz", 2)
    U = spec.unitary_matrix(2, 0.4)
    assert U is spec.unitary_matrix(2, 0.4)
    with pytest.raises(ValueError):
        U[0, 0] = 0
