"""Truncated many-particle Hamiltonians with k-body interactions.

The n-particle Hamiltonian is

    H_n = sum_i h1(i) + sum_k sum_{i_1<...<i_k} Phi^(k)(i_1, ..., i_k),

with ``h1`` an arbitrary one-body Hermitian matrix standing in for the
kinetic term.  Observables evolve under the commutator generator
``-(i/hbar)(g H - H g)``; states under its negative.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .combinatorics import as_labels
from .errors import AbsentPotentialError, CapacityError, LabelError, ValidationError
from .tensor import (
    HERMITIAN_RTOL,
    ManyBodyOperator,
    check_symmetry,
    hermitian_expm,
    place,
    symmetrize,
)

#: Largest single-sector dimension d**N a SystemSpec will accept.
MAX_DIMENSION = 256

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class InteractionPotential:
    """k-body potential given as a d**k x d**k matrix on slots 1..k."""

    k: int
    phi: np.ndarray
    d: int
    symmetrize: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise ValidationError(f"potentials[k={self.k}]", "body order must be at least 2")
        op = ManyBodyOperator(tuple(range(1, self.k + 1)), self.phi, self.d)
        name = f"potentials[k={self.k}]"
        if self.symmetrize:
            op = symmetrize(op)
            op = op._like(0.5 * (op.matrix + op.matrix.conj().T))
        if not op.is_hermitian():
            raise ValidationError(name, f"not Hermitian (relative residual {op.hermiticity_residual():.3e})")
        res = check_symmetry(op)
        if res > SYMMETRY_TOL * max(1.0, float(np.linalg.norm(op.matrix, 2))):
            raise ValidationError(name, f"not invariant under slot permutations (residual {res:.3e})")
        object.__setattr__(self, "phi", op.matrix)

    @property
    def operator(self) -> ManyBodyOperator:
        return ManyBodyOperator(tuple(range(1, self.k + 1)), self.phi, self.d)


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Single-particle dimension, truncation order and the Hamiltonian data."""

    d: int
    N: int
    h1: np.ndarray
    potentials: tuple = ()
    hbar: float = 1.0
    max_dimension: int = MAX_DIMENSION
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("d", f"single-particle dimension must be >= 2, got {self.d}")
        if self.N < 1:
            raise ValidationError("N", f"truncation order must be >= 1, got {self.N}")
        if self.d ** self.N > self.max_dimension:
            raise CapacityError(
                f"d**N = {self.d ** self.N} exceeds the dimension capacity {self.max_dimension}"
            )
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValidationError("hbar", "must be a positive real")
        h1 = ManyBodyOperator((1,), self.h1, self.d)
        if not h1.is_hermitian():
            raise ValidationError("h1", f"not Hermitian (relative residual {h1.hermiticity_residual():.3e})")
        object.__setattr__(self, "h1", h1.matrix)
        pots = tuple(sorted(self.potentials, key=lambda p: p.k))
        orders = [p.k for p in pots]
        if len(set(orders)) != len(orders):
            raise ValidationError("potentials", f"duplicate body orders {orders}")
        for p in pots:
            if p.d != self.d:
                raise ValidationError(f"potentials[k={p.k}]", f"dimension {p.d} != d={self.d}")
            if p.k > self.N:
                raise ValidationError(f"potentials[k={p.k}]", f"body order exceeds N={self.N}")
        object.__setattr__(self, "potentials", pots)

    def potential(self, k: int) -> InteractionPotential | None:
        for p in self.potentials:
            if p.k == k:
                return p
        return None

    @property
    def orders(self) -> tuple:
        return tuple(p.k for p in self.potentials)

    def free_part(self) -> SystemSpec:
        """The same system with every interaction switched off."""
        return SystemSpec(self.d, self.N, self.h1, (), self.hbar, self.max_dimension)

    def with_truncation(self, N: int) -> SystemSpec:
        pots = tuple(p for p in self.potentials if p.k <= N)
        return SystemSpec(self.d, N, self.h1, pots, self.hbar, self.max_dimension)

    def _cached(self, key, build):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = build()
        value.setflags(write=False)
        with self._lock:
            return self._cache.setdefault(key, value)

    def hamiltonian_matrix(self, n: int) -> np.ndarray:
        """Matrix of H_n on particles 1..n (memoised)."""
        if n < 0 or n > self.N:
            raise CapacityError(f"particle number {n} outside 0..N={self.N}")
        return self._cached(("H", n), lambda: _assemble_H(self, n))

    def unitary_matrix(self, n: int, t: float) -> np.ndarray:
        """Matrix of U_n(t) = exp((i/hbar) t H_n) on particles 1..n (memoised)."""
        t = float(t)
        return self._cached(("U", n, t), lambda: hermitian_expm(self.hamiltonian_matrix(n), t / self.hbar))


def _assemble_H(spec: SystemSpec, n: int) -> np.ndarray:
    labels = tuple(range(1, n + 1))
    H = np.zeros((spec.d ** n, spec.d ** n), dtype=complex)
    for i in labels:
        H += place(spec.h1, spec.d, (i,), labels)
    for pot in spec.potentials:
        for slots in itertools.combinations(labels, pot.k):
            H += place(pot.phi, spec.d, slots, labels)
    return H


def build_H(spec: SystemSpec, n: int) -> ManyBodyOperator:
    """H_n on particles 1..n; H_0 is the 1x1 zero."""
    return ManyBodyOperator(tuple(range(1, n + 1)), spec.hamiltonian_matrix(n), spec.d)


def hamiltonian_on(spec: SystemSpec, labels: Sequence[int]) -> ManyBodyOperator:
    labels = as_labels(labels)
    return ManyBodyOperator(labels, spec.hamiltonian_matrix(len(labels)), spec.d)


def _check_in_range(spec: SystemSpec, g: ManyBodyOperator):
    if g.d != spec.d:
        raise LabelError(f"operator dimension {g.d} != d={spec.d}")
    if g.n > spec.N:
        raise CapacityError(f"operator on {g.n} particles exceeds N={spec.N}")


def liouville_observable(spec: SystemSpec, g: ManyBodyOperator) -> ManyBodyOperator:
    """-(i/hbar)(g H - H g) with H the Hamiltonian of g's particles."""
    _check_in_range(spec, g)
    H = spec.hamiltonian_matrix(g.n)
    return g._like((-1j / spec.hbar) * (g.matrix @ H - H @ g.matrix))


def liouville_state(spec: SystemSpec, f: ManyBodyOperator) -> ManyBodyOperator:
    """-(i/hbar)(H f - f H), the state-side generator."""
    _check_in_range(spec, f)
    H = spec.hamiltonian_matrix(f.n)
    return f._like((-1j / spec.hbar) * (H @ f.matrix - f.matrix @ H))


def n_int(spec: SystemSpec, k: int, target_labels: Sequence[int], g: ManyBodyOperator) -> ManyBodyOperator:
    """-(i/hbar)(g Phi - Phi g) with the k-body potential on ``target_labels``.

    ``target_labels`` may be given in any order (factor i of Phi lands on
    ``target_labels[i]``).  Raises :class:`AbsentPotentialError` when no
    k-body potential is configured.
    """
    pot = spec.potential(k)
    if pot is None:
        raise AbsentPotentialError(f"no {k}-body potential is configured")
    target_labels = tuple(target_labels)
    if len(target_labels) != k:
        raise LabelError(f"{k}-body interaction needs {k} labels, got {target_labels}")
    phi = place(pot.phi, spec.d, target_labels, g.labels)
    return g._like((-1j / spec.hbar) * (g.matrix @ phi - phi @ g.matrix))


def n_int_state(spec: SystemSpec, k: int, target_labels: Sequence[int], f: ManyBodyOperator) -> ManyBodyOperator:
    """State-side interaction generator -(i/hbar)(Phi f - f Phi)."""
    return -n_int(spec, k, target_labels, f)


# -- presets and random instances ------------------------------------------

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """(A + A^dagger)/2 of a complex Gaussian A, rescaled to operator norm ``scale``."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = 0.5 * (a + a.conj().T)
    return scale * h / np.linalg.norm(h, 2)


def random_potential(rng: np.random.Generator, d: int, k: int, scale: float = 1.0) -> InteractionPotential:
    h = random_hermitian(rng, d ** k)
    op = symmetrize(ManyBodyOperator(tuple(range(1, k + 1)), h, d))
    m = op.matrix
    m = scale * m / np.linalg.norm(m, 2)
    return InteractionPotential(k, 0.5 * (m + m.conj().T), d)


def random_spec(
    rng: np.random.Generator,
    d: int = 2,
    N: int = 4,
    orders: Sequence[int] = (2, 3),
    scale: float = 1.0,
    hbar: float = 1.0,
) -> SystemSpec:
    """Seeded random system with one-body term and potentials of the given orders (capped at N)."""
    h1 = random_hermitian(rng, d, scale)
    pots = tuple(random_potential(rng, d, k, scale) for k in orders if k <= N)
    return SystemSpec(d, N, h1, pots, hbar)


def preset_spec(name: str, N: int, seed: int = 0, hbar: float = 1.0) -> SystemSpec:
    """Built-in systems: ``free``, ``pair-zz`` and ``pair+triple-random`` (all d = 2)."""
    if name == "free":
        return SystemSpec(2, N, PAULI_X + 0.5 * PAULI_Z, (), hbar)
    if name == "pair-zz":
        zz = InteractionPotential(2, np.kron(PAULI_Z, PAULI_Z), 2)
        return SystemSpec(2, N, PAULI_X + 0.3 * PAULI_Z, (zz,) if N >= 2 else (), hbar)
    if name == "pair+triple-random":
        return random_spec(np.random.default_rng(seed), 2, N, (2, 3), 1.0, hbar)
    raise ValidationError("system.preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")


PRESETS = ("free", "pair-zz", "pair+triple-random")
