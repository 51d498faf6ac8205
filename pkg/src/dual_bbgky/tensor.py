"""Dense operators on tensor powers of a d-dimensional single-particle space.

Every operator carries the ascending tuple of particle labels it acts on;
tensor factors are always ordered by label.  This makes embedding an
operator into a larger particle set, or tracing particles out, explicit
and unambiguous.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .combinatorics import LabelSet, as_labels
from .errors import LabelError, ValidationError

#: Relative tolerance for Hermiticity checks.
HERMITIAN_RTOL = 1e-10


class NormKind(enum.Enum):
    OPERATOR = "operator"
    TRACE = "trace"


@dataclass(frozen=True, eq=False)
class ManyBodyOperator:
    """Matrix of size d**n x d**n acting on the particles in ``labels``."""

    labels: LabelSet
    matrix: np.ndarray
    d: int

    def __post_init__(self):
        labels = as_labels(self.labels)
        m = np.array(self.matrix, dtype=complex)
        dim = self.d ** len(labels)
        if m.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match d={self.d} on {len(labels)} particles"
            )
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, labels: Sequence[int], d: int) -> ManyBodyOperator:
        return cls(tuple(labels), np.eye(d ** len(labels)), d)

    @classmethod
    def zeros(cls, labels: Sequence[int], d: int) -> ManyBodyOperator:
        n = d ** len(labels)
        return cls(tuple(labels), np.zeros((n, n)), d)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _like(self, matrix) -> ManyBodyOperator:
        return ManyBodyOperator(self.labels, matrix, self.d)

    def _check_same(self, other: ManyBodyOperator):
        if other.labels != self.labels or other.d != self.d:
            raise LabelError(f"operators act on different particles: {self.labels} vs {other.labels}")

    def __add__(self, other):
        if isinstance(other, ManyBodyOperator):
            self._check_same(other)
            return self._like(self.matrix + other.matrix)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, ManyBodyOperator):
            self._check_same(other)
            return self._like(self.matrix - other.matrix)
        return NotImplemented

    def __neg__(self):
        return self._like(-self.matrix)

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return self._like(scalar * self.matrix)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._like(self.matrix / scalar)

    def __matmul__(self, other: ManyBodyOperator) -> ManyBodyOperator:
        self._check_same(other)
        return self._like(self.matrix @ other.matrix)

    def dagger(self) -> ManyBodyOperator:
        return self._like(self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_residual(self) -> float:
        scale = max(1.0, float(np.linalg.norm(self.matrix, 2)))
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T, 2)) / scale

    def is_hermitian(self, rtol: float = HERMITIAN_RTOL) -> bool:
        return self.hermiticity_residual() <= rtol

    def relabel(self, labels: Sequence[int]) -> ManyBodyOperator:
        """Same matrix, attached to another (equally long) ascending label set."""
        labels = as_labels(labels)
        if len(labels) != self.n:
            raise LabelError(f"cannot relabel {self.n} particles as {labels}")
        return ManyBodyOperator(labels, self.matrix, self.d)

    def __repr__(self):
        return f"ManyBodyOperator(labels={self.labels}, d={self.d})"


def permute_factors(matrix: np.ndarray, d: int, perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: output factor ``p`` is input factor ``perm[p]``."""
    n = len(perm)
    if n == 0:
        return np.asarray(matrix)
    t = np.asarray(matrix).reshape((d,) * (2 * n))
    axes = list(perm) + [n + p for p in perm]
    return t.transpose(axes).reshape(d ** n, d ** n)


def place(matrix: np.ndarray, d: int, slots: Sequence[int], target: Sequence[int]) -> np.ndarray:
    """Put a k-factor matrix on the particles ``slots`` (in slot order) of ``target``.

    ``slots`` need not be ascending: factor i of ``matrix`` goes to particle
    ``slots[i]``.  Unlisted particles of ``target`` receive the identity.
    """
    slots = tuple(slots)
    target = tuple(target)
    if len(set(slots)) != len(slots):
        raise LabelError(f"repeated slot labels {slots}")
    missing = set(slots) - set(target)
    if missing:
        raise LabelError(f"labels {sorted(missing)} are not in the target set {target}")
    rest = [x for x in target if x not in slots]
    full = np.kron(np.asarray(matrix), np.eye(d ** len(rest)))
    source = list(slots) + rest
    perm = [source.index(x) for x in target]
    return permute_factors(full, d, perm)


def embed(op: ManyBodyOperator, target: Sequence[int]) -> ManyBodyOperator:
    """Extend ``op`` by the identity on the particles of ``target`` it does not touch."""
    target = as_labels(target)
    if not set(op.labels) <= set(target):
        raise LabelError(f"operator labels {op.labels} are not contained in {target}")
    if op.labels == target:
        return op
    return ManyBodyOperator(target, place(op.matrix, op.d, op.labels, target), op.d)


def partial_trace(op: ManyBodyOperator, traced: Sequence[int]) -> ManyBodyOperator:
    """Trace out the particles in ``traced``."""
    traced = tuple(sorted(traced))
    if not set(traced) <= set(op.labels):
        raise LabelError(f"cannot trace {traced} out of an operator on {op.labels}")
    if not traced:
        return op
    d, n = op.d, op.n
    kept = [x for x in op.labels if x not in traced]
    pos = {x: i for i, x in enumerate(op.labels)}
    order = [pos[x] for x in kept] + [pos[x] for x in traced]
    m = permute_factors(op.matrix, d, order)
    dk, dt = d ** len(kept), d ** len(traced)
    reduced = np.einsum("iaja->ij", m.reshape(dk, dt, dk, dt))
    return ManyBodyOperator(tuple(kept), reduced, d)


def unitary_of(H: ManyBodyOperator, t: float, hbar: float = 1.0) -> ManyBodyOperator:
    """exp((i/hbar) t H) through the Hermitian eigendecomposition of ``H``."""
    if not H.is_hermitian():
        raise ValidationError("H", f"not Hermitian (relative residual {H.hermiticity_residual():.3e})")
    return H._like(hermitian_expm(H.matrix, t / hbar))


def hermitian_expm(h: np.ndarray, s: float) -> np.ndarray:
    """exp(i s h) for a Hermitian matrix ``h``."""
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * s * w)) @ v.conj().T


def conjugate(U: ManyBodyOperator, g: ManyBodyOperator) -> ManyBodyOperator:
    """U g U^dagger."""
    if U.labels != g.labels:
        raise LabelError(f"conjugation on mismatched labels {U.labels} vs {g.labels}")
    return g._like(U.matrix @ g.matrix @ U.matrix.conj().T)


def norm(op: ManyBodyOperator | np.ndarray, kind: NormKind = NormKind.OPERATOR) -> float:
    m = op.matrix if isinstance(op, ManyBodyOperator) else np.atleast_2d(op)
    sv = np.linalg.svd(m, compute_uv=False)
    if kind is NormKind.OPERATOR:
        return float(sv.max()) if sv.size else 0.0
    return float(sv.sum())


def check_symmetry(op: ManyBodyOperator) -> float:
    """Largest operator-norm change of ``op`` under a relabelling of its particles."""
    worst = 0.0
    for perm in itertools.permutations(range(op.n)):
        diff = permute_factors(op.matrix, op.d, perm) - op.matrix
        worst = max(worst, norm(diff))
    return worst


def symmetrize(op: ManyBodyOperator) -> ManyBodyOperator:
    """Average of ``op`` over all relabellings of its particles."""
    perms = list(itertools.permutations(range(op.n)))
    acc = sum(permute_factors(op.matrix, op.d, p) for p in perms)
    return op._like(acc / len(perms))


def kron_all(ops: Sequence[ManyBodyOperator]) -> ManyBodyOperator:
    """Tensor product of operators on disjoint label sets, returned in label order."""
    d = ops[0].d
    labels = tuple(itertools.chain.from_iterable(o.labels for o in ops))
    m = np.eye(1)
    for o in ops:
        m = np.kron(m, o.matrix)
    target = tuple(sorted(labels))
    return ManyBodyOperator(target, place(m, d, labels, target), d)
