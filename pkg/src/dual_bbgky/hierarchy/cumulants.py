"""Dual cumulants of the evolution groups over (cluster-labelled) set partitions.

Every map built here is a finite linear combination of conjugations
``g -> V g V^dagger`` on a fixed particle set, held by :class:`ConjugationSum`.
A block of a partition contributes the group of the particles it contains;
blocks act on disjoint particles, so their unitaries commute and the
product over blocks is a single unitary.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from ..combinatorics import (
    Cluster,
    Element,
    LabelSet,
    as_labels,
    block_labels,
    enumerate_partitions,
)
from ..errors import CapacityError, LabelError
from ..hamiltonian import SystemSpec
from ..tensor import ManyBodyOperator, embed, place


class ConjugationSum:
    """The map g -> sum_k c_k V_k g V_k^dagger on the particles ``labels``."""

    def __init__(self, labels: Sequence[int], d: int, terms: Iterable = ()):
        self.labels: LabelSet = as_labels(labels)
        self.d = d
        self.terms = [(complex(c), np.asarray(V)) for c, V in terms]

    @classmethod
    def identity(cls, labels: Sequence[int], d: int) -> ConjugationSum:
        return cls(labels, d, [(1.0, np.eye(d ** len(tuple(labels))))])

    @property
    def dim(self) -> int:
        return self.d ** len(self.labels)

    def embed(self, target: Sequence[int]) -> ConjugationSum:
        """The same map acting trivially on the extra particles of ``target``."""
        target = as_labels(target)
        if target == self.labels:
            return self
        return ConjugationSum(target, self.d, [(c, place(V, self.d, self.labels, target)) for c, V in self.terms])

    def _aligned(self, other: ConjugationSum):
        union = tuple(sorted(set(self.labels) | set(other.labels)))
        return self.embed(union), other.embed(union)

    def __add__(self, other: ConjugationSum) -> ConjugationSum:
        a, b = self._aligned(other)
        return ConjugationSum(a.labels, self.d, a.terms + b.terms)

    def __sub__(self, other: ConjugationSum) -> ConjugationSum:
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> ConjugationSum:
        return ConjugationSum(self.labels, self.d, [(scalar * c, V) for c, V in self.terms])

    def __matmul__(self, other: ConjugationSum) -> ConjugationSum:
        """Composition: (self @ other)(g) = self(other(g))."""
        a, b = self._aligned(other)
        return ConjugationSum(a.labels, self.d, [(c1 * c2, V1 @ V2) for c1, V1 in a.terms for c2, V2 in b.terms])

    def __call__(self, g: ManyBodyOperator) -> ManyBodyOperator:
        return self.apply(g)

    def apply(self, g: ManyBodyOperator) -> ManyBodyOperator:
        """Apply to ``g``; map and operator are both extended to the union of their particles."""
        if g.d != self.d:
            raise LabelError("dimension mismatch between map and operator")
        union = tuple(sorted(set(self.labels) | set(g.labels)))
        m = self.embed(union)
        x = embed(g, union).matrix
        out = np.zeros_like(x)
        for c, V in m.terms:
            out += c * (V @ x @ V.conj().T)
        return ManyBodyOperator(union, out, self.d)

    def superoperator(self) -> np.ndarray:
        """Matrix of the map on row-major vectorised operators: vec(V g V^+) = (V kron conj V) vec(g)."""
        n = self.dim
        out = np.zeros((n * n, n * n), dtype=complex)
        for c, V in self.terms:
            out += c * np.kron(V, V.conj())
        return out

    def __repr__(self):
        return f"ConjugationSum(labels={self.labels}, terms={len(self.terms)})"


@dataclass(frozen=True)
class ClusterArgument:
    """Argument ((cluster)_1, singles) of a (1 + |singles|)-th order cumulant."""

    cluster: LabelSet
    singles: LabelSet = ()

    def __post_init__(self):
        cluster = as_labels(sorted(self.cluster))
        singles = as_labels(sorted(self.singles))
        if not cluster:
            raise LabelError("the cluster of a cumulant argument must be nonempty")
        if set(cluster) & set(singles):
            raise LabelError(f"cluster {cluster} and singles {singles} overlap")
        object.__setattr__(self, "cluster", cluster)
        object.__setattr__(self, "singles", singles)

    @property
    def elements(self) -> list:
        return [Cluster(self.cluster)] + list(self.singles)

    @property
    def labels(self) -> LabelSet:
        return tuple(sorted(self.cluster + self.singles))

    @property
    def order(self) -> int:
        return 1 + len(self.singles)


def group_unitary(spec: SystemSpec, labels: Sequence[int], t: float, target: Sequence[int]) -> np.ndarray:
    """U_{|labels|}(t) acting on ``labels`` and embedded into ``target``."""
    labels = tuple(labels)
    return place(spec.unitary_matrix(len(labels), t), spec.d, labels, target)


def block_product_unitary(
    spec: SystemSpec, blocks: Sequence[LabelSet], t: float, target: Sequence[int], check: bool = False
) -> np.ndarray:
    """Product over disjoint blocks of their embedded unitaries.

    With ``check`` the pairwise commutators are verified to vanish.
    """
    target = tuple(target)
    factors = [group_unitary(spec, b, t, target) for b in blocks]
    V = np.eye(spec.d ** len(target), dtype=complex)
    for F in factors:
        V = V @ F
    if check:
        for i, A in enumerate(factors):
            for B in factors[i + 1:]:
                comm = np.linalg.norm(A @ B - B @ A)
                if comm > 1e-12 * max(1.0, np.linalg.norm(A) * np.linalg.norm(B)):
                    raise AssertionError(f"block unitaries fail to commute (residual {comm:.3e})")
    return V


def cumulant_map(
    spec: SystemSpec, t: float, elements: Sequence[Element], check: bool = False
) -> ConjugationSum:
    """sum_P (-1)^{|P|-1} (|P|-1)! prod_{X in P} G_{|X|}(t, X) over partitions of ``elements``.

    Each block evolves jointly all particles it contains, clusters expanded.
    Negative ``t`` gives the state-side cumulants of G(-t).
    """
    labels = block_labels(elements)
    if len(labels) > spec.N:
        raise CapacityError(f"cumulant on {len(labels)} particles exceeds N={spec.N}")
    terms = []
    for P in enumerate_partitions(list(elements)):
        k = len(P)
        coef = (-1) ** (k - 1) * factorial(k - 1)
        V = block_product_unitary(spec, [block_labels(b) for b in P], t, labels, check=check)
        terms.append((coef, V))
    return ConjugationSum(labels, spec.d, terms)


def dual_cumulant(spec: SystemSpec, t: float, arg: ClusterArgument, check: bool = False) -> ConjugationSum:
    """Dual cumulant A+_{1+n}(t, (cluster)_1, singles) of the Heisenberg groups."""
    return cumulant_map(spec, t, arg.elements, check=check)


def cumulant_state(spec: SystemSpec, t: float, arg: ClusterArgument, check: bool = False) -> ConjugationSum:
    """Cumulant A_{1+n}(t, (cluster)_1, singles) of the von Neumann groups G(-t)."""
    return cumulant_map(spec, -t, arg.elements, check=check)


def dual_cumulant_of(spec: SystemSpec, t: float, labels: Sequence[int]) -> ConjugationSum:
    """A+_n(t, 1..n style): every label is its own element."""
    return cumulant_map(spec, t, list(as_labels(labels)))


def group_map(spec: SystemSpec, t: float, labels: Sequence[int]) -> ConjugationSum:
    """G_{|labels|}(t) on ``labels`` as a map."""
    labels = as_labels(labels)
    return ConjugationSum(labels, spec.d, [(1.0, spec.unitary_matrix(len(labels), t))])


def cluster_expansion(spec: SystemSpec, t: float, labels: Sequence[int]) -> ConjugationSum:
    """sum_P prod_{X in P} A+_{|X|}(t, X), which reconstructs G_n(t, labels)."""
    labels = as_labels(labels)
    total = ConjugationSum(labels, spec.d)
    for P in enumerate_partitions(list(labels)):
        prod = ConjugationSum.identity(labels, spec.d)
        for block in P:
            prod = prod @ dual_cumulant_of(spec, t, block_labels(block))
        total = total + prod
    return total

