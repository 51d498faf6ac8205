"""Truncated operator sequences and the creation-type map a+.

A sequence ``g = (g_0, g_1, ..., g_N)`` holds a complex scalar ``g_0`` and,
for n >= 1, an operator ``g_n`` on particles 1..n.  Observables and states
share the layout; :class:`StateSequence` only marks the trace-pairing side.
"""

from __future__ import annotations

from math import factorial
from typing import Callable, Sequence

import numpy as np

from ..combinatorics import distinct_tuples, subsets
from ..errors import LabelError, NormalizationError, ValidationError
from ..hamiltonian import random_hermitian
from ..tensor import ManyBodyOperator, check_symmetry, norm, partial_trace, place, symmetrize

SYMMETRY_TOL = 1e-10


class OperatorSequence:
    """Components g_0 (scalar) and g_1..g_N (operators on 1..n)."""

    def __init__(self, components: Sequence, d: int):
        if len(components) < 1:
            raise ValueError("a sequence needs at least the scalar component")
        comps = [complex(components[0])]
        for n, c in enumerate(components[1:], start=1):
            if not isinstance(c, ManyBodyOperator):
                c = ManyBodyOperator(tuple(range(1, n + 1)), c, d)
            if c.labels != tuple(range(1, n + 1)) or c.d != d:
                raise LabelError(f"component {n} must act on particles 1..{n} with d={d}, got {c}")
            comps.append(c)
        self._components = tuple(comps)
        self.d = d

    @classmethod
    def zeros(cls, d: int, N: int, g0: complex = 0.0):
        return cls([g0] + [ManyBodyOperator.zeros(range(1, n + 1), d) for n in range(1, N + 1)], d)

    @classmethod
    def identity(cls, d: int, N: int):
        """(1, I, I, ..., I)."""
        return cls([1.0] + [ManyBodyOperator.identity(range(1, n + 1), d) for n in range(1, N + 1)], d)

    @property
    def N(self) -> int:
        return len(self._components) - 1

    @property
    def components(self) -> tuple:
        return self._components

    def __getitem__(self, n):
        return self._components[n]

    def __len__(self):
        return len(self._components)

    def __iter__(self):
        return iter(self._components)

    def _new(self, comps):
        return type(self)(comps, self.d)

    def map(self, fn: Callable[[ManyBodyOperator], ManyBodyOperator], scalar=None):
        """Apply ``fn`` to g_1..g_N; g_0 goes through ``scalar`` (identity by default)."""
        g0 = self._components[0] if scalar is None else scalar(self._components[0])
        return self._new([g0] + [fn(c) for c in self._components[1:]])

    def _check_compatible(self, other):
        if other.N != self.N or other.d != self.d:
            raise LabelError(f"sequences differ in shape: N={self.N},{other.N} d={self.d},{other.d}")

    def __add__(self, other):
        self._check_compatible(other)
        return self._new([a + b for a, b in zip(self._components, other._components)])

    def __sub__(self, other):
        self._check_compatible(other)
        return self._new([a - b for a, b in zip(self._components, other._components)])

    def __mul__(self, scalar):
        return self._new([scalar * c for c in self._components])

    __rmul__ = __mul__

    def distance(self, other) -> float:
        """Largest componentwise operator-norm difference."""
        self._check_compatible(other)
        worst = abs(self._components[0] - other._components[0])
        for a, b in zip(self._components[1:], other._components[1:]):
            worst = max(worst, norm(a.matrix - b.matrix))
        return float(worst)

    def symmetry_residual(self) -> float:
        return max([0.0] + [check_symmetry(c) for c in self._components[1:]])

    def validate(self, tol: float = SYMMETRY_TOL, name: str = "sequence"):
        for n, c in enumerate(self._components[1:], start=1):
            res = check_symmetry(c)
            if res > tol * max(1.0, norm(c)):
                raise ValidationError(f"{name}[{n}]", f"not permutation symmetric (residual {res:.3e})")
        return self

    def __repr__(self):
        return f"{type(self).__name__}(N={self.N}, d={self.d})"


class ObservableSequence(OperatorSequence):
    """Sequence of (marginal) observables, paired against states by trace."""


class StateSequence(OperatorSequence):
    """Sequence of (marginal) density operators."""

    def validate_state(self, tol: float = 1e-10, name: str = "state"):
        self.validate(name=name)
        for n, c in enumerate(self._components[1:], start=1):
            if not c.is_hermitian():
                raise ValidationError(f"{name}[{n}]", "not Hermitian")
            w = np.linalg.eigvalsh(0.5 * (c.matrix + c.matrix.conj().T))
            if w.min() < -tol * max(1.0, abs(w).max()):
                raise ValidationError(f"{name}[{n}]", f"not positive (min eigenvalue {w.min():.3e})")
        return self


def lift(g: OperatorSequence, m: int, onto: Sequence[int], within: Sequence[int]) -> ManyBodyOperator:
    """Component g_m moved onto the particles ``onto`` and embedded into ``within``.

    ``onto`` may be unordered; factor i of g_m goes to ``onto[i]``.  The scalar
    component lifts to a multiple of the identity.
    """
    within = tuple(within)
    if m == 0:
        return ManyBodyOperator.identity(within, g.d) * g[0]
    return ManyBodyOperator(within, place(g[m].matrix, g.d, tuple(onto), within), g.d)


def a_plus(g: ObservableSequence) -> ObservableSequence:
    """(a+ g)_s(Y) = sum_j g_{s-1}(Y minus j); the scalar slot becomes 0."""
    comps = [0.0]
    for s in range(1, g.N + 1):
        Y = tuple(range(1, s + 1))
        acc = sum(
            (lift(g, s - 1, tuple(x for x in Y if x != j), Y) for j in Y),
            ManyBodyOperator.zeros(Y, g.d),
        )
        comps.append(acc)
    return type(g)(comps, g.d)


def exp_a_plus(g: ObservableSequence, sign: int = 1) -> ObservableSequence:
    """exp(+-a+) as the finite sum over removed particle sets.

    The ordered sum over j_1 != ... != j_n weighted by 1/n! is a sum over
    n-subsets, which is what is evaluated here.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    comps = [g[0]]
    for s in range(1, g.N + 1):
        Y = tuple(range(1, s + 1))
        acc = ManyBodyOperator.zeros(Y, g.d)
        for removed in subsets(Y):
            kept = tuple(x for x in Y if x not in removed)
            acc = acc + (sign ** len(removed)) * lift(g, len(kept), kept, Y)
        comps.append(acc)
    return type(g)(comps, g.d)


def expansion_by_removed(g: OperatorSequence) -> OperatorSequence:
    """sum_n 1/n! sum_{j_1..j_n distinct} g_{s-n}(Y minus {j_1..j_n}), over ordered tuples."""
    comps = [g[0]]
    for s in range(1, g.N + 1):
        Y = tuple(range(1, s + 1))
        acc = ManyBodyOperator.zeros(Y, g.d)
        for n in range(s + 1):
            for tup in distinct_tuples(Y, n):
                kept = tuple(x for x in Y if x not in tup)
                acc = acc + lift(g, s - n, kept, Y) / factorial(n)
        comps.append(acc)
    return type(g)(comps, g.d)


def expansion_by_kept(g: OperatorSequence) -> OperatorSequence:
    """sum_n 1/(s-n)! sum_{j_1..j_{s-n} distinct} g_{s-n}(j_1, ..., j_{s-n}).

    Factors of g_{s-n} are placed in tuple order, so this differs from
    :func:`expansion_by_removed` unless every component is symmetric.
    """
    comps = [g[0]]
    for s in range(1, g.N + 1):
        Y = tuple(range(1, s + 1))
        acc = ManyBodyOperator.zeros(Y, g.d)
        for n in range(s + 1):
            for tup in distinct_tuples(Y, s - n):
                acc = acc + lift(g, s - n, tup, Y) / factorial(s - n)
        comps.append(acc)
    return type(g)(comps, g.d)


def marginal_observables(A: ObservableSequence) -> ObservableSequence:
    """G_s = sum_n (-1)^n / n! sum_{j_1 != ... != j_n} A_{s-n}(Y minus {j..}), i.e. exp(-a+) A.

    Written directly over ordered tuples so that it stays an independent
    evaluation of :func:`exp_a_plus` with sign -1.
    """
    comps = [A[0]]
    for s in range(1, A.N + 1):
        Y = tuple(range(1, s + 1))
        acc = ManyBodyOperator.zeros(Y, A.d)
        for n in range(s + 1):
            coef = (-1) ** n / factorial(n)
            for tup in distinct_tuples(Y, n):
                kept = tuple(x for x in Y if x not in tup)
                acc = acc + coef * lift(A, s - n, kept, Y)
        comps.append(acc)
    return ObservableSequence(comps, A.d)


def trace_down(f: OperatorSequence, n: int, s: int) -> ManyBodyOperator | complex:
    """Tr_{s+1..s+n} f_{s+n}, as an operator on 1..s (or a scalar when s = 0)."""
    if s + n == 0:
        return f[0]
    op = partial_trace(f[s + n], tuple(range(s + 1, s + n + 1)))
    return op.trace() if s == 0 else op


def partition_function(D: StateSequence) -> float:
    """sum_{n<=N} (1/n!) Tr D_n."""
    c = D[0] + sum(D[n].trace() / factorial(n) for n in range(1, D.N + 1))
    if abs(c.imag) > 1e-10 * max(1.0, abs(c)):
        raise NormalizationError(f"normalizing factor is not real: {c}")
    c = c.real
    if not np.isfinite(c) or c <= 0:
        raise NormalizationError(f"normalizing factor must be positive and finite, got {c}")
    return float(c)


def marginalize_states(D: StateSequence) -> StateSequence:
    """F_s = c^-1 sum_{n=0}^{N-s} (1/n!) Tr_{s+1..s+n} D_{s+n}.

    This is the trace-pairing adjoint of :func:`marginal_observables`, scaled by
    the normalizing factor c, so that <A | D> = <exp(-a+) A | F>.
    """
    c = partition_function(D)
    comps = [1.0]
    for s in range(1, D.N + 1):
        acc = sum((trace_down(D, n, s) / factorial(n) for n in range(1, D.N - s + 1)), D[s])
        comps.append(acc / c)
    return StateSequence(comps, D.d)


def pairing(g: OperatorSequence, f: OperatorSequence) -> complex:
    """sum_s (1/s!) Tr g_s f_s, without normalization."""
    g._check_compatible(f)
    total = g[0] * f[0]
    for s in range(1, g.N + 1):
        total += np.einsum("ij,ji->", g[s].matrix, f[s].matrix) / factorial(s)
    return complex(total)


def _real_if_close(z: complex, scale: float):
    if abs(z.imag) <= 1e-11 * max(1.0, scale):
        return float(z.real)
    return z


def mean_value(G: ObservableSequence, F: StateSequence):
    """<G | F> = sum_s (1/s!) Tr G_s F_s; returned as float when the imaginary part is negligible."""
    z = pairing(G, F)
    return _real_if_close(z, abs(z))


def expectation(A: ObservableSequence, D: StateSequence):
    """Normalized mean value of a full observable sequence in a state sequence."""
    z = pairing(A, D) / partition_function(D)
    return _real_if_close(z, abs(z))


def lgamma_norm(g: OperatorSequence, gamma: float) -> float:
    """max_n gamma^n / n! * ||g_n||, with |g_0| for n = 0."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    vals = [abs(g[0])] + [gamma ** n / factorial(n) * norm(g[n]) for n in range(1, g.N + 1)]
    return float(max(vals))


# -- standard sequences -----------------------------------------------------

def number_observable(d: int, N: int) -> ObservableSequence:
    """Full number-of-particles observable A_n = n I."""
    return ObservableSequence([0.0] + [n * ManyBodyOperator.identity(range(1, n + 1), d) for n in range(1, N + 1)], d)


def additive_observable(a1: np.ndarray, d: int, N: int) -> ObservableSequence:
    """A_n = sum_i a1(i) on particles 1..n, A_0 = 0."""
    comps = [0.0]
    for n in range(1, N + 1):
        Y = tuple(range(1, n + 1))
        comps.append(ManyBodyOperator(Y, sum(place(a1, d, (i,), Y) for i in Y), d))
    return ObservableSequence(comps, d)


def one_component(a1: np.ndarray, d: int, N: int) -> ObservableSequence:
    """(0, a1, 0, ..., 0)."""
    seq = ObservableSequence.zeros(d, N)
    comps = list(seq.components)
    comps[1] = ManyBodyOperator((1,), a1, d)
    return ObservableSequence(comps, d)


def random_observables(rng: np.random.Generator, d: int, N: int) -> ObservableSequence:
    """Hermitian, permutation-symmetric components of operator norm about one."""
    comps = [float(rng.standard_normal())]
    for n in range(1, N + 1):
        op = ManyBodyOperator(tuple(range(1, n + 1)), random_hermitian(rng, d ** n), d)
        comps.append(symmetrize(op))
    return ObservableSequence(comps, d)


def random_states(rng: np.random.Generator, d: int, N: int) -> StateSequence:
    """Positive, symmetric components with unit trace and scalar part 1."""
    comps = [1.0]
    for n in range(1, N + 1):
        dim = d ** n
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        op = symmetrize(ManyBodyOperator(tuple(range(1, n + 1)), a @ a.conj().T, d))
        comps.append(op / op.trace().real)
    return StateSequence(comps, d)

