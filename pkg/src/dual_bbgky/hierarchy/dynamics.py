"""Evolution of observable and state sequences.

Three independent constructions of the dual hierarchy solution live here:
the cumulant expansion (:func:`solve_dual_hsol`), the conjugation by
exp(a+) of the Heisenberg group (:func:`solve_dual_sandwich`) and the form
that only uses first- and second-order cumulants
(:func:`solve_dual_two_cumulant`).  :func:`bbgky_group_states` is the
trace-pairing adjoint acting on marginal states.
"""

from __future__ import annotations

from math import factorial

from ..combinatorics import Cluster, subsets
from ..hamiltonian import SystemSpec
from ..tensor import ManyBodyOperator, partial_trace, place
from .cumulants import ClusterArgument, cumulant_map, cumulant_state, dual_cumulant, group_map
from .sequences import (
    ObservableSequence,
    StateSequence,
    exp_a_plus,
    lift,
    marginal_observables,
)


def _check_spec(spec: SystemSpec, seq):
    if seq.d != spec.d:
        raise ValueError(f"sequence has d={seq.d}, system has d={spec.d}")
    if seq.N > spec.N:
        raise ValueError(f"sequence truncated at N={seq.N} exceeds the system's N={spec.N}")


def _conjugate_components(spec: SystemSpec, t: float, seq):
    _check_spec(spec, seq)

    def step(op: ManyBodyOperator) -> ManyBodyOperator:
        U = spec.unitary_matrix(op.n, t)
        return op._like(U @ op.matrix @ U.conj().T)

    return seq.map(step)


def evolve_heisenberg(spec: SystemSpec, t: float, A0: ObservableSequence) -> ObservableSequence:
    """A_n(t) = U_n(t) A_n(0) U_n(t)^-1 for every n; the scalar part is constant."""
    return _conjugate_components(spec, t, A0)


def evolve_vonneumann(spec: SystemSpec, t: float, D0: StateSequence) -> StateSequence:
    """D_n(t) = U_n(-t) D_n(0) U_n(-t)^-1."""
    return _conjugate_components(spec, -t, D0)


def solve_dual_hsol(spec: SystemSpec, t: float, G0: ObservableSequence) -> ObservableSequence:
    """Cumulant expansion of the dual hierarchy solution.

    G_s(t, Y) = sum over nonempty C subset of Y of
    A+_{1 + |Y\\C|}(t, (C)_1, Y\\C) G_{|C|}(0, C).

    Summing over subsets C is the ordered sum over j_1 != ... != j_{s-n} with
    weight 1/(s-n)!.  The term with an empty cluster only sees the scalar G_0,
    on which every group acts trivially, so its partition sum over s + 1 >= 2
    elements vanishes and it is omitted.
    """
    _check_spec(spec, G0)
    comps = [G0[0]]
    for s in range(1, G0.N + 1):
        Y = tuple(range(1, s + 1))
        acc = ManyBodyOperator.zeros(Y, spec.d)
        for size in range(1, s + 1):
            for C in subsets(Y, size):
                X = tuple(x for x in Y if x not in C)
                A = dual_cumulant(spec, t, ClusterArgument(C, X))
                acc = acc + A.apply(lift(G0, size, C, Y))
        comps.append(acc)
    return ObservableSequence(comps, G0.d)


def solve_dual_sandwich(spec: SystemSpec, t: float, G0: ObservableSequence) -> ObservableSequence:
    """exp(-a+) G(t) exp(a+) G(0)."""
    return exp_a_plus(evolve_heisenberg(spec, t, exp_a_plus(G0, +1)), -1)


def solve_dual_two_cumulant(spec: SystemSpec, t: float, G0: ObservableSequence) -> ObservableSequence:
    """Solution through first- and second-order dual cumulants only.

    G_s(t) = A+_1(t, Y) G_s(0)
             + sum_{C proper, nonempty} sum_{Z subset Y\\C, Z nonempty}
               (-1)^{|Y\\C| - |Z|} A+_2(t, C, Z) G_{|C|}(0, C),

    where A+_2(t, C, Z) = G(t, C u Z) - G(t, C) G(t, Z) treats both C and Z
    as single fused elements.
    """
    _check_spec(spec, G0)
    comps = [G0[0]]
    for s in range(1, G0.N + 1):
        Y = tuple(range(1, s + 1))
        acc = group_map(spec, t, Y).apply(G0[s])
        for size in range(1, s):
            for C in subsets(Y, size):
                X = tuple(x for x in Y if x not in C)
                g = lift(G0, size, C, Y)
                for Z in subsets(X):
                    if not Z:
                        continue
                    A2 = cumulant_map(spec, t, [Cluster(C), Cluster(Z)])
                    acc = acc + (-1) ** (len(X) - len(Z)) * A2.apply(g)
        comps.append(acc)
    return ObservableSequence(comps, G0.d)


def additive_dual_solution(spec: SystemSpec, t: float, a1: ManyBodyOperator, N: int | None = None) -> ObservableSequence:
    """G_s(t) = A+_s(t, 1..s) sum_j a1(j) for one-component data (0, a1, 0, ...)."""
    N = spec.N if N is None else N
    comps = [0.0]
    for s in range(1, N + 1):
        Y = tuple(range(1, s + 1))
        total = ManyBodyOperator.zeros(Y, spec.d)
        for j in Y:
            total = total + ManyBodyOperator(Y, place(a1.matrix, spec.d, (j,), Y), spec.d)
        comps.append(cumulant_map(spec, t, list(Y)).apply(total))
    return ObservableSequence(comps, spec.d)


def heisenberg_marginals(spec: SystemSpec, t: float, A0: ObservableSequence) -> ObservableSequence:
    """exp(-a+) G(t) A(0): marginal observables of the Heisenberg-evolved sequence."""
    return marginal_observables(evolve_heisenberg(spec, t, A0))


def bbgky_group_states(spec: SystemSpec, t: float, f: StateSequence) -> StateSequence:
    """(U(t) f)_s = sum_{n=0}^{N-s} (1/n!) Tr_{s+1..s+n} A_{1+n}(t, (Y)_1, s+1..s+n) f_{s+n}.

    The scalar component passes through unchanged: with an empty cluster every
    cumulant of order >= 2 traces to zero.
    """
    _check_spec(spec, f)
    N = f.N
    comps = [f[0]]
    for s in range(1, N + 1):
        Y = tuple(range(1, s + 1))
        acc = ManyBodyOperator.zeros(Y, spec.d)
        for n in range(0, N - s + 1):
            extra = tuple(range(s + 1, s + n + 1))
            A = cumulant_state(spec, t, ClusterArgument(Y, extra))
            acc = acc + partial_trace(A.apply(f[s + n]), extra) / factorial(n)
        comps.append(acc)
    return StateSequence(comps, f.d)
