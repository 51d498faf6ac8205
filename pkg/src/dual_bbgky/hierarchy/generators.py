"""Generators of the dual hierarchy (observables) and of the BBGKY hierarchy (states)."""

from __future__ import annotations

from math import factorial

from ..combinatorics import distinct_tuples, subsets
from ..hamiltonian import SystemSpec, liouville_observable, liouville_state, n_int, n_int_state
from ..tensor import partial_trace
from .sequences import ObservableSequence, StateSequence, exp_a_plus, lift


def liouville_sequence(spec: SystemSpec, g: ObservableSequence) -> ObservableSequence:
    """Componentwise -(i/hbar)(g_n H_n - H_n g_n); the scalar component maps to 0."""
    return g.map(lambda op: liouville_observable(spec, op), scalar=lambda _: 0.0)


def generator_dual(spec: SystemSpec, g: ObservableSequence) -> ObservableSequence:
    """(B+ g)_s = N_s g_s + sum_{n=1}^s 1/n! sum_{k=n+1}^s 1/(k-n)!
    sum_{j_1 != ... != j_k} N_int^(k)(j_1..j_k) g_{s-n}(Y minus {j_1..j_n}).

    Body orders without a configured potential contribute nothing.
    """
    comps = [0.0]
    for s in range(1, g.N + 1):
        Y = tuple(range(1, s + 1))
        acc = liouville_observable(spec, g[s])
        for n in range(1, s + 1):
            for k in range(n + 1, s + 1):
                if spec.potential(k) is None:
                    continue
                weight = 1.0 / (factorial(n) * factorial(k - n))
                for tup in distinct_tuples(Y, k):
                    kept = tuple(x for x in Y if x not in tup[:n])
                    lower = lift(g, s - n, kept, Y)
                    acc = acc + weight * n_int(spec, k, tup, lower)
        comps.append(acc)
    return ObservableSequence(comps, g.d)


def generator_dual_commutator_form(spec: SystemSpec, g: ObservableSequence) -> ObservableSequence:
    """exp(-a+) N exp(a+) g."""
    return exp_a_plus(liouville_sequence(spec, exp_a_plus(g, +1)), -1)


def generator_bbgky(spec: SystemSpec, f: StateSequence) -> StateSequence:
    """(B f)_s = -N_s f_s + sum_{k=1}^s 1/k! sum_{i_1 != ... != i_k} sum_{n=1}^{N-s} 1/n!
    Tr_{s+1..s+n} (-N_int^(k+n))(i_1..i_k, s+1..s+n) f_{s+n}.

    The ordered k-tuples with weight 1/k! are evaluated as k-subsets.
    """
    N = f.N
    comps = [0.0]
    for s in range(1, N + 1):
        Y = tuple(range(1, s + 1))
        acc = liouville_state(spec, f[s])
        for n in range(1, N - s + 1):
            extra = tuple(range(s + 1, s + n + 1))
            for k in range(1, s + 1):
                if spec.potential(k + n) is None:
                    continue
                for Z in subsets(Y, k):
                    term = n_int_state(spec, k + n, Z + extra, f[s + n])
                    acc = acc + partial_trace(term, extra) / factorial(n)
        comps.append(acc)
    return StateSequence(comps, f.d)


def liouville_state_sequence(spec: SystemSpec, f: StateSequence) -> StateSequence:
    return f.map(lambda op: liouville_state(spec, op), scalar=lambda _: 0.0)

