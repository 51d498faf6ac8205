"""Registry of verification checks.

Each check receives a :class:`CheckContext` and returns a list of
``(parameters, residual)`` pairs, or ``(parameters, residual, tolerance)``
when the tolerance depends on the case (finite-difference and norm-bound
checks).  The runner attaches the default or overridden tolerance and the
verdict.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..combinatorics import enumerate_partitions, signed_factorial_sum, signed_partition_sum
from ..hamiltonian import SystemSpec, random_hermitian
from ..hierarchy import (
    ClusterArgument,
    ObservableSequence,
    additive_dual_solution,
    additive_observable,
    bbgky_group_states,
    cluster_expansion,
    dual_cumulant,
    evolve_heisenberg,
    evolve_vonneumann,
    expansion_by_kept,
    expansion_by_removed,
    expectation,
    generator_bbgky,
    generator_dual,
    generator_dual_commutator_form,
    group_map,
    heisenberg_marginals,
    lgamma_norm,
    marginal_observables,
    marginalize_states,
    mean_value,
    number_observable,
    one_component,
    pairing,
    random_observables,
    random_states,
    solve_dual_hsol,
    solve_dual_sandwich,
    solve_dual_two_cumulant,
)
from ..tensor import ManyBodyOperator, norm

FD_STEPS = (1e-4, 5e-5)
ROUNDOFF_FLOOR = 1e-10
DUHAMEL_NODES = 32
DUHAMEL_TIMES = (0.25, 1.0)


@dataclass
class CheckContext:
    seed: int
    times: list
    gamma_values: list
    instances: int
    spec_for: Callable[[int], SystemSpec]

    def rng(self, check_id: str, instance: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, zlib.crc32(check_id.encode()), instance])


@dataclass(frozen=True)
class CheckInfo:
    id: str
    anchor: str
    tolerance: float
    run: Callable[[CheckContext], list]


CHECKS: dict = {}


def check(check_id: str, anchor: str, tolerance: float):
    def deco(fn):
        CHECKS[check_id] = CheckInfo(check_id, anchor, tolerance, fn)
        return fn

    return deco


def norm_estimate_bound(gamma: float) -> float:
    return math.e ** 2 / (1.0 - gamma * math.e)


def _superop_residual(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b, 2))


def _canonical_arguments(N: int, min_elements: int = 1):
    """Cluster {1..c} with singles {c+1..c+m}; other labellings are relabellings of these."""
    for c in range(1, N + 1):
        for m in range(0, N - c + 1):
            if 1 + m >= min_elements:
                yield ClusterArgument(tuple(range(1, c + 1)), tuple(range(c + 1, c + m + 1)))


def _seq_norm(g) -> float:
    return max([abs(g[0])] + [norm(g[n]) for n in range(1, g.N + 1)])


# -- combinatorics ---------------------------------------------------------

@check("stirling_identity", "signed partition sums: sum_P (-1)^(|P|-1)(|P|-1)! = delta_{n,1}; sum_P (-1)^|P| |P|! = (-1)^n", 0.0)
def _stirling(ctx):
    out = []
    for n in range(1, 9):
        brute1 = sum((-1) ** (len(P) - 1) * math.factorial(len(P) - 1) for P in enumerate_partitions(list(range(1, n + 1))))
        brute2 = sum((-1) ** len(P) * math.factorial(len(P)) for P in enumerate_partitions(list(range(1, n + 1))))
        expected1 = 1 if n == 1 else 0
        residual = (
            abs(signed_partition_sum(n) - expected1)
            + abs(brute1 - expected1)
            + abs(signed_factorial_sum(n) - (-1) ** n)
            + abs(brute2 - (-1) ** n)
        )
        out.append(({"n": n}, float(residual)))
    return out


# -- cumulants -------------------------------------------------------------

@check("cumulant_vanishing_free", "non-interacting systems: dual cumulants of order >= 2 vanish", 1e-12)
def _vanishing(ctx):
    out = []
    for i in range(ctx.instances):
        free = ctx.spec_for(i).free_part()
        for t in ctx.times:
            worst = 0.0
            for arg in _canonical_arguments(free.N, min_elements=2):
                worst = max(worst, norm(dual_cumulant(free, t, arg).superoperator()))
            out.append(({"instance": i, "t": t}, worst))
    return out


@check("cumulant_initial_value", "dual cumulants at t=0 equal I for one element and 0 otherwise", 1e-12)
def _initial(ctx):
    spec = ctx.spec_for(0)
    out = []
    for arg in _canonical_arguments(spec.N):
        A = dual_cumulant(spec, 0.0, arg).superoperator()
        expected = np.eye(A.shape[0]) if arg.order == 1 else np.zeros_like(A)
        out.append(({"cluster": list(arg.cluster), "singles": list(arg.singles)}, _superop_residual(A, expected)))
    return out


@check("cluster_expansion", "cluster expansion: G_n(t) = sum_P prod_i A+_|X_i|(t, X_i)", 1e-10)
def _cluster(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        for t in ctx.times:
            for n in range(1, min(spec.N, 4) + 1):
                Y = tuple(range(1, n + 1))
                res = _superop_residual(cluster_expansion(spec, t, Y).superoperator(), group_map(spec, t, Y).superoperator())
                out.append(({"instance": i, "t": t, "n": n}, res))
    return out


# -- solution representations ---------------------------------------------

@check("representation_equivalence", "cumulant expansion = exp(-a+) G(t) exp(a+) = first/second-order cumulant form", 1e-10)
def _representations(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        G0 = random_observables(ctx.rng("representation_equivalence", i), spec.d, spec.N)
        for t in ctx.times:
            a = solve_dual_hsol(spec, t, G0)
            res = max(a.distance(solve_dual_sandwich(spec, t, G0)), a.distance(solve_dual_two_cumulant(spec, t, G0)))
            out.append(({"instance": i, "t": t}, res))
    return out


@check("generator_equivalence", "dual hierarchy generator = exp(-a+) N exp(a+)", 1e-10)
def _generators(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        g = random_observables(ctx.rng("generator_equivalence", i), spec.d, spec.N)
        out.append(({"instance": i}, generator_dual(spec, g).distance(generator_dual_commutator_form(spec, g))))
    return out


def finite_difference_records(evolve, exact, third_norm: float, params: dict) -> list:
    """Central differences at the steps FD_STEPS compared with the exact derivative.

    The leading error of a central difference is eps^2 f'''(0)/6, so each step
    is held to C eps^2 with C = 1.05 ||f'''(0)|| / 6 plus a roundoff floor.
    Halving the step must cut the error by a factor close to 4, and the
    Richardson combination must agree with ``exact`` to 1e-9.
    """
    C = 1.05 * third_norm / 6.0
    diffs, errs, out = {}, {}, []
    for eps in FD_STEPS:
        diffs[eps] = (evolve(eps) - evolve(-eps)) * (1.0 / (2 * eps))
        errs[eps] = diffs[eps].distance(exact)
        out.append(({**params, "quantity": "central_difference", "eps": eps}, errs[eps], C * eps ** 2 + ROUNDOFF_FLOOR))
    e1, e2 = FD_STEPS
    if errs[e1] < ROUNDOFF_FLOOR:
        # third derivative negligible: the error is roundoff and has no eps^2 scaling to observe
        out.append(({**params, "quantity": "halving_ratio_deviation_from_4", "below_roundoff": True}, 0.0, 0.5))
    else:
        ratio = errs[e1] / errs[e2] if errs[e2] > 0 else float("inf")
        out.append(({**params, "quantity": "halving_ratio_deviation_from_4"}, abs(ratio - 4.0), 0.5))
    rich = (diffs[e2] * 4.0 - diffs[e1]) * (1.0 / 3.0)
    out.append(({**params, "quantity": "richardson"}, rich.distance(exact), 1e-9))
    return out


@check("generator_finite_difference", "d/dt at t=0 of the cumulant-expansion solution equals the dual hierarchy generator", math.nan)
def _fd(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        G0 = random_observables(ctx.rng("generator_finite_difference", i), spec.d, spec.N)
        B1 = generator_dual(spec, G0)
        B3 = generator_dual(spec, generator_dual(spec, B1))
        out += finite_difference_records(lambda e: solve_dual_hsol(spec, e, G0), B1, _seq_norm(B3), {"instance": i})
    return out


@check("group_law", "U+(t1 + t2) = U+(t1) U+(t2)", 1e-9)
def _group(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        G0 = random_observables(ctx.rng("group_law", i), spec.d, spec.N)
        for t1, t2 in itertools.product(ctx.times, repeat=2):
            lhs = solve_dual_hsol(spec, t1 + t2, G0)
            rhs = solve_dual_hsol(spec, t1, solve_dual_hsol(spec, t2, G0))
            out.append(({"instance": i, "t1": t1, "t2": t2}, lhs.distance(rhs)))
    return out


# -- Duhamel ---------------------------------------------------------------

def _superop_conj(V: np.ndarray) -> np.ndarray:
    return np.kron(V, V.conj())


def duhamel_integral(spec: SystemSpec, t: float, nodes: int) -> np.ndarray:
    """Gauss-Legendre value of int_0^t G_2(t - s) N_int^(2) G_1(s) G_1(s) ds as a superoperator."""
    d = spec.d
    pot = spec.potential(2)
    phi = pot.phi if pot is not None else np.zeros((d * d, d * d))
    I = np.eye(d * d)
    # row-major vec: vec(g Phi) = (I kron Phi^T) vec(g), vec(Phi g) = (Phi kron I) vec(g)
    L_int = (-1j / spec.hbar) * (np.kron(I, phi.T) - np.kron(phi, I))
    x, w = np.polynomial.legendre.leggauss(nodes)
    s_nodes = 0.5 * t * (x + 1.0)
    total = np.zeros((d ** 4, d ** 4), dtype=complex)
    for s, wk in zip(s_nodes, w):
        G2 = _superop_conj(spec.unitary_matrix(2, t - s))
        U1 = spec.unitary_matrix(1, s)
        G11 = _superop_conj(np.kron(U1, U1))
        total += wk * (G2 @ L_int @ G11)
    return 0.5 * t * total


def duhamel_exact(spec: SystemSpec, t: float) -> np.ndarray:
    U1 = spec.unitary_matrix(1, t)
    return _superop_conj(spec.unitary_matrix(2, t)) - _superop_conj(np.kron(U1, U1))


@check("duhamel", "Duhamel analogue: int_0^t G_2(t-s) N_int^(2) G_1(s) G_1(s) ds = G_2(t) - G_1(t) G_1(t)", 1e-8)
def _duhamel(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        if spec.N < 2:
            continue
        for t in DUHAMEL_TIMES:
            q1 = duhamel_integral(spec, t, DUHAMEL_NODES)
            q2 = duhamel_integral(spec, t, 2 * DUHAMEL_NODES)
            out.append(({"instance": i, "t": t, "quantity": "identity", "nodes": DUHAMEL_NODES},
                        _superop_residual(q1, duhamel_exact(spec, t))))
            out.append(({"instance": i, "t": t, "quantity": "quadrature_error", "nodes": [DUHAMEL_NODES, 2 * DUHAMEL_NODES]},
                        _superop_residual(q1, q2)))
    return out


# -- duality ---------------------------------------------------------------

@check("duality_mean_value", "<A(t) | D(0)> = <G(t) | F(0)> with G = exp(-a+) A and F the normalized marginals of D", 1e-9)
def _duality(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        rng = ctx.rng("duality_mean_value", i)
        A = random_observables(rng, spec.d, spec.N)
        D = random_states(rng, spec.d, spec.N)
        F = marginalize_states(D)
        G0 = marginal_observables(A)
        for t in ctx.times:
            lhs = expectation(evolve_heisenberg(spec, t, A), D)
            rhs = mean_value(solve_dual_hsol(spec, t, G0), F)
            # states evolved instead of observables
            rhs2 = mean_value(G0, marginalize_states(evolve_vonneumann(spec, t, D)))
            out.append(({"instance": i, "t": t}, max(abs(lhs - rhs), abs(lhs - rhs2))))
    return out


@check("adjointness", "(f, U+(t) g) = (U(t) f, g) and <G(t) A | D> = <A | G(-t) D>", 1e-10)
def _adjoint(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        rng = ctx.rng("adjointness", i)
        g = random_observables(rng, spec.d, spec.N)
        f = random_states(rng, spec.d, spec.N)
        for t in ctx.times:
            r1 = abs(pairing(solve_dual_hsol(spec, t, g), f) - pairing(g, bbgky_group_states(spec, t, f)))
            r2 = abs(pairing(evolve_heisenberg(spec, t, g), f) - pairing(g, evolve_vonneumann(spec, t, f)))
            out.append(({"instance": i, "t": t}, max(r1, r2)))
    return out


@check("bbgky_generator", "BBGKY generator is the adjoint of the dual generator and the derivative of U(t) at 0", 1e-10)
def _bbgky(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        rng = ctx.rng("bbgky_generator", i)
        g = random_observables(rng, spec.d, spec.N)
        f = random_states(rng, spec.d, spec.N)
        res = abs(pairing(generator_dual(spec, g), f) - pairing(g, generator_bbgky(spec, f)))
        out.append(({"instance": i, "quantity": "adjoint"}, res))
        B1 = generator_bbgky(spec, f)
        B3 = generator_bbgky(spec, generator_bbgky(spec, B1))
        out += finite_difference_records(lambda e: bbgky_group_states(spec, e, f), B1, _seq_norm(B3), {"instance": i})
    return out


@check("number_observable", "number of particles: marginal sequence (0, I, 0, ...) is stationary and <N(t)|F> = Tr F_1", 1e-12)
def _number(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        A = number_observable(spec.d, spec.N)
        G0 = marginal_observables(A)
        target = one_component(np.eye(spec.d), spec.d, spec.N)
        F = marginalize_states(random_states(ctx.rng("number_observable", i), spec.d, spec.N))
        out.append(({"instance": i, "quantity": "marginal_of_number"}, G0.distance(target)))
        for t in ctx.times:
            Gt = solve_dual_hsol(spec, t, G0)
            out.append(({"instance": i, "t": t, "quantity": "stationary"}, Gt.distance(target)))
            out.append(({"instance": i, "t": t, "quantity": "mean_value"}, abs(mean_value(Gt, F) - F[1].trace())))
    return out


@check("norm_estimate", "||U+(t) g||_gamma <= e^2 (1 - gamma e)^-1 ||g||_gamma for gamma < 1/e", math.nan)
def _estimate(ctx):
    out = []
    for gamma in ctx.gamma_values:
        bound = norm_estimate_bound(gamma)
        for i in range(ctx.instances):
            spec = ctx.spec_for(i)
            g = random_observables(ctx.rng("norm_estimate", i), spec.d, spec.N)
            # equal weighted norms in every component, so no single term dominates
            flat = ObservableSequence([0.0] + [g[n] * (math.factorial(n) / gamma ** n) for n in range(1, g.N + 1)], g.d)
            for data, seq in (("random", g), ("weighted", flat)):
                base = lgamma_norm(seq, gamma)
                for t in ctx.times:
                    ratio = lgamma_norm(solve_dual_hsol(spec, t, seq), gamma) / base
                    out.append(({"gamma": gamma, "instance": i, "t": t, "data": data, "bound": bound}, ratio, bound))
    return out


# -- degenerate cases ------------------------------------------------------

@check("heisenberg_reduction", "N = 1: the dual hierarchy reduces to the Heisenberg equation", 1e-12)
def _n1(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i).with_truncation(1)
        g = random_observables(ctx.rng("heisenberg_reduction", i), spec.d, 1)
        for t in ctx.times:
            out.append(({"instance": i, "t": t}, solve_dual_hsol(spec, t, g).distance(evolve_heisenberg(spec, t, g))))
    return out


@check("identity_fixed_point", "all-identity observables are fixed by U+(t) and annihilated by its generator", 1e-10)
def _fixed(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        ident = ObservableSequence.identity(spec.d, spec.N)
        out.append(({"instance": i, "quantity": "generator"}, _seq_norm(generator_dual(spec, ident))))
        for t in ctx.times:
            out.append(({"instance": i, "t": t, "quantity": "group"}, solve_dual_hsol(spec, t, ident).distance(ident)))
    return out


@check("additive_recursion", "additive data (0, a1, 0, ...): G_s(t) = A+_s(t, 1..s) sum_j a1(j) = exp(-a+) G(t) A(0)", 1e-11)
def _additive(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        a1 = random_hermitian(ctx.rng("additive_recursion", i), spec.d)
        G0 = one_component(a1, spec.d, spec.N)
        A0 = additive_observable(a1, spec.d, spec.N)
        for t in ctx.times:
            hsol = solve_dual_hsol(spec, t, G0)
            af = additive_dual_solution(spec, t, ManyBodyOperator((1,), a1, spec.d), spec.N)
            oracle = heisenberg_marginals(spec, t, A0)
            out.append(({"instance": i, "t": t}, max(hsol.distance(af), hsol.distance(oracle))))
    return out


@check("index_identity", "sum over kept tuples = sum over removed tuples for symmetric sequences", 1e-12)
def _index(ctx):
    out = []
    for i in range(ctx.instances):
        spec = ctx.spec_for(i)
        g = random_observables(ctx.rng("index_identity", i), spec.d, spec.N)
        out.append(({"instance": i}, expansion_by_kept(g).distance(expansion_by_removed(g))))
    return out
