"""Sequence-level evolution, dual cumulants, a+ calculus and hierarchy generators."""

from .cumulants import (
    ClusterArgument,
    ConjugationSum,
    cluster_expansion,
    cumulant_map,
    cumulant_state,
    dual_cumulant,
    dual_cumulant_of,
    group_map,
)
from .dynamics import (
    additive_dual_solution,
    bbgky_group_states,
    evolve_heisenberg,
    evolve_vonneumann,
    heisenberg_marginals,
    solve_dual_hsol,
    solve_dual_sandwich,
    solve_dual_two_cumulant,
)
from .generators import (
    generator_bbgky,
    generator_dual,
    generator_dual_commutator_form,
    liouville_sequence,
    liouville_state_sequence,
)
from .sequences import (
    ObservableSequence,
    OperatorSequence,
    StateSequence,
    a_plus,
    additive_observable,
    exp_a_plus,
    expansion_by_kept,
    expansion_by_removed,
    expectation,
    lgamma_norm,
    lift,
    marginal_observables,
    marginalize_states,
    mean_value,
    number_observable,
    one_component,
    pairing,
    partition_function,
    random_observables,
    random_states,
)
