"""Finite-dimensional engine for the quantum dual BBGKY hierarchy.

Marginal observables, their cumulant-expansion solution and its
equivalent representations, the adjoint hierarchy for marginal states,
and a harness that verifies the identities tying them together.
"""

__version__ = "0.1.0"

from .combinatorics import (
    Cluster,
    distinct_tuples,
    enumerate_partitions,
    signed_factorial_sum,
    signed_partition_sum,
    stirling2,
)
from .errors import (
    AbsentPotentialError,
    CapacityError,
    ConfigParseError,
    DualBBGKYError,
    LabelError,
    NormalizationError,
    ValidationError,
)
from .hamiltonian import (
    InteractionPotential,
    SystemSpec,
    build_H,
    liouville_observable,
    liouville_state,
    n_int,
    preset_spec,
    random_spec,
)
from .hierarchy import *  # noqa: F401,F403
from .tensor import (
    ManyBodyOperator,
    NormKind,
    check_symmetry,
    conjugate,
    embed,
    norm,
    partial_trace,
    symmetrize,
    unitary_of,
)
