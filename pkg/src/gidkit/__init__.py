"""gidkit: lattice decompositions of entropy and information gain for
discrete multivariate systems.

The core pipeline: a pointwise redundancy function assigns every antichain of
variable subsets a local value, Möbius inversion over the antichain lattice
turns those into exclusive per-atom contributions, and posterior-weighted
averaging decomposes entropies, KL divergences, and the measures built from
them (total correlation, O-information, TSE complexity, single-target
decompositions).
"""
from .corpus import GateSpec, gate, make_gate
from .distributions import (
    DistributionError,
    JointTable,
    Source,
    SupportViolationError,
    apply_support_policy,
    condition,
    entropy,
    load_table,
    local_surprisal,
    marginalize,
    product_of_marginals,
    save_table,
    support_check,
    table_from_dict,
    table_to_dict,
)
from .divergence import GidResult, cross_entropy, kl_divergence, partial_kl
from .lattice import (
    Antichain,
    AtomTable,
    LatticeCapError,
    RedundancyLattice,
    accumulate,
    build_lattice,
    format_atom,
    leq,
    moebius_inversion,
    parse_atom,
    top_value,
)
from .measures import (
    MeasureReport,
    cross_entropy_decomposition,
    negentropy_decomposition,
    o_information,
    o_information_atoms,
    pid_conditional,
    pid_joint,
    tc_decomposition,
    total_correlation,
    tse,
    tse_atoms,
    uniform_like,
)
from .redundancy import H_MIN, REDUNDANCY_FUNCTIONS, RedundancyFunction, expected_ped, local_ped

__version__ = "0.1.0"

__all__ = [
    "Antichain",
    "AtomTable",
    "DistributionError",
    "GateSpec",
    "GidResult",
    "H_MIN",
    "JointTable",
    "LatticeCapError",
    "MeasureReport",
    "REDUNDANCY_FUNCTIONS",
    "RedundancyFunction",
    "RedundancyLattice",
    "Source",
    "SupportViolationError",
    "accumulate",
    "apply_support_policy",
    "build_lattice",
    "condition",
    "cross_entropy",
    "cross_entropy_decomposition",
    "entropy",
    "expected_ped",
    "format_atom",
    "gate",
    "kl_divergence",
    "leq",
    "load_table",
    "local_ped",
    "local_surprisal",
    "make_gate",
    "marginalize",
    "moebius_inversion",
    "negentropy_decomposition",
    "o_information",
    "o_information_atoms",
    "parse_atom",
    "partial_kl",
    "pid_conditional",
    "pid_joint",
    "product_of_marginals",
    "save_table",
    "support_check",
    "table_from_dict",
    "table_to_dict",
    "tc_decomposition",
    "top_value",
    "total_correlation",
    "tse",
    "tse_atoms",
    "uniform_like",
]
