"""Sparsification algorithms for stochastic packing problems.

A stochastic packing problem is a downward-closed set system with an
objective, where every element is independently active with probability
p.  A sparsifier picks a query set Q up front; this package implements
the marginal-sampling, nested-basis, sample-union, matching-hybrid, and
LP-rounding sparsifiers, plus the Monte Carlo harness that measures
their approximation ratio and degree.
"""

from ._core import HAVE_EXT
from .errors import (
    DomainError,
    InvariantError,
    KindError,
    PreconditionError,
    SizeLimitError,
    SpossError,
)
from .matroids import Matroid
from .objectives import (
    Additive,
    Coverage,
    EqualPartitionCoverage,
    equal_partition_instance,
    estimate_multilinear,
    incidence_value,
)
from .rng import substream
from .stochastic import (
    EvalReport,
    Marginals,
    SppInstance,
    estimate_marginals,
    evaluate_sparsifier,
    exact_expected_opt,
    exact_marginals,
    sample_active,
    stochastic_opt,
)
from .systems import (
    BlocksSystem,
    FeasibleSet,
    IntersectionSystem,
    MatchingSystem,
    MatroidSystem,
    Rank1System,
)

__version__ = "0.1.0"

__all__ = [
    "HAVE_EXT",
    "Matroid",
    "MatroidSystem",
    "IntersectionSystem",
    "MatchingSystem",
    "Rank1System",
    "BlocksSystem",
    "FeasibleSet",
    "Additive",
    "Coverage",
    "EqualPartitionCoverage",
    "equal_partition_instance",
    "incidence_value",
    "estimate_multilinear",
    "SppInstance",
    "Marginals",
    "EvalReport",
    "sample_active",
    "stochastic_opt",
    "exact_marginals",
    "exact_expected_opt",
    "estimate_marginals",
    "evaluate_sparsifier",
    "substream",
    "SpossError",
    "DomainError",
    "PreconditionError",
    "KindError",
    "SizeLimitError",
    "InvariantError",
]
