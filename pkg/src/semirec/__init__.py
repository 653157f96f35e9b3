"""Exact-arithmetic recurrence analysis for semigroups of interval maps."""

from .catalogue import build_example, list_examples, manifest
from .classify import (
    RecurrenceVerdict,
    WindowEstimate,
    classify_chain_point,
    classify_map_point,
    classify_semigroup_point,
    r_function,
)
from .combinatorics import MultivaluedMap, l1_exhaustive, l1_search
from .geometry import (
    Interval,
    IntervalSet,
    Rational,
    ball,
    length,
    set_algebra,
)
from .maps import Piece, PiecewiseMap, Word, compose, eval_word
from .markov import (
    MarkovChain,
    compatibility_gamma,
    q_preimage,
    q_value,
    qn_distribution,
)
from .measures import (
    Measure,
    chain_return_sums,
    poincare_partial_sums,
    stationary_components,
    ulam_matrix,
)
from .semigroup import GeneratorSet, count_returns, kappa, rebase_generators

__version__ = "0.1.0"

__all__ = [
    "Interval",
    "IntervalSet",
    "Rational",
    "ball",
    "length",
    "set_algebra",
    "Piece",
    "PiecewiseMap",
    "Word",
    "compose",
    "eval_word",
    "Measure",
    "poincare_partial_sums",
    "chain_return_sums",
    "ulam_matrix",
    "stationary_components",
    "MarkovChain",
    "q_value",
    "qn_distribution",
    "q_preimage",
    "compatibility_gamma",
    "GeneratorSet",
    "count_returns",
    "kappa",
    "rebase_generators",
    "RecurrenceVerdict",
    "WindowEstimate",
    "classify_map_point",
    "classify_chain_point",
    "classify_semigroup_point",
    "r_function",
    "MultivaluedMap",
    "l1_search",
    "l1_exhaustive",
    "build_example",
    "manifest",
    "list_examples",
    "__version__",
]
