"""Generator sets, trajectory counting, and generator-set rebasing.

The semigroup view counts trajectories instead of weighting them: N(x,A,n)
is the number of length-n words whose composition sends x into A, and
kappa = N(x,A,n) / d^n is the fraction of the d^n trajectories that return.
Counts are over words, not endpoint values, so the dedup DP carries integer
multiplicities.  Rebasing replaces the generator set by compositions along
given words, with product weights renormalized to a probability vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterator, Sequence

from . import _intdp
from .errors import BudgetError, DegenerateProbabilityError
from .geometry import (
    DEFAULT_BIT_CAP,
    ZERO,
    IntervalSet,
    Rational,
    as_rational,
    check_bits,
    format_rational,
)
from .maps import PiecewiseMap, Word, compose, validate_word

__all__ = [
    "GeneratorSet",
    "count_returns",
    "count_sequence",
    "kappa",
    "kappa_sequence",
    "kappa_csv",
    "rebase_generators",
]

DEFAULT_ATOM_BUDGET = 10**6


@dataclass(frozen=True)
class GeneratorSet:
    """A finite family of total interval maps with display labels."""

    generators: tuple[PiecewiseMap, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if len(gens) < 1:
            raise ValueError("a generator set needs at least one map")
        labels = tuple(self.labels)
        if not labels:
            labels = tuple(
                T.label if T.label else "T%d" % (i + 1) for i, T in enumerate(gens)
            )
        if len(labels) != len(gens):
            raise ValueError("label and generator counts differ")
        object.__setattr__(self, "labels", labels)

    @property
    def d(self) -> int:
        return len(self.generators)


def _count_levels(
    G: GeneratorSet, x: Rational, budget: int, bit_cap: int
) -> Iterator[dict[Rational, int]]:
    current = {as_rational(x): 1}
    while True:
        nxt: dict[Rational, int] = {}
        for point, mult in current.items():
            for T in G.generators:
                y = T.eval(point, bit_cap=bit_cap)
                check_bits(y, bit_cap)
                nxt[y] = nxt.get(y, 0) + mult
        if len(nxt) > budget:
            raise BudgetError(
                "dedup'd atom count %d exceeds the budget %d" % (len(nxt), budget)
            )
        current = nxt
        yield current


def count_sequence(
    G: GeneratorSet,
    x,
    A: IntervalSet,
    N: int,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> list[int]:
    """N(x, A, n) for n = 1..N: length-n words sending x into A."""
    x = as_rational(x)
    if N < 1:
        raise ValueError("horizon must be at least 1")
    fast = _intdp.count_sequence(G.generators, x, A, N, budget)
    if fast is not None:
        return fast
    out = []
    levels = _count_levels(G, x, budget, bit_cap)
    for _ in range(N):
        atoms = next(levels)
        out.append(sum(c for p, c in atoms.items() if A.contains(p)))
    return out


def count_returns(
    G: GeneratorSet,
    x,
    A: IntervalSet,
    n: int,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> int:
    """The single count N(x, A, n)."""
    if n < 1:
        raise ValueError("word length must be at least 1")
    return count_sequence(G, x, A, n, budget=budget, bit_cap=bit_cap)[-1]


def kappa(
    G: GeneratorSet,
    x,
    O: IntervalSet,
    n: int,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> Rational:
    """Fraction of length-n trajectories from x finishing in O."""
    return Fraction(count_returns(G, x, O, n, budget=budget, bit_cap=bit_cap), G.d**n)


def kappa_sequence(
    G: GeneratorSet,
    x,
    O: IntervalSet,
    N: int,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> list[tuple[int, int, int, Rational]]:
    """Rows (n, N(x,O,n), d^n, kappa) for n = 1..N."""
    counts = count_sequence(G, x, O, N, budget=budget, bit_cap=bit_cap)
    d = G.d
    return [
        (n, c, d**n, Fraction(c, d**n)) for n, c in enumerate(counts, start=1)
    ]


def kappa_csv(rows: Sequence[tuple[int, int, int, Rational]]) -> str:
    lines = ["n,count,total,kappa"]
    for n, c, total, k in rows:
        lines.append("%d,%d,%d,%s" % (n, c, total, format_rational(k)))
    return "\n".join(lines) + "\n"


def rebase_generators(
    G: GeneratorSet,
    p: Sequence,
    words: Sequence[Word],
    piece_budget: int | None = None,
) -> tuple[GeneratorSet, tuple[Rational, ...]]:
    """Replace the generators by compositions along the given words.

    New weights are the products of the original weights along each word,
    renormalized to sum to one (raw products need not be a distribution when
    the words omit length classes; positivity-based recurrence is unchanged
    by reweighting, so renormalization is harmless and keeps chain
    invariants intact).
    """
    probs = [as_rational(v) for v in p]
    if len(probs) != G.d:
        raise ValueError("weight vector length differs from generator count")
    if any(v <= 0 for v in probs):
        raise DegenerateProbabilityError("rebasing needs strictly positive weights")
    if not words:
        raise ValueError("at least one word is required")
    new_maps = []
    raw = []
    for word in words:
        validate_word(G.d, word)
        kwargs = {} if piece_budget is None else {"piece_budget": piece_budget}
        new_maps.append(compose(G.generators, word, **kwargs))
        raw.append(prod((probs[i - 1] for i in word), start=Fraction(1)))
    total = sum(raw, ZERO)
    weights = tuple(v / total for v in raw)
    labels = tuple("w[%s]" % ",".join(str(i) for i in word) for word in words)
    return GeneratorSet(tuple(new_maps), labels), weights
