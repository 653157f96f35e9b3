"""The Markov chain induced by random generator choice.

A chain is a finite family of interval maps with selection probabilities;
one step moves x to T_i(x) with probability p_i.  Everything here is exact:
n-step distributions are finitely supported and computed by a deduplicating
dynamic program over the word tree, t-step preimages come from iterating the
one-step union preimage, and the compatibility coefficient between two
probability vectors is a rational number.

A seeded Monte Carlo mode exists for word trees too deep for exact
arithmetic; its results are empirical and carry their seed and sample count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import _intdp
from .errors import BudgetError, DegenerateProbabilityError
from .geometry import (
    DEFAULT_BIT_CAP,
    ONE,
    ZERO,
    IntervalSet,
    Rational,
    as_rational,
    check_bits,
    format_rational,
)
from .maps import PiecewiseMap, Word, preimage_union_step, validate_word

__all__ = [
    "MarkovChain",
    "PointDistribution",
    "EmpiricalDistribution",
    "DEFAULT_ATOM_BUDGET",
    "q_value",
    "qn_distribution",
    "qn_distribution_mc",
    "ball_mass_sequence",
    "search_return_word",
    "q_preimage",
    "compatibility_gamma",
]

DEFAULT_ATOM_BUDGET = 10**6

_INTERVAL_COUNT_GUARD = 10**5


@dataclass(frozen=True)
class MarkovChain:
    """Generators plus selection probabilities, Q(x,A) = sum_i p_i 1_A(T_i x)."""

    generators: tuple[PiecewiseMap, ...]
    probs: tuple[Rational, ...]

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        probs = tuple(as_rational(p) for p in self.probs)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "probs", probs)
        if len(gens) < 1:
            raise ValueError("a chain needs at least one generator")
        if len(gens) != len(probs):
            raise ValueError("generator and probability counts differ")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        if sum(probs) != 1:
            raise ValueError("probabilities must sum to 1")

    @property
    def d(self) -> int:
        return len(self.generators)

    @property
    def non_degenerate(self) -> bool:
        return all(p > 0 for p in self.probs)

    def require_non_degenerate(self) -> None:
        if not self.non_degenerate:
            raise DegenerateProbabilityError(
                "this operation needs strictly positive selection probabilities"
            )

    @property
    def uniform(self) -> bool:
        return all(p == self.probs[0] for p in self.probs)


@dataclass(frozen=True)
class PointDistribution:
    """Finitely supported exact distribution, atoms sorted by position."""

    atoms: tuple[tuple[Rational, Rational], ...]

    def __post_init__(self) -> None:
        atoms = tuple(sorted((as_rational(p), as_rational(m)) for p, m in self.atoms))
        object.__setattr__(self, "atoms", atoms)
        if any(m <= 0 for _, m in atoms):
            raise ValueError("atom masses must be positive")
        if sum((m for _, m in atoms), ZERO) != 1:
            raise ValueError("atom masses must sum to 1")

    def mass_in(self, s: IntervalSet) -> Rational:
        return sum((m for p, m in self.atoms if s.contains(p)), ZERO)

    def support(self) -> tuple[Rational, ...]:
        return tuple(p for p, _ in self.atoms)

    def as_dict(self) -> dict[Rational, Rational]:
        return dict(self.atoms)

    def to_json(self) -> dict:
        return {
            "atoms": [
                {"point": format_rational(p), "mass": format_rational(m)}
                for p, m in self.atoms
            ]
        }


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Monte Carlo estimate of an n-step distribution; approximate by nature."""

    atoms: tuple[tuple[float, float], ...]
    seed: int
    samples: int
    n: int

    def mass_in(self, s: IntervalSet) -> float:
        return sum(m for p, m in self.atoms if s.contains(Fraction(p)))

    def to_json(self) -> dict:
        return {
            "atoms": [{"point": p, "mass": m} for p, m in self.atoms],
            "seed": self.seed,
            "samples": self.samples,
            "n": self.n,
        }


def q_value(
    Q: MarkovChain, x, S: IntervalSet, bit_cap: int = DEFAULT_BIT_CAP
) -> Rational:
    """One-step hitting probability Q(x, S)."""
    x = as_rational(x)
    total = ZERO
    for T, p in zip(Q.generators, Q.probs):
        if p and S.contains(T.eval(x, bit_cap=bit_cap)):
            total += p
    return total


def _mass_levels(
    Q: MarkovChain, x: Rational, budget: int, bit_cap: int
) -> Iterator[dict[Rational, Rational]]:
    """Yield the exact atom dictionary after 1, 2, ... steps."""
    current = {as_rational(x): ONE}
    while True:
        nxt: dict[Rational, Rational] = {}
        for point, mass in current.items():
            for T, p in zip(Q.generators, Q.probs):
                if p == 0:
                    continue
                y = T.eval(point, bit_cap=bit_cap)
                check_bits(y, bit_cap)
                nxt[y] = nxt.get(y, ZERO) + mass * p
        if len(nxt) > budget:
            raise BudgetError(
                "dedup'd atom count %d exceeds the budget %d" % (len(nxt), budget)
            )
        current = nxt
        yield current


def qn_distribution(
    Q: MarkovChain,
    x,
    n: int,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> PointDistribution:
    """Exact n-step distribution of the chain started at x."""
    x = as_rational(x)
    if n < 0:
        raise ValueError("step count must be nonnegative")
    if n == 0:
        return PointDistribution(((x, ONE),))
    levels = _mass_levels(Q, x, budget, bit_cap)
    for _ in range(n - 1):
        next(levels)
    return PointDistribution(tuple(next(levels).items()))


def ball_mass_sequence(
    Q: MarkovChain,
    x,
    target: IntervalSet,
    N: int,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> list[Rational]:
    """Q^n(x, target) for n = 1..N, exactly.

    Uniform-probability chains with affine generators ride the scaled
    int64 word-tree DP; everything else uses the Fraction DP.
    """
    x = as_rational(x)
    Q.require_non_degenerate()
    if N < 1:
        raise ValueError("horizon must be at least 1")
    if Q.uniform:
        counts = _intdp.count_sequence(Q.generators, x, target, N, budget)
        if counts is not None:
            d = Q.d
            return [Fraction(c, d**n) for n, c in enumerate(counts, start=1)]
    out = []
    levels = _mass_levels(Q, x, budget, bit_cap)
    for _ in range(N):
        atoms = next(levels)
        out.append(sum((m for p, m in atoms.items() if target.contains(p)), ZERO))
    return out


def search_return_word(
    Q: MarkovChain,
    x,
    target: IntervalSet,
    N: int,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> tuple[int, Word] | None:
    """First n <= N with Q^n(x, target) > 0, plus one witnessing word.

    For a non-degenerate chain positivity equals word-tree reachability, so
    masses are unnecessary; parent pointers reconstruct the witness.
    """
    x = as_rational(x)
    Q.require_non_degenerate()
    current = {x: None}
    parents: list[dict[Rational, tuple[Rational, int]]] = []
    for n in range(1, N + 1):
        level: dict[Rational, tuple[Rational, int]] = {}
        for point in current:
            for i, T in enumerate(Q.generators, start=1):
                y = T.eval(point, bit_cap=bit_cap)
                check_bits(y, bit_cap)
                if y not in level:
                    level[y] = (point, i)
        if len(level) > budget:
            raise BudgetError(
                "dedup'd atom count %d exceeds the budget %d" % (len(level), budget)
            )
        parents.append(level)
        hit = next((p for p in level if target.contains(p)), None)
        if hit is not None:
            word: list[int] = []
            point = hit
            for back in reversed(parents):
                prev, letter = back[point]
                word.append(letter)
                point = prev
            word.reverse()
            return n, tuple(word)
        current = level
    return None


def qn_distribution_mc(
    Q: MarkovChain, x, n: int, seed: int, samples: int
) -> EmpiricalDistribution:
    """Empirical n-step distribution from seeded float64 trajectories.

    Sample s draws its letters from a counter-based generator keyed by
    seed XOR s, so results are reproducible and scheduling-independent.
    """
    import numpy as np

    x = as_rational(x)
    Q.require_non_degenerate()
    if n < 0:
        raise ValueError("step count must be nonnegative")
    if samples < 1:
        raise ValueError("sample count must be positive")
    probs = np.array([float(p) for p in Q.probs])
    cumulative = np.cumsum(probs)
    endpoints: dict[float, int] = {}
    for s in range(samples):
        rng = np.random.Generator(np.random.Philox(key=seed ^ s))
        u = rng.random(size=n)
        letters = np.searchsorted(cumulative, u, side="right")
        y = float(x)
        for k in range(n):
            y = _float_eval(Q.generators[int(letters[k])], y)
        endpoints[y] = endpoints.get(y, 0) + 1
    atoms = tuple(
        sorted((pt, cnt / samples) for pt, cnt in endpoints.items())
    )
    return EmpiricalDistribution(atoms, seed=seed, samples=samples, n=n)


def _float_eval(T: PiecewiseMap, y: float) -> float:
    for pt, val in T.overrides:
        if y == float(pt):
            return float(val)
    for piece in T.pieces:
        lo, hi = float(piece.domain.lo), float(piece.domain.hi)
        if (y > lo or (piece.domain.lo_closed and y == lo)) and (
            y < hi or (piece.domain.hi_closed and y == hi)
        ):
            acc = 0.0
            for c in reversed(piece.coeffs):
                acc = acc * y + float(c)
            return acc
    raise RuntimeError("float evaluation found no covering piece")


def q_preimage(
    Q: MarkovChain,
    S: IntervalSet,
    t: int,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> IntervalSet:
    """The t-step positivity preimage {x : Q^t(x, S) > 0}.

    Because the chain is non-degenerate this is the union over length-t
    words of the word's preimage, computed by iterating the one-step union
    preimage (preimages distribute over unions).
    """
    if t < 0:
        raise ValueError("step count must be nonnegative")
    Q.require_non_degenerate()
    if Q.d**t > budget:
        raise BudgetError("word count %d**%d exceeds the budget %d" % (Q.d, t, budget))
    current = S
    for _ in range(t):
        current = preimage_union_step(Q.generators, current, bit_cap=bit_cap)
        if len(current.intervals) > _INTERVAL_COUNT_GUARD:
            raise BudgetError("preimage interval count exceeded the guard")
    return current


def compatibility_gamma(p: Sequence, p_tilde: Sequence) -> Rational:
    """Two-sided comparability coefficient of two probability vectors.

    gamma = min_i min(p_i / q_i, q_i / p_i); chains built on the same
    generators then satisfy gamma^n Q~^n(x,A) <= Q^n(x,A) <= gamma^-n
    Q~^n(x,A), making their positivity patterns identical.
    """
    ps = [as_rational(v) for v in p]
    qs = [as_rational(v) for v in p_tilde]
    if len(ps) != len(qs):
        raise ValueError("probability vectors differ in length")
    if not ps:
        raise ValueError("probability vectors must be nonempty")
    if any(v <= 0 for v in ps) or any(v <= 0 for v in qs):
        raise DegenerateProbabilityError(
            "compatibility is undefined for degenerate probability vectors"
        )
    gamma = ONE
    for a, b in zip(ps, qs):
        gamma = min(gamma, a / b, b / a)
    return gamma
