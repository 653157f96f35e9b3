"""Reference measures, recurrence-series diagnostics, and the Ulam discretization.

Three families of tools live here:

* ``Measure`` and ``measure_of``: the reference measures used to size sets
  (Lebesgue, a Dirac point mass, or a piecewise-constant density on an
  equal-width bin grid).
* Partial-sum series built from exact preimages: ``poincare_partial_sums``
  for a single map, ``chain_return_sums`` for the induced chain, and the
  deliberately naive per-generator / fixed-word variants exposed as
  diagnostics.  Each series carries a trend tag; divergence of an infinite
  series is not decidable from a finite prefix, so the tag is evidence,
  never a verdict.
* The Ulam discretization of the chain's transfer action: an exact rational
  row-stochastic matrix on a bin grid, its closed communicating classes,
  and one stationary vector per class.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BitCapError, BudgetError, DegenerateProbabilityError, NonAffineError
from .geometry import (
    DEFAULT_BIT_CAP,
    ONE,
    ZERO,
    Interval,
    IntervalSet,
    Rational,
    as_rational,
    format_rational,
)
from .maps import DEFAULT_PIECE_BUDGET, PiecewiseMap, Word, compose, preimage_union_step
from .markov import MarkovChain, qn_distribution

__all__ = [
    "Measure",
    "SeriesReport",
    "UlamMatrix",
    "StationaryComponent",
    "measure_of",
    "poincare_partial_sums",
    "chain_return_sums",
    "naive_generator_sums",
    "naive_word_sums",
    "bin_grid",
    "ulam_matrix",
    "stationary_components",
    "act_on_measure",
]

POWER_ITERATION_CAP = 10**6

# Backward preimage sets can split into (pieces)^n components; the scaled-int
# cascade keeps that affordable well past a million intervals.
_INTERVAL_COUNT_GUARD = 4 * 10**6


def _validate_bin_count(n_bins: int) -> None:
    """Bin counts must factor as 2^a * 3^b so catalogue breakpoints align exactly."""
    if n_bins < 1:
        raise ValueError("bin count must be positive")
    k = n_bins
    for f in (2, 3):
        while k % f == 0:
            k //= f
    if k != 1:
        raise ValueError(
            "bin count %d is not of the form 2^a * 3^b; "
            "other grids would not align with the catalogue breakpoints" % n_bins
        )


@dataclass(frozen=True)
class Measure:
    """A probability measure on [0,1]: Lebesgue, Dirac(point), or a bin density.

    Density weights are per-cell masses over ``len(weights)`` equal-width
    cells and must sum to one.
    """

    kind: str
    point: Rational | None = None
    weights: tuple[Rational, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind == "lebesgue":
            if self.point is not None or self.weights is not None:
                raise ValueError("lebesgue measure carries no parameters")
        elif self.kind == "dirac":
            if self.point is None or self.weights is not None:
                raise ValueError("dirac measure needs exactly a point")
            if not (ZERO <= self.point <= ONE):
                raise ValueError("dirac point must lie in [0,1]")
        elif self.kind == "density":
            if self.weights is None or self.point is not None:
                raise ValueError("density measure needs exactly a weight vector")
            _validate_bin_count(len(self.weights))
            if any(w < 0 for w in self.weights):
                raise ValueError("density weights must be nonnegative")
            if sum(self.weights) != 1:
                raise ValueError("density weights must sum to 1")
        else:
            raise ValueError("unknown measure kind %r" % (self.kind,))

    @staticmethod
    def lebesgue() -> "Measure":
        return Measure("lebesgue")

    @staticmethod
    def dirac(point) -> "Measure":
        return Measure("dirac", point=as_rational(point))

    @staticmethod
    def density(weights) -> "Measure":
        return Measure("density", weights=tuple(as_rational(w) for w in weights))

    def to_json(self) -> dict:
        if self.kind == "lebesgue":
            return {"kind": "lebesgue"}
        if self.kind == "dirac":
            return {"kind": "dirac", "point": format_rational(self.point)}
        return {
            "kind": "density",
            "weights": [format_rational(w) for w in self.weights],
        }

    @staticmethod
    def from_json(data: dict) -> "Measure":
        kind = data["kind"]
        if kind == "lebesgue":
            return Measure.lebesgue()
        if kind == "dirac":
            return Measure.dirac(Fraction(data["point"]))
        return Measure.density([Fraction(w) for w in data["weights"]])


def bin_grid(n_bins: int) -> list[Interval]:
    """Equal-width cells [i/n, (i+1)/n), the last one closed at 1."""
    _validate_bin_count(n_bins)
    n = Fraction(n_bins)
    cells = []
    for i in range(n_bins):
        lo = Fraction(i) / n
        hi = Fraction(i + 1) / n
        if i == n_bins - 1:
            cells.append(Interval.closed(lo, hi))
        else:
            cells.append(Interval.right_open(lo, hi))
    return cells


def measure_of(m: Measure, s: IntervalSet) -> Rational:
    """Exact mass of an interval set under the reference measure."""
    if m.kind == "lebesgue":
        return s.length()
    if m.kind == "dirac":
        return ONE if s.contains(m.point) else ZERO
    total = ZERO
    cells = bin_grid(len(m.weights))
    width = Fraction(1, len(m.weights))
    for w, cell in zip(m.weights, cells):
        if w == 0:
            continue
        overlap = s.intersect(IntervalSet.of(cell)).length()
        if overlap:
            total += w * overlap / width
    return total


# ---------------------------------------------------------------------------
# Series diagnostics


@dataclass(frozen=True)
class SeriesReport:
    """Terms, partial sums, and a trend tag for a recurrence-type series."""

    terms: tuple[Rational, ...]
    sums: tuple[Rational, ...]
    trend: str

    def to_json(self) -> dict:
        return {
            "terms": [format_rational(t) for t in self.terms],
            "sums": [format_rational(s) for s in self.sums],
            "trend": self.trend,
        }


def _trend_tag(sums: Sequence[Rational], set_mass: Rational) -> str:
    """Classify a partial-sum sequence.

    ``bounded`` when the last half of the sums is constant, ``linear-growth``
    when the exact least-squares slope of (n, S_n) is at least half the
    target set's mass per step, ``undetermined`` otherwise.
    """
    n = len(sums)
    if n == 0:
        return "undetermined"
    tail = sums[-((n + 1) // 2):]
    if all(v == tail[0] for v in tail):
        return "bounded"
    if n >= 2:
        xs = [Fraction(i + 1) for i in range(n)]
        x_mean = sum(xs) / n
        y_mean = sum(sums, ZERO) / n
        sxx = sum((x - x_mean) ** 2 for x in xs)
        sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, sums))
        if sxx > 0 and sxy / sxx >= set_mass / 2:
            return "linear-growth"
    return "undetermined"


def _partial(terms: Sequence[Rational]) -> tuple[Rational, ...]:
    out = []
    acc = ZERO
    for t in terms:
        acc += t
        out.append(acc)
    return tuple(out)


# The backward cascade below stores every interval endpoint as a plain
# integer numerator over one shared denominator.  Pulling a set back through
# an affine piece multiplies that denominator by a factor fixed per map, so
# after n steps the denominator is D0 * M^n and all endpoint arithmetic,
# sorting, and merging happens on machine-friendly integers.  Interval
# counts can genuinely grow like (number of pieces)^n (the doubling map
# produces 2^n disjoint components), which makes the Fraction-based
# representation far too slow at the horizons the series anchors need.


def _cascade_factor(T: PiecewiseMap) -> int:
    """Denominator growth per pullback step through T, as one shared lcm."""
    M = 1
    for piece in T.pieces:
        if not piece.is_affine():
            raise NonAffineError(
                "exact preimages need affine pieces; "
                f"piece on {piece.domain} has degree {piece.degree}"
            )
        coeffs = piece.coeffs
        b = coeffs[0] if coeffs else ZERO
        a = coeffs[1] if len(coeffs) > 1 else ZERO
        if a != 0:
            M = _lcm(M, b.denominator * abs(a.numerator))
        M = _lcm(M, piece.domain.lo.denominator)
        M = _lcm(M, piece.domain.hi.denominator)
    for pt, _val in T.overrides:
        M = _lcm(M, pt.denominator)
    return M


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _scaled_contains(items, D: int, q: Fraction) -> bool:
    """Membership of the rational q in a merged scaled-int interval list."""
    qn, qd = q.numerator, q.denominator
    lo, hi = 0, len(items)
    while lo < hi:
        mid = (lo + hi) // 2
        if items[mid][0] * qd <= qn * D:
            lo = mid + 1
        else:
            hi = mid
    if lo == 0:
        return False
    ln, hn, lc, hc = items[lo - 1]
    left = ln * qd < qn * D or (ln * qd == qn * D and lc)
    right = qn * D < hn * qd or (qn * D == hn * qd and hc)
    return left and right


def _scaled_merge(parts: list) -> list:
    """Sort raw (lo, hi, lo_closed, hi_closed) int tuples and merge overlaps."""
    parts.sort(key=lambda t: (t[0], not t[2]))
    out: list = []
    for lon, hin, lc, hc in parts:
        if out:
            clon, chin, clc, chc = out[-1]
            if lon < chin or (lon == chin and (chc or lc)):
                if hin > chin:
                    out[-1] = (clon, hin, clc, hc)
                elif hin == chin:
                    out[-1] = (clon, chin, clc, chc or hc)
                continue
        out.append((lon, hin, lc, hc))
    return out


def _scaled_remove_point(items: list, pn: int) -> list:
    """Carve the point pn (already scaled) out of a merged interval list."""
    out = []
    for lon, hin, lc, hc in items:
        if lon <= pn <= hin:
            if lon == hin == pn:
                continue
            if pn == lon:
                out.append((lon, hin, False, hc))
            elif pn == hin:
                out.append((lon, hin, lc, False))
            else:
                out.append((lon, pn, lc, False))
                out.append((pn, hin, False, hc))
        else:
            out.append((lon, hin, lc, hc))
    return out


def _scaled_mass(items, D: int, m: Measure) -> Rational:
    """Measure of a merged scaled-int interval list under m."""
    if m.kind == "lebesgue":
        return Fraction(sum(hn - ln for ln, hn, _, _ in items), D)
    if m.kind == "dirac":
        return Fraction(1) if _scaled_contains(items, D, m.point) else ZERO
    total = ZERO
    k = len(m.weights)
    for ln, hn, _lc, _hc in items:
        lo, hi = Fraction(ln, D), Fraction(hn, D)
        first = max(0, int(lo * k) - 1)
        for j in range(first, k):
            clo, chi = Fraction(j, k), Fraction(j + 1, k)
            if clo >= hi:
                break
            cut = min(hi, chi) - max(lo, clo)
            if cut > 0:
                total += m.weights[j] * cut * k
    return total


def _pullback_step(T: PiecewiseMap, items: list, D: int, M: int) -> tuple[list, int]:
    """One exact preimage of a scaled-int interval list through T."""
    D2 = D * M
    parts: list = []
    for piece in T.pieces:
        coeffs = piece.coeffs
        b = coeffs[0] if coeffs else ZERO
        a = coeffs[1] if len(coeffs) > 1 else ZERO
        dom = piece.domain
        dlon = dom.lo.numerator * (D2 // dom.lo.denominator)
        dhin = dom.hi.numerator * (D2 // dom.hi.denominator)
        if a == 0:
            if _scaled_contains(items, D, b):
                parts.append((dlon, dhin, dom.lo_closed, dom.hi_closed))
            continue
        pa, qa = a.numerator, a.denominator
        pb, qb = b.numerator, b.denominator
        fac = M // (qb * abs(pa))
        sgn = 1 if pa > 0 else -1
        for lon, hin, lc, hc in items:
            xl = (lon * qb - pb * D) * qa * fac * sgn
            xh = (hin * qb - pb * D) * qa * fac * sgn
            if sgn < 0:
                xl, xh, lc, hc = xh, xl, hc, lc
            if xl < dlon or (xl == dlon and not dom.lo_closed and lc):
                xl, lc = dlon, dom.lo_closed
            elif xl == dlon:
                lc = lc and dom.lo_closed
            if xh > dhin or (xh == dhin and not dom.hi_closed and hc):
                xh, hc = dhin, dom.hi_closed
            elif xh == dhin:
                hc = hc and dom.hi_closed
            if xl > xh or (xl == xh and not (lc and hc)):
                continue
            parts.append((xl, xh, lc, hc))
    merged = _scaled_merge(parts)
    if T.overrides:
        for pt, _val in T.overrides:
            merged = _scaled_remove_point(merged, pt.numerator * (D2 // pt.denominator))
        extra = [
            (pt.numerator * (D2 // pt.denominator),) * 2 + (True, True)
            for pt, val in T.overrides
            if _scaled_contains(items, D, val)
        ]
        if extra:
            merged = _scaled_merge(merged + extra)
    return merged, D2


def poincare_partial_sums(
    T: PiecewiseMap,
    m: Measure,
    A: IntervalSet,
    N: int,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> SeriesReport:
    """Partial sums of the backward series sum_n m(T^{-n} A), n = 1..N.

    Preimages are iterated exactly, so the map must be affine on every piece.
    """
    if N < 1:
        raise ValueError("horizon must be at least 1")
    M = _cascade_factor(T)
    D = 1
    for iv in A:
        D = _lcm(D, iv.lo.denominator)
        D = _lcm(D, iv.hi.denominator)
    items = [
        (iv.lo.numerator * (D // iv.lo.denominator),
         iv.hi.numerator * (D // iv.hi.denominator),
         iv.lo_closed, iv.hi_closed)
        for iv in A
    ]
    terms = []
    for _ in range(N):
        if items:
            items, D = _pullback_step(T, items, D, M)
        else:
            D *= M
        if bit_cap is not None and 2 * D.bit_length() + 2 > bit_cap:
            raise BitCapError(
                "preimage denominators exceeded the bit cap of %d" % bit_cap
            )
        if len(items) > _INTERVAL_COUNT_GUARD:
            raise BudgetError("preimage interval count exceeded the guard")
        terms.append(_scaled_mass(items, D, m))
    sums = _partial(terms)
    return SeriesReport(tuple(terms), sums, _trend_tag(sums, measure_of(m, A)))


def chain_return_sums(
    Q: MarkovChain,
    m: Measure,
    A: IntervalSet,
    N: int,
    budget: int = 10**6,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> SeriesReport:
    """Partial sums of m(Q^{-n}(A) intersected with A), n = 1..N.

    Q^{-n}(A) is the set of points from which some length-n word has positive
    probability of landing in A; for non-degenerate weights that is the union
    of word preimages, computed here by iterating the one-step union preimage.
    """
    if N < 1:
        raise ValueError("horizon must be at least 1")
    Q.require_non_degenerate()
    if Q.d**N > budget:
        raise BudgetError(
            "word count %d**%d exceeds the budget %d" % (Q.d, N, budget)
        )
    terms = []
    current = A
    for _ in range(N):
        current = preimage_union_step(Q.generators, current, bit_cap=bit_cap)
        terms.append(measure_of(m, current.intersect(A)))
        if len(current.intervals) > _INTERVAL_COUNT_GUARD:
            raise BudgetError("preimage interval count exceeded the guard")
    sums = _partial(terms)
    return SeriesReport(tuple(terms), sums, _trend_tag(sums, measure_of(m, A)))


def naive_generator_sums(
    generators: Sequence[PiecewiseMap],
    m: Measure,
    A: IntervalSet,
    N: int,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> dict:
    """The per-generator summed series (a knowingly failed recurrence test).

    Sums m(T_i^{-n} A) over every generator separately, including the n = 0
    term m(A) for each, and reports the combined partial sums.  A single
    generator collapsing the space to a null set defeats this condition,
    which is exactly why it is exposed only as a diagnostic.
    """
    if N < 0:
        raise ValueError("horizon must be nonnegative")
    per = []
    for T in generators:
        terms = [measure_of(m, A)]
        current = A
        for _ in range(N):
            current = T.preimage(current, bit_cap=bit_cap)
            terms.append(measure_of(m, current))
        per.append(SeriesReport(tuple(terms), _partial(terms), _trend_tag(_partial(terms), measure_of(m, A))))
    combined_terms = tuple(
        sum(rep.terms[k] for rep in per) for k in range(N + 1)
    )
    combined = _partial(combined_terms)
    return {
        "per_generator": per,
        "combined": SeriesReport(
            combined_terms, combined, _trend_tag(combined, measure_of(m, A))
        ),
    }


def naive_word_sums(
    generators: Sequence[PiecewiseMap],
    sequence: Sequence[int],
    m: Measure,
    A: IntervalSet,
    N: int,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> SeriesReport:
    """Series along one fixed letter sequence (the non-autonomous diagnostic).

    Term n is m of the preimage of A under the word [i_1..i_n] built from the
    supplied sequence; the sequence repeats cyclically when shorter than N.
    The word's preimage is the innermost-first fold of one-letter preimages.
    """
    if N < 1:
        raise ValueError("horizon must be at least 1")
    seq = [int(i) for i in sequence]
    if not seq:
        raise ValueError("letter sequence must be nonempty")
    d = len(generators)
    for i in seq:
        if not 1 <= i <= d:
            raise ValueError("letter %d outside 1..%d" % (i, d))
    terms = []
    for n in range(1, N + 1):
        word = [seq[k % len(seq)] for k in range(n)]
        current = A
        for letter in reversed(word):
            current = generators[letter - 1].preimage(current, bit_cap=bit_cap)
        terms.append(measure_of(m, current))
    sums = _partial(terms)
    return SeriesReport(tuple(terms), sums, _trend_tag(sums, measure_of(m, A)))


# ---------------------------------------------------------------------------
# Ulam discretization


@dataclass(frozen=True)
class UlamMatrix:
    """Exact rational row-stochastic discretization of the chain's action.

    entry[i][j] is the probability-weighted fraction of bin i whose image
    lands in bin j: sum_k p_k * len(bin_i n T_k^{-1} bin_j) / len(bin_i).
    """

    n_bins: int
    entries: tuple[tuple[Rational, ...], ...]

    def __post_init__(self) -> None:
        for i, row in enumerate(self.entries):
            if any(v < 0 for v in row):
                raise ValueError("negative entry in row %d" % i)
            if sum(row) != 1:
                raise ValueError("row %d does not sum to 1" % i)

    def row(self, i: int) -> tuple[Rational, ...]:
        return self.entries[i]

    def to_text(self) -> str:
        lines = [
            "%%MatrixMarket-style matrix coordinate rational general",
            "%d %d" % (self.n_bins, self.n_bins),
        ]
        for i, row in enumerate(self.entries):
            for j, v in enumerate(row):
                if v:
                    lines.append("%d %d %s" % (i + 1, j + 1, format_rational(v)))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "n_bins": self.n_bins,
            "entries": [[format_rational(v) for v in row] for row in self.entries],
        }


def ulam_matrix(
    Q: MarkovChain, n_bins: int, bit_cap: int = DEFAULT_BIT_CAP
) -> UlamMatrix:
    """Assemble the Ulam matrix by exact preimage-overlap computation."""
    cells = bin_grid(n_bins)
    width = Fraction(1, n_bins)
    rows = [[ZERO] * n_bins for _ in range(n_bins)]
    for T, p in zip(Q.generators, Q.probs):
        if p == 0:
            continue
        for j, cell in enumerate(cells):
            pre = T.preimage(IntervalSet.of(cell), bit_cap=bit_cap)
            for iv in pre.intervals:
                # only bins overlapping this preimage interval contribute
                first = int(iv.lo / width)
                last = int(iv.hi / width)
                for i in range(max(first, 0), min(last, n_bins - 1) + 1):
                    overlap = iv.intersect(cells[i])
                    if overlap is not None:
                        ln = overlap.length()
                        if ln:
                            rows[i][j] += p * ln / width
    return UlamMatrix(n_bins, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class StationaryComponent:
    """One closed communicating class with its stationary weight vector."""

    support: tuple[int, ...]
    weights: tuple[Rational, ...]

    def to_json(self) -> dict:
        return {
            "support": list(self.support),
            "weights": [format_rational(w) for w in self.weights],
        }


def _closed_classes(entries) -> list[list[int]]:
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    n = len(entries)
    data, ri, ci = [], [], []
    for i in range(n):
        for j in range(n):
            if entries[i][j] > 0:
                data.append(1)
                ri.append(i)
                ci.append(j)
    graph = csr_matrix((data, (ri, ci)), shape=(n, n))
    n_comp, labels = connected_components(graph, directed=True, connection="strong")
    classes: list[list[int]] = [[] for _ in range(n_comp)]
    for i, lab in enumerate(labels):
        classes[lab].append(i)
    closed = []
    for members in classes:
        member_set = set(members)
        if all(
            entries[i][j] == 0
            for i in members
            for j in range(n)
            if j not in member_set
        ):
            closed.append(sorted(members))
    closed.sort(key=lambda c: c[0])
    return closed


def _snap_vector(vec, sub, tol: Fraction) -> tuple[Rational, ...] | None:
    """Try to promote a float vector to exact rationals with a small residual."""
    k = len(vec)
    snapped = [Fraction(float(v)).limit_denominator(10**9) for v in vec]
    total = sum(snapped)
    if total == 0:
        return None
    snapped = [v / total for v in snapped]
    residual = ZERO
    for j in range(k):
        image_j = sum(snapped[i] * sub[i][j] for i in range(k))
        residual += abs(image_j - snapped[j])
    if residual < tol:
        return tuple(snapped)
    return None


def stationary_components(
    M: UlamMatrix, tol=Fraction(1, 10**10)
) -> list[StationaryComponent]:
    """Closed communicating classes and one stationary vector per class.

    Classes come from strongly-connected-component analysis of the positivity
    pattern.  Each vector is found by float power iteration to an l1 residual
    below ``tol`` (iteration cap 10^6), then snapped back to exact rationals
    when the snapped vector still satisfies the residual bound.
    """
    tol_f = float(tol)
    if tol_f <= 0:
        raise ValueError("tolerance must be positive")
    tol_frac = tol if isinstance(tol, Fraction) else Fraction(float(tol))
    import numpy as np

    out = []
    for members in _closed_classes(M.entries):
        k = len(members)
        sub = [[M.entries[a][b] for b in members] for a in members]
        sub_f = np.array([[float(v) for v in row] for row in sub], dtype=float)
        v = np.full(k, 1.0 / k)
        converged = False
        for _ in range(POWER_ITERATION_CAP):
            nxt = v @ sub_f
            nxt /= nxt.sum()
            if float(np.abs(nxt - v).sum()) < tol_f / 4:
                v = nxt
                converged = True
                break
            v = nxt
        if not converged:
            raise BudgetError(
                "power iteration did not converge within %d steps" % POWER_ITERATION_CAP
            )
        snapped = _snap_vector(v, sub, tol_frac)
        if snapped is None:
            exact = [Fraction(float(x)) for x in v]
            total = sum(exact)
            snapped = tuple(x / total for x in exact)
        out.append(StationaryComponent(tuple(members), snapped))
    return out


def act_on_measure(Q: MarkovChain, mu: Measure, n_bins: int) -> Measure:
    """One step of the chain's action on a measure, projected to the bin grid.

    Dirac masses are pushed exactly through the one-step distribution and then
    binned; Lebesgue and density inputs are projected to the grid and
    multiplied by the Ulam matrix.  Total mass one is preserved exactly.
    """
    _validate_bin_count(n_bins)
    if mu.kind == "dirac":
        dist = qn_distribution(Q, mu.point, 1)
        weights = [ZERO] * n_bins
        for point, mass in dist.atoms:
            idx = min(int(point * n_bins), n_bins - 1)
            weights[idx] += mass
        return Measure.density(weights)
    if mu.kind == "lebesgue":
        start = [Fraction(1, n_bins)] * n_bins
    else:
        if len(mu.weights) != n_bins:
            raise ValueError(
                "density has %d cells but %d bins were requested"
                % (len(mu.weights), n_bins)
            )
        start = list(mu.weights)
    matrix = ulam_matrix(Q, n_bins)
    moved = [
        sum(start[i] * matrix.entries[i][j] for i in range(n_bins))
        for j in range(n_bins)
    ]
    return Measure.density(moved)
