"""Piecewise polynomial self-maps of [0,1] with exact rational arithmetic.

A map is a finite list of pieces (interval domain, polynomial of degree <= 2)
plus isolated override points that win over any piece containing them.  The
pieces and overrides together must cover [0,1] exactly.  Images are exact for
any supported degree; preimages and materialized compositions are exact for
affine pieces (nonlinear pullbacks would need irrational endpoints, so they
fail loudly instead).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BitCapError, BudgetError, CoverageError, NonAffineError
from .geometry import (
    DEFAULT_BIT_CAP,
    ONE,
    ZERO,
    Interval,
    IntervalSet,
    Rational,
    RationalLike,
    as_rational,
    check_bits,
    format_rational,
    parse_rational,
)

Word = tuple[int, ...]

DEFAULT_PIECE_BUDGET = 10**6


def _trim(coeffs: Sequence[RationalLike]) -> tuple[Fraction, ...]:
    out = [as_rational(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    if not out:
        out = [ZERO]
    return tuple(out)


def poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_compose(outer: Sequence[Fraction], inner: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Coefficients of outer(inner(x)). Raises if the degree exceeds 2."""
    deg = (len(outer) - 1) * (len(inner) - 1)
    if deg > 2:
        raise NonAffineError(
            "composition would exceed polynomial degree 2; "
            "use the evaluation path instead of materializing"
        )
    acc: list[Fraction] = [ZERO]
    for c in reversed(outer):
        # acc = acc * inner + c
        prod = [ZERO] * (len(acc) + len(inner) - 1)
        for i, a in enumerate(acc):
            if a == 0:
                continue
            for j, b in enumerate(inner):
                prod[i + j] += a * b
        prod[0] += c
        acc = prod
    return _trim(acc)


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root when it is rational, else None."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class Piece:
    """One branch: a polynomial (degree <= 2) on an interval domain."""

    domain: Interval
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))
        if len(self.coeffs) > 3:
            raise ValueError("pieces are limited to polynomial degree 2")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def value(self, x: RationalLike) -> Fraction:
        return poly_eval(self.coeffs, as_rational(x))

    def is_affine(self) -> bool:
        return self.degree <= 1

    def slope(self) -> Fraction:
        return self.coeffs[1] if len(self.coeffs) > 1 else ZERO

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "coeffs": [format_rational(c) for c in self.coeffs],
        }

    @staticmethod
    def from_json(obj: dict) -> "Piece":
        return Piece(
            Interval.from_json(obj["domain"]),
            tuple(parse_rational(c) for c in obj["coeffs"]),
        )


def _range_of_piece(p: Piece) -> tuple[Fraction, Fraction]:
    """Min/max of the polynomial over the closure of the domain."""
    a, b = p.domain.lo, p.domain.hi
    vals = [p.value(a), p.value(b)]
    if p.degree == 2:
        c2 = p.coeffs[2]
        vertex = -p.coeffs[1] / (2 * c2)
        if a < vertex < b:
            vals.append(p.value(vertex))
    return min(vals), max(vals)


@dataclass(frozen=True)
class PiecewiseMap:
    """A total map of [0,1] given by pieces plus isolated overrides.

    Overrides take precedence over pieces at their points.  The circle flag
    marks maps meant to act on [0,1] with endpoints identified; it changes
    nothing here except how callers build metric balls.
    """

    pieces: tuple[Piece, ...]
    overrides: tuple[tuple[Fraction, Fraction], ...] = ()
    label: str = ""
    circle: bool = False

    def __post_init__(self):
        pieces = tuple(sorted(self.pieces, key=lambda p: (p.domain.lo, not p.domain.lo_closed)))
        object.__setattr__(self, "pieces", pieces)
        ov = tuple(
            sorted((as_rational(p), as_rational(v)) for p, v in self.overrides)
        )
        object.__setattr__(self, "overrides", ov)
        self._validate()
        object.__setattr__(self, "_los", [p.domain.lo for p in pieces])
        object.__setattr__(self, "_ovmap", dict(ov))
        object.__setattr__(self, "_effective", None)

    def _validate(self):
        seen = set()
        for pt, val in self.overrides:
            if pt in seen:
                raise ValueError(f"duplicate override point {pt}")
            seen.add(pt)
            if not (ZERO <= pt <= ONE) or not (ZERO <= val <= ONE):
                raise ValueError("override points and values must lie in [0,1]")
        for i in range(len(self.pieces) - 1):
            cur, nxt = self.pieces[i].domain, self.pieces[i + 1].domain
            if cur.intersect(nxt) is not None:
                raise ValueError(f"piece domains overlap: {cur} and {nxt}")
        for p in self.pieces:
            lo, hi = _range_of_piece(p)
            if lo < ZERO or hi > ONE:
                raise ValueError(
                    f"piece {p.coeffs} on {p.domain} leaves [0,1]: range [{lo},{hi}]"
                )
        covered = IntervalSet.from_intervals(
            [p.domain for p in self.pieces]
        ).union(IntervalSet.points([pt for pt, _ in self.overrides]))
        if covered != IntervalSet.full():
            missing = IntervalSet.full().difference(covered)
            raise CoverageError(f"map does not cover [0,1]; missing {missing}")

    @property
    def d_pieces(self) -> int:
        return len(self.pieces)

    def is_affine(self) -> bool:
        return all(p.is_affine() for p in self.pieces)

    def eval(self, x: RationalLike, bit_cap: int | None = DEFAULT_BIT_CAP) -> Fraction:
        x = as_rational(x)
        hit = self._ovmap.get(x)
        if hit is not None:
            return check_bits(hit, bit_cap)
        idx = bisect.bisect_right(self._los, x) - 1
        for j in (idx, idx - 1, idx + 1):
            if 0 <= j < len(self.pieces) and self.pieces[j].domain.contains(x):
                return check_bits(self.pieces[j].value(x), bit_cap)
        raise CoverageError(f"{self.label or 'map'} undefined at {x}")

    def __call__(self, x: RationalLike) -> Fraction:
        return self.eval(x)

    # -- exact set operations ------------------------------------------------

    def effective_domains(self) -> list[tuple[Piece, IntervalSet]]:
        """Piece domains with override points carved out (cached)."""
        if self._effective is None:
            pts = [pt for pt, _ in self.overrides]
            out = []
            for p in self.pieces:
                dom = IntervalSet((p.domain,)).remove_points(pts)
                out.append((p, dom))
            object.__setattr__(self, "_effective", out)
        return self._effective

    def image(self, s: IntervalSet, bit_cap: int | None = DEFAULT_BIT_CAP) -> IntervalSet:
        """Exact forward image of a set."""
        parts: list[Interval] = []
        for piece, dom in self.effective_domains():
            for iv in dom.intersect(s):
                parts.extend(_piece_image(piece, iv))
        for pt, val in self.overrides:
            if s.contains(pt):
                parts.append(Interval.point(val))
        for iv in parts:
            check_bits(iv.lo, bit_cap)
            check_bits(iv.hi, bit_cap)
        return IntervalSet.from_intervals(parts)

    def preimage(self, s: IntervalSet, bit_cap: int | None = DEFAULT_BIT_CAP) -> IntervalSet:
        """Exact preimage of a set. Affine pieces only."""
        parts: list[Interval] = []
        for piece in self.pieces:
            if not piece.is_affine():
                raise NonAffineError(
                    "exact preimages need affine pieces; "
                    f"piece on {piece.domain} has degree {piece.degree}"
                )
            for iv in s:
                hit = _affine_pullback(piece, iv)
                if hit is not None:
                    parts.append(hit)
        base = IntervalSet.from_intervals(parts).remove_points(
            pt for pt, _ in self.overrides
        )
        extra = [pt for pt, val in self.overrides if s.contains(val)]
        out = base.union(IntervalSet.points(extra))
        for iv in out:
            check_bits(iv.lo, bit_cap)
            check_bits(iv.hi, bit_cap)
        return out

    def breakpoints(self) -> list[Fraction]:
        pts = set()
        for p in self.pieces:
            pts.add(p.domain.lo)
            pts.add(p.domain.hi)
        for pt, _ in self.overrides:
            pts.add(pt)
        return sorted(pts)

    def fixed_point_locus(self) -> IntervalSet:
        """Exact solution set of eval(x) == x."""
        parts: list[Interval] = []
        for piece, dom in self.effective_domains():
            c = list(piece.coeffs) + [ZERO] * (3 - len(piece.coeffs))
            # solve c0 + (c1-1) x + c2 x^2 == 0 inside dom
            roots: list[Fraction] = []
            whole = False
            if c[2] == 0:
                if c[1] == ONE:
                    whole = c[0] == ZERO
                else:
                    roots = [c[0] / (ONE - c[1])]
            else:
                disc = (c[1] - ONE) ** 2 - 4 * c[2] * c[0]
                r = rational_sqrt(disc)
                if r is not None:
                    roots = [
                        ((ONE - c[1]) + r) / (2 * c[2]),
                        ((ONE - c[1]) - r) / (2 * c[2]),
                    ]
            if whole:
                parts.extend(dom.intervals)
            else:
                for root in roots:
                    if ZERO <= root <= ONE and dom.contains(root):
                        parts.append(Interval.point(root))
        for pt, val in self.overrides:
            if pt == val:
                parts.append(Interval.point(pt))
        return IntervalSet.from_intervals(parts)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "circle": self.circle,
            "pieces": [p.to_json() for p in self.pieces],
            "overrides": [
                {"point": format_rational(p), "value": format_rational(v)}
                for p, v in self.overrides
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "PiecewiseMap":
        return PiecewiseMap(
            pieces=tuple(Piece.from_json(p) for p in obj["pieces"]),
            overrides=tuple(
                (parse_rational(o["point"]), parse_rational(o["value"]))
                for o in obj.get("overrides", [])
            ),
            label=obj.get("label", ""),
            circle=bool(obj.get("circle", False)),
        )


def _piece_image(piece: Piece, iv: Interval) -> list[Interval]:
    """Image of one interval under one piece (domain intersection done)."""
    c = piece.coeffs
    if piece.degree == 0:
        return [Interval.point(c[0])]
    if piece.degree == 1:
        lo_v, hi_v = poly_eval(c, iv.lo), poly_eval(c, iv.hi)
        lo_c, hi_c = iv.lo_closed, iv.hi_closed
        if c[1] < 0:
            lo_v, hi_v, lo_c, hi_c = hi_v, lo_v, hi_c, lo_c
        if lo_v == hi_v:
            return [Interval.point(lo_v)]
        return [Interval(lo_v, hi_v, lo_c, hi_c)]
    # quadratic: split at the vertex so each part is monotone
    vertex = -c[1] / (2 * c[2])
    if iv.lo < vertex < iv.hi:
        left = Interval(iv.lo, vertex, iv.lo_closed, True)
        right = Interval(vertex, iv.hi, False, iv.hi_closed)
        return _monotone_image(c, left) + _monotone_image(c, right)
    return _monotone_image(c, iv)


def _monotone_image(coeffs, iv: Interval) -> list[Interval]:
    lo_v, hi_v = poly_eval(coeffs, iv.lo), poly_eval(coeffs, iv.hi)
    lo_c, hi_c = iv.lo_closed, iv.hi_closed
    if lo_v > hi_v:
        lo_v, hi_v, lo_c, hi_c = hi_v, lo_v, hi_c, lo_c
    if lo_v == hi_v:
        return [Interval.point(lo_v)]
    return [Interval(lo_v, hi_v, lo_c, hi_c)]


def _affine_pullback(piece: Piece, target: Interval) -> Interval | None:
    """{x in domain : piece(x) in target} for an affine piece."""
    c0 = piece.coeffs[0]
    c1 = piece.slope()
    if c1 == 0:
        return piece.domain if target.contains(c0) else None
    lo = (target.lo - c0) / c1
    hi = (target.hi - c0) / c1
    lo_c, hi_c = target.lo_closed, target.hi_closed
    if c1 < 0:
        lo, hi, lo_c, hi_c = hi, lo, hi_c, lo_c
    if lo < ZERO:
        lo, lo_c = ZERO, True
    if hi > ONE:
        hi, hi_c = ONE, True
    if lo > hi or (lo == hi and not (lo_c and hi_c)):
        return None
    return Interval(lo, hi, lo_c, hi_c).intersect(piece.domain)


def identity_map(label: str = "identity") -> PiecewiseMap:
    return PiecewiseMap(
        pieces=(Piece(Interval.closed(0, 1), (ZERO, ONE)),),
        label=label,
    )


def validate_word(d: int, word: Sequence[int]) -> Word:
    w = tuple(int(i) for i in word)
    if not w:
        raise ValueError("words must be nonempty")
    for i in w:
        if not 1 <= i <= d:
            raise ValueError(f"word letter {i} outside 1..{d}")
    return w


def eval_word(
    generators: Sequence[PiecewiseMap],
    word: Sequence[int],
    x: RationalLike,
    bit_cap: int | None = DEFAULT_BIT_CAP,
) -> Fraction:
    """Apply the word left to right (first letter acts first).

    This is the evaluation path that works even when the composed map cannot
    be materialized (degree blowup).
    """
    w = validate_word(len(generators), word)
    y = as_rational(x)
    for i in w:
        y = generators[i - 1].eval(y, bit_cap=bit_cap)
    return y


def compose2(
    f: PiecewiseMap,
    g: PiecewiseMap,
    piece_budget: int = DEFAULT_PIECE_BUDGET,
) -> PiecewiseMap:
    """Materialize g after f (f acts first)."""
    new_pieces: list[Piece] = []
    new_overrides: dict[Fraction, Fraction] = {}

    g_effective = g.effective_domains()

    for piece, dom in f.effective_domains():
        if dom.is_empty():
            continue
        if piece.degree == 0:
            w = g.eval(piece.coeffs[0], bit_cap=None)
            for iv in dom:
                new_pieces.append(Piece(iv, (w,)))
            continue
        for gpiece, gdom in g_effective:
            coeffs = poly_compose(gpiece.coeffs, piece.coeffs)
            for target in gdom:
                pulled = _pullback(piece, target)
                for iv in pulled:
                    for part in dom.intersect(IntervalSet((iv,))):
                        new_pieces.append(Piece(part, coeffs))
                        if len(new_pieces) > piece_budget:
                            raise BudgetError(
                                f"composition exceeded the {piece_budget}-piece budget"
                            )
        for bpt, bval in g.overrides:
            for root in _solve_piece(piece, bpt):
                if dom.contains(root):
                    new_overrides[root] = bval

    for apt, aval in f.overrides:
        new_overrides[apt] = g.eval(aval, bit_cap=None)

    return PiecewiseMap(
        pieces=tuple(new_pieces),
        overrides=tuple(new_overrides.items()),
        label=f"{g.label}*{f.label}" if f.label or g.label else "",
        circle=f.circle and g.circle,
    )


def _solve_piece(piece: Piece, value: Fraction) -> list[Fraction]:
    """Rational solutions of piece(x) == value within the piece domain."""
    c = list(piece.coeffs) + [ZERO] * (3 - len(piece.coeffs))
    roots: list[Fraction] = []
    if c[2] == 0:
        if c[1] == 0:
            return []  # constant pieces are handled by the caller
        roots = [(value - c[0]) / c[1]]
    else:
        disc = c[1] * c[1] - 4 * c[2] * (c[0] - value)
        r = rational_sqrt(disc)
        if r is None:
            return []
        roots = [(-c[1] + r) / (2 * c[2]), (-c[1] - r) / (2 * c[2])]
    return [x for x in set(roots) if ZERO <= x <= ONE and piece.domain.contains(x)]


def _pullback(piece: Piece, target: Interval) -> list[Interval]:
    """{x in domain : piece(x) in target}, exact or loud failure."""
    if piece.is_affine():
        hit = _affine_pullback(piece, target)
        return [hit] if hit is not None else []
    # quadratic: boundary solutions must be rational to be representable
    c = piece.coeffs
    vertex = -c[1] / (2 * c[2])
    dom = piece.domain
    halves: list[Interval] = []
    if dom.lo < vertex < dom.hi:
        halves = [
            Interval(dom.lo, vertex, dom.lo_closed, True),
            Interval(vertex, dom.hi, False, dom.hi_closed),
        ]
    else:
        halves = [dom]
    out: list[Interval] = []
    for half in halves:
        a, b = poly_eval(c, half.lo), poly_eval(c, half.hi)
        increasing = a <= b
        lo_v, hi_v = (a, b) if increasing else (b, a)
        cut = target.intersect(
            Interval(max(lo_v, ZERO), min(hi_v, ONE), True, True)
        )
        if cut is None:
            continue
        xs: list[Fraction | None] = []
        for v in (cut.lo, cut.hi):
            sols = _solve_piece_on(c, v, half)
            if sols is None:
                raise NonAffineError(
                    "nonlinear pullback hits an irrational boundary; "
                    "exact preimage is unsupported here"
                )
            xs.append(sols)
        x_lo, x_hi = xs if increasing else xs[::-1]
        lo_cl = cut.lo_closed if increasing else cut.hi_closed
        hi_cl = cut.hi_closed if increasing else cut.lo_closed
        if x_lo == x_hi:
            if lo_cl and hi_cl:
                out.append(Interval.point(x_lo))
            continue
        hit = Interval(x_lo, x_hi, lo_cl, hi_cl).intersect(half)
        if hit is not None:
            out.append(hit)
    return out


def _solve_piece_on(coeffs, value: Fraction, within: Interval) -> Fraction | None:
    c = list(coeffs) + [ZERO] * (3 - len(coeffs))
    disc = c[1] * c[1] - 4 * c[2] * (c[0] - value)
    r = rational_sqrt(disc)
    if r is None:
        return None
    for root in ((-c[1] + r) / (2 * c[2]), (-c[1] - r) / (2 * c[2])):
        if within.lo <= root <= within.hi:
            return root
    return None


def compose(
    generators: Sequence[PiecewiseMap],
    word: Sequence[int],
    piece_budget: int = DEFAULT_PIECE_BUDGET,
) -> PiecewiseMap:
    """Materialize the word map (first letter acts first)."""
    w = validate_word(len(generators), word)
    current = generators[w[0] - 1]
    for i in w[1:]:
        current = compose2(current, generators[i - 1], piece_budget=piece_budget)
    if len(w) == 1:
        return current
    label = "w[" + ",".join(str(i) for i in w) + "]"
    return PiecewiseMap(
        pieces=current.pieces,
        overrides=current.overrides,
        label=label,
        circle=current.circle,
    )


def preimage_union_step(
    generators: Sequence[PiecewiseMap],
    s: IntervalSet,
    bit_cap: int | None = DEFAULT_BIT_CAP,
) -> IntervalSet:
    """Union of the generator preimages of s (one backward step)."""
    out = IntervalSet.empty()
    for g in generators:
        out = out.union(g.preimage(s, bit_cap=bit_cap))
    return out
