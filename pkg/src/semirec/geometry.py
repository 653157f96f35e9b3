"""Exact subsets of the unit interval.

Rationals are stdlib fractions (already canonical: reduced, positive
denominator) guarded by an explicit bit-size cap so that runaway denominator
growth fails loudly instead of silently eating the machine.  Sets are finite
unions of intervals with explicit open/closed endpoint flags; every operation
is exact.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import BitCapError

Rational = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_BIT_CAP = 4096


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not a rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    """Parse a "p/q" (or bare "p") string. Floats are rejected on purpose."""
    text = text.strip()
    if any(c in text for c in ".eE") and not text.lstrip("+-").isdigit():
        raise ValueError(f"rationals must be given as p/q strings, got {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None


def format_rational(q: Fraction) -> str:
    return str(q)


def bit_size(q: Fraction) -> int:
    """Total bit length of numerator and denominator."""
    return abs(q.numerator).bit_length() + q.denominator.bit_length()


def check_bits(q: Fraction, cap: int | None = DEFAULT_BIT_CAP) -> Fraction:
    """Return q unchanged, raising BitCapError if it exceeds the cap."""
    if cap is not None and bit_size(q) > cap:
        raise BitCapError(
            f"rational of {bit_size(q)} bits exceeds the {cap}-bit cap"
        )
    return q


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Interval:
    """A nonempty subinterval of [0,1] with endpoint flags.

    Degenerate intervals (lo == hi) must be closed on both sides: they are
    single points.
    """

    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not (ZERO <= lo <= hi <= ONE):
            raise ValueError(f"interval endpoints outside [0,1]: {lo}, {hi}")
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("degenerate intervals must be closed on both sides")

    @staticmethod
    def point(x: RationalLike) -> "Interval":
        x = as_rational(x)
        return Interval(x, x, True, True)

    @staticmethod
    def closed(lo: RationalLike, hi: RationalLike) -> "Interval":
        return Interval(as_rational(lo), as_rational(hi), True, True)

    @staticmethod
    def open(lo: RationalLike, hi: RationalLike) -> "Interval":
        return Interval(as_rational(lo), as_rational(hi), False, False)

    @staticmethod
    def left_open(lo: RationalLike, hi: RationalLike) -> "Interval":
        return Interval(as_rational(lo), as_rational(hi), False, True)

    @staticmethod
    def right_open(lo: RationalLike, hi: RationalLike) -> "Interval":
        return Interval(as_rational(lo), as_rational(hi), True, False)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: RationalLike) -> bool:
        x = as_rational(x)
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def length(self) -> Fraction:
        return self.hi - self.lo

    def intersect(self, other: "Interval") -> "Interval | None":
        if self.lo > other.lo or (self.lo == other.lo and other.lo_closed):
            lo, lo_closed = self.lo, self.lo_closed
            if self.lo == other.lo:
                lo_closed = self.lo_closed and other.lo_closed
        else:
            lo, lo_closed = other.lo, other.lo_closed
        if self.hi < other.hi or (self.hi == other.hi and other.hi_closed):
            hi, hi_closed = self.hi, self.hi_closed
            if self.hi == other.hi:
                hi_closed = self.hi_closed and other.hi_closed
        else:
            hi, hi_closed = other.hi, other.hi_closed
        if lo > hi:
            return None
        if lo == hi and not (lo_closed and hi_closed):
            return None
        return Interval(lo, hi, lo_closed, hi_closed)

    def to_json(self) -> dict:
        return {
            "lo": format_rational(self.lo),
            "hi": format_rational(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @staticmethod
    def from_json(obj: dict) -> "Interval":
        return Interval(
            parse_rational(obj["lo"]),
            parse_rational(obj["hi"]),
            bool(obj["lo_closed"]),
            bool(obj["hi_closed"]),
        )

    def __repr__(self):
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        return f"{lb}{self.lo}, {self.hi}{rb}"


def _sort_key(iv: Interval):
    # closed left endpoints sort before open ones at the same abscissa
    return (iv.lo, not iv.lo_closed)


def _mergeable(cur: Interval, nxt: Interval) -> bool:
    # assumes _sort_key(cur) <= _sort_key(nxt)
    if nxt.lo < cur.hi:
        return True
    if nxt.lo == cur.hi:
        return cur.hi_closed or nxt.lo_closed
    return False


def _merge(cur: Interval, nxt: Interval) -> Interval:
    lo, lo_closed = cur.lo, cur.lo_closed
    if nxt.lo == cur.lo:
        lo_closed = lo_closed or nxt.lo_closed
    if nxt.hi > cur.hi:
        hi, hi_closed = nxt.hi, nxt.hi_closed
    elif nxt.hi == cur.hi:
        hi, hi_closed = cur.hi, cur.hi_closed or nxt.hi_closed
    else:
        hi, hi_closed = cur.hi, cur.hi_closed
    return Interval(lo, hi, lo_closed, hi_closed)


@dataclass(frozen=True)
class IntervalSet:
    """Normalized finite union of intervals: sorted, disjoint, non-adjacent."""

    intervals: tuple[Interval, ...] = ()

    @staticmethod
    def from_intervals(items: Iterable[Interval]) -> "IntervalSet":
        ivs = sorted(items, key=_sort_key)
        merged: list[Interval] = []
        for iv in ivs:
            if merged and _mergeable(merged[-1], iv):
                merged[-1] = _merge(merged[-1], iv)
            else:
                merged.append(iv)
        return IntervalSet(tuple(merged))

    @staticmethod
    def of(*items: Interval) -> "IntervalSet":
        return IntervalSet.from_intervals(items)

    @staticmethod
    def point(x: RationalLike) -> "IntervalSet":
        return IntervalSet((Interval.point(x),))

    @staticmethod
    def points(xs: Iterable[RationalLike]) -> "IntervalSet":
        return IntervalSet.from_intervals(Interval.point(x) for x in xs)

    @staticmethod
    def full() -> "IntervalSet":
        return IntervalSet((Interval(ZERO, ONE, True, True),))

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(())

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, x: RationalLike) -> bool:
        x = as_rational(x)
        los = [iv.lo for iv in self.intervals]
        i = bisect.bisect_right(los, x)
        for j in (i - 1, i):
            if 0 <= j < len(self.intervals) and self.intervals[j].contains(x):
                return True
        return False

    def length(self) -> Fraction:
        return sum((iv.length() for iv in self.intervals), ZERO)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_intervals(self.intervals + other.intervals)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out: list[Interval] = []
        a, b = self.intervals, other.intervals
        i = j = 0
        while i < len(a) and j < len(b):
            hit = a[i].intersect(b[j])
            if hit is not None:
                out.append(hit)
            # advance whichever interval ends first
            if (a[i].hi, a[i].hi_closed) < (b[j].hi, b[j].hi_closed):
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def complement(self) -> "IntervalSet":
        """Complement within [0,1]."""
        out: list[Interval] = []
        cursor, cursor_closed = ZERO, True
        for iv in self.intervals:
            if cursor < iv.lo or (
                cursor == iv.lo and cursor_closed and not iv.lo_closed
            ):
                lo_c = cursor_closed
                hi_c = not iv.lo_closed
                if cursor == iv.lo:
                    out.append(Interval.point(cursor))
                else:
                    out.append(Interval(cursor, iv.lo, lo_c, hi_c))
            cursor, cursor_closed = iv.hi, not iv.hi_closed
        if cursor < ONE or (cursor == ONE and cursor_closed):
            if cursor == ONE:
                out.append(Interval.point(ONE))
            else:
                out.append(Interval(cursor, ONE, cursor_closed, True))
        return IntervalSet(tuple(out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersect(other.complement())

    def remove_points(self, xs: Iterable[RationalLike]) -> "IntervalSet":
        pts = [as_rational(x) for x in xs]
        if not pts:
            return self
        return self.difference(IntervalSet.points(pts))

    def min_point(self) -> Fraction | None:
        """Smallest element when attained, else the open infimum."""
        if not self.intervals:
            return None
        return self.intervals[0].lo

    def to_json(self) -> list[dict]:
        return [iv.to_json() for iv in self.intervals]

    @staticmethod
    def from_json(items: Sequence[dict]) -> "IntervalSet":
        return IntervalSet.from_intervals(Interval.from_json(o) for o in items)

    def __repr__(self):
        if not self.intervals:
            return "{}"
        return " u ".join(repr(iv) for iv in self.intervals)


def set_algebra(a: IntervalSet, b: IntervalSet, op: str) -> IntervalSet:
    """Dispatch union/intersect/difference by name (CLI-facing)."""
    if op == "union":
        return a.union(b)
    if op == "intersect":
        return a.intersect(b)
    if op == "difference":
        return a.difference(b)
    raise ValueError(f"unknown set operation {op!r}")


def length(s: IntervalSet) -> Fraction:
    return s.length()


def ball(
    x: RationalLike,
    eps: RationalLike,
    style: str = "open",
    circle: bool = False,
) -> IntervalSet:
    """Metric ball around x clamped to [0,1].

    style "open" gives {y: |x-y| < eps}, "closed" gives <=.  With circle=True
    the metric wraps around the identified endpoints 0 == 1, so the ball may
    come back as two arcs (both endpoint representatives are included).
    """
    x, eps = as_rational(x), as_rational(eps)
    if not (ZERO <= x <= ONE):
        raise ValueError("ball center must lie in [0,1]")
    if eps <= ZERO:
        raise ValueError("ball radius must be positive")
    if style not in ("open", "closed"):
        raise ValueError(f"unknown ball style {style!r}")
    closed = style == "closed"

    def clamp(lo: Fraction, hi: Fraction) -> Interval | None:
        lo_closed, hi_closed = closed, closed
        if lo < ZERO:
            lo, lo_closed = ZERO, True
        if hi > ONE:
            hi, hi_closed = ONE, True
        if lo > hi:
            return None
        if lo == hi and not (lo_closed and hi_closed):
            return None
        return Interval(lo, hi, lo_closed, hi_closed)

    pieces = []
    main = clamp(x - eps, x + eps)
    if main is not None:
        pieces.append(main)
    if circle:
        if x - eps < ZERO:
            wrapped = clamp(x - eps + ONE, ONE)
            if wrapped is not None:
                pieces.append(wrapped)
        if x + eps > ONE:
            wrapped = clamp(ZERO, x + eps - ONE)
            if wrapped is not None:
                pieces.append(wrapped)
    return IntervalSet.from_intervals(pieces)
