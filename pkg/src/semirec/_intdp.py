"""Scaled-integer fast paths for orbit walks and word-tree counting.

Affine catalogue maps keep every reachable value on a common denominator
grid: after n steps each value is num / (d0 * s^n) where d0 collects all
the breakpoint, coefficient, and query denominators and s is the lcm of
the slope denominators.  Working with the integer numerators alone avoids
Fraction normalization entirely.  Two consumers:

* ``orbit_return_times``: single-map orbit walk on arbitrary-precision
  Python ints (no overflow concerns, horizons of 10^4 stay cheap).
* ``count_sequence``: the word-tree count DP on numpy int64 arrays, used
  when the int64 range provably suffices; returns per-level counts of
  words landing in the target set.

Both return None when a map is not affine or (for the numpy path) the
int64 bound check fails; callers then fall back to exact Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .errors import BudgetError
from .geometry import IntervalSet
from .maps import PiecewiseMap

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class _PlannedPiece:
    lo0: int
    lo_closed: bool
    hi0: int
    hi_closed: bool
    mult: int  # slope * s, an integer by construction
    b0: int  # intercept * d0


@dataclass(frozen=True)
class _PlannedGen:
    pieces: tuple[_PlannedPiece, ...]
    overrides: tuple[tuple[int, int], ...]  # (point * d0, value * d0)


@dataclass(frozen=True)
class ScaledPlan:
    s: int
    d0: int
    gens: tuple[_PlannedGen, ...]
    max_mult: int
    max_b0: int


def build_plan(
    maps: Sequence[PiecewiseMap], extra_rationals: Sequence[Fraction]
) -> ScaledPlan | None:
    """Common-denominator plan for a family of affine maps, or None."""
    dens = [q.denominator for q in extra_rationals]
    slope_dens = [1]
    for T in maps:
        for piece in T.pieces:
            if piece.degree > 1:
                return None
            dens.append(piece.domain.lo.denominator)
            dens.append(piece.domain.hi.denominator)
            c0 = piece.coeffs[0] if piece.coeffs else Fraction(0)
            dens.append(c0.denominator)
            if piece.degree == 1:
                slope_dens.append(piece.coeffs[1].denominator)
        for pt, val in T.overrides:
            dens.append(pt.denominator)
            dens.append(val.denominator)
    s = lcm(*slope_dens)
    d0 = lcm(*dens) if dens else 1
    gens = []
    max_mult = 1
    max_b0 = 0
    for T in maps:
        pieces = []
        for piece in T.pieces:
            c0 = piece.coeffs[0] if piece.coeffs else Fraction(0)
            slope = piece.coeffs[1] if piece.degree == 1 else Fraction(0)
            mult_frac = slope * s
            b0_frac = c0 * d0
            assert mult_frac.denominator == 1 and b0_frac.denominator == 1
            mult = int(mult_frac)
            b0 = int(b0_frac)
            max_mult = max(max_mult, abs(mult))
            max_b0 = max(max_b0, abs(b0))
            dom = piece.domain
            pieces.append(
                _PlannedPiece(
                    int(dom.lo * d0),
                    dom.lo_closed,
                    int(dom.hi * d0),
                    dom.hi_closed,
                    mult,
                    b0,
                )
            )
        ovs = tuple(
            (int(pt * d0), int(val * d0)) for pt, val in T.overrides
        )
        gens.append(_PlannedGen(tuple(pieces), ovs))
    return ScaledPlan(s, d0, tuple(gens), max_mult, max_b0)


def _set_rationals(target: IntervalSet) -> list[Fraction]:
    out = []
    for iv in target.intervals:
        out.append(iv.lo)
        out.append(iv.hi)
    return out


def _member(num: int, pw: int, target: IntervalSet, d0: int) -> bool:
    # pw = s^n; value = num / (d0 * pw); endpoint e compares as num vs e*d0*pw
    for iv in target.intervals:
        lo = int(iv.lo * d0) * pw
        hi = int(iv.hi * d0) * pw
        if (num > lo or (iv.lo_closed and num == lo)) and (
            num < hi or (iv.hi_closed and num == hi)
        ):
            return True
    return False


def orbit_return_times(
    T: PiecewiseMap, x: Fraction, target: IntervalSet, N: int
) -> list[int] | None:
    """Times 1..N at which the exact orbit of x visits the target set.

    None when the map has a nonaffine piece or the denominators do not fit
    the plan (callers fall back to Fraction evaluation).
    """
    plan = build_plan([T], [x] + _set_rationals(target))
    if plan is None:
        return None
    gen = plan.gens[0]
    d0, s = plan.d0, plan.s
    num = int(x * d0)
    pw = 1
    times = []
    for n in range(1, N + 1):
        pw_next = pw * s
        moved = None
        for pt0, val0 in gen.overrides:
            if num == pt0 * pw:
                moved = val0 * pw_next
                break
        if moved is None:
            for piece in gen.pieces:
                lo = piece.lo0 * pw
                if num < lo or (num == lo and not piece.lo_closed):
                    continue
                hi = piece.hi0 * pw
                if num > hi or (num == hi and not piece.hi_closed):
                    continue
                moved = piece.mult * num + piece.b0 * pw_next
                break
        if moved is None:
            return None  # defensive; totality should make this unreachable
        num = moved
        pw = pw_next
        if _member(num, pw, target, d0):
            times.append(n)
    return times


def count_sequence(
    generators: Sequence[PiecewiseMap],
    x: Fraction,
    target: IntervalSet,
    N: int,
    budget: int,
) -> list[int] | None:
    """Per-level counts of length-n words sending x into the target set.

    Runs the dedup'd word-tree DP on int64 numerators.  Returns None when
    the plan does not apply or the int64 bound check fails; raises
    BudgetError when the dedup'd atom count exceeds the budget.
    """
    import numpy as np

    plan = build_plan(generators, [x] + _set_rationals(target))
    if plan is None:
        return None
    d = len(generators)
    d0, s = plan.d0, plan.s
    limit = d0 * s ** (N + 1) * (plan.max_mult + plan.max_b0 + 2)
    if limit >= _INT64_SAFE or d**N >= _INT64_SAFE:
        return None

    nums = np.array([int(x * d0)], dtype=np.int64)
    counts = np.array([1], dtype=np.int64)
    pw = 1
    out = []
    for _ in range(1, N + 1):
        pw_next = pw * s
        branches_nums = []
        branches_counts = []
        for gen in plan.gens:
            res = np.full(nums.shape, -1, dtype=np.int64)
            for piece in gen.pieces:
                lo = piece.lo0 * pw
                hi = piece.hi0 * pw
                sel = (nums > lo) if not piece.lo_closed else (nums >= lo)
                sel &= (nums < hi) if not piece.hi_closed else (nums <= hi)
                if sel.any():
                    res[sel] = piece.mult * nums[sel] + piece.b0 * pw_next
            for pt0, val0 in gen.overrides:
                sel = nums == pt0 * pw
                if sel.any():
                    res[sel] = val0 * pw_next
            if (res < 0).any():
                raise RuntimeError("scaled DP left an atom unmapped")
            branches_nums.append(res)
            branches_counts.append(counts)
        allnums = np.concatenate(branches_nums)
        allcounts = np.concatenate(branches_counts)
        order = np.argsort(allnums, kind="stable")
        allnums = allnums[order]
        allcounts = allcounts[order]
        boundary = np.empty(allnums.shape, dtype=bool)
        boundary[0] = True
        np.not_equal(allnums[1:], allnums[:-1], out=boundary[1:])
        starts = np.flatnonzero(boundary)
        nums = allnums[starts]
        counts = np.add.reduceat(allcounts, starts)
        pw = pw_next
        if len(nums) > budget:
            raise BudgetError(
                "dedup'd atom count %d exceeds the budget %d" % (len(nums), budget)
            )
        hit = np.zeros(nums.shape, dtype=bool)
        for iv in target.intervals:
            lo = int(iv.lo * d0) * pw
            hi = int(iv.hi * d0) * pw
            sel = (nums > lo) if not iv.lo_closed else (nums >= lo)
            sel &= (nums < hi) if not iv.hi_closed else (nums <= hi)
            hit |= sel
        out.append(int(counts[hit].sum()))
    return out
