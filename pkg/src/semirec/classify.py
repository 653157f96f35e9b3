"""Finite-horizon recurrence classification with explicit certificates.

Verdicts never claim a negative: a point either gets a certificate (a return
time, a witnessing word, an intersecting image iterate) or the answer is
"none-within-horizon".  The uniform flavors are liminf statements, which no
finite run can decide, so they are reported as explicit window estimates:
the minimum (or count) over the window [N/2, N] against a recorded
threshold.

Neighborhoods are open balls; the radius function R(x) uses closed balls.
Monte Carlo mode exists for horizons beyond exact arithmetic and marks
every branch it cannot compute as skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _intdp
from .errors import BudgetError
from .geometry import (
    DEFAULT_BIT_CAP,
    ONE,
    ZERO,
    IntervalSet,
    Rational,
    as_rational,
    ball,
    check_bits,
    format_rational,
)
from .maps import PiecewiseMap, Word
from .markov import (
    DEFAULT_ATOM_BUDGET,
    MarkovChain,
    ball_mass_sequence,
    search_return_word,
)
from .semigroup import GeneratorSet, count_sequence

__all__ = [
    "WindowEstimate",
    "RecurrenceVerdict",
    "classify_map_point",
    "classify_chain_point",
    "classify_semigroup_point",
    "mc_return_sweep",
    "r_function",
    "DEFAULT_UNIFORM_THRESHOLD",
    "DEFAULT_R_MIN",
    "DEFAULT_MAP_GRID",
    "DEFAULT_CHAIN_GRID",
]

DEFAULT_UNIFORM_THRESHOLD = Fraction(1, 1000)
DEFAULT_R_MIN = 2
DEFAULT_MAP_GRID = 2**7
DEFAULT_CHAIN_GRID = 2**4

CERTIFIED = "certified"
NONE_WITHIN_HORIZON = "none-within-horizon"
SKIPPED = "skipped"

ALL_BRANCHES = ("recurrent", "weak", "uniform", "weak_uniform")

_IMAGE_INTERVAL_GUARD = 10**4


@dataclass(frozen=True)
class WindowEstimate:
    """A liminf proxy: the extremal statistic over the window [N/2, N]."""

    window: tuple[int, int]
    value: Rational
    threshold: Rational
    passes: bool
    kind: str  # "return-count" or "window-min"

    def to_json(self) -> dict:
        value = (
            format_rational(self.value)
            if isinstance(self.value, Fraction)
            else self.value
        )
        threshold = (
            format_rational(self.threshold)
            if isinstance(self.threshold, Fraction)
            else self.threshold
        )
        return {
            "window": list(self.window),
            "value": value,
            "threshold": threshold,
            "passes": self.passes,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class RecurrenceVerdict:
    subject: str
    x: Rational
    eps: Rational
    horizon: int
    recurrent: str
    recurrent_time: int | None
    recurrent_word: Word | None
    weak: str
    weak_time: int | None
    return_times: tuple[int, ...]
    uniform_estimate: WindowEstimate | None
    weak_uniform_estimate: WindowEstimate | None
    mode: str = "exact"
    seed: int | None = None
    samples: int | None = None

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "x": format_rational(self.x),
            "eps": format_rational(self.eps),
            "horizon": self.horizon,
            "recurrent": self.recurrent,
            "recurrent_time": self.recurrent_time,
            "recurrent_word": list(self.recurrent_word)
            if self.recurrent_word is not None
            else None,
            "weak": self.weak,
            "weak_time": self.weak_time,
            "return_times": list(self.return_times),
            "uniform_estimate": self.uniform_estimate.to_json()
            if self.uniform_estimate
            else None,
            "weak_uniform_estimate": self.weak_uniform_estimate.to_json()
            if self.weak_uniform_estimate
            else None,
            "mode": self.mode,
            "seed": self.seed,
            "samples": self.samples,
        }


def _window(N: int) -> tuple[int, int]:
    return (max(1, N // 2), N)


def _check_branches(branches: Sequence[str]) -> None:
    bad = [b for b in branches if b not in ALL_BRANCHES]
    if bad:
        raise ValueError(
            "unknown recurrence branch %r; choose from %s"
            % (bad[0], ", ".join(ALL_BRANCHES))
        )


def _default_cap(N: int, bit_cap: int | None) -> int:
    """Horizon-scaled bit allowance: denominators of affine orbits grow
    linearly with the step count, so the cap must scale with N while still
    failing loudly on genuinely exponential blowups."""
    if bit_cap is not None:
        return bit_cap
    return max(DEFAULT_BIT_CAP, 16 * N + 64)


def _orbit_return_times(
    T: PiecewiseMap, x: Rational, target: IntervalSet, N: int, bit_cap: int
) -> list[int]:
    fast = _intdp.orbit_return_times(T, x, target, N)
    if fast is not None:
        return fast
    times = []
    y = x
    for n in range(1, N + 1):
        y = T.eval(y, bit_cap=bit_cap)
        check_bits(y, bit_cap)
        if target.contains(y):
            times.append(n)
    return times


def _grid_points(target: IntervalSet, grid: int) -> list[Rational]:
    """Deterministic sample grid inside an interval set (no seeds needed)."""
    points = []
    for iv in target.intervals:
        if iv.lo == iv.hi:
            points.append(iv.lo)
            continue
        span = iv.hi - iv.lo
        for k in range(grid):
            y = iv.lo + span * Fraction(k, grid)
            if target.contains(y):
                points.append(y)
    return points


def _image_iteration(
    T_or_gens, start: IntervalSet, target: IntervalSet, N: int, bit_cap: int
) -> int | None:
    """First n <= N with image-iterate(start) meeting target, else None.

    Stops early when the iterate stabilizes; a fixed reachable set that
    misses the target can never hit it later.
    """
    gens = T_or_gens if isinstance(T_or_gens, (tuple, list)) else (T_or_gens,)
    current = start
    for n in range(1, N + 1):
        moved = IntervalSet.empty()
        for T in gens:
            moved = moved.union(T.image(current, bit_cap=bit_cap))
        if len(moved.intervals) > _IMAGE_INTERVAL_GUARD:
            raise BudgetError("reachable-set interval count exceeded the guard")
        if moved.intersect(target).intervals:
            return n
        if moved == current:
            return None
        current = moved
    return None


def classify_map_point(
    T: PiecewiseMap,
    x,
    eps,
    N: int,
    r_min: int = DEFAULT_R_MIN,
    grid: int = DEFAULT_MAP_GRID,
    branches: Sequence[str] = ALL_BRANCHES,
    bit_cap: int | None = None,
) -> RecurrenceVerdict:
    """Classify a point under a single map at horizon N.

    recurrent: some iterate T^n x, n <= N, lies in the open ball around x.
    weak: some exact image iterate of the ball meets the ball.
    uniform estimate: return-time count in the window [N/2, N] against r_min.
    weak-uniform estimate: the best such count over a deterministic grid of
    sample points inside the ball.
    """
    x = as_rational(x)
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("classification radius must be positive")
    if N < 1:
        raise ValueError("horizon must be at least 1")
    _check_branches(branches)
    cap = _default_cap(N, bit_cap)
    ballset = ball(x, eps, style="open", circle=T.circle)
    window = _window(N)

    recurrent = SKIPPED
    recurrent_time = None
    return_times: tuple[int, ...] = ()
    uniform = None
    if "recurrent" in branches or "uniform" in branches:
        times = _orbit_return_times(T, x, ballset, N, cap)
        return_times = tuple(times)
        if "recurrent" in branches:
            recurrent = CERTIFIED if times else NONE_WITHIN_HORIZON
            recurrent_time = times[0] if times else None
        if "uniform" in branches:
            in_window = sum(1 for t in times if window[0] <= t <= window[1])
            uniform = WindowEstimate(
                window, Fraction(in_window), Fraction(r_min), in_window >= r_min,
                "return-count",
            )

    weak = SKIPPED
    weak_time = None
    if "weak" in branches:
        weak_time = _image_iteration(T, ballset, ballset, N, cap)
        weak = CERTIFIED if weak_time is not None else NONE_WITHIN_HORIZON

    weak_uniform = None
    if "weak_uniform" in branches:
        best = 0
        for y in _grid_points(ballset, grid):
            times_y = _orbit_return_times(T, y, ballset, N, cap)
            in_window = sum(1 for t in times_y if window[0] <= t <= window[1])
            best = max(best, in_window)
        weak_uniform = WindowEstimate(
            window, Fraction(best), Fraction(r_min), best >= r_min, "return-count"
        )

    return RecurrenceVerdict(
        subject="map",
        x=x,
        eps=eps,
        horizon=N,
        recurrent=recurrent,
        recurrent_time=recurrent_time,
        recurrent_word=None,
        weak=weak,
        weak_time=weak_time,
        return_times=return_times,
        uniform_estimate=uniform,
        weak_uniform_estimate=weak_uniform,
    )


def _float_eval_vector(T: PiecewiseMap, ys):
    import numpy as np

    out = np.empty_like(ys)
    out.fill(np.nan)
    for piece in T.pieces:
        lo, hi = float(piece.domain.lo), float(piece.domain.hi)
        sel = (ys > lo) if not piece.domain.lo_closed else (ys >= lo)
        sel &= (ys < hi) if not piece.domain.hi_closed else (ys <= hi)
        if sel.any():
            acc = np.zeros(int(sel.sum()))
            for c in reversed(piece.coeffs):
                acc *= ys[sel]
                acc += float(c)
            out[sel] = acc
    for pt, val in T.overrides:
        out[ys == float(pt)] = float(val)
    return out


def mc_return_sweep(
    Q: MarkovChain,
    points: Sequence,
    eps,
    N: int,
    seed: int,
    samples: int,
) -> list[tuple[int, int] | None]:
    """Seeded Monte Carlo first-return search for many start points at once.

    Trial s draws one word of length N from a counter-based generator keyed
    by seed XOR s; that word drives every still-searching point (each point
    sees `samples` independent words, and runs are reproducible).  Returns,
    per point, the first (trial, time) whose trajectory re-enters the open
    ball around the point, or None.
    """
    import numpy as np

    Q.require_non_degenerate()
    eps_f = float(as_rational(eps))
    if N < 1:
        raise ValueError("horizon must be at least 1")
    if samples < 1:
        raise ValueError("sample count must be positive")
    circle = all(T.circle for T in Q.generators)
    xs = np.array([float(as_rational(p)) for p in points])
    cumulative = np.cumsum([float(p) for p in Q.probs])
    results: list[tuple[int, int] | None] = [None] * len(xs)
    active = np.arange(len(xs))
    for s in range(samples):
        if len(active) == 0:
            break
        rng = np.random.Generator(np.random.Philox(key=seed ^ s))
        letters = np.searchsorted(cumulative, rng.random(size=N), side="right")
        y = xs[active].copy()
        centers = xs[active]
        hit_time = np.full(len(active), 0, dtype=np.int64)
        for k in range(N):
            y = _float_eval_vector(Q.generators[int(letters[k])], y)
            gap = np.abs(y - centers)
            if circle:
                gap = np.minimum(gap, 1.0 - gap)
            fresh = (gap < eps_f) & (hit_time == 0)
            if fresh.any():
                hit_time[fresh] = k + 1
                if (hit_time > 0).all():
                    break
        hits = np.flatnonzero(hit_time > 0)
        for idx in hits:
            results[int(active[idx])] = (s, int(hit_time[idx]))
        active = active[hit_time == 0]
    return results


def _mc_chain_verdict(
    Q: MarkovChain, x: Rational, eps: Rational, N: int, seed: int, samples: int,
    subject: str,
) -> RecurrenceVerdict:
    import numpy as np

    found = mc_return_sweep(Q, [x], eps, N, seed, samples)[0]
    word: Word | None = None
    time = None
    if found is not None:
        trial, time = found
        if time <= 1000:
            rng = np.random.Generator(np.random.Philox(key=seed ^ trial))
            cumulative = np.cumsum([float(p) for p in Q.probs])
            letters = np.searchsorted(cumulative, rng.random(size=N), side="right")
            word = tuple(int(i) + 1 for i in letters[:time])
    return RecurrenceVerdict(
        subject=subject,
        x=x,
        eps=eps,
        horizon=N,
        recurrent=CERTIFIED if found else NONE_WITHIN_HORIZON,
        recurrent_time=time,
        recurrent_word=word,
        weak=SKIPPED,
        weak_time=None,
        return_times=(time,) if time is not None else (),
        uniform_estimate=None,
        weak_uniform_estimate=None,
        mode="mc",
        seed=seed,
        samples=samples,
    )


def classify_chain_point(
    Q: MarkovChain,
    x,
    eps,
    N: int,
    threshold: Rational | None = None,
    grid: int = DEFAULT_CHAIN_GRID,
    branches: Sequence[str] = ALL_BRANCHES,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int | None = None,
    mode: str = "exact",
    seed: int | None = None,
    samples: int | None = None,
) -> RecurrenceVerdict:
    """Classify a point under the induced chain at horizon N.

    recurrent: positive n-step mass on the open ball for some n <= N, with a
    witnessing word.  weak: the reachable-set iteration of the ball meets the
    ball.  uniform estimate: minimum ball mass over the window [N/2, N]
    against the threshold (a fixed 1/1000 unless the caller supplies one,
    e.g. a stationary-informed value).  weak-uniform: the best window
    minimum over a deterministic grid of sample points in the ball.
    """
    x = as_rational(x)
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("classification radius must be positive")
    if N < 1:
        raise ValueError("horizon must be at least 1")
    _check_branches(branches)
    Q.require_non_degenerate()
    if mode == "mc":
        if seed is None or samples is None:
            raise ValueError("Monte Carlo mode requires a seed and a sample count")
        return _mc_chain_verdict(Q, x, eps, N, seed, samples, subject="chain")
    if mode != "exact":
        raise ValueError("mode must be 'exact' or 'mc'")

    cap = _default_cap(N, bit_cap)
    circle = all(T.circle for T in Q.generators)
    ballset = ball(x, eps, style="open", circle=circle)
    if threshold is None:
        threshold = DEFAULT_UNIFORM_THRESHOLD
    window = _window(N)

    masses: list[Rational] | None = None
    return_times: tuple[int, ...] = ()
    uniform = None
    if "uniform" in branches:
        masses = ball_mass_sequence(Q, x, ballset, N, budget=budget, bit_cap=cap)
        return_times = tuple(n for n, m in enumerate(masses, start=1) if m > 0)
        wmin = min(masses[window[0] - 1 : window[1]])
        uniform = WindowEstimate(window, wmin, threshold, wmin >= threshold, "window-min")

    recurrent = SKIPPED
    recurrent_time = None
    recurrent_word = None
    if "recurrent" in branches:
        horizon = N
        if masses is not None:
            first = next((n for n, m in enumerate(masses, start=1) if m > 0), None)
            horizon = first if first is not None else 0
        if horizon:
            found = search_return_word(Q, x, ballset, horizon, budget=budget, bit_cap=cap)
        else:
            found = None
        if found is not None:
            recurrent = CERTIFIED
            recurrent_time, recurrent_word = found
        else:
            recurrent = NONE_WITHIN_HORIZON

    weak = SKIPPED
    weak_time = None
    if "weak" in branches:
        weak_time = _image_iteration(Q.generators, ballset, ballset, N, cap)
        weak = CERTIFIED if weak_time is not None else NONE_WITHIN_HORIZON

    weak_uniform = None
    if "weak_uniform" in branches:
        best = ZERO
        for y in _grid_points(ballset, grid):
            seq = ball_mass_sequence(Q, y, ballset, N, budget=budget, bit_cap=cap)
            best = max(best, min(seq[window[0] - 1 : window[1]]))
        weak_uniform = WindowEstimate(
            window, best, threshold, best >= threshold, "window-min"
        )

    return RecurrenceVerdict(
        subject="chain",
        x=x,
        eps=eps,
        horizon=N,
        recurrent=recurrent,
        recurrent_time=recurrent_time,
        recurrent_word=recurrent_word,
        weak=weak,
        weak_time=weak_time,
        return_times=return_times,
        uniform_estimate=uniform,
        weak_uniform_estimate=weak_uniform,
    )


def classify_semigroup_point(
    G: GeneratorSet,
    p: Sequence,
    x,
    eps,
    N: int,
    threshold: Rational | None = None,
    grid: int = DEFAULT_CHAIN_GRID,
    branches: Sequence[str] = ALL_BRANCHES,
    budget: int = DEFAULT_ATOM_BUDGET,
    bit_cap: int | None = None,
    mode: str = "exact",
    seed: int | None = None,
    samples: int | None = None,
) -> RecurrenceVerdict:
    """Classify a point under the full semigroup.

    Positivity flags delegate to the induced chain (they agree for every
    non-degenerate weight vector); the uniform estimates use the trajectory
    fraction kappa over the window, which equals the chain's ball mass when
    the weights are uniform.
    """
    chain = MarkovChain(tuple(G.generators), tuple(as_rational(v) for v in p))
    if as_rational(eps) <= 0:
        raise ValueError("classification radius must be positive")
    if N < 1:
        raise ValueError("horizon must be at least 1")
    _check_branches(branches)
    if mode == "mc":
        if seed is None or samples is None:
            raise ValueError("Monte Carlo mode requires a seed and a sample count")
        verdict = _mc_chain_verdict(
            chain, as_rational(x), as_rational(eps), N, seed, samples,
            subject="semigroup",
        )
        return verdict

    x = as_rational(x)
    eps = as_rational(eps)
    if threshold is None:
        threshold = DEFAULT_UNIFORM_THRESHOLD
    cap = _default_cap(N, bit_cap)
    circle = all(T.circle for T in G.generators)
    ballset = ball(x, eps, style="open", circle=circle)
    window = _window(N)

    chain_branches = tuple(b for b in branches if b in ("recurrent", "weak"))
    base = classify_chain_point(
        chain, x, eps, N,
        threshold=threshold, grid=grid, branches=chain_branches,
        budget=budget, bit_cap=cap,
    )

    return_times: tuple[int, ...] = base.return_times
    uniform = None
    if "uniform" in branches:
        counts = count_sequence(G, x, ballset, N, budget=budget, bit_cap=cap)
        kappas = [Fraction(c, G.d**n) for n, c in enumerate(counts, start=1)]
        return_times = tuple(n for n, k in enumerate(kappas, start=1) if k > 0)
        wmin = min(kappas[window[0] - 1 : window[1]])
        uniform = WindowEstimate(window, wmin, threshold, wmin >= threshold, "window-min")

    weak_uniform = None
    if "weak_uniform" in branches:
        best = ZERO
        for y in _grid_points(ballset, grid):
            counts = count_sequence(G, y, ballset, N, budget=budget, bit_cap=cap)
            kappas = [Fraction(c, G.d**n) for n, c in enumerate(counts, start=1)]
            best = max(best, min(kappas[window[0] - 1 : window[1]]))
        weak_uniform = WindowEstimate(
            window, best, threshold, best >= threshold, "window-min"
        )

    return RecurrenceVerdict(
        subject="semigroup",
        x=x,
        eps=eps,
        horizon=N,
        recurrent=base.recurrent,
        recurrent_time=base.recurrent_time,
        recurrent_word=base.recurrent_word,
        weak=base.weak,
        weak_time=base.weak_time,
        return_times=return_times,
        uniform_estimate=uniform,
        weak_uniform_estimate=weak_uniform,
    )


def r_function(
    T: PiecewiseMap,
    x,
    N: int,
    r_tol,
    bit_cap: int | None = None,
) -> tuple[Rational, Rational]:
    """Bracket the largest radius whose closed ball never returns to itself.

    A radius r is safe when the closed ball B_r(x) misses every image
    iterate T^n(B_r(x)), n = 1..N; the returned pair (lower, upper) brackets
    the supremum of safe radii with upper - lower <= r_tol.  The upper end
    is an over-approximation that can only shrink as N grows.
    """
    x = as_rational(x)
    r_tol = as_rational(r_tol)
    if r_tol <= 0:
        raise ValueError("bracket tolerance must be positive")
    if N < 1:
        raise ValueError("horizon must be at least 1")
    cap = _default_cap(N, bit_cap)

    def hit(r: Rational) -> bool:
        if r == 0:
            B = IntervalSet.point(x)
        else:
            B = ball(x, r, style="closed", circle=T.circle)
        return _image_iteration(T, B, B, N, cap) is not None

    lo, hi = ZERO, ONE
    if not hit(lo):
        while hi - lo > r_tol:
            mid = (lo + hi) / 2
            if hit(mid):
                hi = mid
            else:
                lo = mid
    else:
        hi = min(r_tol, ONE)
    return lo, hi
