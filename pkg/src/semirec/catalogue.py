"""Worked interval-map families with recorded, executable claims.

Each entry names a construction, builds its generator maps on demand, and
carries a manifest of claims.  A claim pins an operation, its arguments, and
the expected outcome; `run_claim` replays it against the library so the whole
catalogue stays executable.  Where a construction's narrative description and
its defining formulas disagree, the manifest records the formula-faithful
outcome and flags the disagreement in the claim's `discrepancy` field rather
than silently picking a side.

Expected values are tagged by provenance:

* ``direct``   -- follows from the defining formulas by hand evaluation;
* ``oracle``   -- produced by the exact enumeration/orbit oracles in this
                  package (cross-checked by brute force in the test suite)
                  and frozen here;
* ``claimed``  -- quoted from the construction's narrative as stated, kept
                  even when the formulas refuse to reproduce it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .geometry import (
    Interval,
    IntervalSet,
    Rational,
    as_rational,
    ball,
    format_rational,
    parse_rational,
)
from .maps import Piece, PiecewiseMap, identity_map

__all__ = [
    "Claim",
    "ClaimResult",
    "ExampleManifest",
    "EXAMPLE_NAMES",
    "build_example",
    "manifest",
    "list_examples",
    "run_claim",
]


def _iv(lo, hi, lo_closed: bool, hi_closed: bool) -> Interval:
    return Interval(as_rational(lo), as_rational(hi), lo_closed, hi_closed)


def _f(a, b=1) -> Fraction:
    return Fraction(a, b)


# ---------------------------------------------------------------------------
# constructions


def _build_eq2_map() -> tuple[PiecewiseMap, ...]:
    """Halving with a jump at the origin: x/2 everywhere, 0 sent to 1."""
    T = PiecewiseMap(
        pieces=(Piece(_iv(0, 1, True, True), (_f(0), _f(1, 2))),),
        overrides=((_f(0), _f(1)),),
        label="halving-with-jump",
    )
    return (T,)


def _build_example1() -> tuple[PiecewiseMap, ...]:
    """Two contracting half-branches with both endpoints relocated inside."""
    T = PiecewiseMap(
        pieces=(
            Piece(_iv(0, _f(1, 2), True, True), (_f(0), _f(1, 2))),
            Piece(_iv(_f(1, 2), 1, False, True), (_f(1, 2), _f(1, 2))),
        ),
        overrides=((_f(0), _f(4, 5)), (_f(1), _f(1, 5))),
        label="two-branch-endpoint-swap",
    )
    return (T,)


def _build_example1exp(a=Fraction(5, 4), depth: int = 40) -> tuple[PiecewiseMap, ...]:
    """Expanding dyadic staircase on the circle, truncated at `depth` levels.

    On each dyadic band (2^-k, 2^-k+1] the map acts as a*x shifted back into
    the band below; the slope a must exceed 3/4 for the image to stay positive
    and stay below 3/2 for it to stay inside the band structure.  Points in
    the residual band [0, 2^-depth] are left fixed.
    """
    a = as_rational(a)
    if not (Fraction(3, 4) < a < Fraction(3, 2)):
        raise ValueError(f"slope must lie strictly between 3/4 and 3/2, got {a}")
    if depth < 8:
        raise ValueError(f"truncation depth must be at least 8, got {depth}")
    shift = 2 * a - Fraction(3, 2)
    pieces = []
    for k in range(1, depth + 1):
        lo = Fraction(1, 2**k)
        hi = Fraction(1, 2 ** (k - 1))
        pieces.append(Piece(_iv(lo, hi, False, True), (-shift * lo, a)))
    pieces.append(Piece(_iv(0, Fraction(1, 2**depth), True, True), (_f(0), _f(1))))
    T = PiecewiseMap(pieces=tuple(pieces), label="dyadic-staircase", circle=True)
    return (T,)


def _build_example_wu(depth: int = 40) -> tuple[PiecewiseMap, ...]:
    """Upward dyadic drift: each band is pushed a quarter-band higher.

    Every orbit below 1/2 climbs band by band and eventually parks on the
    fixed upper half; the origin is relocated to 2/3.  Points in the residual
    band below 2^-(depth+1) are left fixed by the truncation.
    """
    if depth < 8:
        raise ValueError(f"truncation depth must be at least 8, got {depth}")
    pieces = [Piece(_iv(_f(1, 2), 1, False, True), (_f(0), _f(1)))]
    for k in range(1, depth + 1):
        lo = Fraction(1, 2 ** (k + 1))
        hi = Fraction(1, 2**k)
        pieces.append(Piece(_iv(lo, hi, False, True), (Fraction(1, 2 ** (k + 2)), _f(1))))
    pieces.append(
        Piece(_iv(0, Fraction(1, 2 ** (depth + 1)), True, True), (_f(0), _f(1)))
    )
    T = PiecewiseMap(
        pieces=tuple(pieces),
        overrides=((_f(0), _f(2, 3)),),
        label="upward-drift",
    )
    return (T,)


def _build_example2() -> tuple[PiecewiseMap, ...]:
    """Two half-contractions whose only exits from the halves sit at 0 and 1."""
    T1 = PiecewiseMap(
        pieces=(
            Piece(_iv(0, _f(1, 2), True, False), (_f(1, 4), _f(1, 2))),
            Piece(_iv(_f(1, 2), 1, True, False), (_f(1, 2), _f(1, 2))),
        ),
        overrides=((_f(1), _f(0)),),
        label="zigzag-up",
    )
    T2 = PiecewiseMap(
        pieces=(
            Piece(_iv(0, _f(1, 2), False, True), (_f(0), _f(1, 2))),
            Piece(_iv(_f(1, 2), 1, False, True), (_f(1, 4), _f(1, 2))),
        ),
        overrides=((_f(0), _f(1)),),
        label="zigzag-down",
    )
    return (T1, T2)


def _build_example3() -> tuple[PiecewiseMap, ...]:
    """Thirds construction: a halving map with relocated lattice points and a
    fold that sends both outer thirds onto the middle one.

    The second generator's final branch is the mirror extension of its own
    left half (value at x mirrors the value at 1-x); the mirror is taken with
    respect to the map itself, which is the reading that actually sends the
    outer thirds onto the middle third.
    """
    T1 = PiecewiseMap(
        pieces=(
            Piece(_iv(0, _f(1, 3), True, False), (_f(0), _f(1, 2))),
            Piece(_iv(_f(1, 3), _f(1, 2), False, False), (_f(1, 3), _f(1, 2))),
            Piece(_iv(_f(1, 2), _f(2, 3), False, False), (_f(1, 6), _f(1, 2))),
            Piece(_iv(_f(2, 3), 1, False, True), (_f(1, 2), _f(1, 2))),
        ),
        overrides=(
            (_f(0), _f(1, 4)),
            (_f(1, 3), _f(3, 5)),
            (_f(1, 2), _f(1, 2)),
            (_f(2, 3), _f(2, 5)),
            (_f(1), _f(3, 4)),
        ),
        label="thirds-halving",
    )
    T2 = PiecewiseMap(
        pieces=(
            Piece(_iv(0, _f(1, 3), True, False), (_f(1, 3), _f(1))),
            Piece(_iv(_f(1, 3), _f(2, 3), True, True), (_f(3, 4), -_f(1, 2))),
            Piece(_iv(_f(2, 3), 1, False, True), (-_f(1, 3), _f(1))),
        ),
        overrides=((_f(1, 2), _f(1, 3)),),
        label="thirds-fold",
    )
    return (T1, T2)


def _build_example4() -> tuple[PiecewiseMap, ...]:
    """Thirds construction with fat fixed sets: the first generator fixes the
    lower third pointwise, the second fixes the upper third pointwise.

    The first generator's formulas leave the points 1/3, 1/2, 2/3 unassigned;
    they receive their left-limit values, which in particular keeps 1/3
    fixed and the fixed locus closed.
    """
    T1 = PiecewiseMap(
        pieces=(
            Piece(_iv(0, _f(1, 3), True, False), (_f(0), _f(1))),
            Piece(_iv(_f(1, 3), _f(1, 2), False, False), (_f(1, 3), _f(1, 2))),
            Piece(_iv(_f(1, 2), _f(2, 3), False, False), (_f(2, 9), _f(1, 2))),
            Piece(_iv(_f(2, 3), 1, False, True), (-_f(1, 3), _f(1))),
        ),
        overrides=(
            (_f(1, 3), _f(1, 3)),
            (_f(1, 2), _f(7, 12)),
            (_f(2, 3), _f(5, 9)),
        ),
        label="lower-third-identity",
    )
    T2 = PiecewiseMap(
        pieces=(
            Piece(_iv(0, _f(1, 3), True, False), (_f(1, 3), _f(1))),
            Piece(_iv(_f(1, 3), _f(2, 3), True, True), (_f(3, 4), -_f(1, 2))),
            Piece(_iv(_f(2, 3), 1, False, True), (_f(0), _f(1))),
        ),
        label="upper-third-identity",
    )
    return (T1, T2)


def _build_example_qu() -> tuple[PiecewiseMap, ...]:
    """A squaring map paired with the constant map to 1."""
    T1 = PiecewiseMap(
        pieces=(Piece(_iv(0, 1, True, True), (_f(0), _f(0), _f(1))),),
        label="squaring",
    )
    T2 = PiecewiseMap(
        pieces=(Piece(_iv(0, 1, True, True), (_f(1),)),),
        label="constant-one",
    )
    return (T1, T2)


def _build_doubling() -> tuple[PiecewiseMap, ...]:
    T = PiecewiseMap(
        pieces=(
            Piece(_iv(0, _f(1, 2), True, False), (_f(0), _f(2))),
            Piece(_iv(_f(1, 2), 1, True, True), (-_f(1), _f(2))),
        ),
        label="doubling",
    )
    return (T,)


def _build_identity() -> tuple[PiecewiseMap, ...]:
    return (identity_map(),)


def _build_rotation(angle=Fraction(1, 3)) -> tuple[PiecewiseMap, ...]:
    c = as_rational(angle)
    if not (Fraction(0) < c < Fraction(1)):
        raise ValueError(f"rotation angle must lie strictly between 0 and 1, got {c}")
    T = PiecewiseMap(
        pieces=(
            Piece(_iv(0, 1 - c, True, False), (c, _f(1))),
            Piece(_iv(1 - c, 1, True, True), (c - 1, _f(1))),
        ),
        label="rotation",
        circle=True,
    )
    return (T,)


_BUILDERS: dict[str, Callable[..., tuple[PiecewiseMap, ...]]] = {
    "eq2-map": _build_eq2_map,
    "example1": _build_example1,
    "example1exp": _build_example1exp,
    "example-wu": _build_example_wu,
    "example2": _build_example2,
    "example3": _build_example3,
    "example4": _build_example4,
    "example-qu": _build_example_qu,
    "doubling": _build_doubling,
    "identity": _build_identity,
    "rotation": _build_rotation,
}

EXAMPLE_NAMES: tuple[str, ...] = tuple(_BUILDERS)

_PARAM_NAMES: dict[str, tuple[str, ...]] = {
    "example1exp": ("a", "depth"),
    "example-wu": ("depth",),
    "rotation": ("angle",),
}


def build_example(name: str, **params) -> tuple[PiecewiseMap, ...]:
    """Construct the generator tuple for a named catalogue entry.

    Raises ValueError for an unknown name, an unsupported parameter, or a
    parameter value outside the entry's documented range.
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        known = ", ".join(sorted(_BUILDERS))
        raise ValueError(f"unknown example {name!r}; known entries: {known}") from None
    allowed = _PARAM_NAMES.get(name, ())
    for key in params:
        if key not in allowed:
            raise ValueError(f"example {name!r} takes no parameter {key!r}")
    return builder(**params)


# ---------------------------------------------------------------------------
# manifests


@dataclass(frozen=True)
class Claim:
    """One executable assertion about a catalogue entry.

    `expected` is compared against the runner's output: dictionaries are
    treated as required subsets of the produced summary, everything else by
    equality.  `slow` marks claims whose replay enumerates a large word tree;
    routine test sweeps may defer those to the acceptance run.
    """

    op: str
    args: Mapping[str, Any]
    expected: Any
    tag: str
    note: str = ""
    discrepancy: str = ""
    slow: bool = False

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "args": dict(self.args),
            "expected": self.expected,
            "tag": self.tag,
            "note": self.note,
            "discrepancy": self.discrepancy,
            "slow": self.slow,
        }


@dataclass(frozen=True)
class ExampleManifest:
    name: str
    summary: str
    generator_labels: tuple[str, ...]
    params: Mapping[str, str]
    claims: tuple[Claim, ...]
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "summary": self.summary,
            "generator_labels": list(self.generator_labels),
            "params": dict(self.params),
            "claims": [c.to_json() for c in self.claims],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class ClaimResult:
    ok: bool
    got: Any

    def to_json(self) -> dict:
        return {"ok": self.ok, "got": self.got}


def _manifest_eq2_map() -> ExampleManifest:
    claims = (
        Claim("eval", {"gen": 1, "x": "0"}, "1", "direct"),
        Claim("eval", {"gen": 1, "x": "1/2"}, "1/4", "direct"),
        Claim(
            "classify_map",
            {"gen": 1, "x": "0", "eps": "1/32", "horizon": 100},
            {"recurrent": "certified", "recurrent_time": 7},
            "oracle",
            note="the orbit of 0 jumps to 1 and then halves; it first falls below 1/32 at step 7",
        ),
        Claim(
            "poincare",
            {"gen": 1, "measure": {"kind": "dirac", "at": "0"}, "set": {"point": "0"}, "upto": 10},
            {"last": "0", "trend": "bounded"},
            "direct",
            note="no preimage of {0} ever contains 0, so every partial sum vanishes even though 0 is recurrent",
        ),
    )
    return ExampleManifest(
        name="eq2-map",
        summary="halving map with the origin relocated to 1; recurrent origin with an identically zero return series",
        generator_labels=("halving-with-jump",),
        params={},
        claims=claims,
    )


def _manifest_example1() -> ExampleManifest:
    claims = (
        Claim("eval", {"gen": 1, "x": "0"}, "4/5", "direct"),
        Claim("eval", {"gen": 1, "x": "1"}, "1/5", "direct"),
        Claim("eval", {"gen": 1, "x": "1/2"}, "1/4", "direct"),
        Claim(
            "classify_map",
            {"gen": 1, "x": "1/4", "eps": "1/16", "horizon": 10000, "branches": ["recurrent"]},
            {"recurrent": "none-within-horizon"},
            "oracle",
            note="the orbit of 1/4 descends to the endpoint dance 0, 4/5, 2/5, 1/5, ... and never re-enters (3/16, 5/16)",
        ),
        Claim(
            "r_bracket",
            {"gen": 1, "x": "1/4", "horizon": 50, "r_tol": "1/65536"},
            {"contains": "1/12", "width_at_most": "1/65536"},
            "oracle",
            note="closed balls of radius r around 1/4 first re-hit themselves exactly when (1/4+r)/2 reaches 1/4-r, at r = 1/12",
        ),
        Claim(
            "r_bracket",
            {"gen": 1, "x": "0", "horizon": 50, "r_tol": "1/65536"},
            {"hi_at_most": "1/65536"},
            "oracle",
            note="0 itself returns through the override chain, so no positive radius is safe",
        ),
    )
    return ExampleManifest(
        name="example1",
        summary="halving toward 0 and 1 with both endpoints relocated; no recurrent points off the endpoint cycle, unit-specific escape radii",
        generator_labels=("two-branch-endpoint-swap",),
        params={},
        claims=claims,
    )


def _manifest_example1exp() -> ExampleManifest:
    claims = (
        Claim("eval", {"gen": 1, "x": "1"}, "3/4", "direct"),
        Claim("eval", {"gen": 1, "x": "3/4"}, "7/16", "direct"),
        Claim(
            "classify_map",
            {"gen": 1, "x": "1", "eps": "1/1024", "horizon": 2000},
            {"recurrent": "certified", "recurrent_time": 13},
            "oracle",
            note="the orbit of 1 descends band by band; on the circle it re-enters the 1/1024 ball around 1 (equivalently 0) at step 13",
        ),
    )
    return ExampleManifest(
        name="example1exp",
        summary="expanding staircase on the circle; every orbit drifts down toward the seam, so the seam point is recurrent",
        generator_labels=("dyadic-staircase",),
        params={"a": "5/4", "depth": "40"},
        claims=claims,
        notes=(
            "truncated at a finite depth: below the last band the map is the identity, so deep orbits park instead of descending forever; "
            "at every finite depth the seam point receives a finite recurrence certificate, while the untruncated family only drifts toward the seam without reaching it",
        ),
    )


def _manifest_example_wu() -> ExampleManifest:
    claims = (
        Claim("eval", {"gen": 1, "x": "0"}, "2/3", "direct"),
        Claim("eval", {"gen": 1, "x": "1/32"}, "5/128", "direct"),
        Claim(
            "classify_map",
            {"gen": 1, "x": "0", "eps": "1/16", "horizon": 1000},
            {
                "recurrent": "none-within-horizon",
                "weak": "certified",
                "weak_time": 1,
                "weak_uniform_value": "0",
            },
            "oracle",
            note="0 jumps to the fixed point 2/3 and never returns, yet every neighbor below 1/16 drifts up within the ball for one step; all neighbors eventually leave for good, so the window return count is 0",
        ),
    )
    return ExampleManifest(
        name="example-wu",
        summary="upward dyadic drift with the origin relocated to 2/3; weakly recurrent origin that is neither recurrent nor weakly uniformly recurrent",
        generator_labels=("upward-drift",),
        params={"depth": "40"},
        claims=claims,
        notes=(
            "truncated at a finite depth: the residual band below the last level is fixed pointwise",
        ),
    )


def _manifest_example2() -> ExampleManifest:
    claims = (
        Claim("eval", {"gen": 1, "x": "1/2"}, "3/4", "direct"),
        Claim("eval", {"gen": 1, "x": "1"}, "0", "direct"),
        Claim("eval", {"gen": 2, "x": "0"}, "1", "direct"),
        Claim(
            "eval",
            {"gen": 2, "x": "1/2"},
            "1/4",
            "direct",
            discrepancy="the narrative walk-through of the lower branch sends 1/2 to 1, but the defining formula on (0, 1/2] gives x/2 = 1/4; the formula is authoritative here",
        ),
        Claim(
            "stationary_components",
            {"bins": 16},
            {"count": 2, "supports": [[0, 1, 2, 3, 4, 5, 6, 7], [8, 9, 10, 11, 12, 13, 14, 15]]},
            "oracle",
            note="the discretized chain splits into the lower and upper half-bins; each carries a uniform stationary vector",
        ),
        Claim(
            "classify_map",
            {"gen": 1, "x": "3/8", "eps": "1/1024", "horizon": 10000, "branches": ["recurrent"]},
            {"recurrent": "none-within-horizon"},
            "oracle",
            note="each generator alone pushes every interior orbit monotonically away from its start",
        ),
        Claim(
            "classify_semigroup",
            {
                "x": "1/3",
                "eps": "1/64",
                "horizon": 10000,
                "mode": "mc",
                "seed": 20260816,
                "samples": 100,
            },
            {"recurrent": "certified"},
            "oracle",
            note="random words mix each half-interval, so sampled trajectories re-enter the ball quickly even though neither generator recurs",
        ),
    )
    return ExampleManifest(
        name="example2",
        summary="two zigzag contractions with no recurrent points individually whose semigroup recurs everywhere; two uniform ergodic components",
        generator_labels=("zigzag-up", "zigzag-down"),
        params={},
        claims=claims,
    )


def _manifest_example3() -> ExampleManifest:
    decay_note = (
        "exact word statistics for the ball mass around the candidate; "
        "the expected flag records whether the window minimum drops below a "
        "quarter of the reference value with a nonpositive trend"
    )
    claims = (
        Claim("eval", {"gen": 1, "x": "1/3"}, "3/5", "direct"),
        Claim("eval", {"gen": 1, "x": "1/2"}, "1/2", "direct"),
        Claim("eval", {"gen": 2, "x": "1/2"}, "1/3", "direct"),
        Claim(
            "eval",
            {"gen": 2, "x": "1"},
            "2/3",
            "direct",
            note="value forced by the mirror extension of the fold's own left half",
        ),
        Claim(
            "classify_map",
            {"gen": 1, "x": "0", "eps": "1/100", "horizon": 100},
            {"recurrent": "certified", "recurrent_time": 6, "uniform_passes": True},
            "oracle",
            note="0 jumps to 1/4 and then halves back into any ball around 0",
        ),
        Claim(
            "classify_map",
            {"gen": 1, "x": "1/3", "eps": "1/100", "horizon": 1000},
            {"recurrent": "none-within-horizon"},
            "oracle",
            discrepancy=(
                "the narrative lists 1/3 (and 2/3) among the uniformly recurrent points of the first generator, "
                "but the formulas send 1/3 to 3/5 and the orbit settles into the 2-cycle 4/9, 5/9, never re-entering small balls around 1/3"
            ),
        ),
        Claim(
            "qn_mass_decay",
            {"x": "0", "eps": "1/25", "upto": 24, "window": [12, 24], "ref": 4, "factor": "1/4"},
            True,
            "oracle",
            note=decay_note,
            slow=True,
        ),
        Claim(
            "qn_mass_decay",
            {"x": "1", "eps": "1/25", "upto": 24, "window": [12, 24], "ref": 4, "factor": "1/4"},
            True,
            "oracle",
            note=decay_note,
            slow=True,
        ),
        Claim(
            "qn_mass_decay",
            {"x": "1/2", "eps": "1/50", "upto": 24, "window": [12, 24], "ref": 4, "factor": "1/4"},
            False,
            "oracle",
            note=decay_note,
            discrepancy=(
                "the narrative argues the n-step ball mass at every candidate vanishes because long same-letter runs are exponentially rare; "
                "exact enumeration shows the mass at 1/2 stabilizes near 983/4096 ~ 0.24: a run of just five fold letters re-enters the 1/50 ball "
                "from anywhere at fixed probability 1/32 per window position, so the mass never decays and 1/2 behaves uniformly recurrent for the chain"
            ),
            slow=True,
        ),
    )
    return ExampleManifest(
        name="example3",
        summary="halving-with-relocations paired with a middle-third fold; chain ball mass decays at 0 and 1 but stabilizes at 1/2",
        generator_labels=("thirds-halving", "thirds-fold"),
        params={},
        claims=claims,
    )


def _manifest_example4() -> ExampleManifest:
    claims = (
        Claim("fixed_locus_length", {"gen": 1}, "1/3", "direct"),
        Claim(
            "fixed_locus_length",
            {"gen": 2},
            "1/3",
            "direct",
            discrepancy=(
                "the narrative includes the endpoint 2/3 in the second generator's recurrent set, "
                "but the middle branch owns 2/3 and sends it to 5/12, which then contracts toward 1/2; "
                "the pointwise-fixed set is {1/2} together with the open-ended upper third, of the same length 1/3"
            ),
        ),
        Claim("eval", {"gen": 2, "x": "2/3"}, "5/12", "direct"),
        Claim("eval", {"gen": 1, "x": "1/3"}, "1/3", "direct",
              note="left-limit value at the first unassigned point; it keeps 1/3 fixed"),
        Claim("eval", {"gen": 1, "x": "1/2"}, "7/12", "direct"),
        Claim(
            "qn_mass_decay",
            {"x": "0", "eps": "1/25", "upto": 20, "window": [10, 20], "ref": 2, "factor": "1/2"},
            True,
            "oracle",
            note="only the all-first-letter word keeps the atom at the fixed origin; every fold letter exiles it past 1/3 forever, so the mass is exactly 2^-n",
            slow=True,
        ),
        Claim(
            "qn_mass_decay",
            {"x": "1/2", "eps": "1/50", "upto": 24, "window": [12, 24], "ref": 4, "factor": "1/4"},
            False,
            "oracle",
            discrepancy=(
                "the narrative asserts the semigroup has no uniformly recurrent points by the same run-length argument as the thirds construction; "
                "at 1/2 the fold fixes the point and short fold runs re-enter the ball from the whole middle third, so the exact mass stabilizes instead of decaying"
            ),
            slow=True,
        ),
    )
    return ExampleManifest(
        name="example4",
        summary="lower-third identity paired with upper-third identity; fat fixed sets for each generator, chain mass still stabilizes at 1/2",
        generator_labels=("lower-third-identity", "upper-third-identity"),
        params={},
        claims=claims,
    )


def _manifest_example_qu() -> ExampleManifest:
    claims = (
        Claim("eval", {"gen": 1, "x": "1/2"}, "1/4", "direct"),
        Claim("eval", {"gen": 2, "x": "1/2"}, "1", "direct"),
        Claim(
            "kappa_powers",
            {"x": "0", "set": {"ball": {"center": "0", "radius": "1/10"}}, "upto": 12, "base": "1/2"},
            True,
            "oracle",
            note="a word keeps the atom at 0 exactly when every letter squares; one constant letter parks it at 1 forever",
        ),
        Claim(
            "kappa_powers",
            {"x": "1", "set": {"point": "1"}, "upto": 12, "base": "1"},
            True,
            "oracle",
            note="both letters fix 1, so every word returns",
        ),
        Claim(
            "classify_semigroup",
            {"x": "1", "eps": "1/8", "horizon": 20, "branches": ["recurrent", "uniform"]},
            {"recurrent": "certified", "recurrent_time": 1, "uniform_value": "1", "uniform_passes": True},
            "oracle",
            note="exact image iteration of a quadratic branch doubles coefficient bit sizes each step, so the untracked branches are pinned off",
        ),
        Claim(
            "classify_semigroup",
            {"x": "0", "eps": "1/4", "horizon": 20, "branches": ["recurrent", "uniform"]},
            {"recurrent": "certified", "recurrent_time": 1, "uniform_value": "1/1048576", "uniform_passes": False},
            "oracle",
            note="the trajectory fraction returning to the ball is exactly 2^-n, so the window minimum at horizon 20 is 2^-20",
        ),
    )
    return ExampleManifest(
        name="example-qu",
        summary="squaring against the constant map to 1; both endpoints recur but only 1 does so with positive frequency",
        generator_labels=("squaring", "constant-one"),
        params={},
        claims=claims,
    )


def _manifest_doubling() -> ExampleManifest:
    claims = (
        Claim("eval", {"gen": 1, "x": "1/4"}, "1/2", "direct"),
        Claim("eval", {"gen": 1, "x": "3/4"}, "1/2", "direct"),
        Claim(
            "poincare",
            {
                "gen": 1,
                "measure": {"kind": "lebesgue"},
                "set": {"interval": ["0", "1/2", False, False]},
                "upto": 20,
            },
            {"last": "10", "trend": "linear-growth"},
            "direct",
            note="every preimage of the lower half has measure exactly 1/2",
        ),
        Claim("stationary_components", {"bins": 2}, {"count": 1}, "oracle"),
    )
    return ExampleManifest(
        name="doubling",
        summary="angle doubling; measure-preserving anchor with a linearly growing return series",
        generator_labels=("doubling",),
        params={},
        claims=claims,
    )


def _manifest_identity() -> ExampleManifest:
    claims = (
        Claim(
            "classify_map",
            {"gen": 1, "x": "1/3", "eps": "1/100", "horizon": 10},
            {"recurrent": "certified", "recurrent_time": 1, "uniform_passes": True},
            "direct",
        ),
        Claim("stationary_components", {"bins": 2}, {"count": 2}, "direct"),
    )
    return ExampleManifest(
        name="identity",
        summary="identity map; every point is uniformly recurrent and every bin is its own ergodic component",
        generator_labels=("identity",),
        params={},
        claims=claims,
    )


def _manifest_rotation() -> ExampleManifest:
    claims = (
        Claim("orbit", {"gen": 1, "x": "0", "n": 3}, "0", "direct"),
        Claim(
            "classify_map",
            {"gen": 1, "x": "0", "eps": "1/10", "horizon": 10},
            {"recurrent": "certified", "recurrent_time": 3},
            "direct",
            note="a third-turn rotation returns exactly every three steps",
        ),
    )
    return ExampleManifest(
        name="rotation",
        summary="rational circle rotation; periodic anchor for circle metrics",
        generator_labels=("rotation",),
        params={"angle": "1/3"},
        claims=claims,
    )


_MANIFESTS: dict[str, Callable[[], ExampleManifest]] = {
    "eq2-map": _manifest_eq2_map,
    "example1": _manifest_example1,
    "example1exp": _manifest_example1exp,
    "example-wu": _manifest_example_wu,
    "example2": _manifest_example2,
    "example3": _manifest_example3,
    "example4": _manifest_example4,
    "example-qu": _manifest_example_qu,
    "doubling": _manifest_doubling,
    "identity": _manifest_identity,
    "rotation": _manifest_rotation,
}


def manifest(name: str) -> ExampleManifest:
    try:
        build = _MANIFESTS[name]
    except KeyError:
        known = ", ".join(sorted(_MANIFESTS))
        raise ValueError(f"unknown example {name!r}; known entries: {known}") from None
    return build()


def list_examples() -> list[dict]:
    """One summary row per catalogue entry, in registry order."""
    rows = []
    for name in EXAMPLE_NAMES:
        man = manifest(name)
        rows.append(
            {
                "name": name,
                "generators": len(man.generator_labels),
                "labels": list(man.generator_labels),
                "params": dict(man.params),
                "claims": len(man.claims),
                "discrepancies": sum(1 for c in man.claims if c.discrepancy),
                "summary": man.summary,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# claim runner


def _claim_set(spec: Mapping[str, Any]) -> IntervalSet:
    if "ball" in spec:
        b = spec["ball"]
        return ball(
            parse_rational(b["center"]),
            parse_rational(b["radius"]),
            style=b.get("style", "open"),
            circle=bool(b.get("circle", False)),
        )
    if "point" in spec:
        return IntervalSet.point(parse_rational(spec["point"]))
    if "interval" in spec:
        lo, hi, lo_closed, hi_closed = spec["interval"]
        return IntervalSet.of(
            Interval(parse_rational(lo), parse_rational(hi), bool(lo_closed), bool(hi_closed))
        )
    raise ValueError(f"unrecognized set specification {spec!r}")


def _claim_measure(spec: Mapping[str, Any]):
    from .measures import Measure

    kind = spec["kind"]
    if kind == "lebesgue":
        return Measure.lebesgue()
    if kind == "dirac":
        return Measure.dirac(parse_rational(spec["at"]))
    raise ValueError(f"unrecognized measure specification {spec!r}")


def _verdict_summary(v) -> dict:
    out: dict[str, Any] = {"recurrent": v.recurrent, "weak": v.weak}
    if v.recurrent_time is not None:
        out["recurrent_time"] = v.recurrent_time
    if v.weak_time is not None:
        out["weak_time"] = v.weak_time
    if v.uniform_estimate is not None:
        out["uniform_value"] = format_rational(as_rational(v.uniform_estimate.value))
        out["uniform_passes"] = v.uniform_estimate.passes
    if v.weak_uniform_estimate is not None:
        out["weak_uniform_value"] = format_rational(
            as_rational(v.weak_uniform_estimate.value)
        )
        out["weak_uniform_passes"] = v.weak_uniform_estimate.passes
    return out


def _uniform_chain(gens: Sequence[PiecewiseMap]):
    from .markov import MarkovChain

    d = len(gens)
    return MarkovChain(tuple(gens), tuple(Fraction(1, d) for _ in range(d)))


def _exact_slope_sign(values: Sequence[Fraction]) -> int:
    """Sign of the least-squares slope of values against 1..len(values)."""
    n = len(values)
    mean_i = Fraction(n + 1, 2)
    mean_v = sum(values, Fraction(0)) / n
    acc = Fraction(0)
    for i, v in enumerate(values, start=1):
        acc += (Fraction(i) - mean_i) * (v - mean_v)
    return (acc > 0) - (acc < 0)


def run_claim(name: str, claim: Claim, budget: int = 64 * 10**6) -> ClaimResult:
    """Replay one manifest claim and compare against its expected value."""
    gens = build_example(name)
    op = claim.op
    args = claim.args

    if op == "eval":
        T = gens[int(args["gen"]) - 1]
        got: Any = format_rational(T.eval(parse_rational(args["x"])))
    elif op == "orbit":
        T = gens[int(args["gen"]) - 1]
        y = parse_rational(args["x"])
        for _ in range(int(args["n"])):
            y = T.eval(y)
        got = format_rational(y)
    elif op == "fixed_locus_length":
        T = gens[int(args["gen"]) - 1]
        got = format_rational(T.fixed_point_locus().length())
    elif op == "classify_map":
        from .classify import classify_map_point

        T = gens[int(args["gen"]) - 1]
        kwargs: dict[str, Any] = {"grid": int(args.get("grid", 2**7))}
        if "branches" in args:
            kwargs["branches"] = tuple(args["branches"])
        verdict = classify_map_point(
            T,
            parse_rational(args["x"]),
            parse_rational(args["eps"]),
            int(args["horizon"]),
            **kwargs,
        )
        got = _verdict_summary(verdict)
    elif op == "classify_chain":
        from .classify import classify_chain_point

        kwargs = {}
        if "branches" in args:
            kwargs["branches"] = tuple(args["branches"])
        verdict = classify_chain_point(
            _uniform_chain(gens),
            parse_rational(args["x"]),
            parse_rational(args["eps"]),
            int(args["horizon"]),
            budget=budget,
            mode=args.get("mode", "exact"),
            seed=args.get("seed"),
            samples=args.get("samples"),
            **kwargs,
        )
        got = _verdict_summary(verdict)
    elif op == "classify_semigroup":
        from .classify import classify_semigroup_point
        from .semigroup import GeneratorSet

        kwargs = {}
        if "branches" in args:
            kwargs["branches"] = tuple(args["branches"])
        d = len(gens)
        verdict = classify_semigroup_point(
            GeneratorSet(tuple(gens)),
            tuple(Fraction(1, d) for _ in range(d)),
            parse_rational(args["x"]),
            parse_rational(args["eps"]),
            int(args["horizon"]),
            budget=budget,
            mode=args.get("mode", "exact"),
            seed=args.get("seed"),
            samples=args.get("samples"),
            **kwargs,
        )
        got = _verdict_summary(verdict)
    elif op == "kappa_powers":
        from .semigroup import GeneratorSet, kappa

        G = GeneratorSet(tuple(gens))
        target = _claim_set(args["set"])
        x = parse_rational(args["x"])
        base = parse_rational(args["base"])
        upto = int(args["upto"])
        values = [kappa(G, x, target, n, budget=budget) for n in range(1, upto + 1)]
        got = all(v == base**n for n, v in enumerate(values, start=1))
    elif op == "qn_mass_decay":
        from .markov import ball_mass_sequence

        Q = _uniform_chain(gens)
        x = parse_rational(args["x"])
        eps = parse_rational(args["eps"])
        upto = int(args["upto"])
        lo, hi = (int(v) for v in args["window"])
        ref = int(args["ref"])
        factor = parse_rational(args["factor"])
        masses = ball_mass_sequence(Q, x, ball(x, eps), upto, budget=budget)
        window_min = min(masses[lo - 1 : hi])
        reference = masses[ref - 1]
        decays = window_min < factor * reference and _exact_slope_sign(masses) <= 0
        got = {
            "decays": decays,
            "reference": format_rational(reference),
            "window_min": format_rational(window_min),
        }
        return ClaimResult(ok=(decays == claim.expected), got=got)
    elif op == "stationary_components":
        from .measures import stationary_components, ulam_matrix

        Q = _uniform_chain(gens)
        matrix = ulam_matrix(Q, int(args["bins"]))
        comps = stationary_components(matrix)
        got = {
            "count": len(comps),
            "supports": [list(c.support) for c in comps],
        }
    elif op == "poincare":
        from .measures import poincare_partial_sums

        T = gens[int(args["gen"]) - 1]
        report = poincare_partial_sums(
            T,
            _claim_measure(args["measure"]),
            _claim_set(args["set"]),
            int(args["upto"]),
        )
        got = {"last": format_rational(report.sums[-1]), "trend": report.trend}
    elif op == "r_bracket":
        from .classify import r_function

        T = gens[int(args["gen"]) - 1]
        lo_r, hi_r = r_function(
            T,
            parse_rational(args["x"]),
            int(args["horizon"]),
            parse_rational(args["r_tol"]),
        )
        got = {"lo": format_rational(lo_r), "hi": format_rational(hi_r)}
        expected = claim.expected
        ok = True
        if "contains" in expected:
            v = parse_rational(expected["contains"])
            ok = ok and lo_r <= v <= hi_r
        if "width_at_most" in expected:
            ok = ok and hi_r - lo_r <= parse_rational(expected["width_at_most"])
        if "hi_at_most" in expected:
            ok = ok and hi_r <= parse_rational(expected["hi_at_most"])
        return ClaimResult(ok=ok, got=got)
    else:
        raise ValueError(f"unrecognized claim op {op!r}")

    if isinstance(claim.expected, Mapping):
        ok = all(got.get(k) == v for k, v in claim.expected.items())
    else:
        ok = got == claim.expected
    return ClaimResult(ok=ok, got=got)
