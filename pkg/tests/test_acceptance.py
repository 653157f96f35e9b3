"""Acceptance gate for the shipped library.

Eleven criteria, one test each, numbered to match the README checklist.
Every test prints a single line

    criterion NN: PASS <detail>
    criterion NN: FAIL <detail>

before asserting, so `pytest tests/test_acceptance.py -s` reads as a
checklist even when a criterion is red.  Tolerances are exact (rational
equality) unless a line says otherwise; randomized sweeps run under fixed
seeds so reruns are reproducible bit for bit.

Criterion 04 is expected to fail: the claimed decay of the n-step ball
mass at the fold's fixed center is contradicted by exact enumeration (the
window minimum stabilizes near 0.24 instead of dropping below 1/32).  The
test asserts the claim as stated and stays red on purpose; the catalogue
manifest records the same finding as a flagged discrepancy.
"""

import itertools
import random
import time
from fractions import Fraction as F

from semirec.catalogue import EXAMPLE_NAMES, build_example
from semirec.classify import (
    classify_chain_point,
    classify_map_point,
    classify_semigroup_point,
    r_function,
)
from semirec.combinatorics import l1_exhaustive
from semirec.geometry import Interval, IntervalSet, ball
from semirec.markov import (
    MarkovChain,
    ball_mass_sequence,
    compatibility_gamma,
    qn_distribution,
)
from semirec.measures import (
    Measure,
    poincare_partial_sums,
    stationary_components,
    ulam_matrix,
)
from semirec.semigroup import GeneratorSet, count_returns, kappa


def _report(num: int, ok: bool, detail: str) -> str:
    line = "criterion %02d: %s %s" % (num, "PASS" if ok else "FAIL", detail)
    print(line)
    return line


def _uniform_chain(gens) -> MarkovChain:
    d = len(gens)
    return MarkovChain(tuple(gens), tuple(F(1, d) for _ in range(d)))


def _slope_sign(values) -> int:
    """Exact sign of the least-squares slope of values against 1..len."""
    n = len(values)
    mean_i = F(n + 1, 2)
    mean_v = sum(values, F(0)) / n
    acc = sum((F(i) - mean_i) * (v - mean_v) for i, v in enumerate(values, start=1))
    return (acc > 0) - (acc < 0)


def _word_endpoints(gens, x, n):
    """Brute-force endpoints of every length-n word, first letter first."""
    out = []
    for word in itertools.product(gens, repeat=n):
        y = x
        for T in word:
            y = T.eval(y)
        out.append(y)
    return out


# ---------------------------------------------------------------------------


def test_criterion_01_finite_multimap_sweep():
    """Exhaustive recurrence search over all multivalued maps on 1..4 points.

    Zero failures, witness time at most M+1, instance counts (2^M - 1)^M,
    all four sweeps together under ten seconds.
    """
    t0 = time.monotonic()
    results = {M: l1_exhaustive(M) for M in (1, 2, 3, 4)}
    elapsed = time.monotonic() - t0

    ok = elapsed < 10.0
    for M, res in results.items():
        ok = ok and res["instances"] == (2**M - 1) ** M
        ok = ok and res["failures"] == 0
        ok = ok and res["max_n"] <= M + 1
    detail = "M=1..4, %d instances, %d failures, max witness time %d, %.2f s" % (
        sum(r["instances"] for r in results.values()),
        sum(r["failures"] for r in results.values()),
        max(r["max_n"] for r in results.values()),
        elapsed,
    )
    assert ok, _report(1, ok, detail)
    _report(1, ok, detail)


def test_criterion_02_two_component_bin_chain():
    """Bin-discretized transition structure of the paired zigzag contractions.

    At 16 and at 256 dyadic bins the chain splits into exactly two closed
    classes supported on the lower and upper half-bins, each carrying a
    stationary vector uniform on its support to within 1e-9 in sup norm.
    """
    Q = _uniform_chain(build_example("example2"))
    tol = F(1, 10**9)

    t0 = time.monotonic()
    ok = True
    parts = []
    for bins in (16, 256):
        comps = stationary_components(ulam_matrix(Q, bins))
        half = bins // 2
        ok = ok and len(comps) == 2
        ok = ok and tuple(comps[0].support) == tuple(range(half))
        ok = ok and tuple(comps[1].support) == tuple(range(half, bins))
        dev = max(
            abs(w - F(1, len(c.support))) for c in comps for w in c.weights
        )
        ok = ok and dev < tol
        parts.append("%d bins: %d classes, max deviation %s" % (bins, len(comps), dev))
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 5.0

    detail = "; ".join(parts) + ", %.2f s" % elapsed
    assert ok, _report(2, ok, detail)
    _report(2, ok, detail)


def test_criterion_03_no_generator_recurrence_but_semigroup_recurs():
    """Neither zigzag generator recurs anywhere on a fine dyadic grid, yet
    seeded Monte Carlo certifies semigroup recurrence almost everywhere.

    Exact orbit sweep: both generators, x = j/256 for j = 0..256, radius
    2^-10, horizon 10^4, zero recurrence certificates.  Monte Carlo sweep:
    200 interior grid points, 100 trials of horizon 10^4 each under a fixed
    seed, at least 99% certified.
    """
    gens = build_example("example2")
    eps = F(1, 1024)
    N = 10**4

    certified_map = 0
    for T in gens:
        for j in range(257):
            v = classify_map_point(T, F(j, 256), eps, N, branches=("recurrent",))
            certified_map += v.recurrent == "certified"

    G = GeneratorSet(tuple(gens))
    p = (F(1, 2), F(1, 2))
    certified_mc = 0
    for j in range(1, 201):
        v = classify_semigroup_point(
            G, p, F(j, 256), eps, N, mode="mc", seed=20260816, samples=100
        )
        certified_mc += v.recurrent == "certified"

    ok = certified_map == 0 and certified_mc >= 198
    detail = (
        "generator sweep: %d of 514 certified (want 0); "
        "monte carlo: %d of 200 certified (want >= 198)"
        % (certified_map, certified_mc)
    )
    assert ok, _report(3, ok, detail)
    _report(3, ok, detail)


def test_criterion_04_ball_mass_decay_at_flagged_centers():
    """The n-step ball mass of the thirds pair should decay at all three
    flagged centers: window minimum over [12,24] below a quarter of the
    value at n=4, with a nonpositive exact least-squares trend.

    Exact enumeration refutes this at the center 1/2, where the mass
    stabilizes at 983/4096; the test asserts the decay claim as stated and
    is therefore expected to stay red.  The other two centers pass.
    """
    Q = _uniform_chain(build_example("example3"))
    cases = ((F(0), F(1, 25)), (F(1), F(1, 25)), (F(1, 2), F(1, 50)))

    ok = True
    parts = []
    for x, eps in cases:
        masses = ball_mass_sequence(Q, x, ball(x, eps), 24, budget=64 * 10**6)
        window_min = min(masses[11:24])
        reference = masses[3]
        decays = window_min < F(1, 4) * reference and _slope_sign(masses) <= 0
        ok = ok and decays
        parts.append(
            "x=%s: window-min %s vs quarter-reference %s -> %s"
            % (x, window_min, F(1, 4) * reference, "decays" if decays else "stalls")
        )
    detail = "; ".join(parts)
    assert ok, _report(4, ok, detail)
    _report(4, ok, detail)


def test_criterion_05_squaring_constant_pair_statistics():
    """Exact word statistics for the squaring/constant-one pair.

    The returning fraction at 0 is exactly 2^-n for n <= 20 (checked
    against full word enumeration for n <= 10) and exactly 1 at the common
    fixed point 1.  Both endpoints classify as recurrent; the uniform
    window minimum is 1 at the fixed point and 2^-20 at the origin.
    """
    gens = build_example("example-qu")
    G = GeneratorSet(tuple(gens))
    ball0 = ball(F(0), F(1, 10))
    point1 = IntervalSet.point(F(1))

    ok = True
    # independent oracle: enumerate all 2^n words outright
    for n in range(1, 11):
        endpoints = _word_endpoints(gens, F(0), n)
        ok = ok and sum(1 for y in endpoints if ball0.contains(y)) == 1
        endpoints1 = _word_endpoints(gens, F(1), n)
        ok = ok and all(y == 1 for y in endpoints1)
    # word-tree counting beyond the enumeration range
    for n in range(1, 21):
        ok = ok and kappa(G, F(0), ball0, n) == F(1, 2) ** n
        ok = ok and kappa(G, F(1), point1, n) == 1

    p = (F(1, 2), F(1, 2))
    v1 = classify_semigroup_point(
        G, p, F(1), F(1, 8), 20, branches=("recurrent", "uniform")
    )
    v0 = classify_semigroup_point(
        G, p, F(0), F(1, 4), 20, branches=("recurrent", "uniform")
    )
    ok = ok and v1.recurrent == "certified" and v1.uniform_estimate.value == 1
    ok = ok and v0.recurrent == "certified"
    ok = ok and v0.uniform_estimate.value == F(1, 2) ** 20

    detail = (
        "returning fraction 2^-n at 0 and 1 at the fixed point for n <= 20; "
        "window minima %s at 1 and %s at 0"
        % (v1.uniform_estimate.value, v0.uniform_estimate.value)
    )
    assert ok, _report(5, ok, detail)
    _report(5, ok, detail)


def test_criterion_06_word_fraction_equals_chain_mass():
    """For uniform weights the returning-word fraction equals the induced
    chain's n-step mass, as exact rationals, on every affine example.

    Five seeded random (start, target) pairs per example, n = 1..8; the
    two sides ride different code paths (dedup'd word counting vs the
    exact distribution builder).
    """
    rng = random.Random(20260806)
    affine = tuple(n for n in EXAMPLE_NAMES if n != "example-qu")

    checked = 0
    ok = True
    first_bad = ""
    for name in affine:
        gens = build_example(name)
        G = GeneratorSet(tuple(gens))
        Q = _uniform_chain(gens)
        for _ in range(5):
            x = F(rng.randrange(0, 129), 128)
            if rng.randrange(2):
                target = ball(
                    F(rng.randrange(0, 129), 128), F(1, 2 ** rng.randrange(2, 7))
                )
            else:
                a = rng.randrange(0, 128)
                b = rng.randrange(a + 1, 129)
                target = IntervalSet.of(
                    Interval(F(a, 128), F(b, 128), bool(rng.randrange(2)), bool(rng.randrange(2)))
                )
            for n in range(1, 9):
                lhs = kappa(G, x, target, n)
                rhs = qn_distribution(Q, x, n).mass_in(target)
                if lhs != rhs and not first_bad:
                    first_bad = "%s x=%s n=%d: %s != %s" % (name, x, n, lhs, rhs)
                ok = ok and lhs == rhs
            checked += 1

    detail = "%d random (start, target) pairs across %d affine examples, n <= 8, exact%s" % (
        checked, len(affine), ("; first mismatch " + first_bad) if first_bad else ""
    )
    assert ok, _report(6, ok, detail)
    _report(6, ok, detail)


def test_criterion_07_weight_invariance_and_mass_sandwich():
    """Positivity-based verdicts do not depend on the generator weights.

    Fifty seeded random points across the three two-generator families,
    horizon 12, weights (1/2,1/2), (1/10,9/10), (9/10,1/10): the recurrent
    and weak flags, their times, and the set of positive-mass steps all
    coincide.  Mass magnitudes differ but stay inside the two-sided
    gamma^n compatibility envelope.
    """
    P = ((F(1, 2), F(1, 2)), (F(1, 10), F(9, 10)), (F(9, 10), F(1, 10)))
    rng = random.Random(20260816)
    plan = ["example2"] * 17 + ["example3"] * 17 + ["example4"] * 16

    ok = True
    first_bad = ""
    for name in plan:
        gens = build_example(name)
        x = F(rng.randrange(1, 256), 256)
        eps = F(1, 2 ** rng.choice((4, 5, 6)))
        B = ball(x, eps)

        masses = []
        flags = []
        for p in P:
            Q = MarkovChain(tuple(gens), p)
            ms = ball_mass_sequence(Q, x, B, 12)
            masses.append(ms)
            v = classify_chain_point(Q, x, eps, 12, branches=("recurrent", "weak"))
            flags.append(
                (
                    v.recurrent,
                    v.recurrent_time,
                    v.weak,
                    v.weak_time,
                    tuple(n for n, m in enumerate(ms, start=1) if m > 0),
                )
            )
        if not (flags[0] == flags[1] == flags[2]):
            ok = False
            if not first_bad:
                first_bad = "flags differ at %s x=%s eps=%s" % (name, x, eps)
        for a, b in ((0, 1), (1, 2)):
            gamma = compatibility_gamma(P[a], P[b])
            for n in range(1, 13):
                lo = gamma**n * masses[b][n - 1]
                hi = masses[b][n - 1] / gamma**n
                if not (lo <= masses[a][n - 1] <= hi):
                    ok = False
                    if not first_bad:
                        first_bad = "sandwich broken at %s x=%s n=%d" % (name, x, n)

    detail = "50 points x 3 weight vectors, horizon 12, exact%s" % (
        ("; " + first_bad) if first_bad else ""
    )
    assert ok, _report(7, ok, detail)
    _report(7, ok, detail)


def test_criterion_08_return_series_anchors():
    """Two pinned partial-sum anchors for the pullback return series.

    Doubling with Lebesgue and the open lower half: S_N = N/2 exactly for
    N <= 20.  Halving-with-jump with a point mass at the origin: S_N = 0
    for every N even though the origin itself classifies as recurrent,
    separating the series condition from pointwise recurrence.
    """
    doubling = build_example("doubling")[0]
    lower_half = IntervalSet.of(Interval(F(0), F(1, 2), False, False))
    report = poincare_partial_sums(doubling, Measure.lebesgue(), lower_half, 20)
    ok = list(report.sums) == [F(n, 2) for n in range(1, 21)]

    jump = build_example("eq2-map")[0]
    origin = IntervalSet.point(F(0))
    report2 = poincare_partial_sums(jump, Measure.dirac(F(0)), origin, 20)
    ok = ok and all(s == 0 for s in report2.sums)
    v = classify_map_point(jump, F(0), F(1, 32), 100)
    ok = ok and v.recurrent == "certified"

    detail = (
        "doubling sums reach %s at N=20 (want 10); "
        "halving-with-jump sums stay %s while the origin is %s (return time %s)"
        % (report.sums[-1], report2.sums[-1], v.recurrent, v.recurrent_time)
    )
    assert ok, _report(8, ok, detail)
    _report(8, ok, detail)


def test_criterion_09_distribution_builder_vs_brute_force():
    """The deduplicating distribution builder agrees with raw d^n word
    enumeration, atom for atom, on every catalogue chain for n <= 6;
    returning-word counts agree likewise.  Zero tolerance.
    """
    ok = True
    first_bad = ""
    atoms_checked = 0
    for name in EXAMPLE_NAMES:
        gens = build_example(name)
        G = GeneratorSet(tuple(gens))
        Q = _uniform_chain(gens)
        d = len(gens)
        for x in (F(0), F(1, 3)):
            target = ball(x, F(1, 8))
            for n in range(1, 7):
                endpoints = _word_endpoints(gens, x, n)
                expected: dict = {}
                unit = F(1, d**n)
                for y in endpoints:
                    expected[y] = expected.get(y, F(0)) + unit
                got = qn_distribution(Q, x, n).as_dict()
                if got != expected:
                    ok = False
                    if not first_bad:
                        first_bad = "%s x=%s n=%d distribution" % (name, x, n)
                atoms_checked += len(expected)
                brute = sum(1 for y in endpoints if target.contains(y))
                if count_returns(G, x, target, n) != brute:
                    ok = False
                    if not first_bad:
                        first_bad = "%s x=%s n=%d count" % (name, x, n)

    detail = "%d examples x 2 starts x n<=6, %d atoms compared exactly%s" % (
        len(EXAMPLE_NAMES), atoms_checked, ("; " + first_bad) if first_bad else ""
    )
    assert ok, _report(9, ok, detail)
    _report(9, ok, detail)


def test_criterion_10_verdict_invariant_sweep():
    """Structural invariants over one thousand seeded random classifications.

    Inclusion chain: a passing uniform estimate implies a recurrence
    certificate, which implies a weak certificate no later.  Horizon
    growth: certificates and return times are stable, new returns only
    appear beyond the old horizon.  Deterministic consistency: for
    single-generator examples the map and the one-letter chain agree on
    flags, times, and positive-mass steps.  Plus one pinned verdict: the
    upward-drift example at the origin is weakly recurrent with a
    weak-uniform window count of zero.
    """
    rng = random.Random(20260826)
    two_gen_pool = (
        ("eq2-map", 0), ("example1", 0), ("doubling", 0), ("identity", 0),
        ("rotation", 0), ("example2", 0), ("example2", 1),
        ("example3", 0), ("example3", 1), ("example4", 0), ("example4", 1),
    )
    single_gen_pool = ("eq2-map", "example1", "doubling", "identity", "rotation")
    built = {name: build_example(name) for name, _ in two_gen_pool}

    ok = True
    first_bad = ""

    def fail(msg: str) -> None:
        nonlocal ok, first_bad
        ok = False
        if not first_bad:
            first_bad = msg

    def check_inclusion(v, tag: str) -> None:
        if v.uniform_estimate.passes and v.recurrent != "certified":
            fail("uniform without recurrent at " + tag)
        if v.recurrent == "certified":
            if v.weak != "certified" or v.weak_time > v.recurrent_time:
                fail("recurrent without prompt weak at " + tag)
            if not v.return_times or v.return_times[0] != v.recurrent_time:
                fail("return times out of step at " + tag)
        if any(t > v.horizon for t in v.return_times):
            fail("return time beyond horizon at " + tag)
        if list(v.return_times) != sorted(set(v.return_times)):
            fail("return times not sorted at " + tag)

    tuples = 0
    for _ in range(800):
        name, gi = two_gen_pool[rng.randrange(len(two_gen_pool))]
        T = built[name][gi]
        x = F(rng.randrange(0, 257), 256)
        eps = F(1, 2 ** rng.randrange(3, 9))
        N = rng.randrange(4, 25)
        tag = "%s[%d] x=%s eps=%s N=%d" % (name, gi + 1, x, eps, N)

        v = classify_map_point(T, x, eps, N)
        check_inclusion(v, tag)

        N2 = N + rng.randrange(1, 7)
        v2 = classify_map_point(T, x, eps, N2)
        if v.return_times != tuple(t for t in v2.return_times if t <= N):
            fail("return times unstable under horizon growth at " + tag)
        if v.recurrent == "certified" and (
            v2.recurrent != "certified" or v2.recurrent_time != v.recurrent_time
        ):
            fail("recurrence certificate lost at " + tag)
        if v.weak == "certified" and (
            v2.weak != "certified" or v2.weak_time != v.weak_time
        ):
            fail("weak certificate lost at " + tag)
        tuples += 1

    for _ in range(200):
        name = single_gen_pool[rng.randrange(len(single_gen_pool))]
        T = built[name][0]
        x = F(rng.randrange(0, 257), 256)
        eps = F(1, 2 ** rng.randrange(3, 9))
        N = rng.randrange(4, 17)
        tag = "%s x=%s eps=%s N=%d" % (name, x, eps, N)

        vm = classify_map_point(T, x, eps, N)
        check_inclusion(vm, tag)
        vc = classify_chain_point(
            MarkovChain((T,), (F(1),)), x, eps, N,
            branches=("recurrent", "weak", "uniform"),
        )
        same = (
            vm.recurrent == vc.recurrent
            and vm.recurrent_time == vc.recurrent_time
            and vm.weak == vc.weak
            and vm.weak_time == vc.weak_time
            and vm.return_times == vc.return_times
        )
        if not same:
            fail("map/chain disagreement at " + tag)
        tuples += 1

    wu = build_example("example-wu")[0]
    v = classify_map_point(wu, F(0), F(1, 16), 10**3)
    if v.weak != "certified" or v.weak_uniform_estimate.value != 0:
        fail("upward-drift pin: weak=%s window count=%s" % (v.weak, v.weak_uniform_estimate.value))

    detail = "%d seeded tuples, 3 invariant families + 1 pinned verdict%s" % (
        tuples, ("; " + first_bad) if first_bad else ""
    )
    assert ok, _report(10, ok, detail)
    _report(10, ok, detail)


def test_criterion_11_self_avoiding_radius_bracket():
    """Bracketing the largest self-avoiding ball radius for the dented
    identity's halving branch.

    At x = 1/4 the first image of the closed ball is [(1/4 - r)/2,
    (1/4 + r)/2]; it stays clear of the ball exactly while (1/4 + r)/2 <
    1/4 - r, so the supremum is r* = 1/12.  The returned bracket must
    contain 1/12 with width at most 2^-16; at x = 0 the supremum is 0, so
    the upper end must be at most 2^-16.
    """
    T = build_example("example1")[0]
    tol = F(1, 2**16)

    r_star = F(1, 12)
    assert (F(1, 4) + r_star) / 2 == F(1, 4) - r_star  # the analytic oracle

    lo, hi = r_function(T, F(1, 4), 50, tol)
    ok = lo <= r_star <= hi and hi - lo <= tol

    lo0, hi0 = r_function(T, F(0), 50, tol)
    ok = ok and hi0 <= tol

    detail = "bracket [%s, %s] around 1/12 (width %s); origin upper bound %s" % (
        lo, hi, hi - lo, hi0
    )
    assert ok, _report(11, ok, detail)
    _report(11, ok, detail)
