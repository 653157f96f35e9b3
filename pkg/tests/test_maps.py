"""Piecewise polynomial self-maps of [0,1].

Image and preimage are the delicate parts, so each gets a sampling
oracle: forward images are checked by pushing a dense rational grid
through the map, preimages by the equivalence T(x) in S <=> x in
preimage(S) at grid points.
"""

import random
from fractions import Fraction as F

import pytest

from semirec.catalogue import build_example
from semirec.errors import BitCapError, CoverageError, NonAffineError
from semirec.geometry import Interval, IntervalSet, ball
from semirec.maps import (
    Piece,
    PiecewiseMap,
    compose,
    compose2,
    eval_word,
    identity_map,
    poly_compose,
    poly_eval,
    preimage_union_step,
    rational_sqrt,
    validate_word,
)


def _affine(lo, hi, lc, hc, b, a):
    """Piece mapping x to b + a*x on the given domain."""
    return Piece(Interval(F(lo[0], lo[1]), F(hi[0], hi[1]), lc, hc), (F(*b), F(*a)))


def _doubling():
    return PiecewiseMap(
        pieces=(
            _affine((0, 1), (1, 2), True, False, (0, 1), (2, 1)),
            _affine((1, 2), (1, 1), True, True, (-1, 1), (2, 1)),
        ),
        label="doubling",
    )


GRID = [F(k, 240) for k in range(241)]


# ---------------------------------------------------------------------------
# polynomial helpers


def test_poly_eval():
    # 1 + 2x + 3x^2 at x = 1/2
    assert poly_eval((F(1), F(2), F(3)), F(1, 2)) == F(11, 4)
    assert poly_eval((F(5),), F(1, 3)) == 5
    assert poly_eval((), F(1, 2)) == 0


def test_poly_compose_matches_pointwise():
    rng = random.Random(1)
    for _ in range(100):
        p = tuple(F(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(rng.randint(1, 3)))
        q = tuple(F(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(rng.randint(1, 2)))
        c = poly_compose(p, q)
        for x in (F(0), F(1, 3), F(1, 2), F(1)):
            assert poly_eval(c, x) == poly_eval(p, poly_eval(q, x))


def test_rational_sqrt():
    assert rational_sqrt(F(9, 16)) == F(3, 4)
    assert rational_sqrt(F(0)) == 0
    assert rational_sqrt(F(1, 3)) is None
    assert rational_sqrt(F(2)) is None


# ---------------------------------------------------------------------------
# pieces and map construction


def test_piece_degree_limits():
    dom = Interval.closed(F(0), F(1))
    assert Piece(dom, (F(0), F(1))).is_affine()
    quad = Piece(dom, (F(0), F(0), F(1)))
    assert quad.degree == 2 and not quad.is_affine()
    with pytest.raises(ValueError):
        Piece(dom, (F(0), F(0), F(0), F(1)))


def test_piece_value_and_slope():
    p = Piece(Interval.closed(F(0), F(1)), (F(1, 4), F(1, 2)))
    assert p.value(F(1, 2)) == F(1, 2)
    assert p.slope() == F(1, 2)


def test_map_must_cover_unit_interval():
    with pytest.raises(CoverageError):
        PiecewiseMap(pieces=(_affine((0, 1), (1, 2), True, False, (0, 1), (1, 1)),))


def test_map_rejects_interior_overlap():
    with pytest.raises(ValueError):
        PiecewiseMap(
            pieces=(
                _affine((0, 1), (2, 3), True, True, (0, 1), (1, 2)),
                _affine((1, 3), (1, 1), True, True, (0, 1), (1, 2)),
            )
        )


def test_map_must_stay_inside_unit_interval():
    with pytest.raises(ValueError):
        PiecewiseMap(pieces=(Piece(Interval.closed(F(0), F(1)), (F(1, 2), F(1))),))


def test_overrides_win():
    T = _doubling()
    T2 = PiecewiseMap(pieces=T.pieces, overrides=((F(0), F(1, 3)),), label="d2")
    assert T2.eval(F(0)) == F(1, 3)
    assert T2.eval(F(1, 4)) == F(1, 2)
    with pytest.raises(ValueError):
        PiecewiseMap(pieces=T.pieces, overrides=((F(0), F(3, 2)),))


def test_eval_picks_the_right_piece():
    T = _doubling()
    assert T.eval(F(0)) == 0
    assert T.eval(F(1, 4)) == F(1, 2)
    assert T.eval(F(1, 2)) == 0
    assert T.eval(F(3, 4)) == F(1, 2)
    assert T.eval(F(1)) == 1
    assert T(F(1, 3)) == F(2, 3)


def test_eval_outside_domain():
    with pytest.raises(CoverageError):
        _doubling().eval(F(5, 4))


def test_eval_respects_bit_cap():
    T = _doubling()
    x = F(1, 2 ** 5000 + 1)
    with pytest.raises(BitCapError):
        T.eval(x, bit_cap=64)
    assert T.eval(x, bit_cap=None) == 2 * x


def test_identity_map():
    I = identity_map()
    for x in GRID[::17]:
        assert I.eval(x) == x
    assert I.is_affine()


def test_catalogue_examples_evaluate():
    # hand-checked values on the bundled generator families
    T1, T2 = build_example("example2")
    assert T1.eval(F(0)) == F(1, 4)
    assert T1.eval(F(1, 2)) == F(3, 4)
    assert T1.eval(F(1)) == F(0)
    assert T2.eval(F(0)) == F(1)
    assert T2.eval(F(1, 2)) == F(1, 4)
    assert T2.eval(F(1)) == F(3, 4)

    qu1, qu2 = build_example("example-qu")
    assert qu1.eval(F(1, 3)) == F(1, 9)
    assert qu2.eval(F(1, 3)) == F(1)


def test_map_json_roundtrip():
    for name in ("example2", "example3", "example-qu", "rotation"):
        for T in build_example(name):
            back = PiecewiseMap.from_json(T.to_json())
            for x in GRID[::13]:
                assert back.eval(x) == T.eval(x)


# ---------------------------------------------------------------------------
# images


def _image_oracle_check(T, S):
    img = T.image(S)
    for x in GRID:
        if S.contains(x):
            assert img.contains(T.eval(x)), f"{T.label}({x}) escaped the image"


def test_image_pinned_affine():
    T = _doubling()
    S = IntervalSet.of(Interval(F(0), F(1, 2), True, False))
    img = T.image(S)
    assert img.contains(F(0)) and img.contains(F(99, 100))
    assert not img.contains(F(1))
    assert img.length() == 1


def test_image_with_override():
    T2 = build_example("example2")[1]
    img = T2.image(IntervalSet.point(F(0)))
    assert img.contains(F(1)) and img.length() == 0


def test_image_of_quadratic_over_vertex():
    # (x - 1/2)^2 on [0,1]: the vertex must split the domain correctly
    T = PiecewiseMap(
        pieces=(Piece(Interval.closed(F(0), F(1)), (F(1, 4), F(-1), F(1))),),
        label="vee",
    )
    img = T.image(IntervalSet.full())
    assert img.contains(F(0)) and img.contains(F(1, 4))
    assert not img.contains(F(26, 100))
    _image_oracle_check(T, IntervalSet.full())
    # and a half-domain that excludes the vertex
    S = IntervalSet.of(Interval.closed(F(3, 4), F(1)))
    img2 = T.image(S)
    assert img2.contains(F(1, 16)) and img2.contains(F(1, 4))
    assert not img2.contains(F(1, 32))


def test_image_oracle_on_catalogue():
    rng = random.Random(44)
    names = ("example1", "example2", "example3", "example4", "example-qu", "doubling")
    for name in names:
        for T in build_example(name):
            for _ in range(6):
                a = F(rng.randint(0, 30), 30)
                b = F(rng.randint(0, 30), 30)
                if a > b:
                    a, b = b, a
                if a == b:
                    S = IntervalSet.point(a)
                else:
                    S = IntervalSet.of(Interval(a, b, rng.random() < 0.5, rng.random() < 0.5))
                _image_oracle_check(T, S)


# ---------------------------------------------------------------------------
# preimages


def _preimage_oracle_check(T, S):
    pre = T.preimage(S)
    for x in GRID:
        assert pre.contains(x) == S.contains(T.eval(x)), (
            f"{T.label} preimage mismatch at {x}"
        )


def test_preimage_pinned_doubling():
    T = _doubling()
    S = IntervalSet.of(Interval(F(0), F(1, 4), True, False))
    pre = T.preimage(S)
    assert pre.contains(F(0)) and pre.contains(F(1, 16))
    assert not pre.contains(F(1, 8))
    assert pre.contains(F(1, 2)) and pre.contains(F(9, 16))
    assert not pre.contains(F(5, 8))
    assert pre.length() == F(1, 4)


def test_preimage_sees_through_overrides():
    (T,) = build_example("eq2-map")
    # T(0) = 1 by override, and no other point reaches 1
    pre1 = T.preimage(IntervalSet.point(F(1)))
    assert pre1.contains(F(0)) and pre1.length() == 0
    # 0 = T(x) would need x = 0, but the override redirects it
    assert T.preimage(IntervalSet.point(F(0))).is_empty()


def test_preimage_of_quadratic_is_refused():
    # exact pullbacks would need square roots, which leave the rationals,
    # so quadratic pieces refuse loudly instead of approximating
    qu1 = build_example("example-qu")[0]
    with pytest.raises(NonAffineError):
        qu1.preimage(IntervalSet.of(Interval.closed(F(1, 16), F(1, 4))))


def test_preimage_oracle_on_catalogue():
    rng = random.Random(45)
    names = ("example1", "example2", "example3", "example4", "doubling")
    for name in names:
        for T in build_example(name):
            for _ in range(6):
                a = F(rng.randint(0, 30), 30)
                b = F(rng.randint(0, 30), 30)
                if a > b:
                    a, b = b, a
                if a == b:
                    S = IntervalSet.point(a)
                else:
                    S = IntervalSet.of(Interval(a, b, rng.random() < 0.5, rng.random() < 0.5))
                _preimage_oracle_check(T, S)


def test_preimage_union_step():
    gens = build_example("example2")
    S = IntervalSet.of(list(ball(F(1, 2), F(1, 8)))[0])
    merged = preimage_union_step(gens, S)
    by_hand = gens[0].preimage(S).union(gens[1].preimage(S))
    assert merged.to_json() == by_hand.to_json()


# ---------------------------------------------------------------------------
# words and composition


def test_validate_word():
    validate_word(2, [1, 2, 2, 1])
    with pytest.raises(ValueError):
        validate_word(2, [0])
    with pytest.raises(ValueError):
        validate_word(2, [3])
    with pytest.raises(ValueError):
        validate_word(2, [])


def test_word_applies_first_letter_first():
    T1, T2 = build_example("example2")
    x = F(1, 3)
    assert eval_word((T1, T2), [1, 2], x) == T2.eval(T1.eval(x))
    assert eval_word((T1, T2), [2, 1], x) == T1.eval(T2.eval(x))


def test_compose_matches_eval_word():
    gens = build_example("example2")
    rng = random.Random(9)
    for _ in range(25):
        word = [rng.randint(1, 2) for _ in range(rng.randint(1, 4))]
        W = compose(gens, word)
        for x in GRID[::11]:
            assert W.eval(x) == eval_word(gens, word, x)


def test_compose_carries_overrides():
    T1, _ = build_example("example2")
    W = compose2(T1, T1)
    # T1(1) = 0 by override, then T1(0) = 1/4
    assert W.eval(F(1)) == F(1, 4)


def test_compose_quadratics_overflows_degree():
    qu1 = build_example("example-qu")[0]
    with pytest.raises(NonAffineError):
        compose2(qu1, qu1)


def test_effective_domains_partition():
    for name in ("example2", "example3", "doubling"):
        for T in build_example(name):
            total = IntervalSet.empty()
            for _piece, dom in T.effective_domains():
                assert total.intersect(dom).is_empty()
                total = total.union(dom)
            # override points are carved out of the pieces, so the union
            # misses at most finitely many points
            assert total.length() == 1


# ---------------------------------------------------------------------------
# fixed points


def test_fixed_point_locus_identity():
    locus = identity_map().fixed_point_locus()
    assert locus.length() == 1


def test_fixed_point_locus_doubling():
    locus = _doubling().fixed_point_locus()
    assert locus.contains(F(0)) and locus.contains(F(1))
    assert locus.length() == 0
    assert not locus.contains(F(1, 3))


def test_fixed_point_locus_quadratic():
    qu1 = build_example("example-qu")[0]
    locus = qu1.fixed_point_locus()
    assert locus.contains(F(0)) and locus.contains(F(1))
    assert not locus.contains(F(1, 2))


def test_fixed_point_locus_respects_overrides():
    T = PiecewiseMap(
        pieces=(Piece(Interval.closed(F(0), F(1)), (F(0), F(1))),),
        overrides=((F(1, 2), F(1, 4)),),
        label="dented-identity",
    )
    locus = T.fixed_point_locus()
    assert not locus.contains(F(1, 2))
    assert locus.contains(F(1, 4)) and locus.contains(F(3, 4))
    assert locus.length() == 1


# ---------------------------------------------------------------------------
# structural symmetry of the bundled families


def test_example1_mirror_symmetry():
    (T,) = build_example("example1")
    rng = random.Random(21)
    for _ in range(100):
        x = F(rng.randint(0, 3600), 3600)
        assert T.eval(x) == 1 - T.eval(1 - x)


def test_example3_second_generator_mirror_symmetry():
    T2 = build_example("example3")[1]
    rng = random.Random(22)
    seen = 0
    while seen < 100:
        x = F(rng.randint(0, 3600), 3600)
        if x == F(1, 2):
            continue  # the override pins the midpoint asymmetrically
        assert T2.eval(x) == 1 - T2.eval(1 - x)
        seen += 1


def test_breakpoints_are_reported():
    T = _doubling()
    bps = T.breakpoints()
    assert F(1, 2) in bps
