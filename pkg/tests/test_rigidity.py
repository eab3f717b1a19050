import itertools
import math
from fractions import Fraction

from cybundle.bundles import _kernel_offsets, rigidity_solve, twist_bundle, universal_cover_bundle, whitney_sum_bundle
from cybundle.lattice import IntMatrix
from cybundle.picard import catalog_entry
from cybundle.state import RigidityOutcome

P2 = catalog_entry("P2")
CURVE = catalog_entry("curveG1")


def over_p2(*degrees):
    return whitney_sum_bundle(P2, [P2.pic_element((d,)) for d in degrees])


def over_curve(*classes):
    return whitney_sum_bundle(CURVE, [CURVE.pic_element((f,), (), pic0) for f, pic0 in classes])


# GL_2(Z) elements with entries in [-5, 5], as (a, b, c, d) for [[a, b], [c, d]]
GL2_BOX = [
    (a, b, c, d) for a, b, c, d in itertools.product(range(-5, 6), repeat=4) if abs(a * d - b * c) == 1
]


def assert_twist_matches(m, n, result):
    assert result.outcome is RigidityOutcome.FOUND
    assert result.xi.is_unimodular()
    assert n.char_map.free_block @ result.xi == m.char_map.free_block
    assert twist_bundle(n, result.xi_dual).char_map == m.char_map


def test_dual_line_bundles():
    m, n = over_p2(-1), over_p2(1)
    result = rigidity_solve(m, n)
    assert result.xi == IntMatrix.from_rows([[-1]])
    assert_twist_matches(m, n, result)


def test_identical_maps_give_identity():
    result = rigidity_solve(over_p2(2, 3), over_p2(2, 3))
    assert result.outcome is RigidityOutcome.FOUND
    assert result.xi == IntMatrix.identity(2)


def test_different_degrees_are_rigid():
    assert rigidity_solve(over_p2(1), over_p2(2)).outcome is RigidityOutcome.ABSENT
    assert rigidity_solve(over_p2(2), over_p2(1)).outcome is RigidityOutcome.ABSENT


def test_rank_one_brute_force():
    for a, b in itertools.product(range(-4, 5), repeat=2):
        expected = abs(a) == abs(b)
        result = rigidity_solve(over_p2(a), over_p2(b))
        assert (result.outcome is RigidityOutcome.FOUND) == expected, (a, b)


def test_rank_two_brute_force():
    # over P2 a rank-two torus bundle is determined up to twist by gcd(a, b)
    pairs = list(itertools.product(range(-2, 3), repeat=2))
    for (a, b), (c, d) in itertools.product(pairs, repeat=2):
        m, n = over_p2(a, b), over_p2(c, d)
        result = rigidity_solve(m, n)
        witness = any(c * xa + d * xc == a and c * xb + d * xd == b for xa, xb, xc, xd in GL2_BOX)
        if witness:
            assert result.outcome is RigidityOutcome.FOUND, (a, b, c, d)
        assert (result.outcome is RigidityOutcome.FOUND) == (math.gcd(a, b) == math.gcd(c, d)), (a, b, c, d)
        if result.outcome is RigidityOutcome.FOUND:
            assert_twist_matches(m, n, result)


def test_search_through_torsion_encoding():
    half = (Fraction(1, 2), Fraction(0))
    zero = (Fraction(0), Fraction(0))
    m = over_curve((1, half))
    n = over_curve((-1, half))
    result = rigidity_solve(m, n)
    assert result.xi == IntMatrix.from_rows([[-1]])
    assert_twist_matches(m, n, result)

    assert rigidity_solve(over_curve((1, half)), over_curve((1, zero))).outcome is RigidityOutcome.ABSENT

    m = over_curve((1, zero), (1, half))
    n = over_curve((1, zero), (0, half))
    result = rigidity_solve(m, n)
    assert result.xi == IntMatrix.from_rows([[1, 1], [0, 1]])
    assert_twist_matches(m, n, result)


def test_mismatched_images_are_absent():
    half = (Fraction(1, 2), Fraction(0))
    zero = (Fraction(0), Fraction(0))
    m = over_curve((0, zero), (1, zero))
    n = over_curve((1, zero), (0, half))
    assert rigidity_solve(m, n, search_radius=2).outcome is RigidityOutcome.ABSENT

    base = catalog_entry("enriques-like")
    t = base.torsion_generator(0)
    for p in (2, 3):
        m = whitney_sum_bundle(base, [base.pic_zero()] * p)
        n = whitney_sum_bundle(base, [t] + [base.pic_zero()] * (p - 1))
        result = rigidity_solve(m, n)
        assert result.outcome is RigidityOutcome.ABSENT
        assert result.candidates_checked == 0


def test_exhausted_search_is_undecided():
    # both images are generated by (1/5, 0); no unit multiple of 2/5 is 1/5
    m = over_curve((0, (Fraction(1, 5), Fraction(0))))
    n = over_curve((0, (Fraction(2, 5), Fraction(0))))
    result = rigidity_solve(m, n, search_radius=2)
    assert result.outcome is RigidityOutcome.UNDECIDED
    assert result.candidates_checked == 5

    capped = rigidity_solve(m, n, search_radius=10, max_candidates=3)
    assert capped.outcome is RigidityOutcome.UNDECIDED
    assert capped.candidates_checked == 3


def test_search_order_is_by_coefficient_size():
    offsets = list(_kernel_offsets(2, 1))
    assert offsets[0] == (0, 0)
    assert offsets[1:5] == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert len(offsets) == 9
    assert len(set(offsets)) == 9


def test_non_torus_groups_are_unsupported():
    cover = universal_cover_bundle(CURVE)
    result = rigidity_solve(cover, cover)
    assert result.outcome is RigidityOutcome.UNSUPPORTED
    assert result.to_json()["xi"] is None
