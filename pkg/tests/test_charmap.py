import random
from fractions import Fraction

import pytest

from cybundle.charmap import CharacterMap, GroupHom, StructureGroupDesc
from cybundle.errors import BundleError
from cybundle.fga import FgaGroup, FgaHom
from cybundle.lattice import IntMatrix, RatMatrix
from cybundle.picard import catalog_entry

CURVE = catalog_entry("curveG1")


def frac(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-6, 6), rng.randint(1, 4))


def rat(rng: random.Random, rows: int, cols: int, gen) -> RatMatrix:
    return RatMatrix.from_rows([[gen() for _ in range(cols)] for _ in range(rows)], cols)


def random_group(rng: random.Random) -> StructureGroupDesc:
    pi1 = FgaGroup(rng.randint(0, 2), (2,) if rng.random() < 0.5 else ())
    return StructureGroupDesc(rng.randint(0, 2), rng.randint(0, 2), 0, pi1)


def random_pi1_hom(rng: random.Random, source: FgaGroup, target: FgaGroup) -> FgaHom:
    rows = []
    for i in range(target.coordinate_count):
        free_row = i < target.free_rank
        rows.append(
            [
                0 if free_row and j >= source.free_rank else rng.randint(-2, 2)
                for j in range(source.coordinate_count)
            ]
        )
    return FgaHom(source, target, IntMatrix.from_rows(rows, source.coordinate_count))


def random_hom(rng: random.Random, h: StructureGroupDesc, k: StructureGroupDesc) -> GroupHom:
    q = h.pi1_free_rank

    def pi1_to_torus_entry(j):
        return frac(rng) if j < q else Fraction(rng.randint(-3, 3), 2)

    return GroupHom.build(
        h,
        k,
        torus=IntMatrix.from_rows(
            [[rng.randint(-2, 2) for _ in range(h.torus_rank)] for _ in range(k.torus_rank)], h.torus_rank
        ),
        vector=rat(rng, k.vector_rank, h.vector_rank, lambda: frac(rng)),
        vector_to_torus=rat(rng, k.torus_rank, h.vector_rank, lambda: frac(rng)),
        pi1_to_torus=RatMatrix.from_rows(
            [[pi1_to_torus_entry(j) for j in range(h.pi1_group.coordinate_count)] for _ in range(k.torus_rank)],
            h.pi1_group.coordinate_count,
        ),
        pi1_to_vector=rat(rng, k.vector_rank, q, lambda: frac(rng)),
        pi1=random_pi1_hom(rng, h.pi1_group, k.pi1_group),
    )


def random_char_map(rng: random.Random, group: StructureGroupDesc) -> CharacterMap:
    torus, vector, free, tors = group.slices()

    def entry(j):
        if j in free:
            return Fraction(rng.randint(-3, 3))
        if j in tors:
            return Fraction(rng.randint(-3, 3), 2)
        return frac(rng)

    pic0 = RatMatrix.from_rows(
        [[entry(j) for j in range(group.coordinate_count)] for _ in range(2 * CURVE.pic0_dim)],
        group.coordinate_count,
    )
    return CharacterMap(
        group,
        CURVE,
        IntMatrix.from_rows([[rng.randint(-3, 3) for _ in range(group.torus_rank)]], group.torus_rank),
        FgaHom.zero(group.discrete_group, CURVE.ns_torsion),
        pic0,
    )


def random_character(rng: random.Random, group: StructureGroupDesc):
    return group.character(
        [rng.randint(-5, 5) for _ in range(group.torus_rank)],
        [frac(rng) for _ in range(group.vector_rank)],
        [frac(rng) for _ in range(group.pi1_free_rank)],
        [rng.randint(0, 1) for _ in range(group.torsion_rank)],
    )


def test_character_map_is_a_homomorphism():
    rng = random.Random(2718)
    for _ in range(100):
        group = random_group(rng)
        cm = random_char_map(rng, group)
        a, b = random_character(rng, group), random_character(rng, group)
        assert cm(a + b) == cm(a) + cm(b)
        assert cm(-a) == -cm(a)
        assert cm(group.zero_character()).is_zero()


def test_dual_is_contravariant():
    rng = random.Random(161)
    for _ in range(150):
        h, k, l = random_group(rng), random_group(rng), random_group(rng)
        inner, outer = random_hom(rng, h, k), random_hom(rng, k, l)
        cm = random_char_map(rng, h)
        stepwise = cm.precompose(inner.dual()).precompose(outer.dual())
        at_once = cm.precompose(outer.compose(inner).dual())
        assert stepwise == at_once


def test_dual_matrix_composes_exactly_on_tori():
    rng = random.Random(3)
    for _ in range(50):
        h, k, l = (StructureGroupDesc(rng.randint(1, 3)) for _ in range(3))
        inner, outer = random_hom(rng, h, k), random_hom(rng, k, l)
        assert outer.compose(inner).dual().matrix == inner.dual().compose(outer.dual()).matrix


def test_dual_pulls_back_characters():
    h = StructureGroupDesc(2)
    k = StructureGroupDesc(1)
    f = GroupHom.build(h, k, torus=IntMatrix.from_rows([[2, -1]]))
    chi = k.character((3,))
    assert f.dual()(chi) == h.character((6, -3))


def test_identity_and_inverse():
    rng = random.Random(77)
    for _ in range(30):
        group = random_group(rng)
        cm = random_char_map(rng, group)
        assert cm.precompose(GroupHom.identity(group).dual()) == cm
    g = StructureGroupDesc(2, 1)
    sigma = GroupHom.build(
        g, g, torus=IntMatrix.from_rows([[1, 1], [0, 1]]), vector=RatMatrix.from_rows([[Fraction(1, 2)]])
    )
    assert sigma.is_automorphism()
    assert sigma.compose(sigma.inverse()) == GroupHom.identity(g)


def test_invalid_homomorphisms():
    c2 = StructureGroupDesc(pi1_factor=FgaGroup.cyclic(2))
    t1 = StructureGroupDesc(1)
    with pytest.raises(BundleError):
        GroupHom.build(c2, t1, pi1_to_torus=RatMatrix.from_rows([[Fraction(1, 3)]]))
    with pytest.raises(BundleError):
        GroupHom.build(t1, t1, torus=IntMatrix.from_rows([[1, 0]]))
    with pytest.raises(BundleError):
        GroupHom.build(t1, t1, shear=IntMatrix.identity(1))
    mixing = GroupHom.build(
        StructureGroupDesc(1, 1),
        StructureGroupDesc(1, 1),
        torus=IntMatrix.identity(1),
        vector=RatMatrix.identity(1),
        vector_to_torus=RatMatrix.from_rows([[1]]),
    )
    with pytest.raises(BundleError):
        mixing.inverse()


def test_pi1_to_torus_is_read_mod_one():
    g = StructureGroupDesc(pi1_factor=FgaGroup(1, (2,)))
    t = StructureGroupDesc(1)
    f = GroupHom.build(g, t, pi1_to_torus=RatMatrix.from_rows([[Fraction(5, 4), Fraction(-1, 2)]]))
    assert f.pi1_to_torus == RatMatrix.from_rows([[Fraction(1, 4), Fraction(1, 2)]])


def test_character_map_block_checks():
    g = StructureGroupDesc(pi1_factor=FgaGroup(1, (2,)))
    with pytest.raises(BundleError):
        CharacterMap(
            g,
            CURVE,
            IntMatrix.zeros(1, 0),
            FgaHom.zero(g.discrete_group, CURVE.ns_torsion),
            RatMatrix.from_rows([[Fraction(1, 2), 0], [0, 0]]),
        )
    with pytest.raises(BundleError):
        CharacterMap(
            g,
            CURVE,
            IntMatrix.zeros(1, 0),
            FgaHom.zero(g.discrete_group, CURVE.ns_torsion),
            RatMatrix.from_rows([[0, Fraction(1, 3)], [0, 0]]),
        )


def test_character_map_json_round_trip():
    rng = random.Random(11)
    for _ in range(20):
        cm = random_char_map(rng, random_group(rng))
        assert CharacterMap.from_json(cm.to_json()) == cm
        assert CharacterMap.from_json(cm.to_json(include_context=False), cm.group, CURVE) == cm


def test_direct_sum_of_maps():
    p2 = catalog_entry("P2")
    first = CharacterMap.from_classes(p2, [p2.pic_element((1,))])
    second = CharacterMap.from_classes(p2, [p2.pic_element((-2,)), p2.pic_element((3,))])
    total = first.direct_sum(second)
    assert total.group == StructureGroupDesc(3)
    assert total.free_block == IntMatrix.from_rows([[1, -2, 3]])
    chi = total.group.character((1, 1, 1))
    assert total(chi) == p2.pic_element((2,))
