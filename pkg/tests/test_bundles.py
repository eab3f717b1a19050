import itertools
import math
import random
from fractions import Fraction

import pytest

from cybundle.bundles import (
    PrincipalBundle,
    adjunction_character,
    bundle_from_lambda,
    construct_surjective_bundle,
    direct_sum_bundle,
    induced_bundle,
    is_cy_character,
    obstruction_check,
    rank1_roots,
    surjectivity_certificate,
    twist_bundle,
    universal_cover_bundle,
    whitney_sum_bundle,
)
from cybundle.charmap import CharacterMap, GroupHom, StructureGroupDesc
from cybundle.errors import BundleError, InputError
from cybundle.lattice import IntMatrix, RatMatrix, lattice_contains
from cybundle.picard import ManifoldDescriptor, catalog, catalog_entry
from cybundle.state import ProvenanceKind

PROJECTIVE = ["P1", "P2", "P3", "P4"]


def line_sum(base: ManifoldDescriptor, *degrees: int) -> PrincipalBundle:
    return whitney_sum_bundle(base, [base.pic_element((d,)) for d in degrees])


@pytest.mark.parametrize("name", PROJECTIVE)
def test_tautological_pair_structures(name):
    base = catalog_entry(name)
    n = base.dim
    b = line_sum(base, -1, -1)
    cy = obstruction_check(b)
    assert cy.solvable
    assert cy.particular.torus == (n + 1, 0)
    assert cy.kernel.lattice_basis == ((1, -1),)
    # every CY character is particular + c * (1, -1)
    for k, l in itertools.product(range(-12, 13), repeat=2):
        chi = b.group.character((k, l))
        assert is_cy_character(b, chi) == (k + l == n + 1)


def test_unsolvable_obstruction():
    b = line_sum(catalog_entry("P3"), -3)
    cy = obstruction_check(b)
    assert not cy.solvable
    assert cy.particular is None
    with pytest.raises(BundleError):
        adjunction_character(b, cy)


def test_obstruction_matches_gcd_oracle():
    rng = random.Random(200)
    for _ in range(200):
        base = catalog_entry(rng.choice(PROJECTIVE))
        degrees = [rng.randint(-5, 5) for _ in range(rng.randint(1, 3))]
        cy = obstruction_check(line_sum(base, *degrees))
        g = math.gcd(*degrees)
        assert cy.solvable == (g != 0 and (base.dim + 1) % g == 0), degrees
        if cy.solvable:
            assert sum(d * k for d, k in zip(degrees, cy.particular.torus)) == -(base.dim + 1)



def random_class(rng: random.Random, base: ManifoldDescriptor):
    free = [rng.randint(-2, 2) for _ in range(base.ns_free_rank)] if rng.random() < 0.7 else ()
    torsion = [rng.randrange(n) for n in base.ns_torsion.invariant_factors]
    pic0 = [Fraction(rng.randrange(d), d) for d in (rng.choice((1, 2, 3, 4)) for _ in range(2 * base.pic0_dim))]
    return base.pic_element(free, torsion, pic0)


@pytest.mark.parametrize("name", ["enriques-like", "curveG1", "curveG2"])
def test_obstruction_matches_exhaustive_search(name):
    base = catalog_entry(name)
    rng = random.Random(name)
    for _ in range(3):
        b = whitney_sum_bundle(base, [random_class(rng, base) for _ in range(rng.randint(1, 3))])
        cy = obstruction_check(b)
        box = itertools.product(range(-10, 11), repeat=b.group.torus_rank)
        found = [k for k in box if b.char_map.evaluate(b.group.character(torus=k)) == base.canonical_class]
        assert cy.solvable or not found, (b.name, found[:3])
        if not cy.solvable:
            continue
        assert is_cy_character(b, cy.particular)
        for k in found:
            diff = tuple(x - y for x, y in zip(k, cy.particular.torus))
            assert lattice_contains(cy.kernel.lattice_basis, diff), (b.name, k)


def test_obstruction_with_torsion_canonical_class():
    base = catalog_entry("enriques-like")
    t = base.torsion_generator(0)
    cy = obstruction_check(whitney_sum_bundle(base, [t, t]))
    assert cy.solvable
    assert sum(cy.particular.torus) % 2 == 1
    assert lattice_contains(cy.kernel.lattice_basis, (1, -1))
    assert lattice_contains(cy.kernel.lattice_basis, (2, 0))
    assert not lattice_contains(cy.kernel.lattice_basis, (1, 0))
    e1 = base.pic_element((2,) + (0,) * 9)
    assert not obstruction_check(whitney_sum_bundle(base, [e1])).solvable


def test_adjunction_character_of_abelian_group():
    b = line_sum(catalog_entry("P2"), -1, -1)
    cy = obstruction_check(b)
    assert adjunction_character(b, cy) == cy.particular


@pytest.mark.parametrize("name, expected", [("P1", 2), ("P2", 3), ("P3", 4), ("P4", 5)])
def test_rank1_roots_of_projective_spaces(name, expected):
    roots = rank1_roots(catalog_entry(name))
    assert not roots.every_integer
    divisors = [d for d in range(1, expected + 1) if expected % d == 0]
    assert sorted(roots.ks) == sorted(divisors + [-d for d in divisors])
    for r in roots.roots:
        assert r.k * r.root.free_part[0] == -expected
        assert r.torsion_translates == 1


def test_rank1_roots_trivial_and_rejected():
    roots = rank1_roots(catalog_entry("curveG1"))
    assert roots.every_integer
    roots = rank1_roots(catalog_entry("curveG2"))
    assert sorted(roots.ks) == [-2, -1, 1, 2]
    assert {r.k: r.torsion_translates for r in roots.roots}[2] == 16
    with pytest.raises(BundleError):
        rank1_roots(catalog_entry("P1xP1"))
    with pytest.raises(BundleError):
        rank1_roots(catalog_entry("enriques-like"))


def test_whitney_sum_requires_classes():
    with pytest.raises(BundleError):
        whitney_sum_bundle(catalog_entry("P2"), [])


@pytest.mark.parametrize("m", catalog(), ids=lambda m: m.name)
def test_construct_surjective_over_catalog(m):
    bundle = construct_surjective_bundle(m)
    assert bundle.group.torus_rank == m.ns_free_rank
    assert bundle.group.pi1_group == m.pi1_ab
    cert = surjectivity_certificate(bundle, samples=8, seed=4)
    assert cert.passed
    assert cert.kernel_dim == m.omega1c_dim
    assert obstruction_check(bundle).solvable


def test_surjective_bundle_over_genus_two_curve():
    bundle = construct_surjective_bundle(catalog_entry("curveG2"))
    cert = surjectivity_certificate(bundle, samples=20, seed=0)
    assert cert.passed
    assert cert.kernel_dim == 2
    assert len(cert.checks) == 21


def test_construct_surjective_needs_kahler():
    data = catalog_entry("torusG1").to_json()
    data["kahler"] = False
    with pytest.raises(BundleError):
        construct_surjective_bundle(ManifoldDescriptor.from_json(data))


def test_universal_cover_and_direct_sum():
    base = catalog_entry("curveG1")
    cover = universal_cover_bundle(base)
    assert cover.provenance.kind is ProvenanceKind.UNIVERSAL_COVER
    total = direct_sum_bundle(cover, line_sum(base, 1))
    assert total.group == StructureGroupDesc(1, 0, 0, base.pi1_ab)
    chi = total.group.character((2,), (), (Fraction(1, 3), Fraction(1, 2)))
    assert total.char_map(chi) == base.pic_element((2,), (), (Fraction(1, 3), Fraction(1, 2)))
    with pytest.raises(BundleError):
        direct_sum_bundle(cover, line_sum(catalog_entry("P1"), 1))


def test_induced_identity_and_composition():
    base = catalog_entry("P2")
    b = line_sum(base, 1, -2)
    assert induced_bundle(b, GroupHom.identity(b.group)).char_map == b.char_map
    h = StructureGroupDesc(2)
    k = StructureGroupDesc(3)
    inner = GroupHom.build(h, h, torus=IntMatrix.from_rows([[2, 1], [1, 1]]))
    outer = GroupHom.build(h, k, torus=IntMatrix.from_rows([[1, 0], [0, 1], [1, -1]]))
    stepwise = induced_bundle(induced_bundle(b, inner), outer)
    at_once = induced_bundle(b, outer.compose(inner))
    assert stepwise.char_map == at_once.char_map


def test_induced_to_vector_group_drops_torus_classes():
    base = catalog_entry("curveG1")
    cover = universal_cover_bundle(base)
    f = GroupHom.build(
        cover.group, StructureGroupDesc(vector_rank=2), pi1_to_vector=RatMatrix.identity(2)
    )
    induced = induced_bundle(cover, f)
    assert induced.char_map.pic0_block == RatMatrix.identity(2)
    assert induced.char_map.continuous_kernel_dim == base.omega1c_dim


def test_twist_round_trip():
    base = catalog_entry("P1xP1")
    b = whitney_sum_bundle(base, [base.pic_element((1, 0)), base.pic_element((1, 1))])
    sigma = GroupHom.torus_automorphism(b.group, IntMatrix.from_rows([[1, 2], [0, 1]]))
    back = twist_bundle(twist_bundle(b, sigma), sigma.inverse())
    assert back.char_map == b.char_map
    assert twist_bundle(b, GroupHom.identity(b.group)).char_map == b.char_map
    with pytest.raises(BundleError):
        twist_bundle(b, GroupHom.torus_automorphism(b.group, IntMatrix.from_rows([[2, 0], [0, 1]])))


def test_bundle_from_lambda():
    base = catalog_entry("P2")
    lam = CharacterMap.from_classes(base, [base.pic_element((2,)), base.pic_element((-1,))])
    b = bundle_from_lambda(base, lam)
    assert b.char_map == lam
    trivial = bundle_from_lambda(base, CharacterMap.zero(StructureGroupDesc(), base))
    assert trivial.group.coordinate_count == 0
    with pytest.raises(BundleError):
        bundle_from_lambda(base, CharacterMap.zero(StructureGroupDesc(1, 1), base))


def test_bundle_json_round_trip():
    base = catalog_entry("curveG1")
    b = direct_sum_bundle(universal_cover_bundle(base), line_sum(base, 3))
    again = PrincipalBundle.from_json(b.to_json())
    assert again == b
    assert again.provenance.kind is ProvenanceKind.DIRECT_SUM
    short = PrincipalBundle.from_json({"name": "O(1)", "classes": [{"free": [1]}]}, catalog_entry("P1"))
    assert short.char_map.free_block == IntMatrix.from_rows([[1]])
    assert PrincipalBundle.from_json({"base": "P1", "classes": [{"free": [2]}]}).base.name == "P1"
    with pytest.raises(InputError):
        PrincipalBundle.from_json({"classes": [{"free": [1]}]})
    with pytest.raises(InputError):
        PrincipalBundle.from_json({"name": "x", "group": {"torus_rank": 1}}, catalog_entry("P1"))
    with pytest.raises(InputError):
        PrincipalBundle.from_json({"base": "P2", "classes": [{"free": [1]}]}, catalog_entry("P1"))
