import pytest

from cybundle.bundles import obstruction_check, surjectivity_certificate
from cybundle.charmap import StructureGroupDesc
from cybundle.errors import RmError
from cybundle.lattice import IntMatrix
from cybundle.picard import ManifoldDescriptor, catalog_entry
from cybundle.rm import RmGroup, build_abelian_cy_bundle, character_group, sufficiency_check
from cybundle.state import Verdict


@pytest.mark.parametrize("name", ["P1", "P2", "P3", "P4"])
def test_single_torus_over_projective_space(name):
    base = catalog_entry(name)
    g = RmGroup(1, 0)
    assert sufficiency_check(g, base).verdict is Verdict.SUFFICIENT
    bundle = build_abelian_cy_bundle(g, base)
    assert bundle.group == StructureGroupDesc(1)
    cy = obstruction_check(bundle)
    assert cy.solvable
    assert cy.particular.torus == (-(base.dim + 1),)


def test_genus_two_curve():
    base = catalog_entry("curveG2")
    report = sufficiency_check(RmGroup(1, 4), base)
    assert report.verdict is Verdict.SUFFICIENT
    assert (report.generator_count, report.pi1_free_rank) == (1, 4)
    bundle = build_abelian_cy_bundle(RmGroup(1, 4), base)
    assert bundle.group == StructureGroupDesc(1, 4)
    assert obstruction_check(bundle).solvable
    cert = surjectivity_certificate(bundle, samples=6, seed=2)
    assert cert.passed
    assert cert.kernel_dim == 2

    assert sufficiency_check(RmGroup(1, 3), base).verdict is Verdict.UNKNOWN
    assert sufficiency_check(RmGroup(0, 4), base).verdict is Verdict.INSUFFICIENT
    with pytest.raises(RmError):
        build_abelian_cy_bundle(RmGroup(1, 3), base)


def test_complex_torus_needs_only_vector_factor():
    base = catalog_entry("torusG1")
    g = RmGroup(0, 2, 0)
    assert sufficiency_check(g, base).verdict is Verdict.SUFFICIENT
    bundle = build_abelian_cy_bundle(g, base)
    assert bundle.group == StructureGroupDesc(0, 2)
    assert obstruction_check(bundle).solvable


def test_padding_columns_are_zero():
    base = catalog_entry("P2")
    bundle = build_abelian_cy_bundle(RmGroup(5, 7, 3), base)
    assert bundle.group == StructureGroupDesc(5, 7, 3)
    assert bundle.char_map.free_block == IntMatrix.from_rows([[1, 0, 0, 0, 0]])
    assert bundle.char_map.continuous_kernel_dim == 0
    assert bundle.name.startswith("rm(")


def test_torsion_generators_count():
    base = catalog_entry("enriques-like")
    assert sufficiency_check(RmGroup(10, 0), base).verdict is Verdict.UNKNOWN
    assert sufficiency_check(RmGroup(9, 0), base).verdict is Verdict.INSUFFICIENT
    bundle = build_abelian_cy_bundle(RmGroup(11, 0), base)
    cy = obstruction_check(bundle)
    assert cy.solvable
    assert surjectivity_certificate(bundle).passed


def test_character_group_ignores_cousin_factor():
    cg = character_group(RmGroup(2, 3, 4))
    assert (cg.lattice_rank, cg.continuous_dim, cg.cousin_contribution) == (2, 3, 0)
    assert str(cg) == "Z^2 + C^3"
    assert character_group(RmGroup(0, 0, 5)).is_trivial


def test_rm_group_validation_and_json():
    with pytest.raises(RmError):
        RmGroup(-1, 0)
    g = RmGroup(2, 1, 3)
    assert RmGroup.from_json(g.to_json()) == g


def test_non_kahler_base_is_rejected():
    data = catalog_entry("torusG1").to_json()
    data["kahler"] = False
    with pytest.raises(RmError):
        sufficiency_check(RmGroup(0, 2), ManifoldDescriptor.from_json(data))
