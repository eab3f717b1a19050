"""Exact character-map calculations for principal bundles over compact complex manifolds."""

from .bundles import (
    CyStructureSet,
    PrincipalBundle,
    RigidityResult,
    adjunction_character,
    bundle_from_lambda,
    construct_surjective_bundle,
    direct_sum_bundle,
    induced_bundle,
    is_cy_character,
    obstruction_check,
    rank1_roots,
    rigidity_solve,
    surjectivity_certificate,
    twist_bundle,
    universal_cover_bundle,
    whitney_sum_bundle,
)
from .charmap import Character, CharacterDual, CharacterMap, GroupHom, StructureGroupDesc
from .errors import CyBundleError
from .fga import FgaElement, FgaGroup, FgaHom
from .picard import ManifoldDescriptor, PicElement, catalog_entry, load_descriptor
from .rm import RmGroup, build_abelian_cy_bundle, character_group, sufficiency_check
from .state import ProvenanceKind, RigidityOutcome, Verdict
from .toric import Fan, audin_cox_bundle, check_smooth_complete, cox_data

__all__ = [
    "FgaGroup",
    "FgaElement",
    "FgaHom",
    "PicElement",
    "ManifoldDescriptor",
    "catalog_entry",
    "load_descriptor",
    "StructureGroupDesc",
    "Character",
    "CharacterMap",
    "CharacterDual",
    "GroupHom",
    "PrincipalBundle",
    "CyStructureSet",
    "RigidityResult",
    "RigidityOutcome",
    "ProvenanceKind",
    "Verdict",
    "whitney_sum_bundle",
    "universal_cover_bundle",
    "direct_sum_bundle",
    "obstruction_check",
    "is_cy_character",
    "adjunction_character",
    "rank1_roots",
    "rigidity_solve",
    "bundle_from_lambda",
    "construct_surjective_bundle",
    "surjectivity_certificate",
    "induced_bundle",
    "twist_bundle",
    "Fan",
    "check_smooth_complete",
    "cox_data",
    "audin_cox_bundle",
    "RmGroup",
    "character_group",
    "sufficiency_check",
    "build_abelian_cy_bundle",
    "CyBundleError",
]
