"""Connected abelian structure groups (C*)^a x C^b x G0 and CY bundles with onto character maps."""

from dataclasses import dataclass
from typing import Any

from loguru import logger

from .bundles import (
    PrincipalBundle,
    Provenance,
    direct_sum_bundle,
    induced_bundle,
    universal_cover_bundle,
    whitney_sum_bundle,
)
from .charmap import CharacterMap, GroupHom, StructureGroupDesc
from .errors import RmError
from .lattice import RatMatrix
from .picard import ManifoldDescriptor
from .state import ProvenanceKind, Verdict


@dataclass(frozen=True)
class RmGroup:
    a: int = 0
    b: int = 0
    cousin_dim: int = 0
    cousin_label: str = "G0"

    def __post_init__(self):
        if min(self.a, self.b, self.cousin_dim) < 0:
            raise RmError(f"group ranks must be nonnegative, got ({self.a}, {self.b}, {self.cousin_dim})")

    def structure_group(self) -> StructureGroupDesc:
        return StructureGroupDesc(self.a, self.b, self.cousin_dim)

    def __str__(self) -> str:
        return f"(C*)^{self.a} x C^{self.b} x {self.cousin_label}[{self.cousin_dim}]"

    def to_json(self) -> dict[str, Any]:
        return {"torus_rank": self.a, "vector_rank": self.b, "cousin_dim": self.cousin_dim}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "RmGroup":
        return cls(int(data.get("torus_rank", 0)), int(data.get("vector_rank", 0)), int(data.get("cousin_dim", 0)))


@dataclass(frozen=True)
class CharacterGroupDesc:
    lattice_rank: int
    continuous_dim: int
    cousin_contribution: int = 0

    @property
    def is_trivial(self) -> bool:
        return self.lattice_rank == 0 and self.continuous_dim == 0

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        parts = []
        if self.lattice_rank:
            parts.append(f"Z^{self.lattice_rank}")
        if self.continuous_dim:
            parts.append(f"C^{self.continuous_dim}")
        return " + ".join(parts)

    def to_json(self) -> dict[str, Any]:
        return {
            "lattice_rank": self.lattice_rank,
            "continuous_dim": self.continuous_dim,
            "cousin_contribution": self.cousin_contribution,
        }


def character_group(g: RmGroup) -> CharacterGroupDesc:
    # a Cousin group has no non-constant holomorphic functions, hence no characters
    return CharacterGroupDesc(g.a, g.b, 0)


@dataclass(frozen=True)
class SufficiencyReport:
    verdict: Verdict
    reason: str
    generator_count: int
    pi1_free_rank: int

    def to_json(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "reason": self.reason,
            "generator_count": self.generator_count,
            "pi1_free_rank": self.pi1_free_rank,
        }


def sufficiency_check(g: RmGroup, base: ManifoldDescriptor) -> SufficiencyReport:
    """Decide whether g is known to carry a CY bundle over base with onto character map.

    generator_count counts generators of the whole NS group, torsion included.
    """
    if not base.kahler:
        raise RmError("Pic0 realization requires Kahler hypothesis", {"manifold": base.name})
    p = base.ns_free_rank + base.ns_torsion.torsion_rank
    q = base.q
    if g.a < base.ns_free_rank:
        verdict = Verdict.INSUFFICIENT
        reason = f"torus rank {g.a} < NS free rank {base.ns_free_rank}: Z^{g.a} cannot surject onto Z^{base.ns_free_rank}"
    elif g.a >= p and g.b >= q:
        verdict = Verdict.SUFFICIENT
        reason = f"a = {g.a} >= {p} NS generators and b = {g.b} >= pi1 free rank {q}"
    else:
        verdict = Verdict.UNKNOWN
        reason = f"(a, b) = ({g.a}, {g.b}) misses ({p}, {q}); onto character maps are neither guaranteed nor excluded"
    logger.debug(f"{g} over {base.name}: {verdict.value} ({reason})")
    return SufficiencyReport(verdict, reason, p, q)


def _pi1_to_vector(base: ManifoldDescriptor) -> GroupHom:
    # pi1 -> Z^q (drop torsion) -> C^q
    source = StructureGroupDesc(pi1_factor=base.pi1_ab)
    target = StructureGroupDesc(vector_rank=base.q)
    return GroupHom.build(source, target, pi1_to_vector=RatMatrix.identity(base.q))


def build_abelian_cy_bundle(g: RmGroup, base: ManifoldDescriptor) -> PrincipalBundle:
    report = sufficiency_check(g, base)
    if report.verdict is not Verdict.SUFFICIENT:
        raise RmError(f"{g} is not known to suffice over {base.name}: {report.reason}", report.to_json())
    p, q = report.generator_count, report.pi1_free_rank

    parts = []
    if p:
        generators = [base.ns_generator(i) for i in range(base.ns_free_rank)]
        generators += [base.torsion_generator(j) for j in range(base.ns_torsion.torsion_rank)]
        parts.append(whitney_sum_bundle(base, generators, name="ns-generators"))
    if q:
        parts.append(induced_bundle(universal_cover_bundle(base), _pi1_to_vector(base), name="pi1-to-vector"))
    padding_group = StructureGroupDesc(g.a - p, g.b - q, g.cousin_dim)
    if padding_group.coordinate_count or padding_group.cousin_dim or not parts:
        parts.append(
            PrincipalBundle(
                "padding",
                padding_group,
                base,
                CharacterMap.zero(padding_group, base),
                Provenance(ProvenanceKind.CUSTOM, detail={"trivial": True}),
            )
        )

    bundle = parts[0]
    for part in parts[1:]:
        bundle = direct_sum_bundle(bundle, part)
    bundle = PrincipalBundle(
        f"rm({g}, {base.name})",
        bundle.group,
        base,
        bundle.char_map,
        Provenance(ProvenanceKind.DIRECT_SUM, detail={"summands": [part.name for part in parts]}),
    )
    logger.info(f"Built {bundle.name} with group {bundle.group}")
    return bundle
