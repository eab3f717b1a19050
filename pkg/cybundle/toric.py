"""Smooth complete toric varieties from fans, and their Audin-Cox bundles.

Cox coordinates are indexed by rays. The class group is coker(Z^d -> Z^t, m -> (<m, rho_i>)_i)
and the Audin-Cox bundle is the (C*)^(t-d) bundle whose character map identifies Cl with Pic.
"""

import json
import math
import pathlib
from dataclasses import dataclass
from typing import Any

from loguru import logger

from .bundles import PrincipalBundle, Provenance, bundle_from_lambda, obstruction_check, rigidity_solve
from .charmap import CharacterMap
from .errors import CyBundleError, InputError, ToricError
from .fga import FgaElement, FgaGroup, FgaHom, cokernel_projection, hom_cokernel
from .lattice import IntMatrix, hermite_normal_form, integer_kernel, rational_solve, vstack
from .picard import ManifoldDescriptor
from .state import ProvenanceKind, RigidityOutcome


@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]
    name: str = "fan"

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", cones)
        if self.dim < 1:
            raise ToricError(f"fan dimension {self.dim} must be positive")
        for i, r in enumerate(rays):
            if len(r) != self.dim:
                raise ToricError(f"ray {i} has {len(r)} coordinates, fan dimension is {self.dim}")
            if math.gcd(*r) != 1:
                raise ToricError(f"ray {i} = {list(r)} is not primitive")
        if len(set(rays)) != len(rays):
            raise ToricError("rays must be pairwise distinct")
        for c in cones:
            if not c or any(not 0 <= i < len(rays) for i in c):
                raise ToricError(f"cone {list(c)} refers to unknown rays")
        unused = set(range(len(rays))) - {i for c in cones for i in c}
        if unused:
            raise ToricError(f"rays {sorted(unused)} lie in no maximal cone")

    @property
    def ray_count(self) -> int:
        return len(self.rays)

    def ray_matrix(self) -> IntMatrix:
        """t x d, one row per ray: the map m -> (<m, rho_i>)_i."""
        return IntMatrix.from_rows(self.rays, self.dim)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Fan":
        try:
            return cls(int(data["dim"]), data["rays"], data["max_cones"], str(data.get("name", "fan")))
        except KeyError as e:
            raise InputError(f"fan JSON is missing field {e.args[0]!r}") from e
        except CyBundleError:
            raise
        except (ValueError, TypeError) as e:
            raise InputError(f"invalid fan JSON: {e}", {"name": str(data.get("name", "fan"))}) from e

    @classmethod
    def load(cls, path: str | pathlib.Path) -> "Fan":
        path = pathlib.Path(path)
        with open(path, "r", encoding="UTF-8") as f:
            data = json.load(f)
        data.setdefault("name", path.stem)
        return cls.from_json(data)


@dataclass(frozen=True)
class FanReport:
    simplicial: bool
    smooth: bool
    complete: bool
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.simplicial and self.smooth and self.complete

    def to_json(self) -> dict[str, Any]:
        return {
            "simplicial": self.simplicial,
            "smooth": self.smooth,
            "complete": self.complete,
            "failures": list(self.failures),
        }


def _cone_matrix(f: Fan, cone: tuple[int, ...]) -> IntMatrix:
    # columns are the rays of the cone
    return IntMatrix.from_columns([f.rays[i] for i in cone], f.dim)


def _facet_normal(f: Fan, facet: tuple[int, ...]) -> tuple[int, ...] | None:
    kernel = integer_kernel(IntMatrix.from_rows([f.rays[i] for i in facet], f.dim)) if facet else ()
    if len(kernel) != 1:
        return None
    return kernel[0]


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def check_smooth_complete(f: Fan) -> FanReport:
    """Smoothness by unimodular cones; completeness by facet pairing and a generic covering test.

    Only simplicial full-dimensional fans are handled. A cone count mismatch marks the
    fan as non-simplicial and both verdicts as failed.
    """
    failures = []
    simplicial = smooth = True
    for k, cone in enumerate(f.max_cones):
        if len(cone) != f.dim:
            simplicial = False
            failures.append(f"cone {k} {list(cone)} has {len(cone)} rays, not {f.dim}")
            continue
        det = _cone_matrix(f, cone).det()
        if det == 0:
            simplicial = False
            failures.append(f"cone {k} {list(cone)} is not full-dimensional")
        elif abs(det) != 1:
            smooth = False
            failures.append(f"cone {k} {list(cone)} has determinant {det}")
    if not simplicial:
        logger.debug(f"{f.name}: non-simplicial fans are not supported")
        return FanReport(False, False, False, tuple(failures))

    complete = True
    facets: dict[tuple[int, ...], list[tuple[int, int]]] = {}
    for k, cone in enumerate(f.max_cones):
        for omitted in cone:
            facet = tuple(i for i in cone if i != omitted)
            facets.setdefault(facet, []).append((k, omitted))
    normals = []
    for facet, owners in sorted(facets.items()):
        if len(owners) != 2:
            complete = False
            failures.append(f"facet {list(facet)} lies in {len(owners)} maximal cones, expected 2")
            continue
        normal = _facet_normal(f, facet) if f.dim > 1 else (1,)
        if normal is None:
            complete = False
            failures.append(f"facet {list(facet)} does not span a hyperplane")
            continue
        normals.append(normal)
        (k1, o1), (k2, o2) = owners
        s1, s2 = _dot(normal, f.rays[o1]), _dot(normal, f.rays[o2])
        if s1 * s2 >= 0:
            complete = False
            failures.append(f"cones {k1} and {k2} lie on the same side of facet {list(facet)}")

    if complete:
        # moment-curve point off every facet hyperplane
        step = 2 + max((abs(x) for n in normals for x in n), default=0)
        w = tuple(step**i for i in range(f.dim))
        covering = 0
        for cone in f.max_cones:
            coeffs = rational_solve(_cone_matrix(f, cone), w)
            if coeffs is not None and all(c > 0 for c in coeffs):
                covering += 1
        if covering != 1:
            complete = False
            failures.append(f"generic point {list(w)} lies in {covering} maximal cones")

    report = FanReport(True, smooth, complete, tuple(failures))
    logger.debug(f"{f.name}: smooth={smooth} complete={complete}")
    return report


@dataclass(frozen=True)
class CoxData:
    class_group: FgaGroup
    quotient_map: FgaHom
    canonical_class: FgaElement
    h_dim: int
    basis_change: IntMatrix

    def to_json(self) -> dict[str, Any]:
        return {
            "class_group": self.class_group.to_json(),
            "class_group_str": str(self.class_group),
            "quotient_map": self.quotient_map.matrix.to_json(),
            "canonical_class": self.canonical_class.to_json(),
            "h_dim": self.h_dim,
            "basis_change": self.basis_change.to_json(),
        }


def cox_data(f: Fan) -> CoxData:
    report = check_smooth_complete(f)
    if not report.passed:
        raise ToricError(f"{f.name} is not a smooth complete fan", report.to_json())
    raw = cokernel_projection(f.ray_matrix())
    group = raw.target
    # conventional basis: Hermite form of the free rows
    free_rows = raw.matrix.row_block(0, group.free_rank)
    h, u = hermite_normal_form(free_rows)
    matrix = vstack(h, raw.matrix.row_block(group.free_rank, raw.matrix.rows), cols=f.ray_count)
    quotient = FgaHom(raw.source, group, matrix)
    canonical = quotient.apply(raw.source.from_coordinates((-1,) * f.ray_count))
    logger.debug(f"{f.name}: Cl = {group}, K = {list(canonical.coordinates)}")
    return CoxData(group, quotient, canonical, f.ray_count - f.dim, u)


def descriptor_from_fan(f: Fan, cox: CoxData | None = None, kahler: bool = True) -> ManifoldDescriptor:
    """Picard data of the toric variety: simply connected, Pic = Cl, no Pic0.

    `kahler` is the caller's claim that the fan is projective; completeness alone does not imply it.
    """
    cox = cox or cox_data(f)
    desc = ManifoldDescriptor.from_json(
        {
            "name": f.name,
            "dim": f.dim,
            "kahler": kahler,
            "ns_free_rank": cox.class_group.free_rank,
            "ns_torsion": list(cox.class_group.invariant_factors),
            "pic0_dim": 0,
            "pi1_free_rank": 0,
            "pi1_torsion": [],
            "omega1c_dim": 0,
            "canonical": {
                "free": list(cox.canonical_class.free_part),
                "torsion": list(cox.canonical_class.torsion_part),
            },
        }
    )
    return desc


def _target_mismatches(f: Fan, cox: CoxData, target: ManifoldDescriptor) -> list[str]:
    out = []
    if target.dim != f.dim:
        out.append(f"dimension {target.dim} != fan dimension {f.dim}")
    if target.ns_free_rank != cox.class_group.free_rank:
        out.append(f"NS free rank {target.ns_free_rank} != class group rank {cox.class_group.free_rank}")
    if target.ns_torsion.invariant_factors != cox.class_group.invariant_factors:
        out.append(f"NS torsion {target.ns_torsion} != class group torsion {cox.class_group.torsion_subgroup()}")
    if target.pic0_dim:
        out.append(f"toric varieties have no Pic0, target has dimension {target.pic0_dim}")
    if not out and (
        target.canonical_class.free_part != cox.canonical_class.free_part
        or target.canonical_class.torsion_part.torsion_part != cox.canonical_class.torsion_part
    ):
        out.append(f"canonical class {target.canonical_class} != fan canonical class {list(cox.canonical_class.coordinates)}")
    return out


@dataclass(frozen=True)
class CoxCertificate:
    is_isomorphism: bool
    canonical_in_image: bool
    rigid_identity: bool
    ray_map_surjective: bool
    ray_map_kernel_rank: int
    expected_kernel_rank: int

    @property
    def passed(self) -> bool:
        return (
            self.is_isomorphism
            and self.canonical_in_image
            and self.rigid_identity
            and self.ray_map_surjective
            and self.ray_map_kernel_rank == self.expected_kernel_rank
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "is_isomorphism": self.is_isomorphism,
            "canonical_in_image": self.canonical_in_image,
            "rigid_identity": self.rigid_identity,
            "ray_map_surjective": self.ray_map_surjective,
            "ray_map_kernel_rank": self.ray_map_kernel_rank,
            "expected_kernel_rank": self.expected_kernel_rank,
        }


def audin_cox_bundle(
    f: Fan, target: ManifoldDescriptor | None = None
) -> tuple[PrincipalBundle, CoxCertificate, CoxData]:
    cox = cox_data(f)
    if not cox.class_group.is_free:
        raise ToricError(f"class group {cox.class_group} has torsion; the fan cannot be smooth and complete")
    target = target or descriptor_from_fan(f, cox)
    mismatches = _target_mismatches(f, cox, target)
    if mismatches:
        raise ToricError(f"{target.name} does not match the Picard data of {f.name}", {"mismatches": mismatches})

    r = cox.class_group.free_rank
    lam = CharacterMap.from_classes(target, [target.ns_generator(i) for i in range(r)])
    bundle = PrincipalBundle(
        f"audin-cox({f.name})", lam.group, target, lam, Provenance(ProvenanceKind.CUSTOM, detail={"fan": f.name})
    )

    rigidity = rigidity_solve(bundle, bundle_from_lambda(target, bundle.char_map))
    kernel_rank = len(cox.quotient_map.kernel_lattice())
    cert = CoxCertificate(
        is_isomorphism=bundle.char_map.free_block.is_unimodular() and target.ns_torsion.is_trivial,
        canonical_in_image=obstruction_check(bundle).solvable,
        rigid_identity=rigidity.outcome is RigidityOutcome.FOUND and rigidity.xi == IntMatrix.identity(r),
        ray_map_surjective=hom_cokernel(cox.quotient_map).is_trivial,
        ray_map_kernel_rank=kernel_rank,
        expected_kernel_rank=f.dim,
    )
    logger.info(f"Audin-Cox bundle over {target.name}: certificate {'passed' if cert.passed else 'failed'}")
    return bundle, cert, cox


def toric_summary(f: Fan) -> dict[str, Any]:
    """Invariants of a fan in the form stored by the golden files."""
    report = check_smooth_complete(f)
    out: dict[str, Any] = {"name": f.name, "dim": f.dim, "rays": f.ray_count, "report": report.to_json()}
    if report.passed:
        _, cert, cox = audin_cox_bundle(f)
        out["class_group"] = cox.class_group.to_json()
        out["canonical"] = list(cox.canonical_class.coordinates)
        out["quotient_map"] = cox.quotient_map.matrix.to_rows()
        out["certificate"] = cert.to_json()
    return out
