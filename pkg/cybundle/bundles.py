"""Principal bundles over a manifold, identified with (group, base, character map).

The operations here decide whether a bundle carries a Calabi-Yau structure (the
canonical class lies in the image of the character map), classify those structures,
compare bundles up to twists and build bundles with prescribed character maps.
"""

import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import sympy
from loguru import logger

from .charmap import (
    Character,
    CharacterKernel,
    CharacterMap,
    GroupHom,
    StructureGroupDesc,
    continuous_annihilator,
    discrete_encoding,
    encode_class,
    encoding_scale,
    solve_character,
)
from .defaults import PIC0_SAMPLES, SAMPLE_MAX_DENOMINATOR, SAMPLE_SEED, SEARCH_MAX_CANDIDATES, SEARCH_RADIUS
from .errors import BundleError, InputError, LatticeError
from .fga import preimage_element
from .lattice import IntMatrix, block_diagonal, smith_normal_form, solve_integer_linear, unimodular_inverse
from .picard import ManifoldDescriptor, PicElement, load_descriptor, universal_cover_character_map
from .state import ProvenanceKind, RigidityOutcome


@dataclass(frozen=True)
class Provenance:
    kind: ProvenanceKind = ProvenanceKind.CUSTOM
    parent: str | None = None
    detail: dict[str, Any] = field(default_factory=dict, compare=False)

    def to_json(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind.value}
        if self.parent is not None:
            d["parent"] = self.parent
        if self.detail:
            d["detail"] = self.detail
        return d

    @classmethod
    def from_json(cls, data: dict[str, Any] | None) -> "Provenance":
        if not data:
            return cls()
        return cls(ProvenanceKind(data.get("kind", "custom")), data.get("parent"), dict(data.get("detail", {})))


@dataclass(frozen=True)
class PrincipalBundle:
    name: str
    group: StructureGroupDesc
    base: ManifoldDescriptor
    char_map: CharacterMap
    provenance: Provenance = field(default_factory=Provenance, compare=False)

    def __post_init__(self):
        if self.char_map.group != self.group:
            raise BundleError(f"{self.name}: character map is defined on {self.char_map.group}, not {self.group}")
        if self.char_map.target != self.base:
            raise BundleError(f"{self.name}: character map lands in Pic({self.char_map.target.name}), not Pic({self.base.name})")

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "group": self.group.to_json(),
            "base": self.base.to_json(),
            "char_map": self.char_map.to_json(include_context=False),
            "provenance": self.provenance.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any], base: ManifoldDescriptor | None = None) -> "PrincipalBundle":
        """Full bundle JSON, or the short form {"name", "classes"} for a Whitney sum over `base`."""
        raw_base = data.get("base")
        if isinstance(raw_base, str):
            raw_base = load_descriptor(raw_base)
        elif isinstance(raw_base, dict):
            raw_base = ManifoldDescriptor.from_json(raw_base)
        if base is not None and raw_base is not None and raw_base != base:
            raise InputError(f"bundle is over {raw_base.name}, but {base.name} was requested")
        base = base or raw_base
        if base is None:
            raise InputError("bundle JSON names no base manifold")
        if "classes" in data:
            classes = [base.pic_from_json(c) for c in data["classes"]]
            return whitney_sum_bundle(base, classes, name=data.get("name"))
        try:
            group = StructureGroupDesc.from_json(data["group"])
            char_map = CharacterMap.from_json(data["char_map"], group=group, target=base)
        except KeyError as e:
            raise InputError(f"bundle JSON is missing field {e.args[0]!r}") from e
        return cls(str(data.get("name", "bundle")), group, base, char_map, Provenance.from_json(data.get("provenance")))


@dataclass(frozen=True)
class CyStructureSet:
    """lambda^-1([K_X]): empty, or particular + kernel."""

    solvable: bool
    particular: Character | None
    kernel: CharacterKernel

    def to_json(self) -> dict[str, Any]:
        return {
            "solvable": self.solvable,
            "particular": None if self.particular is None else self.particular.to_json(),
            "kernel": self.kernel.to_json(),
        }


def whitney_sum_bundle(base: ManifoldDescriptor, classes: Sequence[PicElement], name: str | None = None) -> PrincipalBundle:
    if not classes:
        raise BundleError("Whitney sum needs at least one line bundle class")
    char_map = CharacterMap.from_classes(base, classes)
    name = name or " + ".join(f"L{c}^x" for c in classes)
    logger.debug(f"Built Whitney sum {name} over {base.name}")
    return PrincipalBundle(
        name,
        char_map.group,
        base,
        char_map,
        Provenance(ProvenanceKind.WHITNEY_SUM, detail={"classes": [c.to_json() for c in classes]}),
    )


def universal_cover_bundle(base: ManifoldDescriptor) -> PrincipalBundle:
    char_map = universal_cover_character_map(base)
    return PrincipalBundle(
        f"universal-cover({base.name})", char_map.group, base, char_map, Provenance(ProvenanceKind.UNIVERSAL_COVER)
    )


def direct_sum_bundle(first: PrincipalBundle, second: PrincipalBundle, name: str | None = None) -> PrincipalBundle:
    if first.base != second.base:
        raise BundleError(f"cannot sum bundles over {first.base.name} and {second.base.name}")
    char_map = first.char_map.direct_sum(second.char_map)
    return PrincipalBundle(
        name or f"{first.name} (+) {second.name}",
        char_map.group,
        first.base,
        char_map,
        Provenance(ProvenanceKind.DIRECT_SUM, detail={"summands": [first.name, second.name]}),
    )


def obstruction_check(b: PrincipalBundle) -> CyStructureSet:
    solution = solve_character(b.char_map, b.base.canonical_class)
    logger.info(f"{b.name}: K_X {'is' if solution.solvable else 'is not'} in the image of the character map")
    return CyStructureSet(solution.solvable, solution.particular, solution.kernel)


def is_cy_character(b: PrincipalBundle, chi: Character) -> bool:
    return b.char_map.evaluate(chi) == b.base.canonical_class


def adjunction_character(b: PrincipalBundle, cy: CyStructureSet) -> Character:
    """The character chi * chi_h with K_X = L_chi; chi_h is trivial for abelian groups."""
    if not cy.solvable or cy.particular is None:
        raise BundleError(f"{b.name} admits no CY structure")
    if not b.group.is_abelian:
        raise BundleError("adjunction character of a non-abelian group needs the adjoint character")
    if not is_cy_character(b, cy.particular):
        raise BundleError("CY structure does not map to the canonical class")
    return cy.particular


@dataclass(frozen=True)
class RootClass:
    k: int
    root: PicElement
    torsion_translates: int

    def to_json(self) -> dict[str, Any]:
        return {"k": self.k, "root": self.root.to_json(), "torsion_translates": self.torsion_translates}


@dataclass(frozen=True)
class Rank1Roots:
    """Integers k with K_X = k L; `every_integer` when K_X is trivial (then L = 0 works for all k)."""

    every_integer: bool
    roots: tuple[RootClass, ...]

    @property
    def ks(self) -> list[int]:
        return [r.k for r in self.roots]

    def to_json(self) -> dict[str, Any]:
        return {"every_integer": self.every_integer, "roots": [r.to_json() for r in self.roots]}


def rank1_roots(base: ManifoldDescriptor) -> Rank1Roots:
    if not base.ns_torsion.is_trivial:
        raise BundleError(f"{base.name}: root classification needs trivial NS torsion, got {base.ns_torsion}")
    if base.ns_free_rank != 1:
        raise BundleError(f"{base.name}: root classification needs NS free rank 1, got {base.ns_free_rank}")
    canonical = base.canonical_class
    if any(canonical.pic0_part):
        raise BundleError(f"{base.name}: root classification needs K_X with zero Pic0 part")
    c = canonical.free_part[0]
    if c == 0:
        return Rank1Roots(True, (RootClass(1, base.pic_zero(), 1),))
    roots = []
    for d in sympy.divisors(abs(c)):
        for k in (d, -d):
            roots.append(RootClass(k, base.pic_element(free=(c // k,)), abs(k) ** (2 * base.pic0_dim)))
    return Rank1Roots(False, tuple(roots))


@dataclass(frozen=True)
class RigidityResult:
    outcome: RigidityOutcome
    xi: IntMatrix | None = None
    xi_dual: GroupHom | None = None
    candidates_checked: int = 0
    message: str = ""

    def to_json(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "outcome": self.outcome.value,
            "candidates_checked": self.candidates_checked,
            "xi": None if self.xi is None else self.xi.to_json(),
            "xi_dual": None if self.xi_dual is None else self.xi_dual.torus.to_json(),
        }
        if self.message:
            d["message"] = self.message
        return d


def _found(group: StructureGroupDesc, xi: IntMatrix, checked: int) -> RigidityResult:
    # xi acts on characters; the automorphism of H it comes from is (xi^T)^-1
    xi_dual = GroupHom.torus_automorphism(group, unimodular_inverse(xi.transpose()))
    logger.info(f"Rigidity: found xi = {xi}")
    return RigidityResult(RigidityOutcome.FOUND, xi, xi_dual, checked)


def _is_primitive_prefix(columns: list[tuple[int, ...]], p: int) -> bool:
    snf = smith_normal_form(IntMatrix.from_columns(columns, p))
    return snf.rank == len(columns) and all(x == 1 for x in snf.invariant_factors)


def _free_target_assembly(phi_n: IntMatrix, phi_m: IntMatrix) -> IntMatrix | None:
    """xi in GL_p(Z) with phi_n xi == phi_m for maps into a free group, or None."""
    p = phi_n.cols
    snf_n, snf_m = smith_normal_form(phi_n), smith_normal_form(phi_m)
    r = snf_n.rank
    if snf_m.rank != r:
        return None
    basis_n = phi_n @ snf_n.v.col_block(0, r)
    basis_m = phi_m @ snf_m.v.col_block(0, r)
    g_cols = []
    for col in basis_m.columns():
        sol = solve_integer_linear(basis_n, col)
        if sol is None:
            return None
        g_cols.append(sol.particular)
    g = IntMatrix.from_columns(g_cols, r)
    if not g.is_unimodular():
        return None
    return snf_n.v @ block_diagonal(g, IntMatrix.identity(p - r)) @ unimodular_inverse(snf_m.v)


def _kernel_offsets(rank: int, radius: int):
    """Coefficient vectors in [-radius, radius]^rank ordered by (l1 norm, vector)."""

    def shell(size: int, norm: int):
        if size == 0:
            if norm == 0:
                yield ()
            return
        for head in range(-min(norm, radius), min(norm, radius) + 1):
            for tail in shell(size - 1, norm - abs(head)):
                yield (head,) + tail

    for norm in range(rank * radius + 1):
        yield from sorted(shell(rank, norm))


def rigidity_solve(
    m: PrincipalBundle,
    n: PrincipalBundle,
    search_radius: int = SEARCH_RADIUS,
    max_candidates: int = SEARCH_MAX_CANDIDATES,
) -> RigidityResult:
    """xi in GL_p(Z) with lambda_N o xi == lambda_M, so that N twisted by xi_dual has lambda_M."""
    if m.base != n.base:
        raise BundleError(f"bundles live over {m.base.name} and {n.base.name}")
    if m.group != n.group:
        raise BundleError(f"bundles have structure groups {m.group} and {n.group}")
    if not m.group.is_torus:
        return RigidityResult(RigidityOutcome.UNSUPPORTED, message=f"rigidity is only decided for tori, not {m.group}")
    p = m.group.torus_rank
    if m.char_map == n.char_map:
        return _found(m.group, IntMatrix.identity(p), 1)

    annihilator = continuous_annihilator(n.char_map)
    scale = encoding_scale([m.char_map, n.char_map], annihilator)
    phi_n = discrete_encoding(n.char_map, annihilator, scale)
    phi_m = discrete_encoding(m.char_map, annihilator, scale)
    if phi_n.target.torsion_rank == 0:
        xi = _free_target_assembly(phi_n.matrix, phi_m.matrix)
        if xi is None:
            return RigidityResult(RigidityOutcome.ABSENT, candidates_checked=1, message="image lattices differ")
        return _found(m.group, xi, 1)

    # xi is onto, so both encoded images must coincide
    for i, y in enumerate(encode_class(x, n.base, annihilator, scale) for x in n.char_map.torus_images()):
        if preimage_element(phi_m, y) is None:
            return RigidityResult(RigidityOutcome.ABSENT, message=f"lambda_N(e_{i}) is not in the image of lambda_M")
    base_points = []
    for i, y in enumerate(encode_class(x, m.base, annihilator, scale) for x in m.char_map.torus_images()):
        x = preimage_element(phi_n, y)
        if x is None:
            return RigidityResult(RigidityOutcome.ABSENT, message=f"lambda_M(e_{i}) is not in the image of lambda_N")
        base_points.append(x.coordinates)
    kernel = phi_n.kernel_lattice()

    def column_candidates(i: int):
        for coeffs in _kernel_offsets(len(kernel), search_radius):
            yield tuple(b + sum(c * k[j] for c, k in zip(coeffs, kernel)) for j, b in enumerate(base_points[i]))

    checked = 0
    capped = False

    def extend(prefix: list[tuple[int, ...]]) -> list[tuple[int, ...]] | None:
        nonlocal checked, capped
        if len(prefix) == p:
            return prefix
        for col in column_candidates(len(prefix)):
            if checked >= max_candidates:
                capped = True
                return None
            checked += 1
            logger.trace(f"Rigidity candidate column {len(prefix)}: {col}")
            if _is_primitive_prefix(prefix + [col], p):
                found = extend(prefix + [col])
                if found is not None or capped:
                    return found
        return None

    assembly = extend([])
    if assembly is not None:
        return _found(m.group, IntMatrix.from_columns(assembly, p), checked)
    if not kernel and not capped:
        return RigidityResult(RigidityOutcome.ABSENT, candidates_checked=checked, message="unique candidate is not unimodular")
    if capped:
        message = f"stopped after {max_candidates} candidates"
    else:
        message = f"no unimodular assembly with kernel coefficients in [-{search_radius}, {search_radius}]"
    logger.warning(f"Rigidity search undecided: {message}")
    return RigidityResult(RigidityOutcome.UNDECIDED, candidates_checked=checked, message=message)


def bundle_from_lambda(base: ManifoldDescriptor, lam: CharacterMap, name: str | None = None) -> PrincipalBundle:
    """The bundle (lambda(e_1))^x + ... + (lambda(e_p))^x realizing a torus character map."""
    if not lam.group.is_torus:
        raise BundleError(f"bundle_from_lambda needs a torus group, got {lam.group}")
    if lam.target != base:
        raise BundleError(f"character map lands in Pic({lam.target.name}), not Pic({base.name})")
    if lam.group.torus_rank == 0:
        return PrincipalBundle(name or "trivial", lam.group, base, lam)
    return whitney_sum_bundle(base, lam.torus_images(), name=name)


def induced_bundle(b: PrincipalBundle, f: GroupHom, name: str | None = None) -> PrincipalBundle:
    if f.source != b.group:
        raise BundleError(f"homomorphism starts at {f.source}, bundle group is {b.group}")
    char_map = b.char_map.precompose(f.dual())
    return PrincipalBundle(
        name or f"induced({b.name})",
        f.target,
        b.base,
        char_map,
        Provenance(ProvenanceKind.INDUCED, parent=b.name, detail={"target_group": str(f.target)}),
    )


def twist_bundle(b: PrincipalBundle, sigma: GroupHom, name: str | None = None) -> PrincipalBundle:
    if sigma.source != b.group or sigma.target != b.group:
        raise BundleError(f"twist must be an automorphism of {b.group}")
    try:
        inverse = sigma.inverse()
    except LatticeError as e:
        raise BundleError(f"twist is not invertible: {e}") from e
    char_map = b.char_map.precompose(inverse.dual())
    return PrincipalBundle(
        name or f"twist({b.name})",
        b.group,
        b.base,
        char_map,
        Provenance(ProvenanceKind.TWIST, parent=b.name, detail={"torus": sigma.torus.to_rows()}),
    )


def construct_surjective_bundle(base: ManifoldDescriptor) -> PrincipalBundle:
    """pi1(X) x (C*)^p bundle: universal cover plus the Whitney sum over NS generators."""
    if not base.kahler:
        raise BundleError("Pic0 realization requires Kahler hypothesis", {"manifold": base.name})
    bundle = universal_cover_bundle(base)
    if base.ns_free_rank:
        ns = whitney_sum_bundle(base, [base.ns_generator(i) for i in range(base.ns_free_rank)], name="ns-generators")
        bundle = direct_sum_bundle(bundle, ns, name=f"surjective({base.name})")
    logger.info(f"Constructed {bundle.name} with group {bundle.group}")
    return bundle


@dataclass(frozen=True)
class PreimageCheck:
    label: str
    target: PicElement
    preimage: Character | None

    @property
    def passed(self) -> bool:
        return self.preimage is not None

    def to_json(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "target": self.target.to_json(),
            "preimage": None if self.preimage is None else self.preimage.to_json(),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class SurjectivityCertificate:
    checks: tuple[PreimageCheck, ...]
    kernel_dim: int
    expected_kernel_dim: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.kernel_dim == self.expected_kernel_dim

    def to_json(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "kernel_dim": self.kernel_dim,
            "expected_kernel_dim": self.expected_kernel_dim,
            "checks": [c.to_json() for c in self.checks],
        }


def random_pic0_point(base: ManifoldDescriptor, rng: random.Random, max_denominator: int = SAMPLE_MAX_DENOMINATOR) -> PicElement:
    values = []
    for _ in range(2 * base.pic0_dim):
        den = rng.randint(1, max_denominator)
        values.append(Fraction(rng.randrange(den), den))
    return base.pic_element(pic0=values)


def surjectivity_certificate(
    bundle: PrincipalBundle,
    samples: int = PIC0_SAMPLES,
    seed: int = SAMPLE_SEED,
    max_denominator: int = SAMPLE_MAX_DENOMINATOR,
) -> SurjectivityCertificate:
    base = bundle.base
    targets = [(f"ns[{i}]", base.ns_generator(i)) for i in range(base.ns_free_rank)]
    targets += [(f"torsion[{j}]", base.torsion_generator(j)) for j in range(base.ns_torsion.torsion_rank)]
    if base.pic0_dim:
        rng = random.Random(seed)
        targets += [(f"pic0[{k}]", random_pic0_point(base, rng, max_denominator)) for k in range(samples)]
    checks = tuple(PreimageCheck(label, t, solve_character(bundle.char_map, t).particular) for label, t in targets)
    cert = SurjectivityCertificate(checks, bundle.char_map.continuous_kernel_dim, base.omega1c_dim)
    logger.debug(f"Surjectivity certificate for {bundle.name}: {sum(c.passed for c in checks)}/{len(checks)} preimages")
    return cert
