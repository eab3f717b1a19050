"""Picard data of a compact complex manifold.

A line-bundle class is stored as (NS free coordinates, NS torsion element, rational
point of Pic0). NS coordinates are relative to the ordered generators L1..Lp that
come with each descriptor.
"""

import json
import pathlib
import pkgutil
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from loguru import logger

from .errors import CyBundleError, InputError, PicardError
from .fga import FgaElement, FgaGroup
from .util import fraction_from_json, fraction_to_json, mod1_vector

if TYPE_CHECKING:
    from .charmap import CharacterMap


@dataclass(frozen=True)
class PicElement:
    free_part: tuple[int, ...]
    torsion_part: FgaElement
    pic0_part: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "free_part", tuple(int(x) for x in self.free_part))
        object.__setattr__(self, "pic0_part", mod1_vector(self.pic0_part))

    def _check(self, other: "PicElement"):
        if (
            len(self.free_part) != len(other.free_part)
            or self.torsion_part.group != other.torsion_part.group
            or len(self.pic0_part) != len(other.pic0_part)
        ):
            raise PicardError("Picard classes of different manifolds cannot be combined")

    def __add__(self, other: "PicElement") -> "PicElement":
        self._check(other)
        return PicElement(
            tuple(a + b for a, b in zip(self.free_part, other.free_part)),
            self.torsion_part + other.torsion_part,
            tuple(a + b for a, b in zip(self.pic0_part, other.pic0_part)),
        )

    def __neg__(self) -> "PicElement":
        return PicElement(
            tuple(-a for a in self.free_part), -self.torsion_part, tuple(-a for a in self.pic0_part)
        )

    def __sub__(self, other: "PicElement") -> "PicElement":
        return self + (-other)

    def __mul__(self, k: int) -> "PicElement":
        return PicElement(
            tuple(k * a for a in self.free_part), k * self.torsion_part, tuple(k * a for a in self.pic0_part)
        )

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.free_part) and self.torsion_part.is_zero() and not any(self.pic0_part)

    def to_json(self) -> dict[str, Any]:
        return {
            "free": list(self.free_part),
            "torsion": list(self.torsion_part.torsion_part),
            "pic0": [fraction_to_json(x) for x in self.pic0_part],
        }

    def __str__(self) -> str:
        parts = [f"free={list(self.free_part)}"]
        if self.torsion_part.group.torsion_rank:
            parts.append(f"torsion={list(self.torsion_part.torsion_part)}")
        if self.pic0_part:
            parts.append("pic0=[" + ", ".join(str(x) for x in self.pic0_part) + "]")
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class Pi1Character:
    """Unitary character of Z^q + T1: exponents in [0, 1) on free generators.

    The torsion part is the element t of T1 with value exp(2 pi i t_j / n_j) on the
    j-th torsion generator.
    """

    free_values: tuple[Fraction, ...]
    torsion_values: FgaElement

    def __post_init__(self):
        object.__setattr__(self, "free_values", mod1_vector(self.free_values))
        if self.torsion_values.group.free_rank:
            raise PicardError("torsion character must live in a finite group")

    @classmethod
    def trivial(cls, pi1: FgaGroup) -> "Pi1Character":
        return cls((Fraction(0),) * pi1.free_rank, pi1.torsion_subgroup().zero())

    def __add__(self, other: "Pi1Character") -> "Pi1Character":
        return Pi1Character(
            tuple(a + b for a, b in zip(self.free_values, other.free_values, strict=True)),
            self.torsion_values + other.torsion_values,
        )

    def __neg__(self) -> "Pi1Character":
        return Pi1Character(tuple(-a for a in self.free_values), -self.torsion_values)

    def __mul__(self, k: int) -> "Pi1Character":
        return Pi1Character(tuple(k * a for a in self.free_values), k * self.torsion_values)

    __rmul__ = __mul__

    def value_on(self, free: Sequence[int], torsion: Sequence[int]) -> Fraction:
        """Exponent (mod 1) of the character on the element with the given coordinates."""
        total = sum((Fraction(x) * v for x, v in zip(free, self.free_values, strict=True)), Fraction(0))
        for y, t, n in zip(
            torsion, self.torsion_values.torsion_part, self.torsion_values.group.invariant_factors, strict=True
        ):
            total += Fraction(y * t, n)
        return mod1_vector([total])[0]


@dataclass(frozen=True)
class ManifoldDescriptor:
    name: str
    dim: int
    kahler: bool
    ns_free_rank: int
    ns_torsion: FgaGroup
    pic0_dim: int
    pi1_ab: FgaGroup
    omega1c_dim: int
    canonical_class: PicElement

    @property
    def p(self) -> int:
        return self.ns_free_rank

    @property
    def q(self) -> int:
        return self.pi1_ab.free_rank

    @property
    def g(self) -> int:
        return self.pic0_dim

    @property
    def t1(self) -> FgaGroup:
        return self.pi1_ab.torsion_subgroup()

    def pic_element(
        self, free: Sequence[int] = (), torsion: Sequence[int] = (), pic0: Sequence = ()
    ) -> PicElement:
        free = tuple(free) or (0,) * self.ns_free_rank
        torsion = tuple(torsion) or (0,) * self.ns_torsion.torsion_rank
        pic0 = tuple(pic0) or (Fraction(0),) * (2 * self.pic0_dim)
        if len(free) != self.ns_free_rank or len(pic0) != 2 * self.pic0_dim:
            raise PicardError(
                f"class shape ({len(free)}, {len(pic0)}) does not fit {self.name}",
                {"ns_free_rank": self.ns_free_rank, "pic0_coordinates": 2 * self.pic0_dim},
            )
        return PicElement(free, self.ns_torsion.element((), torsion), pic0)

    def pic_zero(self) -> PicElement:
        return self.pic_element()

    def ns_generator(self, i: int) -> PicElement:
        return self.pic_element(free=tuple(int(i == j) for j in range(self.ns_free_rank)))

    def torsion_generator(self, j: int) -> PicElement:
        return self.pic_element(torsion=tuple(int(j == k) for k in range(self.ns_torsion.torsion_rank)))

    def owns(self, x: PicElement) -> bool:
        return (
            len(x.free_part) == self.ns_free_rank
            and x.torsion_part.group == self.ns_torsion
            and len(x.pic0_part) == 2 * self.pic0_dim
        )

    def pic_from_json(self, data: dict[str, Any]) -> PicElement:
        return self.pic_element(
            data.get("free", ()),
            data.get("torsion", ()),
            [fraction_from_json(x) for x in data.get("pic0", ())],
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "dim": self.dim,
            "kahler": self.kahler,
            "ns_free_rank": self.ns_free_rank,
            "ns_torsion": list(self.ns_torsion.invariant_factors),
            "pic0_dim": self.pic0_dim,
            "pi1_free_rank": self.pi1_ab.free_rank,
            "pi1_torsion": list(self.pi1_ab.invariant_factors),
            "omega1c_dim": self.omega1c_dim,
            "canonical": self.canonical_class.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ManifoldDescriptor":
        try:
            shell = cls(
                name=str(data["name"]),
                dim=int(data["dim"]),
                kahler=bool(data["kahler"]),
                ns_free_rank=int(data["ns_free_rank"]),
                ns_torsion=FgaGroup(0, tuple(data.get("ns_torsion", ()))),
                pic0_dim=int(data["pic0_dim"]),
                pi1_ab=FgaGroup(int(data["pi1_free_rank"]), tuple(data.get("pi1_torsion", ()))),
                omega1c_dim=int(data["omega1c_dim"]),
                canonical_class=PicElement((), FgaGroup().zero()),
            )
            canonical = shell.pic_from_json(data.get("canonical", {}))
        except KeyError as e:
            raise InputError(f"manifold descriptor is missing field {e.args[0]!r}") from e
        except CyBundleError:
            raise
        except (ValueError, TypeError, AttributeError) as e:
            raise InputError(f"invalid manifold descriptor: {e}", {"name": str(data.get("name"))}) from e
        return cls(**{**shell.__dict__, "canonical_class": canonical})


def validate(m: ManifoldDescriptor) -> list[str]:
    violations = []
    if m.kahler and m.pi1_ab.free_rank != 2 * m.pic0_dim:
        violations.append(
            f"Betti relation: pi1 free rank {m.pi1_ab.free_rank} != 2 * pic0_dim {m.pic0_dim}"
        )
    if m.kahler and m.omega1c_dim != m.pic0_dim:
        violations.append(
            f"Kahler 1-form relation: omega1c_dim {m.omega1c_dim} != pic0_dim {m.pic0_dim}"
        )
    if m.ns_torsion.invariant_factors != m.pi1_ab.invariant_factors:
        violations.append(
            f"torsion relation: NS torsion {m.ns_torsion} is not isomorphic to pi1 torsion {m.t1}"
        )
    if m.ns_torsion.free_rank:
        violations.append(f"NS torsion group {m.ns_torsion} has a free part")
    if not m.owns(m.canonical_class):
        violations.append("canonical class does not have the shape of a class on this manifold")
    if m.dim < 1:
        violations.append(f"complex dimension {m.dim} must be positive")
    for v in violations:
        logger.debug(f"{m.name}: {v}")
    return violations


def universal_cover_character_map(m: ManifoldDescriptor) -> "CharacterMap":
    """Character map of the universal cover, as a principal pi1(X)-bundle."""
    from .charmap import CharacterMap, StructureGroupDesc
    from .fga import FgaHom
    from .lattice import IntMatrix, RatMatrix, hstack

    if not m.kahler:
        raise PicardError("Pic0 realization requires Kahler hypothesis", {"manifold": m.name})
    if m.t1.invariant_factors != m.ns_torsion.invariant_factors:
        raise PicardError(f"{m.name}: NS torsion and pi1 torsion differ", {"manifold": m.name})
    group = StructureGroupDesc(pi1_factor=m.pi1_ab)
    r = m.t1.torsion_rank
    torsion_block = FgaHom(group.discrete_group, m.ns_torsion, IntMatrix.identity(r))
    pic0_block = hstack(RatMatrix.identity(2 * m.pic0_dim), RatMatrix.zeros(2 * m.pic0_dim, r))
    return CharacterMap(
        group=group,
        target=m,
        free_block=IntMatrix.zeros(m.ns_free_rank, 0),
        torsion_block=torsion_block,
        pic0_block=pic0_block,
        continuous_kernel_dim=m.omega1c_dim,
    )


def _catalog_json(name: str) -> dict[str, Any]:
    raw = pkgutil.get_data("cybundle.catalog", f"{name}.json")
    if raw is None:
        raise InputError(f"catalog entry {name!r} not found")
    return json.loads(raw.decode())


def catalog_names() -> list[str]:
    return list(_catalog_json("index")["entries"])


def catalog_entry(name: str) -> ManifoldDescriptor:
    if name not in catalog_names():
        raise InputError(f"unknown manifold {name!r}", {"known": catalog_names()})
    return ManifoldDescriptor.from_json(_catalog_json(name))


def catalog() -> list[ManifoldDescriptor]:
    return [catalog_entry(name) for name in catalog_names()]


def load_descriptor(name_or_path: str) -> ManifoldDescriptor:
    """Catalog name, or path to a descriptor JSON file."""
    if name_or_path in catalog_names():
        return catalog_entry(name_or_path)
    path = pathlib.Path(name_or_path)
    if not path.exists():
        raise InputError(f"{name_or_path!r} is neither a catalog name nor a file", {"known": catalog_names()})
    try:
        with open(path, "r", encoding="UTF-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(
            f"malformed JSON in {path}: {e.msg}",
            {"path": str(path), "line": e.lineno, "column": e.colno, "position": e.pos},
        ) from e
    if not isinstance(data, dict):
        raise InputError(f"{path} must contain a JSON object", {"path": str(path)})
    logger.debug(f"Loaded manifold descriptor from {path}")
    return ManifoldDescriptor.from_json(data)
