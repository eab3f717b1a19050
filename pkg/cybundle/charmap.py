"""Structure groups, their characters, homomorphisms between them, and character maps.

Structure groups have the shape (C*)^a x C^b x pi x G0 with pi a finitely generated
abelian group (free rank q, torsion T) and G0 an opaque Cousin factor. A character is
stored by coordinates in the fixed order

    torus (a integers) | vector (b rationals) | pi free (q rationals mod 1) | pi torsion (r residues)

and every linear object in this module is a matrix over those coordinates.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from loguru import logger

from .errors import BundleError, LatticeError
from .fga import FgaElement, FgaGroup, FgaHom, hom_kernel, invert_automorphism, is_automorphism, preimage_element
from .lattice import (
    IntMatrix,
    RatMatrix,
    hstack,
    primitive_integer_vector,
    rational_inverse,
    rational_nullspace,
    rational_solve,
    saturate_rows,
    solve_integer_linear,
    unimodular_inverse,
)
from .picard import ManifoldDescriptor, Pi1Character, PicElement
from .util import fraction_from_json, fraction_to_json, lcm_all, mod1


@dataclass(frozen=True)
class StructureGroupDesc:
    torus_rank: int = 0
    vector_rank: int = 0
    cousin_dim: int = 0
    pi1_factor: FgaGroup | None = None

    def __post_init__(self):
        if min(self.torus_rank, self.vector_rank, self.cousin_dim) < 0:
            raise BundleError("structure group ranks must be nonnegative")
        if self.pi1_factor is not None and self.pi1_factor.is_trivial:
            object.__setattr__(self, "pi1_factor", None)

    @property
    def pi1_group(self) -> FgaGroup:
        return self.pi1_factor or FgaGroup.trivial()

    @property
    def pi1_free_rank(self) -> int:
        return self.pi1_group.free_rank

    @property
    def pi1_torsion(self) -> FgaGroup:
        return self.pi1_group.torsion_subgroup()

    @property
    def torsion_rank(self) -> int:
        return self.pi1_group.torsion_rank

    @property
    def discrete_group(self) -> FgaGroup:
        """Z^a + T: the part of the character group that is finitely generated."""
        return FgaGroup(self.torus_rank, self.pi1_group.invariant_factors)

    @property
    def coordinate_count(self) -> int:
        return self.torus_rank + self.vector_rank + self.pi1_free_rank + self.torsion_rank

    def slices(self) -> tuple[range, range, range, range]:
        a, b, q = self.torus_rank, self.vector_rank, self.pi1_free_rank
        return (
            range(0, a),
            range(a, a + b),
            range(a + b, a + b + q),
            range(a + b + q, self.coordinate_count),
        )

    @property
    def discrete_indices(self) -> list[int]:
        torus, _, _, tors = self.slices()
        return list(torus) + list(tors)

    @property
    def continuous_indices(self) -> list[int]:
        _, vector, free, _ = self.slices()
        return list(vector) + list(free)

    @property
    def is_torus(self) -> bool:
        return self.vector_rank == 0 and self.cousin_dim == 0 and self.pi1_factor is None

    @property
    def is_abelian(self) -> bool:
        # every group of this shape is abelian; kept explicit for the adjunction character
        return True

    def character(
        self,
        torus: Sequence[int] = (),
        vector: Sequence = (),
        pi1_free: Sequence = (),
        pi1_torsion: Sequence[int] = (),
    ) -> "Character":
        return Character(
            self,
            tuple(torus) or (0,) * self.torus_rank,
            tuple(vector) or (Fraction(0),) * self.vector_rank,
            Pi1Character(
                tuple(pi1_free) or (Fraction(0),) * self.pi1_free_rank,
                self.pi1_torsion.element((), tuple(pi1_torsion)),
            ),
        )

    def zero_character(self) -> "Character":
        return self.character()

    def character_from_coordinates(self, coordinates: Sequence) -> "Character":
        if len(coordinates) != self.coordinate_count:
            raise BundleError(f"{len(coordinates)} coordinates for a group with {self.coordinate_count}")
        torus, vector, free, tors = self.slices()
        ints = []
        for i in list(torus) + list(tors):
            x = Fraction(coordinates[i])
            if x.denominator != 1:
                raise BundleError(f"character coordinate {i} must be an integer, got {x}")
            ints.append(int(x))
        a = self.torus_rank
        return self.character(
            ints[:a],
            [coordinates[i] for i in vector],
            [coordinates[i] for i in free],
            ints[a:],
        )

    def direct_sum(self, other: "StructureGroupDesc") -> "StructureGroupDesc":
        if self.pi1_factor is not None and other.pi1_factor is not None:
            raise BundleError("direct sum of two groups with pi1 factors is not supported")
        return StructureGroupDesc(
            self.torus_rank + other.torus_rank,
            self.vector_rank + other.vector_rank,
            self.cousin_dim + other.cousin_dim,
            self.pi1_factor or other.pi1_factor,
        )

    def __str__(self) -> str:
        parts = []
        if self.pi1_factor is not None:
            parts.append(f"pi1[{self.pi1_factor}]")
        if self.torus_rank:
            parts.append(f"(C*)^{self.torus_rank}")
        if self.vector_rank:
            parts.append(f"C^{self.vector_rank}")
        if self.cousin_dim:
            parts.append(f"G0[{self.cousin_dim}]")
        return " x ".join(parts) if parts else "1"

    def to_json(self) -> dict[str, Any]:
        return {
            "torus_rank": self.torus_rank,
            "vector_rank": self.vector_rank,
            "cousin_dim": self.cousin_dim,
            "pi1_factor": None if self.pi1_factor is None else self.pi1_factor.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "StructureGroupDesc":
        pi1 = data.get("pi1_factor")
        return cls(
            int(data.get("torus_rank", 0)),
            int(data.get("vector_rank", 0)),
            int(data.get("cousin_dim", 0)),
            None if pi1 is None else FgaGroup.from_json(pi1),
        )


@dataclass(frozen=True)
class Character:
    group: StructureGroupDesc
    torus: tuple[int, ...]
    vector: tuple[Fraction, ...]
    pi1: Pi1Character

    def __post_init__(self):
        object.__setattr__(self, "torus", tuple(int(x) for x in self.torus))
        object.__setattr__(self, "vector", tuple(Fraction(x) for x in self.vector))
        if (
            len(self.torus) != self.group.torus_rank
            or len(self.vector) != self.group.vector_rank
            or len(self.pi1.free_values) != self.group.pi1_free_rank
            or self.pi1.torsion_values.group != self.group.pi1_torsion
        ):
            raise BundleError(f"character shape does not fit {self.group}")

    @property
    def coordinates(self) -> tuple[Fraction, ...]:
        return (
            tuple(Fraction(x) for x in self.torus)
            + self.vector
            + self.pi1.free_values
            + tuple(Fraction(x) for x in self.pi1.torsion_values.torsion_part)
        )

    @property
    def discrete_coordinates(self) -> tuple[int, ...]:
        return self.torus + self.pi1.torsion_values.torsion_part

    def _combine(self, other: "Character", sign: int) -> "Character":
        if self.group != other.group:
            raise BundleError("characters of different groups cannot be combined")
        return Character(
            self.group,
            tuple(a + sign * b for a, b in zip(self.torus, other.torus)),
            tuple(a + sign * b for a, b in zip(self.vector, other.vector)),
            self.pi1 + (other.pi1 if sign > 0 else -other.pi1),
        )

    def __add__(self, other: "Character") -> "Character":
        return self._combine(other, 1)

    def __sub__(self, other: "Character") -> "Character":
        return self._combine(other, -1)

    def __neg__(self) -> "Character":
        return Character(self.group, tuple(-x for x in self.torus), tuple(-x for x in self.vector), -self.pi1)

    def __mul__(self, k: int) -> "Character":
        return Character(self.group, tuple(k * x for x in self.torus), tuple(k * x for x in self.vector), k * self.pi1)

    __rmul__ = __mul__

    def is_trivial(self) -> bool:
        return not any(self.coordinates)

    def to_json(self) -> dict[str, Any]:
        return {
            "torus": list(self.torus),
            "vector": [fraction_to_json(x) for x in self.vector],
            "pi1_free": [fraction_to_json(x) for x in self.pi1.free_values],
            "pi1_torsion": list(self.pi1.torsion_values.torsion_part),
        }

    @classmethod
    def from_json(cls, group: StructureGroupDesc, data: dict[str, Any]) -> "Character":
        return group.character(
            data.get("torus", ()),
            [fraction_from_json(x) for x in data.get("vector", ())],
            [fraction_from_json(x) for x in data.get("pi1_free", ())],
            data.get("pi1_torsion", ()),
        )

    def __str__(self) -> str:
        parts = [f"torus={list(self.torus)}"]
        if self.vector:
            parts.append("vector=[" + ", ".join(str(x) for x in self.vector) + "]")
        if self.pi1.free_values:
            parts.append("pi1_free=[" + ", ".join(str(x) for x in self.pi1.free_values) + "]")
        if self.pi1.torsion_values.torsion_part:
            parts.append(f"pi1_torsion={list(self.pi1.torsion_values.torsion_part)}")
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class CharacterDual:
    """Map of characters K^ -> H^ dual to a homomorphism H -> K, on lifted coordinates."""

    source: StructureGroupDesc
    target: StructureGroupDesc
    matrix: RatMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.coordinate_count, self.source.coordinate_count):
            raise BundleError(f"dual matrix shape {self.matrix.shape} does not fit {self.source} -> {self.target}")

    @property
    def discrete(self) -> FgaHom:
        sub = self.matrix.submatrix(self.target.discrete_indices, self.source.discrete_indices)
        try:
            m = sub.to_integer()
        except LatticeError as e:
            raise BundleError("dual map is not integral on discrete characters") from e
        return FgaHom(self.source.discrete_group, self.target.discrete_group, m)

    def apply(self, chi: Character) -> Character:
        if chi.group != self.source:
            raise BundleError(f"character of {chi.group} passed to a dual map from {self.source}")
        return self.target.character_from_coordinates(self.matrix.apply(chi.coordinates))

    __call__ = apply

    def compose(self, inner: "CharacterDual") -> "CharacterDual":
        if inner.target != self.source:
            raise BundleError("dual maps are not composable")
        return CharacterDual(inner.source, self.target, self.matrix @ inner.matrix)


@dataclass(frozen=True)
class GroupHom:
    """Holomorphic homomorphism H -> K, stored blockwise.

    torus:           (C*)^a_H -> (C*)^a_K,   h -> h^S
    vector:          C^b_H -> C^b_K,         linear
    vector_to_torus: C^b_H -> (C*)^a_K,      z -> exp(2 pi i A z)
    pi1_to_torus:    pi_H -> (C*)^a_K,       generator -> exp(2 pi i R[:, j])
    pi1_to_vector:   pi_H -> C^b_K,          free generator -> E[:, j], torsion -> 0
    pi1:             pi_H -> pi_K
    Blocks not listed (torus -> vector, anything connected -> pi) are zero.
    """

    source: StructureGroupDesc
    target: StructureGroupDesc
    torus: IntMatrix
    vector: RatMatrix
    vector_to_torus: RatMatrix
    pi1_to_torus: RatMatrix
    pi1_to_vector: RatMatrix
    pi1: FgaHom

    def __post_init__(self):
        h, k = self.source, self.target
        shapes = {
            "torus": (self.torus, (k.torus_rank, h.torus_rank)),
            "vector": (self.vector, (k.vector_rank, h.vector_rank)),
            "vector_to_torus": (self.vector_to_torus, (k.torus_rank, h.vector_rank)),
            "pi1_to_torus": (self.pi1_to_torus, (k.torus_rank, h.pi1_group.coordinate_count)),
            "pi1_to_vector": (self.pi1_to_vector, (k.vector_rank, h.pi1_free_rank)),
        }
        for name, (m, shape) in shapes.items():
            if m.shape != shape:
                raise BundleError(f"{name} block has shape {m.shape}, expected {shape}")
        if self.pi1.source != h.pi1_group or self.pi1.target != k.pi1_group:
            raise BundleError("pi1 block does not match the pi1 factors")
        q = h.pi1_free_rank
        n = h.pi1_group.invariant_factors

        def reduce(j, col):
            if j >= q and any((n[j - q] * x).denominator != 1 for x in col):
                raise BundleError(f"torsion generator {j - q} of order {n[j - q]} maps to a non-root of unity")
            return (mod1(x) for x in col)

        object.__setattr__(self, "pi1_to_torus", self.pi1_to_torus.map_columns(reduce))

    @classmethod
    def build(cls, source: StructureGroupDesc, target: StructureGroupDesc, **blocks) -> "GroupHom":
        """Homomorphism with the given blocks and zeros elsewhere."""
        defaults = {
            "torus": IntMatrix.zeros(target.torus_rank, source.torus_rank),
            "vector": RatMatrix.zeros(target.vector_rank, source.vector_rank),
            "vector_to_torus": RatMatrix.zeros(target.torus_rank, source.vector_rank),
            "pi1_to_torus": RatMatrix.zeros(target.torus_rank, source.pi1_group.coordinate_count),
            "pi1_to_vector": RatMatrix.zeros(target.vector_rank, source.pi1_free_rank),
            "pi1": FgaHom.zero(source.pi1_group, target.pi1_group),
        }
        unknown = set(blocks) - set(defaults)
        if unknown:
            raise BundleError(f"unknown homomorphism blocks {sorted(unknown)}")
        defaults.update(blocks)
        for key in ("vector", "vector_to_torus", "pi1_to_torus", "pi1_to_vector"):
            if isinstance(defaults[key], IntMatrix):
                defaults[key] = defaults[key].to_rational()
        return cls(source, target, **defaults)

    @classmethod
    def identity(cls, group: StructureGroupDesc) -> "GroupHom":
        return cls.build(
            group,
            group,
            torus=IntMatrix.identity(group.torus_rank),
            vector=RatMatrix.identity(group.vector_rank),
            pi1=FgaHom.identity(group.pi1_group),
        )

    @classmethod
    def torus_automorphism(cls, group: StructureGroupDesc, matrix: IntMatrix) -> "GroupHom":
        """h -> h^matrix on the torus factor, identity elsewhere."""
        return cls.build(
            group,
            group,
            torus=matrix,
            vector=RatMatrix.identity(group.vector_rank),
            pi1=FgaHom.identity(group.pi1_group),
        )

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self after inner."""
        if inner.target != self.source:
            raise BundleError(f"cannot compose homomorphisms through {inner.target} and {self.source}")
        phi = inner.pi1.matrix
        q_k = self.source.pi1_free_rank
        e_ext = hstack(inner.pi1_to_vector, RatMatrix.zeros(inner.target.vector_rank, inner.source.torsion_rank))
        return GroupHom(
            inner.source,
            self.target,
            torus=self.torus @ inner.torus,
            vector=self.vector @ inner.vector,
            vector_to_torus=(self.torus @ inner.vector_to_torus) + (self.vector_to_torus @ inner.vector),
            pi1_to_torus=(self.torus @ inner.pi1_to_torus)
            + (self.vector_to_torus @ e_ext)
            + (self.pi1_to_torus @ phi),
            pi1_to_vector=(self.vector @ inner.pi1_to_vector)
            + (self.pi1_to_vector @ phi.submatrix(range(q_k), range(inner.source.pi1_free_rank))),
            pi1=self.pi1.compose(inner.pi1),
        )

    def dual(self) -> CharacterDual:
        h, k = self.source, self.target
        t_h, v_h, f_h, s_h = h.slices()
        t_k, v_k, f_k, s_k = k.slices()
        q_h, q_k = h.pi1_free_rank, k.pi1_free_rank
        n_h, n_k = h.pi1_group.invariant_factors, k.pi1_group.invariant_factors
        phi = self.pi1.matrix
        r_mat = self.pi1_to_torus
        j = [[Fraction(0)] * k.coordinate_count for _ in range(h.coordinate_count)]
        for a, row in enumerate(t_h):
            for b, col in enumerate(t_k):
                j[row][col] = Fraction(self.torus[b, a])
        for a, row in enumerate(v_h):
            for b, col in enumerate(t_k):
                j[row][col] = self.vector_to_torus[b, a]
            for b, col in enumerate(v_k):
                j[row][col] = self.vector[b, a]
        for a, row in enumerate(f_h):
            for b, col in enumerate(t_k):
                j[row][col] = r_mat[b, a]
            for b, col in enumerate(v_k):
                j[row][col] = self.pi1_to_vector[b, a]
            for b, col in enumerate(f_k):
                j[row][col] = Fraction(phi[b, a])
            for b, col in enumerate(s_k):
                j[row][col] = Fraction(phi[q_k + b, a], n_k[b])
        for a, row in enumerate(s_h):
            for b, col in enumerate(t_k):
                j[row][col] = n_h[a] * r_mat[b, q_h + a]
            for b, col in enumerate(s_k):
                j[row][col] = Fraction(n_h[a] * phi[q_k + b, q_h + a], n_k[b])
        return CharacterDual(k, h, RatMatrix.from_rows(j, k.coordinate_count))

    def _is_block_diagonal(self) -> bool:
        return self.vector_to_torus.is_zero() and self.pi1_to_torus.is_zero() and self.pi1_to_vector.is_zero()

    def is_automorphism(self) -> bool:
        if self.source != self.target or not self.torus.is_unimodular():
            return False
        try:
            rational_inverse(self.vector)
        except LatticeError:
            return False
        return is_automorphism(self.pi1)

    def inverse(self) -> "GroupHom":
        if not self.is_automorphism():
            raise BundleError("homomorphism is not an automorphism")
        if not self._is_block_diagonal():
            raise BundleError("inverting automorphisms that mix factors is not supported")
        return GroupHom.build(
            self.source,
            self.source,
            torus=unimodular_inverse(self.torus),
            vector=rational_inverse(self.vector),
            pi1=invert_automorphism(self.pi1),
        )


@dataclass(frozen=True)
class CharacterMap:
    """Homomorphism from the character group of `group` to Pic of `target`, in block form.

    free_block:    torus characters -> NS free coordinates
    torsion_block: discrete characters (torus + pi1 torsion) -> NS torsion
    pic0_block:    all character coordinates -> Pic0 coordinates, read mod 1
    """

    group: StructureGroupDesc
    target: ManifoldDescriptor
    free_block: IntMatrix
    torsion_block: FgaHom
    pic0_block: RatMatrix
    continuous_kernel_dim: int = 0

    def __post_init__(self):
        p, g2 = self.target.ns_free_rank, 2 * self.target.pic0_dim
        if self.free_block.shape != (p, self.group.torus_rank):
            raise BundleError(f"free block shape {self.free_block.shape}, expected {(p, self.group.torus_rank)}")
        if self.torsion_block.source != self.group.discrete_group or self.torsion_block.target != self.target.ns_torsion:
            raise BundleError("torsion block does not map discrete characters to NS torsion")
        pic0 = self.pic0_block
        if isinstance(pic0, IntMatrix):
            pic0 = pic0.to_rational()
        if pic0.shape != (g2, self.group.coordinate_count):
            raise BundleError(f"pic0 block shape {pic0.shape}, expected {(g2, self.group.coordinate_count)}")
        torus, _, free, tors = self.group.slices()
        factors = self.group.pi1_group.invariant_factors

        def reduce(j, col):
            if j in free and any(x.denominator != 1 for x in col):
                raise BundleError(f"pic0 column {j} of a pi1 free character must be integral")
            if j in tors:
                n = factors[j - tors.start]
                if any((n * x).denominator != 1 for x in col):
                    raise BundleError(f"pic0 column {j} is not killed by the order {n} of its generator")
            if j in torus or j in tors:
                return (mod1(x) for x in col)
            return col

        object.__setattr__(self, "pic0_block", pic0.map_columns(reduce))
        if self.continuous_kernel_dim < 0:
            raise BundleError("continuous kernel dimension must be nonnegative")

    @classmethod
    def zero(cls, group: StructureGroupDesc, target: ManifoldDescriptor) -> "CharacterMap":
        return cls(
            group,
            target,
            IntMatrix.zeros(target.ns_free_rank, group.torus_rank),
            FgaHom.zero(group.discrete_group, target.ns_torsion),
            RatMatrix.zeros(2 * target.pic0_dim, group.coordinate_count),
        )

    @classmethod
    def from_classes(cls, target: ManifoldDescriptor, classes: Sequence[PicElement]) -> "CharacterMap":
        """Torus character map sending the i-th basis character to classes[i]."""
        for c in classes:
            if not target.owns(c):
                raise BundleError(f"class {c} is not a class on {target.name}")
        group = StructureGroupDesc(torus_rank=len(classes))
        return cls(
            group,
            target,
            IntMatrix.from_columns([c.free_part for c in classes], target.ns_free_rank),
            FgaHom.from_images(group.discrete_group, target.ns_torsion, [c.torsion_part for c in classes]),
            RatMatrix.from_rows(
                [[c.pic0_part[i] for c in classes] for i in range(2 * target.pic0_dim)], len(classes)
            ),
        )

    def evaluate(self, chi: Character) -> PicElement:
        if chi.group != self.group:
            raise BundleError(f"character of {chi.group} passed to a map on {self.group}")
        torsion = self.torsion_block.apply(self.group.discrete_group.from_coordinates(chi.discrete_coordinates))
        return PicElement(
            self.free_block.apply(chi.torus),
            torsion,
            self.pic0_block.apply(chi.coordinates),
        )

    __call__ = evaluate

    def torus_images(self) -> list[PicElement]:
        a = self.group.torus_rank
        return [self.evaluate(self.group.character(tuple(int(i == j) for i in range(a)))) for j in range(a)]

    def precompose(self, dual: CharacterDual) -> "CharacterMap":
        if dual.target != self.group:
            raise BundleError(f"dual map lands in {dual.target}, character map starts at {self.group}")
        new = dual.source
        j_tt = dual.matrix.submatrix(list(self.group.slices()[0]), list(new.slices()[0])).to_integer()
        keeps_continuous = new.vector_rank + new.pi1_free_rank > 0
        return CharacterMap(
            new,
            self.target,
            self.free_block @ j_tt,
            self.torsion_block.compose(dual.discrete),
            self.pic0_block @ dual.matrix,
            self.continuous_kernel_dim if keeps_continuous else 0,
        )

    def direct_sum(self, other: "CharacterMap") -> "CharacterMap":
        if self.target != other.target:
            raise BundleError("character maps over different manifolds cannot be summed")
        group = self.group.direct_sum(other.group)

        def reorder(m1, g1, m2, g2):
            pieces = []
            for s1, s2 in zip(g1.slices(), g2.slices()):
                pieces.append(m1.col_block(s1.start, s1.stop))
                pieces.append(m2.col_block(s2.start, s2.stop))
            return hstack(*pieces)

        def discrete_cols(m, g):
            return m.col_block(0, g.torus_rank), m.col_block(g.torus_rank, m.cols)

        t1, s1 = discrete_cols(self.torsion_block.matrix, self.group)
        t2, s2 = discrete_cols(other.torsion_block.matrix, other.group)
        return CharacterMap(
            group,
            self.target,
            hstack(self.free_block, other.free_block),
            FgaHom(group.discrete_group, self.target.ns_torsion, hstack(t1, t2, s1, s2)),
            reorder(self.pic0_block, self.group, other.pic0_block, other.group),
            self.continuous_kernel_dim + other.continuous_kernel_dim,
        )

    def to_json(self, include_context: bool = True) -> dict[str, Any]:
        d = {
            "free_block": self.free_block.to_json(),
            "torsion_block": self.torsion_block.matrix.to_json(),
            "pic0_block": self.pic0_block.to_json(),
            "continuous_kernel_dim": self.continuous_kernel_dim,
        }
        if include_context:
            d["group"] = self.group.to_json()
            d["target"] = self.target.to_json()
        return d

    @classmethod
    def from_json(
        cls,
        data: dict[str, Any],
        group: StructureGroupDesc | None = None,
        target: ManifoldDescriptor | None = None,
    ) -> "CharacterMap":
        group = group or StructureGroupDesc.from_json(data["group"])
        target = target or ManifoldDescriptor.from_json(data["target"])
        return cls(
            group,
            target,
            IntMatrix.from_json(data["free_block"]),
            FgaHom(group.discrete_group, target.ns_torsion, IntMatrix.from_json(data["torsion_block"])),
            RatMatrix.from_json(data["pic0_block"]),
            int(data.get("continuous_kernel_dim", 0)),
        )


@dataclass(frozen=True)
class CharacterKernel:
    """ker of a character map.

    lattice_basis spans the discrete projection (torus + pi1 torsion coordinates) of the
    kernel; it contains n_j e_j for each pi1 torsion order n_j. rational_directions span the
    continuous characters (vector + pi1 free coordinates) with zero image.
    """

    lattice_basis: tuple[tuple[int, ...], ...]
    discrete_type: FgaGroup
    torsion_orders: tuple[int, ...]
    rational_directions: tuple[tuple[Fraction, ...], ...]
    continuous_dim: int

    def to_json(self) -> dict[str, Any]:
        return {
            "lattice_basis": [list(v) for v in self.lattice_basis],
            "discrete_type": self.discrete_type.to_json(),
            "torsion_orders": list(self.torsion_orders),
            "rational_directions": [[fraction_to_json(x) for x in v] for v in self.rational_directions],
            "continuous_dim": self.continuous_dim,
        }


@dataclass(frozen=True)
class CharacterSolution:
    particular: Character | None
    kernel: CharacterKernel

    @property
    def solvable(self) -> bool:
        return self.particular is not None


def continuous_annihilator(cm: CharacterMap) -> IntMatrix:
    """Saturated integer basis (as rows) of the Pic0 functionals vanishing on continuous characters."""
    g2 = cm.pic0_block.rows
    cont = cm.pic0_block.submatrix(range(g2), cm.group.continuous_indices)
    if cont.cols == 0 or cont.is_zero():
        return IntMatrix.identity(g2)
    null = rational_nullspace(cont.transpose())
    if not null:
        return IntMatrix.zeros(0, g2)
    return saturate_rows(IntMatrix.from_rows([primitive_integer_vector(v) for v in null], g2))


def encoding_scale(maps: Sequence[CharacterMap], annihilator: IntMatrix, targets: Sequence[PicElement] = ()) -> int:
    """Common denominator making every Pic0 condition an integer congruence."""
    dens = []
    for cm in maps:
        disc = cm.pic0_block.submatrix(range(cm.pic0_block.rows), cm.group.discrete_indices)
        dens.extend(x.denominator for x in (annihilator.to_rational() @ disc).entries)
    for t in targets:
        dens.extend(x.denominator for x in annihilator.to_rational().apply(t.pic0_part))
    factors = maps[0].target.ns_torsion.invariant_factors if maps else ()
    return lcm_all(dens + list(factors[-1:]))


def discrete_encoding(cm: CharacterMap, annihilator: IntMatrix, scale: int) -> FgaHom:
    """The discrete characters mapped to Z^p + T_NS + (Z/scale)^s.

    The last block records the Pic0 image modulo the part reachable by continuous
    characters; a character lifts to a solution exactly when its encoded image matches.
    """
    target_group = _encoding_group(cm.target, annihilator, scale)
    disc_group = cm.group.discrete_group
    rows = [list(cm.free_block.row(i)) + [0] * disc_group.torsion_rank for i in range(cm.free_block.rows)]
    rows += cm.torsion_block.matrix.to_rows()
    if target_group.torsion_rank > cm.target.ns_torsion.torsion_rank:
        disc = cm.pic0_block.submatrix(range(cm.pic0_block.rows), cm.group.discrete_indices)
        rows += (annihilator.to_rational() @ disc).scale(scale).to_integer().to_rows()
    return FgaHom(disc_group, target_group, IntMatrix.from_rows(rows, disc_group.coordinate_count))


def _encoding_group(target: ManifoldDescriptor, annihilator: IntMatrix, scale: int) -> FgaGroup:
    factors = target.ns_torsion.invariant_factors
    if scale > 1 and annihilator.rows:
        factors = factors + (scale,) * annihilator.rows
    return FgaGroup(target.ns_free_rank, factors)


def encode_class(x: PicElement, target: ManifoldDescriptor, annihilator: IntMatrix, scale: int) -> FgaElement:
    group = _encoding_group(target, annihilator, scale)
    coords = list(x.free_part) + list(x.torsion_part.torsion_part)
    if group.torsion_rank > target.ns_torsion.torsion_rank:
        coords += [int(v * scale) for v in annihilator.to_rational().apply(x.pic0_part)]
    return group.from_coordinates(coords)


def solve_character(cm: CharacterMap, target: PicElement) -> CharacterSolution:
    """All characters chi with cm(chi) == target, as particular + kernel."""
    if not cm.target.owns(target):
        raise BundleError(f"class {target} is not a class on {cm.target.name}")
    group = cm.group
    annihilator = continuous_annihilator(cm)
    scale = encoding_scale([cm], annihilator, [target])
    phi = discrete_encoding(cm, annihilator, scale)
    g2 = cm.pic0_block.rows
    cont = cm.pic0_block.submatrix(range(g2), group.continuous_indices)
    kernel = CharacterKernel(
        lattice_basis=phi.kernel_lattice(),
        discrete_type=hom_kernel(phi),
        torsion_orders=group.pi1_group.invariant_factors,
        rational_directions=tuple(rational_nullspace(cont)),
        continuous_dim=cm.continuous_kernel_dim,
    )
    x = preimage_element(phi, encode_class(target, cm.target, annihilator, scale))
    if x is None:
        logger.debug(f"{target} is not in the image of the character map on {group}")
        return CharacterSolution(None, kernel)
    disc = cm.pic0_block.submatrix(range(g2), group.discrete_indices)
    residual = tuple(a - b for a, b in zip(disc.apply(x.coordinates), target.pic0_part))
    z0 = annihilator.to_rational().apply(residual)
    if any(v.denominator != 1 for v in z0):
        raise BundleError("discrete solution does not satisfy the Pic0 congruences")
    lift = solve_integer_linear(annihilator, tuple(-int(v) for v in z0))
    u = rational_solve(cont, tuple(-r - z for r, z in zip(residual, lift.particular)))
    if u is None:
        raise BundleError("continuous characters cannot absorb the Pic0 residual")
    coords = [Fraction(0)] * group.coordinate_count
    for i, v in zip(group.discrete_indices, x.coordinates):
        coords[i] = Fraction(v)
    for i, v in zip(group.continuous_indices, u):
        coords[i] = v
    chi = group.character_from_coordinates(coords)
    if cm.evaluate(chi) != target:
        raise BundleError("solver produced a character with the wrong image")
    logger.debug(f"{target} = lambda{chi}")
    return CharacterSolution(chi, kernel)
