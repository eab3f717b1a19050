"""Finitely generated abelian groups in invariant-factor form and homomorphisms between them.

Coordinates of a group are its free coordinates followed by one coordinate per
invariant factor. A homomorphism is an integer matrix from source coordinates to
target coordinates; everything else is computed by lifting to free presentations
and running Smith reduction.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from loguru import logger

from .errors import FgaError
from .lattice import (
    IntMatrix,
    hstack,
    reduce_modulo_lattice,
    row_lattice_basis,
    smith_normal_form,
    solve_integer_linear,
)


@dataclass(frozen=True)
class FgaGroup:
    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(int(n) for n in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", factors)
        if self.free_rank < 0:
            raise FgaError(f"negative free rank {self.free_rank}")
        for n in factors:
            if n <= 1:
                raise FgaError(f"invariant factor {n} must exceed 1", {"factors": list(factors)})
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise FgaError(f"invariant factor {a} does not divide {b}", {"factors": list(factors)})

    @classmethod
    def free(cls, n: int) -> "FgaGroup":
        return cls(n, ())

    @classmethod
    def cyclic(cls, n: int) -> "FgaGroup":
        return cls(0, (n,)) if n > 1 else cls()

    @classmethod
    def trivial(cls) -> "FgaGroup":
        return cls()

    @classmethod
    def from_relations(cls, a: IntMatrix) -> "FgaGroup":
        """Z^rows modulo the column span of a."""
        return cokernel_projection(a).target

    @property
    def torsion_rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def coordinate_count(self) -> int:
        return self.free_rank + self.torsion_rank

    @property
    def generator_count(self) -> int:
        return self.coordinate_count

    @property
    def is_trivial(self) -> bool:
        return self.coordinate_count == 0

    @property
    def is_free(self) -> bool:
        return not self.invariant_factors

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        out = 1
        for n in self.invariant_factors:
            out *= n
        return out

    def torsion_subgroup(self) -> "FgaGroup":
        return FgaGroup(0, self.invariant_factors)

    def relation_matrix(self) -> IntMatrix:
        return IntMatrix.diagonal(
            (0,) * self.free_rank + self.invariant_factors, self.coordinate_count, self.coordinate_count
        ).col_block(self.free_rank, self.coordinate_count)

    def normalize(self, coordinates: Sequence[int]) -> tuple[int, ...]:
        if len(coordinates) != self.coordinate_count:
            raise FgaError(
                f"{len(coordinates)} coordinates given for {self}", {"expected": self.coordinate_count}
            )
        free = tuple(int(x) for x in coordinates[: self.free_rank])
        tors = tuple(int(x) % n for x, n in zip(coordinates[self.free_rank :], self.invariant_factors))
        return free + tors

    def element(self, free: Sequence[int] = (), torsion: Sequence[int] = ()) -> "FgaElement":
        free = tuple(free) or (0,) * self.free_rank
        torsion = tuple(torsion) or (0,) * self.torsion_rank
        return FgaElement(self, free, torsion)

    def from_coordinates(self, coordinates: Sequence[int]) -> "FgaElement":
        c = tuple(coordinates)
        return FgaElement(self, c[: self.free_rank], c[self.free_rank :])

    def zero(self) -> "FgaElement":
        return self.from_coordinates((0,) * self.coordinate_count)

    def generators(self) -> list["FgaElement"]:
        n = self.coordinate_count
        return [self.from_coordinates(tuple(int(i == j) for i in range(n))) for j in range(n)]

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"C{n}" for n in self.invariant_factors)
        return " x ".join(parts) if parts else "0"

    def to_json(self) -> dict[str, Any]:
        return {"free_rank": self.free_rank, "invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "FgaGroup":
        return cls(int(data.get("free_rank", 0)), tuple(data.get("invariant_factors", ())))


@dataclass(frozen=True)
class FgaElement:
    group: FgaGroup
    free_part: tuple[int, ...]
    torsion_part: tuple[int, ...]

    def __post_init__(self):
        if len(self.free_part) != self.group.free_rank or len(self.torsion_part) != self.group.torsion_rank:
            raise FgaError(
                f"element shape ({len(self.free_part)}, {len(self.torsion_part)}) does not fit {self.group}"
            )
        c = self.group.normalize(tuple(self.free_part) + tuple(self.torsion_part))
        object.__setattr__(self, "free_part", c[: self.group.free_rank])
        object.__setattr__(self, "torsion_part", c[self.group.free_rank :])

    @property
    def coordinates(self) -> tuple[int, ...]:
        return self.free_part + self.torsion_part

    def _check(self, other: "FgaElement"):
        if self.group != other.group:
            raise FgaError(f"elements of {self.group} and {other.group} cannot be combined")

    def __add__(self, other: "FgaElement") -> "FgaElement":
        self._check(other)
        return self.group.from_coordinates(tuple(a + b for a, b in zip(self.coordinates, other.coordinates)))

    def __neg__(self) -> "FgaElement":
        return self.group.from_coordinates(tuple(-a for a in self.coordinates))

    def __sub__(self, other: "FgaElement") -> "FgaElement":
        return self + (-other)

    def __mul__(self, k: int) -> "FgaElement":
        return self.group.from_coordinates(tuple(k * a for a in self.coordinates))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coordinates)

    def order(self) -> int | None:
        if any(self.free_part):
            return None
        out = 1
        for x, n in zip(self.torsion_part, self.group.invariant_factors):
            out = math.lcm(out, n // math.gcd(x, n))
        return out

    def to_json(self) -> dict[str, Any]:
        return {"free": list(self.free_part), "torsion": list(self.torsion_part)}


@dataclass(frozen=True)
class FgaHom:
    """Homomorphism given by an integer matrix from source coordinates to target coordinates."""

    source: FgaGroup
    target: FgaGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.coordinate_count, self.source.coordinate_count):
            raise FgaError(
                f"matrix shape {self.matrix.shape} does not fit {self.source} -> {self.target}"
            )
        rows = self.matrix.to_rows()
        f = self.target.free_rank
        for i, n in enumerate(self.target.invariant_factors):
            rows[f + i] = [x % n for x in rows[f + i]]
        m = IntMatrix.from_rows(rows, self.matrix.cols)
        object.__setattr__(self, "matrix", m)
        for j, n in enumerate(self.source.invariant_factors):
            col = m.col(self.source.free_rank + j)
            image = self.target.normalize(tuple(n * x for x in col))
            if any(image):
                raise FgaError(
                    f"generator of order {n} maps to an element whose order does not divide {n}",
                    {"generator": self.source.free_rank + j, "image": list(col)},
                )

    @classmethod
    def identity(cls, group: FgaGroup) -> "FgaHom":
        return cls(group, group, IntMatrix.identity(group.coordinate_count))

    @classmethod
    def zero(cls, source: FgaGroup, target: FgaGroup) -> "FgaHom":
        return cls(source, target, IntMatrix.zeros(target.coordinate_count, source.coordinate_count))

    @classmethod
    def from_images(cls, source: FgaGroup, target: FgaGroup, images: Sequence[FgaElement]) -> "FgaHom":
        for y in images:
            if y.group != target:
                raise FgaError(f"image in {y.group}, expected {target}")
        return cls(source, target, IntMatrix.from_columns([y.coordinates for y in images], target.coordinate_count))

    def apply(self, x: FgaElement) -> FgaElement:
        if x.group != self.source:
            raise FgaError(f"element of {x.group} passed to a map from {self.source}")
        return self.target.from_coordinates(self.matrix.apply(x.coordinates))

    __call__ = apply

    def compose(self, inner: "FgaHom") -> "FgaHom":
        """self after inner."""
        if inner.target != self.source:
            raise FgaError(f"cannot compose {self.source} <- {inner.target}")
        return FgaHom(inner.source, self.target, self.matrix @ inner.matrix)

    def _lifted(self) -> IntMatrix:
        # [M | R_T]: columns spanning the target lift of im f plus the target relations
        return hstack(self.matrix, self.target.relation_matrix())

    def kernel_lattice(self) -> tuple[tuple[int, ...], ...]:
        """Hermite basis of {x in Z^n : f(x) = 0}, n the number of source coordinates."""
        n = self.source.coordinate_count
        if n == 0:
            return ()
        rel = self.target.relation_matrix()
        big = hstack(self.matrix, -rel)
        kernel = solve_integer_linear(big, (0,) * big.rows).kernel_basis
        return row_lattice_basis((k[:n] for k in kernel), n)

    def to_json(self) -> dict[str, Any]:
        return {"source": self.source.to_json(), "target": self.target.to_json(), "matrix": self.matrix.to_json()}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "FgaHom":
        return cls(
            FgaGroup.from_json(data["source"]),
            FgaGroup.from_json(data["target"]),
            IntMatrix.from_json(data["matrix"]),
        )


def cokernel_projection(a: IntMatrix) -> FgaHom:
    """Quotient map Z^rows -> Z^rows / (column span of a), target in invariant-factor form."""
    snf = smith_normal_form(a)
    diag = snf.diagonal
    rank = snf.rank
    torsion_rows = [i for i in range(rank) if diag[i] > 1]
    free_rows = list(range(rank, a.rows))
    target = FgaGroup(len(free_rows), tuple(diag[i] for i in torsion_rows))
    proj = snf.u.submatrix(free_rows + torsion_rows, range(a.rows))
    return FgaHom(FgaGroup.free(a.rows), target, proj)


def hom_cokernel(f: FgaHom) -> FgaGroup:
    return FgaGroup.from_relations(f._lifted())


def hom_image(f: FgaHom) -> FgaGroup:
    n = f.source.coordinate_count
    lattice = f.kernel_lattice()
    if not lattice:
        return FgaGroup.free(n)
    return FgaGroup.from_relations(IntMatrix.from_rows(lattice, n).transpose())


def hom_kernel(f: FgaHom) -> FgaGroup:
    lattice = f.kernel_lattice()
    if not lattice:
        return FgaGroup.trivial()
    n = f.source.coordinate_count
    basis_t = IntMatrix.from_rows(lattice, n).transpose()
    relations = []
    for col in f.source.relation_matrix().columns():
        sol = solve_integer_linear(basis_t, col)
        if sol is None:
            raise FgaError("source relations are not in the kernel lattice; map is not well defined")
        relations.append(sol.particular)
    return FgaGroup.from_relations(IntMatrix.from_columns(relations, len(lattice)))


def preimage_element(f: FgaHom, y: FgaElement) -> FgaElement | None:
    if y.group != f.target:
        raise FgaError(f"element of {y.group} is not in the target {f.target}")
    sol = solve_integer_linear(f._lifted(), y.coordinates)
    if sol is None:
        logger.trace(f"no preimage of {y.coordinates} under {f.source} -> {f.target}")
        return None
    n = f.source.coordinate_count
    x = reduce_modulo_lattice(sol.particular[:n], f.kernel_lattice())
    return f.source.from_coordinates(x)


def is_automorphism(f: FgaHom) -> bool:
    if f.source != f.target:
        raise FgaError(f"automorphism test needs source == target, got {f.source} and {f.target}")
    return hom_kernel(f).is_trivial and hom_cokernel(f).is_trivial


def invert_automorphism(f: FgaHom) -> FgaHom:
    if not is_automorphism(f):
        raise FgaError("map is not an automorphism", {"matrix": f.matrix.to_rows()})
    return FgaHom.from_images(f.target, f.source, [preimage_element(f, g) for g in f.target.generators()])
