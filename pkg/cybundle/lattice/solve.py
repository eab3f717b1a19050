from collections.abc import Sequence
from dataclasses import dataclass

from loguru import logger

from ..errors import LatticeError
from .matrix import IntMatrix
from .normalforms import hermite_normal_form, row_lattice_basis, smith_normal_form


@dataclass(frozen=True)
class IntegerSolution:
    """Affine lattice particular + span_Z(kernel_basis)."""

    particular: tuple[int, ...]
    kernel_basis: tuple[tuple[int, ...], ...]

    def point(self, coefficients: Sequence[int]) -> tuple[int, ...]:
        x = list(self.particular)
        for c, k in zip(coefficients, self.kernel_basis, strict=True):
            for i, ki in enumerate(k):
                x[i] += c * ki
        return tuple(x)


def reduce_modulo_lattice(x: Sequence[int], basis: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Canonical coset representative: trailing coordinates are pushed into [0, pivot)."""
    x = list(x)
    if not basis:
        return tuple(x)
    n = len(x)
    rev = [tuple(reversed(b)) for b in basis]
    h, _ = hermite_normal_form(IntMatrix.from_rows(rev, n))
    xr = list(reversed(x))
    for i in range(h.rows):
        row = h.row(i)
        c = next((j for j, v in enumerate(row) if v), None)
        if c is None:
            break
        q = xr[c] // row[c]
        if q:
            xr = [a - q * b for a, b in zip(xr, row)]
    return tuple(reversed(xr))


def solve_integer_linear(a: IntMatrix, b: Sequence[int]) -> IntegerSolution | None:
    if len(b) != a.rows:
        raise LatticeError(
            f"right-hand side of length {len(b)} for a system with {a.rows} equations",
            {"rows": a.rows, "rhs_length": len(b)},
        )
    snf = smith_normal_form(a)
    c = snf.u.apply(tuple(int(x) for x in b))
    rank = snf.rank
    diag = snf.diagonal
    y = [0] * a.cols
    for i in range(rank):
        if c[i] % diag[i]:
            logger.trace(f"integer system unsolvable: {diag[i]} does not divide {c[i]}")
            return None
        y[i] = c[i] // diag[i]
    if any(c[i] for i in range(rank, a.rows)):
        return None
    kernel = row_lattice_basis((snf.v.col(j) for j in range(rank, a.cols)), a.cols)
    x = snf.v.apply(y)
    return IntegerSolution(particular=reduce_modulo_lattice(x, kernel), kernel_basis=kernel)


def integer_kernel(a: IntMatrix) -> tuple[tuple[int, ...], ...]:
    return solve_integer_linear(a, (0,) * a.rows).kernel_basis


def lattice_contains(basis: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
    if not basis:
        return not any(x)
    m = IntMatrix.from_rows(basis, len(x)).transpose()
    return solve_integer_linear(m, x) is not None


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    if not m.is_unimodular():
        raise LatticeError(f"matrix {m} is not unimodular")
    n = m.rows
    cols = []
    for j in range(n):
        e = tuple(1 if i == j else 0 for i in range(n))
        cols.append(solve_integer_linear(m, e).particular)
    return IntMatrix.from_columns(cols, n)


def saturate_rows(b: IntMatrix) -> IntMatrix:
    """Basis of (row space of b over Q) intersected with Z^n, for b of full row rank."""
    snf = smith_normal_form(b)
    if snf.rank != b.rows:
        raise LatticeError("saturation needs a matrix of full row rank")
    vinv = unimodular_inverse(snf.v)
    return vinv.row_block(0, b.rows)
