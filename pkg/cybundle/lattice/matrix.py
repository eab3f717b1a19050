from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..errors import LatticeError
from ..util import fraction_from_json, fraction_to_json


class _DenseMatrix:
    """Row-major immutable matrix storage shared by the integer and rational types."""

    rows: int
    cols: int
    entries: tuple

    def _check_shape(self):
        if self.rows < 0 or self.cols < 0:
            raise LatticeError(f"negative matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise LatticeError(
                f"{len(self.entries)} entries do not fill a {self.rows}x{self.cols} matrix"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index: tuple[int, int]):
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index {index} out of range for {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self):
        return type(self)(
            self.cols,
            self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        return type(self)(
            len(rows), len(cols), tuple(self[i, j] for i in rows for j in cols)
        )

    def row_block(self, start: int, stop: int):
        return self.submatrix(range(start, stop), range(self.cols))

    def col_block(self, start: int, stop: int):
        return self.submatrix(range(self.rows), range(start, stop))

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.cols:
            raise LatticeError(f"vector of length {len(vec)} applied to {self.rows}x{self.cols} matrix")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), vec)), self._zero())
            for i in range(self.rows)
        )

    def _zero(self):
        return 0

    def __str__(self) -> str:
        if self.rows == 0:
            return f"[] ({self.rows}x{self.cols})"
        return "[" + ", ".join(
            "[" + ", ".join(str(x) for x in self.row(i)) + "]" for i in range(self.rows)
        ) + "]"


@dataclass(frozen=True)
class IntMatrix(_DenseMatrix):
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        self._check_shape()

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> "IntMatrix":
        data = [list(r) for r in rows]
        if cols is None:
            if not data:
                raise LatticeError("column count required for a matrix without rows")
            cols = len(data[0])
        for r in data:
            if len(r) != cols:
                raise LatticeError(f"ragged row of length {len(r)}, expected {cols}")
        return cls(len(data), cols, tuple(x for r in data for x in r))

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable[int]], rows: int) -> "IntMatrix":
        cols = [list(c) for c in columns]
        for c in cols:
            if len(c) != rows:
                raise LatticeError(f"column of length {len(c)}, expected {rows}")
        return cls(rows, len(cols), tuple(c[i] for i in range(rows) for c in cols))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        return cls(
            rows,
            cols,
            tuple(values[i] if i == j and i < len(values) else 0 for i in range(rows) for j in range(cols)),
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if isinstance(other, RatMatrix):
            return self.to_rational() @ other
        if self.cols != other.rows:
            raise LatticeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ocols = other.columns()
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(sum(a * b for a, b in zip(self.row(i), c)) for i in range(self.rows) for c in ocols),
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise LatticeError(f"cannot add {self.shape} and {other.shape}")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(k * x for x in self.entries))

    def to_rational(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(Fraction(x) for x in self.entries))

    def det(self) -> int:
        """Fraction-free Bareiss elimination."""
        if not self.is_square():
            raise LatticeError(f"determinant of non-square {self.rows}x{self.cols} matrix")
        n = self.rows
        if n == 0:
            return 1
        m = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if swap is None:
                    return 0
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.is_square() and abs(self.det()) == 1

    def to_json(self) -> dict[str, Any]:
        return {"shape": [self.rows, self.cols], "rows": self.to_rows()}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "IntMatrix":
        rows, cols = data["shape"]
        m = cls.from_rows(data.get("rows", []), cols)
        if m.rows != rows:
            raise LatticeError(f"matrix declares {rows} rows but lists {m.rows}")
        return m


@dataclass(frozen=True)
class RatMatrix(_DenseMatrix):
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(Fraction(x) for x in self.entries))
        self._check_shape()

    def _zero(self):
        return Fraction(0)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], cols: int | None = None) -> "RatMatrix":
        data = [list(r) for r in rows]
        if cols is None:
            if not data:
                raise LatticeError("column count required for a matrix without rows")
            cols = len(data[0])
        for r in data:
            if len(r) != cols:
                raise LatticeError(f"ragged row of length {len(r)}, expected {cols}")
        return cls(len(data), cols, tuple(x for r in data for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return IntMatrix.identity(n).to_rational()

    def __matmul__(self, other: "RatMatrix | IntMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise LatticeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ocols = other.columns()
        return RatMatrix(
            self.rows,
            other.cols,
            tuple(
                sum((a * b for a, b in zip(self.row(i), c)), Fraction(0))
                for i in range(self.rows)
                for c in ocols
            ),
        )

    def __add__(self, other: "RatMatrix | IntMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise LatticeError(f"cannot add {self.shape} and {other.shape}")
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def scale(self, k) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(k * x for x in self.entries))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.entries)

    def to_integer(self) -> IntMatrix:
        if not self.is_integral():
            raise LatticeError("matrix has non-integral entries")
        return IntMatrix(self.rows, self.cols, tuple(x.numerator for x in self.entries))

    def map_columns(self, fn) -> "RatMatrix":
        """Rebuild the matrix with `fn(j, column)` applied to every column."""
        cols = [tuple(fn(j, c)) for j, c in enumerate(self.columns())]
        return RatMatrix(
            self.rows, self.cols, tuple(cols[j][i] for i in range(self.rows) for j in range(self.cols))
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "shape": [self.rows, self.cols],
            "rows": [[fraction_to_json(x) for x in r] for r in self.to_rows()],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "RatMatrix":
        rows, cols = data["shape"]
        m = cls.from_rows(
            [[fraction_from_json(x) for x in r] for r in data.get("rows", [])], cols
        )
        if m.rows != rows:
            raise LatticeError(f"matrix declares {rows} rows but lists {m.rows}")
        return m


def hstack(*blocks, rows: int | None = None):
    """Concatenate matrices side by side; an integer result only when every block is integral."""
    if not blocks:
        return IntMatrix.zeros(rows or 0, 0)
    n = blocks[0].rows
    for b in blocks:
        if b.rows != n:
            raise LatticeError(f"cannot hstack blocks with {b.rows} and {n} rows")
    kind = IntMatrix if all(isinstance(b, IntMatrix) for b in blocks) else RatMatrix
    cols = sum(b.cols for b in blocks)
    return kind(n, cols, tuple(x for i in range(n) for b in blocks for x in b.row(i)))


def vstack(*blocks, cols: int | None = None):
    if not blocks:
        return IntMatrix.zeros(0, cols or 0)
    n = blocks[0].cols
    for b in blocks:
        if b.cols != n:
            raise LatticeError(f"cannot vstack blocks with {b.cols} and {n} columns")
    kind = IntMatrix if all(isinstance(b, IntMatrix) for b in blocks) else RatMatrix
    return kind(sum(b.rows for b in blocks), n, tuple(x for b in blocks for x in b.entries))


def block_diagonal(*blocks):
    kind = IntMatrix if all(isinstance(b, IntMatrix) for b in blocks) else RatMatrix
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[r0 + i][c0 + j] = b[i, j]
        r0 += b.rows
        c0 += b.cols
    return kind.from_rows(out, cols)
