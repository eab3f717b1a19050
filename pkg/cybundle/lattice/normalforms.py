from dataclasses import dataclass

from loguru import logger

from .matrix import IntMatrix


@dataclass(frozen=True)
class SmithDecomposition:
    """u @ a @ v == d with u, v unimodular and d diagonal with a divisibility chain."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix
    rows: int
    cols: int

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.d[i, i] for i in range(min(self.rows, self.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(x for x in self.diagonal if x != 0)


class _Reducer:
    """Working copy of a matrix with the row transform u and column transform v tracked."""

    def __init__(self, a: IntMatrix):
        self.m, self.n = a.rows, a.cols
        self.d = a.to_rows()
        self.u = IntMatrix.identity(self.m).to_rows()
        self.v = IntMatrix.identity(self.n).to_rows()

    def swap_rows(self, i: int, j: int):
        if i != j:
            self.d[i], self.d[j] = self.d[j], self.d[i]
            self.u[i], self.u[j] = self.u[j], self.u[i]

    def swap_cols(self, i: int, j: int):
        if i != j:
            for row in self.d:
                row[i], row[j] = row[j], row[i]
            for row in self.v:
                row[i], row[j] = row[j], row[i]

    def add_row(self, target: int, source: int, k: int):
        # row_target += k * row_source
        for mat in (self.d, self.u):
            t, s = mat[target], mat[source]
            for j in range(len(t)):
                t[j] += k * s[j]

    def add_col(self, target: int, source: int, k: int):
        for row in self.d:
            row[target] += k * row[source]
        for row in self.v:
            row[target] += k * row[source]

    def negate_row(self, i: int):
        self.d[i] = [-x for x in self.d[i]]
        self.u[i] = [-x for x in self.u[i]]

    def pick_pivot(self, t: int) -> tuple[int, int] | None:
        best = None
        for i in range(t, self.m):
            for j in range(t, self.n):
                x = self.d[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        return None if best is None else (best[1], best[2])

    def clear(self, t: int) -> bool:
        """Reduce column t and row t against the pivot; True when both end up zero."""
        p = self.d[t][t]
        clean = True
        for i in range(t + 1, self.m):
            if self.d[i][t]:
                self.add_row(i, t, -(self.d[i][t] // p))
                clean = clean and self.d[i][t] == 0
        for j in range(t + 1, self.n):
            if self.d[t][j]:
                self.add_col(j, t, -(self.d[t][j] // p))
                clean = clean and self.d[t][j] == 0
        return clean

    def non_divisible_row(self, t: int) -> int | None:
        p = self.d[t][t]
        for i in range(t + 1, self.m):
            for j in range(t + 1, self.n):
                if self.d[i][j] % p:
                    return i
        return None


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form with pivot rule: smallest |entry|, then lowest row, then lowest column."""
    r = _Reducer(a)
    t = 0
    while t < min(r.m, r.n):
        pivot = r.pick_pivot(t)
        if pivot is None:
            break
        i, j = pivot
        logger.trace(f"SNF step {t}: pivot {r.d[i][j]} at ({i}, {j})")
        r.swap_rows(t, i)
        r.swap_cols(t, j)
        if not r.clear(t):
            continue
        bad = r.non_divisible_row(t)
        if bad is not None:
            r.add_row(t, bad, 1)
            continue
        if r.d[t][t] < 0:
            r.negate_row(t)
        t += 1
    return SmithDecomposition(
        u=IntMatrix.from_rows(r.u, r.m),
        d=IntMatrix.from_rows(r.d, r.n),
        v=IntMatrix.from_rows(r.v, r.n),
        rows=a.rows,
        cols=a.cols,
    )


def hermite_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite form: returns (h, u) with u @ a == h.

    h is in row echelon form, pivots are positive and entries above a pivot lie in
    [0, pivot). Zero rows collect at the bottom.
    """
    r = _Reducer(a)
    row = 0
    for c in range(r.n):
        if row == r.m:
            break
        while True:
            nz = [i for i in range(row, r.m) if r.d[i][c] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: (abs(r.d[i][c]), i))
            r.swap_rows(row, best)
            rest = [i for i in range(row + 1, r.m) if r.d[i][c] != 0]
            if not rest:
                break
            for i in rest:
                r.add_row(i, row, -(r.d[i][c] // r.d[row][c]))
        if r.d[row][c] == 0:
            continue
        if r.d[row][c] < 0:
            r.negate_row(row)
        p = r.d[row][c]
        for i in range(row):
            q = r.d[i][c] // p
            if q:
                r.add_row(i, row, -q)
        row += 1
    return IntMatrix.from_rows(r.d, r.n), IntMatrix.from_rows(r.u, r.m)


def row_lattice_basis(vectors, dim: int) -> tuple[tuple[int, ...], ...]:
    """Canonical basis (nonzero Hermite rows) of the lattice spanned by `vectors` in Z^dim."""
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return ()
    h, _ = hermite_normal_form(IntMatrix.from_rows(vectors, dim))
    return tuple(h.row(i) for i in range(h.rows) if any(h.row(i)))
