import itertools
import math
import random

import sympy

from cybundle.lattice import IntMatrix, hermite_normal_form, row_lattice_basis, smith_normal_form


def random_matrix(rng: random.Random, max_size: int = 8, bound: int = 20) -> IntMatrix:
    m, n = rng.randint(1, max_size), rng.randint(1, max_size)
    if rng.random() < 0.3:
        # low rank product
        k = rng.randint(0, min(m, n) - 1)
        left = IntMatrix.from_rows([[rng.randint(-3, 3) for _ in range(k)] for _ in range(m)], k)
        right = IntMatrix.from_rows([[rng.randint(-3, 3) for _ in range(n)] for _ in range(k)], n)
        return left @ right
    return IntMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)], n)


def determinantal_invariants(a: IntMatrix) -> tuple[int, ...]:
    """Invariant factors as quotients of gcds of k x k minors."""
    mat = sympy.Matrix(a.to_rows())
    out = []
    prev = 1
    for k in range(1, min(a.rows, a.cols) + 1):
        g = 0
        for rows in itertools.combinations(range(a.rows), k):
            for cols in itertools.combinations(range(a.cols), k):
                g = math.gcd(g, int(mat.extract(list(rows), list(cols)).det()))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return tuple(out)


def assert_smith(a: IntMatrix):
    snf = smith_normal_form(a)
    assert snf.u @ a @ snf.v == snf.d
    assert snf.u.is_unimodular()
    assert snf.v.is_unimodular()
    for i in range(a.rows):
        for j in range(a.cols):
            if i != j:
                assert snf.d[i, j] == 0
    diag = snf.diagonal
    assert all(x >= 0 for x in diag)
    nonzero = [x for x in diag if x]
    assert list(diag[: len(nonzero)]) == nonzero
    for x, y in zip(nonzero, nonzero[1:]):
        assert y % x == 0
    return snf


def test_smith_identities_random():
    rng = random.Random(1729)
    for _ in range(1000):
        assert_smith(random_matrix(rng))


def test_smith_matches_determinantal_divisors():
    rng = random.Random(31)
    for _ in range(150):
        a = random_matrix(rng, max_size=4, bound=9)
        assert smith_normal_form(a).invariant_factors == determinantal_invariants(a)


def test_smith_small_cases():
    snf = assert_smith(IntMatrix.from_rows([[2, 0], [0, 3]]))
    assert snf.diagonal == (1, 6)
    snf = assert_smith(IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]))
    assert snf.diagonal == (2, 6, 12)
    snf = assert_smith(IntMatrix.zeros(3, 2))
    assert snf.rank == 0
    assert snf.invariant_factors == ()


def test_smith_empty_shapes():
    snf = smith_normal_form(IntMatrix.zeros(0, 3))
    assert snf.v.shape == (3, 3)
    assert snf.rank == 0


def test_determinant_matches_sympy():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 6)
        a = IntMatrix.from_rows([[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)], n)
        assert a.det() == int(sympy.Matrix(a.to_rows()).det())


def assert_hermite(a: IntMatrix):
    h, u = hermite_normal_form(a)
    assert u @ a == h
    assert u.is_unimodular()
    last_pivot = -1
    seen_zero = False
    for i in range(h.rows):
        row = h.row(i)
        if not any(row):
            seen_zero = True
            continue
        assert not seen_zero, "zero rows must collect at the bottom"
        c = next(j for j, x in enumerate(row) if x)
        assert c > last_pivot
        assert row[c] > 0
        for k in range(i):
            assert 0 <= h[k, c] < row[c]
        last_pivot = c
    return h


def test_hermite_random():
    rng = random.Random(99)
    for _ in range(500):
        assert_hermite(random_matrix(rng, max_size=6))


def test_hermite_single_row_is_kept():
    h = assert_hermite(IntMatrix.from_rows([[4, 6]]))
    assert h == IntMatrix.from_rows([[4, 6]])


def test_hermite_negative_pivot_is_flipped():
    h = assert_hermite(IntMatrix.from_rows([[-2, 1], [0, 3]]))
    assert h == IntMatrix.from_rows([[2, 2], [0, 3]])


def test_row_lattice_basis_is_canonical():
    first = row_lattice_basis([(2, 0), (0, 2), (1, 1)], 2)
    second = row_lattice_basis([(1, 1), (1, -1)], 2)
    assert first == second == ((1, 1), (0, 2))
    assert row_lattice_basis([], 3) == ()
