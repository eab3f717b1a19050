import math
from collections.abc import Sequence
from fractions import Fraction

import sympy

from ..errors import LatticeError
from .matrix import IntMatrix, RatMatrix


def to_sympy(m: RatMatrix | IntMatrix) -> sympy.Matrix:
    return sympy.Matrix(
        m.rows,
        m.cols,
        [sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in m.entries],
    )


def _fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def from_sympy(m: sympy.Matrix) -> RatMatrix:
    return RatMatrix(m.rows, m.cols, tuple(_fraction(x) for x in m))


def rational_nullspace(m: RatMatrix | IntMatrix) -> list[tuple[Fraction, ...]]:
    """Q-basis of {x : m x = 0}."""
    if m.cols == 0:
        return []
    if m.rows == 0 or m.is_zero():
        return [tuple(Fraction(int(i == j)) for i in range(m.cols)) for j in range(m.cols)]
    return [tuple(_fraction(x) for x in v) for v in to_sympy(m).nullspace()]


def rational_solve(m: RatMatrix | IntMatrix, rhs: Sequence) -> tuple[Fraction, ...] | None:
    """One solution of m x = rhs with every free variable set to zero, or None."""
    if len(rhs) != m.rows:
        raise LatticeError(f"right-hand side of length {len(rhs)} for {m.rows} equations")
    if m.rows == 0:
        return (Fraction(0),) * m.cols
    rhs = [Fraction(x) for x in rhs]
    if m.cols == 0:
        return () if not any(rhs) else None
    aug = to_sympy(m).row_join(
        sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in rhs])
    )
    reduced, pivots = aug.rref()
    if m.cols in pivots:
        return None
    x = [Fraction(0)] * m.cols
    for i, c in enumerate(pivots):
        x[c] = _fraction(reduced[i, m.cols])
    return tuple(x)


def rational_inverse(m: RatMatrix | IntMatrix) -> RatMatrix:
    if not m.is_square():
        raise LatticeError(f"inverse of non-square {m.rows}x{m.cols} matrix")
    if m.rows == 0:
        return RatMatrix.zeros(0, 0)
    s = to_sympy(m)
    if s.det() == 0:
        raise LatticeError("matrix is singular")
    return from_sympy(s.inv())


def primitive_integer_vector(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector with the same direction."""
    v = [Fraction(x) for x in v]
    den = math.lcm(1, *(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    if g == 0:
        raise LatticeError("zero vector has no primitive multiple")
    return tuple(x // g for x in ints)
