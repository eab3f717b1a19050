from .matrix import IntMatrix, RatMatrix, block_diagonal, hstack, vstack
from .normalforms import SmithDecomposition, hermite_normal_form, row_lattice_basis, smith_normal_form
from .rational import primitive_integer_vector, rational_inverse, rational_nullspace, rational_solve
from .solve import (
    IntegerSolution,
    integer_kernel,
    lattice_contains,
    reduce_modulo_lattice,
    saturate_rows,
    solve_integer_linear,
    unimodular_inverse,
)

__all__ = [
    "IntMatrix",
    "RatMatrix",
    "SmithDecomposition",
    "IntegerSolution",
    "block_diagonal",
    "hstack",
    "vstack",
    "smith_normal_form",
    "hermite_normal_form",
    "row_lattice_basis",
    "solve_integer_linear",
    "integer_kernel",
    "lattice_contains",
    "reduce_modulo_lattice",
    "saturate_rows",
    "unimodular_inverse",
    "rational_nullspace",
    "rational_solve",
    "rational_inverse",
    "primitive_integer_vector",
]
