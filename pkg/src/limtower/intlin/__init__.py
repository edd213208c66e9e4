"""Exact integer linear algebra and finitely generated abelian groups."""

from .abelian import (Cokernel, DirectSum, FgAbGroup, GroupHom, cokernel_classify,
                      cokernel_of_matrix, contains_subgroup, direct_sum, same_subgroup,
                      subgroup)
from .matrix import (IntMatrix, block_diag, block_matrix, hstack, is_zero_vec, vadd, vec,
                     vneg, vscale, vstack, vsub, zero_vec)
from .smith import (SmithForm, column_lattice_basis, is_surjective, kernel_basis,
                    kernel_coordinates, rank, smith_normal_form, solve_integer_system,
                    solve_matrix)

__all__ = [
    "Cokernel", "DirectSum", "FgAbGroup", "GroupHom", "IntMatrix", "SmithForm",
    "block_diag", "block_matrix", "cokernel_classify", "cokernel_of_matrix",
    "column_lattice_basis", "contains_subgroup", "direct_sum", "hstack", "is_surjective",
    "is_zero_vec", "kernel_basis", "kernel_coordinates", "rank", "same_subgroup",
    "smith_normal_form", "solve_integer_system", "solve_matrix", "subgroup", "vadd",
    "vec", "vneg", "vscale", "vstack", "vsub", "zero_vec",
]
