from .kernel_points import make_kernel_points, make_spherical_kernel_points
from .basis import (
    eval_basis,
    eval_basis_batch,
    init_mlp_basis,
    init_dot_basis,
    make_basis,
    to_spherical,
)

__all__ = [
    "make_kernel_points",
    "make_spherical_kernel_points",
    "eval_basis",
    "eval_basis_batch",
    "init_mlp_basis",
    "init_dot_basis",
    "make_basis",
    "to_spherical",
]
