from .layer import apply_nonlinearity, basis_accumulation, basis_operator, conv_forward, project, resolve_density
from .stack import StackContext, stack_forward
from .discrete import (
    discrete_conv_reference,
    discrete_kernel_to_layer,
    image_to_point_features,
    point_conv_image,
)

__all__ = [
    "apply_nonlinearity",
    "basis_accumulation",
    "basis_operator",
    "conv_forward",
    "project",
    "resolve_density",
    "StackContext",
    "stack_forward",
    "discrete_conv_reference",
    "discrete_kernel_to_layer",
    "image_to_point_features",
    "point_conv_image",
]
