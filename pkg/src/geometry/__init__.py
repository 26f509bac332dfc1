from .generators import (
    generate_uniform_cloud,
    generate_clustered_cloud,
    generate_grid_cloud,
    generate_sphere_cloud,
    UniformCloudGenerator,
    ClusteredCloudGenerator,
    GridCloudGenerator,
    SphereCloudGenerator,
    make_generator,
)
from .sampling import poisson_disk_subsample, build_levels
from .neighbors import radius_neighbors
from .density import estimate_density

__all__ = [
    "generate_uniform_cloud",
    "generate_clustered_cloud",
    "generate_grid_cloud",
    "generate_sphere_cloud",
    "UniformCloudGenerator",
    "ClusteredCloudGenerator",
    "GridCloudGenerator",
    "SphereCloudGenerator",
    "make_generator",
    "poisson_disk_subsample",
    "build_levels",
    "radius_neighbors",
    "estimate_density",
]
