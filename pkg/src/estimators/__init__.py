from .integral import estimate, pair_weights, init_density_mlp, corrected_density, make_estimator

__all__ = ["estimate", "pair_weights", "init_density_mlp", "corrected_density", "make_estimator"]
