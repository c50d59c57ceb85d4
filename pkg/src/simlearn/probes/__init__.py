"""Learning-difficulty probes: Hessian sharpness, random-subspace training, distances."""
from .hessian import HvpSpec, PowerResult, dense_hessian, hvp, lambda_max, power_iteration
from .metrics import kl_divergence, tv_distance
from .rso import ProbeResult, RSOProjection, embed, make_projection, rso_train

__all__ = [
    "HvpSpec", "PowerResult", "ProbeResult", "RSOProjection", "dense_hessian", "embed", "hvp",
    "kl_divergence", "lambda_max", "make_projection", "power_iteration", "rso_train",
    "tv_distance",
]
