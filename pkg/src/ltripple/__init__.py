"""LT codes with a decreasing ripple size."""

__version__ = "0.1.0"

from .degree_dist import (  # noqa: E402
    DegreeDistribution,
    RsdParams,
    ideal_soliton,
    load_distribution,
    robust_soliton,
    sample_degree,
    save_distribution,
)
from .designer import DesignSolution, RippleTarget, design  # noqa: E402
from .release import q, r, release_prob  # noqa: E402

__all__ = [
    "DegreeDistribution",
    "DesignSolution",
    "RippleTarget",
    "RsdParams",
    "design",
    "ideal_soliton",
    "load_distribution",
    "q",
    "r",
    "release_prob",
    "robust_soliton",
    "sample_degree",
    "save_distribution",
]
