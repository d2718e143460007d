"""Measurement-induced nonlocality based on the Hellinger distance."""

from .measures import (
    MeasureReport,
    affinity_min,
    h_min,
    h_min_2xn_closed,
    h_min_bell_diagonal,
    h_min_isotropic,
    h_min_pure,
    h_min_upper_bound,
    h_min_werner,
    hellinger_distance,
    hs_min,
    hs_min_2xn,
    seq_distance,
    skew_information,
    skew_min,
    weak_h_min,
)
from .states import DensityMatrix, SchmidtForm, bell_diagonal, bell_state, isotropic, random_density, werner

__version__ = "0.1.0"
