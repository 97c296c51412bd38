"""Redundant-information simulations for a two-qubit system coupled to a spin environment."""
from .branchstate import (DEFAULT_PRESET, BranchState, DensityMatrix, ModelParams, SubsystemSelector, build_state,
                          reduce, reduced_spectrum, select)
from .classicality import decompose, detect_plateau, mi_fraction_curve, nullity_certificate
from .infomeasures import (delta_I, discord_measured_on_qubit, entropy, kw_gap_bounds, l1_coherence,
                           mutual_information, state_entropy)

__version__ = "0.1.0"
