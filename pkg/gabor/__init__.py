"""
Gabor Module

Discrete time-frequency analysis on Z_n: shifts, STFT, modulation norms,
Gabor systems and molecules, and the Gabor selection pipeline.
"""
from .signal import Signal, TFPoint, TFSet, boxcar, gaussian
from .stft import (
    S0Report,
    covariance_deviation,
    energy_residual,
    modulate,
    modulation_norm,
    s0_diagnostic,
    stft,
    stft_frame,
    tf_radii,
    tf_shift,
    translate,
    write_stft_csv,
)
from .systems import (
    canonical_tight_window,
    frame_operator_matrix,
    gabor_system,
    gabor_system_union,
    half_lattice_step,
    reference_system,
)
from .molecules import MoleculeReport, MoleculeSystem, molecule_check, molecules_from_shifts, recentered_moduli
from .lattice import density_relation, lattice_offset, nearest_lattice_map, union_lattice_map
from .pipeline import gabor_rit_pipeline

__all__ = [
    "Signal",
    "TFPoint",
    "TFSet",
    "boxcar",
    "gaussian",
    "S0Report",
    "covariance_deviation",
    "energy_residual",
    "modulate",
    "modulation_norm",
    "s0_diagnostic",
    "stft",
    "stft_frame",
    "tf_radii",
    "tf_shift",
    "translate",
    "write_stft_csv",
    "canonical_tight_window",
    "frame_operator_matrix",
    "gabor_system",
    "gabor_system_union",
    "half_lattice_step",
    "reference_system",
    "MoleculeReport",
    "MoleculeSystem",
    "molecule_check",
    "molecules_from_shifts",
    "recentered_moduli",
    "density_relation",
    "lattice_offset",
    "nearest_lattice_map",
    "union_lattice_map",
    "gabor_rit_pipeline",
]
