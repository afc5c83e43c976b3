"""
Configuration management for the frame toolkit
"""
from dataclasses import dataclass, field


@dataclass
class ToleranceConfig:
    """Numerical tolerances shared by all modules"""
    eig_rel: float = 1e-9  # relative to the largest eigenvalue magnitude
    rank_rel: float = 1e-12  # singular value threshold relative to sigma_max
    zero: float = 1e-14  # coefficients at or below this are treated as zero
    residual: float = 1e-9
    power_rtol: float = 1e-8
    power_max_iter: int = 500


@dataclass
class DensityConfig:
    """Density evaluation settings"""
    enumeration_cap: int = 2_000_000
    divergence_ceiling: float = 4.0
    divergence_growth: float = 1.5
    center_grid_fraction: float = 0.125  # Beurling centers every R/8
    extrapolation_tail: int = 8  # sweep points used for the 1/R fit


@dataclass
class LocalizationConfig:
    """Envelope and tail operator settings"""
    dense_cap: int = 4000  # above this many rows/cols use power iteration
    decay_floor: float = 1e-13
    r2_threshold: float = 0.9
    exponent_margin: float = 0.25
    min_shells: int = 4


@dataclass
class SelectionConfig:
    """Restricted invertibility settings"""
    exhaustive_max_n: int = 12
    lookahead: int = 4
    barrier_start: float = 0.9
    barrier_factor: float = 0.7
    barrier_levels: int = 24
    barrier_refine_steps: int = 12
    grid_step: float = 1e-3
    max_radius: int = 4096
    certificate_floor: float = 1e-9


@dataclass
class GaborConfig:
    """Time-frequency settings"""
    default_n: int = 128
    half_lattice_step: int = 0  # 0 means choose automatically from n
    target_redundancy: float = 2.0


@dataclass
class Config:
    """Main configuration class"""
    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig)
    density: DensityConfig = field(default_factory=DensityConfig)
    localization: LocalizationConfig = field(default_factory=LocalizationConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    gabor: GaborConfig = field(default_factory=GaborConfig)

    # App settings
    app_name: str = "Frame Density Toolkit"
    version: str = "1.0.0"
    debug: bool = False


# Global config instance
config = Config()


def get_config() -> Config:
    """Get the global configuration instance"""
    return config


def update_config(**kwargs):
    """Update configuration values"""
    global config
    sections = (config.tolerance, config.density, config.localization, config.selection, config.gabor)
    for key, value in kwargs.items():
        if hasattr(config, key):
            setattr(config, key, value)
            continue
        for section in sections:
            if hasattr(section, key):
                setattr(section, key, value)
                break


def reset_config() -> Config:
    """Restore defaults (used by tests that tweak settings)"""
    global config
    config = Config()
    return config
