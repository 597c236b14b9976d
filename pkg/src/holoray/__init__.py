"""Intensity-only recovery of radiated Helmholtz wave fields along rays."""

from .fields import (
    PHASE_GAUGED,
    PHASE_RAW,
    Direction,
    DomainError,
    FarFieldExpansion,
    MultipoleSpectrum,
    OutOfRegionError,
    RadiatingField,
    Ray,
    UnsupportedDegreeError,
    WaveVector,
    aw_coefficients,
    eval_aw,
    eval_radiated,
    eval_total,
    intensity,
    intensity_function,
    sph_hankel1,
    sph_harmonic,
)
from .recovery import (
    DegenerateDirectionError,
    DegenerateTauError,
    IntensityTrace,
    LevelDiagnostics,
    OutOfZoneError,
    PlaneTargetResult,
    RecoveryReport,
    SamplingPlan,
    amplification_floor,
    choose_tau,
    extract_leading,
    partial_field,
    reconstruct_on_ray,
    recover_expansion,
    recover_next,
    recover_on_plane,
    residual_b,
    richardson_refine,
    scaled_residual,
)
from .config import (
    ChecksConfig,
    ConfigError,
    ExperimentConfig,
    NoiseConfig,
    OutputConfig,
    PlanConfig,
    PlaneGeometry,
    RayGeometry,
    SceneConfig,
    parse_config,
    serialize_config,
)

__version__ = "0.1.0"
