"""Lumped-parameter modeling toolkit for capacitive ultrasonic transducers.

One membrane-over-gap cell is described by geometry and materials
(CmutCell); everything else is derived: static lumped quantities
(model), time-domain membrane dynamics with collapse detection
(dynamics), readout-circuit signal and noise figures (circuits), and
design-space sweeps and calibration (explorer). The cli module wraps it
all behind design files and CSV/JSON tables.
"""
from .circuits import (
    AmplifierSpec,
    FixedResistance,
    LinearOgmrCircuit,
    MatchedResistance,
    OgmrSerialCircuit,
    SgsrCircuit,
    linear_noise,
    linear_output,
    linear_snr,
    ogmr_bandwidth,
    ogmr_noise,
    ogmr_output,
    ogmr_snr,
    ogmr_snr_closed_form,
    resolved_resistance,
    sgsr_noise,
    sgsr_output,
    thermal_noise_density,
)
from .designfile import DesignFile, format_design_file, parse_design_file
from .dynamics import (
    INTEGRATOR_BACKEND,
    BiasedSine,
    Collapse,
    Constant,
    DriveSignal,
    Pulse,
    ResonancePeak,
    SimConfig,
    TimeSeries,
    Zero,
    default_timestep,
    drive_value,
    mechanical_response,
    resonance_peak,
    simulate,
)
from .errors import (
    BracketError,
    CmutError,
    ContactError,
    DesignFileError,
    InfeasibleTargetError,
    IntegrationDivergedError,
    SweepConfigError,
)
from .explorer import (
    SweepRow,
    SweepSpec,
    calibrate_electrode_thickness,
    grid_sweep,
    solve_membrane_thickness,
    sweep_sensor_count,
)
from .model import (
    ALUMINUM,
    SILICON,
    CmutCell,
    Collapsed,
    Environment,
    EquilibriumResult,
    LumpedParams,
    Material,
    Stable,
    capacitance_at,
    derive_lumped,
    electrostatic_force,
    small_signal_deflection,
    static_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "ALUMINUM",
    "AmplifierSpec",
    "BiasedSine",
    "BracketError",
    "CmutCell",
    "CmutError",
    "Collapse",
    "Collapsed",
    "Constant",
    "ContactError",
    "DesignFile",
    "DesignFileError",
    "DriveSignal",
    "Environment",
    "EquilibriumResult",
    "FixedResistance",
    "INTEGRATOR_BACKEND",
    "InfeasibleTargetError",
    "IntegrationDivergedError",
    "LinearOgmrCircuit",
    "LumpedParams",
    "Material",
    "MatchedResistance",
    "OgmrSerialCircuit",
    "Pulse",
    "ResonancePeak",
    "SILICON",
    "SgsrCircuit",
    "SimConfig",
    "Stable",
    "SweepConfigError",
    "SweepRow",
    "SweepSpec",
    "TimeSeries",
    "Zero",
    "calibrate_electrode_thickness",
    "capacitance_at",
    "default_timestep",
    "derive_lumped",
    "drive_value",
    "electrostatic_force",
    "format_design_file",
    "grid_sweep",
    "linear_noise",
    "linear_output",
    "linear_snr",
    "mechanical_response",
    "ogmr_bandwidth",
    "ogmr_noise",
    "ogmr_output",
    "ogmr_snr",
    "ogmr_snr_closed_form",
    "parse_design_file",
    "resolved_resistance",
    "resonance_peak",
    "sgsr_noise",
    "sgsr_output",
    "simulate",
    "small_signal_deflection",
    "solve_membrane_thickness",
    "static_equilibrium",
    "sweep_sensor_count",
    "thermal_noise_density",
]
