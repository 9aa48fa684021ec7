"""Time-domain integration of the membrane equation of motion.

Integrates M w'' + R w' + K w = F_e(t, w) + p*A + F_ext(t) with a
fixed-step classical Runge-Kutta scheme and halts on contact (collapse).
Also provides the small-signal frequency response of the linearized
oscillator about w = 0.

The stepping kernel lives in a compiled extension (``_integrator``)
with a pure-Python twin (``_integrator_py``). Whichever imports first
is used; both produce bit-identical trajectories.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import IntegrationDivergedError
from .model import CmutCell, derive_lumped
from ._solvers import golden_max

try:
    from . import _integrator as _kernel
except ImportError:  # pragma: no cover - depends on build environment
    from . import _integrator_py as _kernel

#: Name of the active stepping kernel, "compiled" or "python".
INTEGRATOR_BACKEND = _kernel.BACKEND

#: Default step count per lumped-resonance period for default_timestep.
STEPS_PER_PERIOD = 200

#: Relative frequency tolerance of the resonance peak search.
RESONANCE_RTOL = 1e-6


@dataclass(frozen=True)
class Zero:
    """No applied voltage."""


@dataclass(frozen=True)
class Constant:
    """DC bias voltage."""

    v_dc: float  # V


@dataclass(frozen=True)
class BiasedSine:
    """DC bias with a superimposed sine: v_dc + v_ac*sin(2*pi*f*t + phase)."""

    v_dc: float  # V
    v_ac: float  # V
    frequency: float  # Hz
    phase: float = 0.0  # rad

    def __post_init__(self) -> None:
        if not (self.frequency > 0.0 and math.isfinite(self.frequency)):
            raise ValueError("BiasedSine frequency must be positive and finite")
        for name in ("v_dc", "v_ac", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"BiasedSine {name} must be finite")


@dataclass(frozen=True)
class Pulse:
    """Rectangular voltage pulse, active on [start, start + width)."""

    amplitude: float  # V
    start: float  # s
    width: float  # s

    def __post_init__(self) -> None:
        if not (self.width > 0.0 and math.isfinite(self.width)):
            raise ValueError("Pulse width must be positive and finite")
        if not (self.start >= 0.0 and math.isfinite(self.start)):
            raise ValueError("Pulse start must be non-negative and finite")
        if not math.isfinite(self.amplitude):
            raise ValueError("Pulse amplitude must be finite")


DriveSignal = Union[Zero, Constant, BiasedSine, Pulse]


@dataclass(frozen=True)
class SimConfig:
    """Integration settings.

    contact_margin is the fraction of the gap treated as contact: the run
    halts the first time w >= contact_margin * gap.
    """

    dt: float  # s
    duration: float  # s
    contact_margin: float = 0.999  # fraction of gap
    external_pressure: float = 0.0  # Pa, uniform over the membrane

    def __post_init__(self) -> None:
        if not (0.0 < self.dt <= self.duration and math.isfinite(self.duration)):
            raise ValueError("require 0 < dt <= duration, both finite")
        if not 0.0 < self.contact_margin < 1.0:
            raise ValueError("contact_margin must lie in (0, 1)")
        if not math.isfinite(self.external_pressure):
            raise ValueError("external_pressure must be finite")


@dataclass(frozen=True)
class Collapse:
    """Contact event: membrane reached the contact margin at this time."""

    time: float  # s


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trajectory; arrays share one length and a uniform step.

    If event is a Collapse the series ends at the collapse sample, with
    the final displacement pinned at contact_margin * gap.
    """

    times: np.ndarray  # s
    displacement: np.ndarray  # m
    velocity: np.ndarray  # m/s
    electrostatic_force: np.ndarray  # N
    capacitance: np.ndarray  # F
    event: Collapse | None = None


def drive_value(drive: DriveSignal, t: float) -> float:
    """Applied voltage at time t in volts."""
    if isinstance(drive, Zero):
        return 0.0
    if isinstance(drive, Constant):
        return drive.v_dc
    if isinstance(drive, BiasedSine):
        return drive.v_dc + drive.v_ac * math.sin(
            2.0 * math.pi * drive.frequency * t + drive.phase
        )
    if isinstance(drive, Pulse):
        if t >= drive.start and t < drive.start + drive.width:
            return drive.amplitude
        return 0.0
    raise TypeError(f"not a drive signal: {drive!r}")


def default_timestep(cell: CmutCell) -> float:
    """Step size resolving the lumped resonance with STEPS_PER_PERIOD samples."""
    return 1.0 / (STEPS_PER_PERIOD * derive_lumped(cell).lumped_frequency)


def _encode_drive(drive: DriveSignal) -> tuple[int, float, float, float, float]:
    """Pack a drive into the (kind, p0..p3) form the kernel consumes."""
    if isinstance(drive, Zero):
        return _kernel.DRIVE_ZERO, 0.0, 0.0, 0.0, 0.0
    if isinstance(drive, Constant):
        return _kernel.DRIVE_CONSTANT, drive.v_dc, 0.0, 0.0, 0.0
    if isinstance(drive, BiasedSine):
        omega = 2.0 * math.pi * drive.frequency
        return _kernel.DRIVE_BIASED_SINE, drive.v_dc, drive.v_ac, omega, drive.phase
    if isinstance(drive, Pulse):
        return _kernel.DRIVE_PULSE, drive.amplitude, drive.start, drive.width, 0.0
    raise TypeError(f"not a drive signal: {drive!r}")


def simulate(
    cell: CmutCell,
    drive: DriveSignal,
    config: SimConfig,
    *,
    initial_displacement: float = 0.0,
    initial_velocity: float = 0.0,
    force: Callable[[float], float] | None = None,
) -> TimeSeries:
    """Integrate the driven membrane from rest (or the given initial state).

    Args:
        cell: transducer geometry and materials.
        drive: voltage waveform applied across the gap.
        config: step size, duration, contact margin and static pressure.
        initial_displacement: starting w in metres (default 0).
        initial_velocity: starting dw/dt in m/s (default 0).
        force: optional extra force in newtons as a function of time,
            added to the electrostatic and pressure terms.

    Returns:
        The sampled trajectory. On contact the series is truncated at the
        collapse sample and event is set; the integrator does not model
        post-contact motion.

    Raises:
        IntegrationDivergedError: the state left the representable range
            (overflow to non-finite values), reported with the failing step.
    """
    params = derive_lumped(cell)
    env = cell.environment
    gap = cell.gap
    margin_gap = config.contact_margin * gap
    # Stage arithmetic clamps the electrostatic gap here so a step that
    # overshoots contact cannot divide by ~0 before the halt check runs.
    gap_floor = gap - margin_gap

    n_steps = int(round(config.duration / config.dt))
    if n_steps < 1:
        n_steps = 1
    kind, p0, p1, p2, p3 = _encode_drive(drive)
    const_force = config.external_pressure * params.area

    n = n_steps + 1
    out_t = np.empty(n)
    out_w = np.empty(n)
    out_v = np.empty(n)
    out_fe = np.empty(n)
    out_c = np.empty(n)

    status, last = _kernel.run_rk4(
        params.total_mass, params.damping, params.spring_constant,
        0.5 * env.vacuum_permittivity * params.area,
        env.vacuum_permittivity * params.area,
        gap, margin_gap, gap_floor,
        kind, p0, p1, p2, p3,
        const_force, force,
        config.dt, n_steps, initial_displacement, initial_velocity,
        out_t, out_w, out_v, out_fe, out_c,
    )

    if status == _kernel.STATUS_DIVERGED:
        raise IntegrationDivergedError(step=last, time=last * config.dt)

    event = None
    if status == _kernel.STATUS_COLLAPSED:
        event = Collapse(time=float(out_t[last]))
        end = last + 1
        out_t = out_t[:end]
        out_w = out_w[:end]
        out_v = out_v[:end]
        out_fe = out_fe[:end]
        out_c = out_c[:end]

    return TimeSeries(
        times=out_t,
        displacement=out_w,
        velocity=out_v,
        electrostatic_force=out_fe,
        capacitance=out_c,
        event=event,
    )


def mechanical_response(cell: CmutCell, frequency: float) -> complex:
    """Complex compliance H(j*omega) = 1/(K - M*omega^2 + j*omega*R) in m/N.

    Small-signal response of the oscillator linearized about w = 0; the
    static limit |H| -> 1/K as frequency -> 0.
    """
    if not (frequency > 0.0 and math.isfinite(frequency)):
        raise ValueError("frequency must be positive and finite")
    params = derive_lumped(cell)
    omega = 2.0 * math.pi * frequency
    return 1.0 / complex(
        params.spring_constant - params.total_mass * omega * omega,
        omega * params.damping,
    )


@dataclass(frozen=True)
class ResonancePeak:
    """Result of the compliance peak search.

    at_endpoint flags a maximum on the bracket boundary, meaning the
    bracket was too narrow (or the response is monotone over it).
    """

    frequency: float  # Hz
    compliance: float  # m/N, peak |H|
    at_endpoint: bool


def resonance_peak(cell: CmutCell, f_lo: float, f_hi: float) -> ResonancePeak:
    """Locate the maximum of |mechanical_response| on [f_lo, f_hi].

    Golden-section search to RESONANCE_RTOL relative frequency tolerance.
    A damped peak sits at f0*sqrt(1 - 1/(2*Q^2)) when Q > 1/sqrt(2);
    otherwise the compliance is monotone and the maximum lands on an
    endpoint, reported via at_endpoint.
    """
    if not (0.0 < f_lo < f_hi and math.isfinite(f_hi)):
        raise ValueError("require 0 < f_lo < f_hi, finite")

    def gain(f: float) -> float:
        return abs(mechanical_response(cell, f))

    f_peak, peak = golden_max(gain, f_lo, f_hi, rtol=RESONANCE_RTOL)
    edge = 2.0 * RESONANCE_RTOL * f_hi
    at_endpoint = (f_peak - f_lo) <= edge or (f_hi - f_peak) <= edge
    for f_edge in (f_lo, f_hi):
        g = gain(f_edge)
        if g >= peak:
            f_peak, peak, at_endpoint = f_edge, g, True
    return ResonancePeak(frequency=f_peak, compliance=peak, at_endpoint=at_endpoint)
