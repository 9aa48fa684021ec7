"""Design-space sweeps, calibration, and inverse geometry problems.

Everything here is a pure function from a cell (and optional circuit
templates) to rows of named metric values, ready for tabular output.
Root finding is plain bisection on verified monotone brackets.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, Union

import numpy as np

from .circuits import (
    BOLTZMANN_CONSTANT,
    LinearOgmrCircuit,
    MatchedResistance,
    OgmrSerialCircuit,
    QUIET_AMPLIFIER,
    linear_noise,
    linear_output,
    ogmr_noise,
    ogmr_output,
    ogmr_snr_closed_form,
    resolved_resistance,
)
from .errors import InfeasibleTargetError, SweepConfigError
from .model import CmutCell, LumpedParams, Stable, derive_lumped, static_equilibrium
from ._solvers import bisect_monotone

#: Relative tolerance on a frequency target for the inverse solvers.
FREQUENCY_RTOL = 1e-6

_CELL_PARAMETERS = frozenset(
    {"membrane_thickness", "vibrating_radius", "gap", "electrode_thickness"}
)
_PARAMETERS = _CELL_PARAMETERS | {"sensor_count", "bias_voltage"}

_LUMPED_METRICS = frozenset(f.name for f in dataclasses.fields(LumpedParams))
_SNR_METRICS = ("signal", "noise", "eta", "eta_closed_form", "eta_amp_free")
_METRICS = _LUMPED_METRICS | {"equilibrium_displacement"} | set(_SNR_METRICS)


@dataclass(frozen=True)
class SweepRow:
    """One evaluated grid point: the parameter value and its metrics."""

    parameter_value: float
    metrics: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class SweepSpec:
    """Endpoint-inclusive uniform grid over one parameter.

    parameter is one of: sensor_count, membrane_thickness,
    vibrating_radius, gap, electrode_thickness, bias_voltage.
    """

    parameter: str
    start: float
    stop: float
    steps: int
    metrics: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.parameter not in _PARAMETERS:
            raise SweepConfigError(
                f"unknown sweep parameter {self.parameter!r}; "
                f"choose from {sorted(_PARAMETERS)}"
            )
        if not (math.isfinite(self.start) and self.start < self.stop):
            raise SweepConfigError("sweep requires start < stop, both finite")
        if self.steps < 2:
            raise SweepConfigError("sweep requires at least 2 steps")
        if not self.metrics:
            raise SweepConfigError("sweep requires at least one metric")
        for name in self.metrics:
            if name not in _METRICS:
                raise SweepConfigError(
                    f"unknown metric {name!r}; choose from {sorted(_METRICS)}"
                )
        if len(set(self.metrics)) != len(self.metrics):
            raise SweepConfigError("metric names must be unique")


def _closed_form_coefficient(circuit: OgmrSerialCircuit, delta_c: float) -> float:
    """K = (dC/C)*V_in/sqrt(kB*T/C*(2/pi+1)), the closed-form prefactor."""
    c = circuit.per_sensor_capacitance
    kt_over_c = BOLTZMANN_CONSTANT * circuit.temperature / c
    return (delta_c / c) * circuit.input_amplitude / math.sqrt(
        kt_over_c * (2.0 / math.pi + 1.0)
    )


def _ogmr_rows(
    circuit: OgmrSerialCircuit,
    counts: Iterable[int],
    delta_c: float,
    k_const: float | None,
) -> list[SweepRow]:
    matched = isinstance(circuit.resistance_rule, MatchedResistance)
    k = _closed_form_coefficient(circuit, delta_c) if k_const is None else k_const
    rows = []
    for n in counts:
        chain = replace(circuit, sensor_count=n)
        signal = abs(ogmr_output(chain, 0.0) - ogmr_output(chain, delta_c))
        noise = ogmr_noise(chain)
        z_over_r = 1.0 / (
            chain.angular_frequency * chain.per_sensor_capacitance
            * resolved_resistance(chain)
        )
        closed = ogmr_snr_closed_form(n, k, z_over_r, matched=matched)
        rows.append(SweepRow(
            parameter_value=float(n),
            metrics=(
                ("signal", signal),
                ("noise", noise),
                ("eta", signal / noise),
                ("eta_closed_form", closed),
            ),
        ))
    return rows


def _linear_rows(
    circuit: LinearOgmrCircuit,
    counts: Iterable[int],
    displacement: float,
    include_amp_noise: bool,
) -> list[SweepRow]:
    if not include_amp_noise:
        circuit = replace(circuit, amplifier=QUIET_AMPLIFIER)
    rows = []
    for n in counts:
        chain = replace(circuit, sensor_count=n)
        _, ac = linear_output(chain, displacement)
        noise = linear_noise(chain)
        quiet = replace(chain, amplifier=QUIET_AMPLIFIER)
        rows.append(SweepRow(
            parameter_value=float(n),
            metrics=(
                ("signal", ac),
                ("noise", noise),
                ("eta", ac / noise),
                ("eta_amp_free", ac / linear_noise(quiet)),
            ),
        ))
    return rows


def sweep_sensor_count(
    circuit: Union[OgmrSerialCircuit, LinearOgmrCircuit],
    n_max: int,
    *,
    delta_c: float | None = None,
    displacement: float | None = None,
    include_amp_noise: bool = True,
    k_const: float | None = None,
) -> list[SweepRow]:
    """Evaluate signal, noise, and SNR for chain lengths n = 1..n_max.

    A serial chain needs the capacitance excursion delta_c; the op-amp
    chain needs the membrane displacement. Columns per row:

    * serial: signal, noise, eta (definition), eta_closed_form
      (the simplified K*sqrt(n) form, with K derived from the circuit
      unless k_const is given);
    * op-amp: signal, noise, eta, eta_amp_free (amplifier terms zeroed).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    counts = range(1, n_max + 1)
    if isinstance(circuit, OgmrSerialCircuit):
        if delta_c is None:
            raise ValueError("delta_c is required for a serial chain sweep")
        return _ogmr_rows(circuit, counts, delta_c, k_const)
    if isinstance(circuit, LinearOgmrCircuit):
        if displacement is None:
            raise ValueError("displacement is required for an op-amp chain sweep")
        return _linear_rows(circuit, counts, displacement, include_amp_noise)
    raise TypeError(f"not a sweepable circuit: {circuit!r}")


def calibrate_electrode_thickness(cell: CmutCell, target_f0: float) -> float:
    """Electrode thickness at which the lumped resonance hits target_f0.

    Electrode mass only lowers the resonance, so the target must not
    exceed the zero-electrode frequency; within that range bisection
    converges to FREQUENCY_RTOL relative on the frequency.

    Raises:
        InfeasibleTargetError: target above the zero-electrode resonance.
    """
    if not (target_f0 > 0.0 and math.isfinite(target_f0)):
        raise ValueError("target_f0 must be positive and finite")

    def f0_at(thickness: float) -> float:
        probe = replace(cell, electrode_thickness=thickness)
        return derive_lumped(probe).lumped_frequency

    ytol = FREQUENCY_RTOL * target_f0
    ceiling = f0_at(0.0)
    if abs(ceiling - target_f0) <= ytol:
        return 0.0
    if target_f0 > ceiling:
        raise InfeasibleTargetError(
            f"target {target_f0:.6e} Hz exceeds the zero-electrode "
            f"resonance {ceiling:.6e} Hz; added mass only lowers it"
        )

    hi = max(cell.electrode_thickness, cell.membrane_thickness)
    while f0_at(hi) > target_f0:
        hi *= 2.0
    return bisect_monotone(
        lambda t: f0_at(t) - target_f0, 0.0, hi, ytol=ytol
    )


def solve_membrane_thickness(
    cell: CmutCell, target_f0: float, h_lo: float, h_hi: float
) -> float:
    """Membrane thickness in [h_lo, h_hi] with lumped resonance target_f0.

    The endpoints must bracket the target; bisection then converges to
    FREQUENCY_RTOL relative on the frequency (electrode thickness held
    fixed). An endpoint already on target is returned directly.

    Raises:
        BracketError: the bracket does not straddle the target.
    """
    if not (0.0 < h_lo < h_hi and math.isfinite(h_hi)):
        raise ValueError("require 0 < h_lo < h_hi, finite")
    if not (target_f0 > 0.0 and math.isfinite(target_f0)):
        raise ValueError("target_f0 must be positive and finite")

    def offset(h: float) -> float:
        probe = replace(cell, membrane_thickness=h)
        return derive_lumped(probe).lumped_frequency - target_f0

    return bisect_monotone(offset, h_lo, h_hi, ytol=FREQUENCY_RTOL * target_f0)


def _equilibrium_displacement(cell: CmutCell, voltage: float) -> float:
    result = static_equilibrium(cell, voltage)
    if isinstance(result, Stable):
        return result.displacement
    raise InfeasibleTargetError(
        f"no stable equilibrium at {voltage:.6e} V: the cell collapses, "
        "so equilibrium_displacement is undefined at this grid point"
    )


def _integer_grid(values: np.ndarray) -> list[int]:
    counts = []
    for v in values:
        n = round(float(v))
        if abs(v - n) > 1e-9 or n < 1:
            raise SweepConfigError(
                "sensor_count sweeps need an integer grid with every count "
                f">= 1; got {float(v)!r} (adjust start/stop/steps)"
            )
        counts.append(n)
    return counts


def grid_sweep(
    cell: CmutCell,
    spec: SweepSpec,
    *,
    bias_voltage: float | None = None,
    ogmr: OgmrSerialCircuit | None = None,
    linear: LinearOgmrCircuit | None = None,
    delta_c: float | None = None,
    displacement: float | None = None,
    include_amp_noise: bool = True,
    k_const: float | None = None,
) -> list[SweepRow]:
    """Evaluate metrics over the uniform grid described by spec.

    Geometry parameters rebuild the cell per point and expose any derived
    lumped quantity plus equilibrium_displacement (which needs a
    bias_voltage). A bias_voltage sweep supports equilibrium_displacement
    only. A sensor_count sweep needs one circuit template and supports
    the signal/noise/eta columns of sweep_sensor_count.

    Raises:
        SweepConfigError: metric incompatible with the swept parameter
            or a required input (circuit, bias voltage) is missing.
        InfeasibleTargetError: equilibrium requested where the cell
            collapses.
    """
    values = np.linspace(spec.start, spec.stop, spec.steps)

    if spec.parameter == "sensor_count":
        foreign = [m for m in spec.metrics if m not in _SNR_METRICS]
        if foreign:
            raise SweepConfigError(
                f"metrics {foreign} are not defined for a sensor_count sweep"
            )
        counts = _integer_grid(values)
        if ogmr is not None:
            if delta_c is None:
                raise SweepConfigError("a serial-chain sweep needs delta_c")
            if "eta_amp_free" in spec.metrics:
                raise SweepConfigError(
                    "eta_amp_free applies to the op-amp chain, not the serial one"
                )
            rows = _ogmr_rows(ogmr, counts, delta_c, k_const)
        elif linear is not None:
            if displacement is None:
                raise SweepConfigError("an op-amp chain sweep needs displacement")
            if "eta_closed_form" in spec.metrics:
                raise SweepConfigError(
                    "eta_closed_form applies to the serial chain, not the op-amp one"
                )
            rows = _linear_rows(linear, counts, displacement, include_amp_noise)
        else:
            raise SweepConfigError(
                "a sensor_count sweep needs a circuit template (ogmr or linear)"
            )
        return [_select_metrics(row, spec.metrics) for row in rows]

    for name in spec.metrics:
        if name in _SNR_METRICS:
            raise SweepConfigError(
                f"metric {name!r} requires parameter sensor_count and a circuit"
            )

    if spec.parameter == "bias_voltage":
        lumped = [m for m in spec.metrics if m in _LUMPED_METRICS]
        if lumped:
            raise SweepConfigError(
                f"metrics {lumped} do not vary with bias_voltage; "
                "sweep a geometry parameter instead"
            )
        return [
            SweepRow(
                parameter_value=float(v),
                metrics=tuple(
                    (m, _equilibrium_displacement(cell, float(v)))
                    for m in spec.metrics
                ),
            )
            for v in values
        ]

    needs_bias = "equilibrium_displacement" in spec.metrics
    if needs_bias and bias_voltage is None:
        raise SweepConfigError("equilibrium_displacement needs a bias_voltage")

    rows = []
    for v in values:
        point = replace(cell, **{spec.parameter: float(v)})
        params = derive_lumped(point)
        metrics = []
        for name in spec.metrics:
            if name == "equilibrium_displacement":
                metrics.append((name, _equilibrium_displacement(point, bias_voltage)))
            else:
                metrics.append((name, getattr(params, name)))
        rows.append(SweepRow(parameter_value=float(v), metrics=tuple(metrics)))
    return rows


def _select_metrics(row: SweepRow, names: Sequence[str]) -> SweepRow:
    available = dict(row.metrics)
    return SweepRow(
        parameter_value=row.parameter_value,
        metrics=tuple((name, available[name]) for name in names),
    )
