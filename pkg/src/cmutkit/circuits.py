"""Readout-circuit signal and thermal-noise models.

Covers three front ends for a capacitive cell of rest capacitance C:

* the single-cell voltage divider (SGSR): V_out = V_in/(jwR(C+dC)+1);
* the serial chain of n identical cells (OGMR): V_out = n*V_in/(jwR(C+dC)+n),
  with thermal noise sqrt(4*kB*R*T*df + n*kB*T/C) over df = n/(2*pi*R*C);
* the op-amp linearized chain with gain -n and a three-term noise budget.

Signal-to-noise ratios are computed directly from the definition
|V_out(0) - V_out(dC)| / noise. A separate simplified closed form
eta(n) = K*sqrt(n)/(1+n*Z/R)^2 is also provided; it drops a Z/R factor
that the definition keeps, so under the matched rule R = n*|Z| the
definition gives eta falling as 1/sqrt(n) while the closed form grows as
K*sqrt(n)/4. Both routes are exposed and labeled; the sqrt(n) gain is
rigorous in the fixed-R regime R >> n*|Z| and in the linearized circuit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

from .errors import ContactError

BOLTZMANN_CONSTANT = 1.380649e-23  # J/K


def _check_positive(obj: object, *names: str) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (value > 0.0 and math.isfinite(value)):
            raise ValueError(f"{type(obj).__name__}.{name} must be positive and finite")


@dataclass(frozen=True)
class SgsrCircuit:
    """Single-cell divider: bias resistor R driving one cell of capacitance C."""

    resistance: float  # ohm
    rest_capacitance: float  # F
    input_amplitude: float  # V
    angular_frequency: float  # rad/s
    temperature: float  # K

    def __post_init__(self) -> None:
        _check_positive(
            self, "resistance", "rest_capacitance", "input_amplitude",
            "angular_frequency", "temperature",
        )


@dataclass(frozen=True)
class FixedResistance:
    """Bias resistor held at a set value regardless of the chain length."""

    ohms: float

    def __post_init__(self) -> None:
        if not (self.ohms > 0.0 and math.isfinite(self.ohms)):
            raise ValueError("FixedResistance.ohms must be positive and finite")


@dataclass(frozen=True)
class MatchedResistance:
    """Bias resistor scaled with the chain: R = n * |Z|, |Z| = 1/(w*C)."""


ResistanceRule = Union[FixedResistance, MatchedResistance]


@dataclass(frozen=True)
class OgmrSerialCircuit:
    """Serial chain of n identical cells behind one bias resistor."""

    sensor_count: int
    resistance_rule: ResistanceRule
    per_sensor_capacitance: float  # F
    input_amplitude: float  # V
    angular_frequency: float  # rad/s
    temperature: float  # K

    def __post_init__(self) -> None:
        if self.sensor_count < 1:
            raise ValueError("OgmrSerialCircuit.sensor_count must be >= 1")
        if not isinstance(self.resistance_rule, (FixedResistance, MatchedResistance)):
            raise TypeError("resistance_rule must be FixedResistance or MatchedResistance")
        _check_positive(
            self, "per_sensor_capacitance", "input_amplitude",
            "angular_frequency", "temperature",
        )


@dataclass(frozen=True)
class AmplifierSpec:
    """Op-amp input noise densities; both referred to the inverting input."""

    current_noise_density: float = 22e-12  # A/sqrt(Hz)
    voltage_noise_density: float = 1.673e-9  # V/sqrt(Hz)

    def __post_init__(self) -> None:
        for name in ("current_noise_density", "voltage_noise_density"):
            value = getattr(self, name)
            if not (value >= 0.0 and math.isfinite(value)):
                raise ValueError(f"AmplifierSpec.{name} must be >= 0 and finite")


#: Amplifier with both noise densities zeroed, for amp-noise-free ratios.
QUIET_AMPLIFIER = AmplifierSpec(current_noise_density=0.0, voltage_noise_density=0.0)


@dataclass(frozen=True)
class LinearOgmrCircuit:
    """Op-amp front end for n serial cells: gain -n, explicit bandwidth."""

    sensor_count: int
    rest_capacitance: float  # F, one cell
    gap: float  # m
    input_amplitude: float  # V
    angular_frequency: float  # rad/s
    temperature: float  # K
    bandwidth: float  # Hz, explicit input: it is not derived from the chain
    amplifier: AmplifierSpec = field(default_factory=AmplifierSpec)

    def __post_init__(self) -> None:
        if self.sensor_count < 1:
            raise ValueError("LinearOgmrCircuit.sensor_count must be >= 1")
        _check_positive(
            self, "rest_capacitance", "gap", "input_amplitude",
            "angular_frequency", "temperature", "bandwidth",
        )


def sgsr_output(circuit: SgsrCircuit, delta_c: float) -> complex:
    """Output phasor V_in/(jwR(C+dC)+1) for a capacitance excursion dC."""
    total_c = circuit.rest_capacitance + delta_c
    if not total_c > 0.0:
        raise ValueError("total capacitance C + delta_c must stay positive")
    return circuit.input_amplitude / (
        1j * circuit.angular_frequency * circuit.resistance * total_c + 1
    )


def sgsr_noise(circuit: SgsrCircuit, bandwidth: float) -> float:
    """RMS noise sqrt(4*kB*R*T*df + kB*T/C) over an explicit bandwidth."""
    if not (bandwidth > 0.0 and math.isfinite(bandwidth)):
        raise ValueError("bandwidth must be positive and finite")
    kt = BOLTZMANN_CONSTANT * circuit.temperature
    return math.sqrt(
        4.0 * kt * circuit.resistance * bandwidth
        + kt / circuit.rest_capacitance
    )


def resolved_resistance(circuit: OgmrSerialCircuit) -> float:
    """Bias resistance after applying the rule: fixed value, or n/(w*C)."""
    rule = circuit.resistance_rule
    if isinstance(rule, FixedResistance):
        return rule.ohms
    return circuit.sensor_count / (
        circuit.angular_frequency * circuit.per_sensor_capacitance
    )


def ogmr_output(circuit: OgmrSerialCircuit, delta_c: float) -> complex:
    """Output phasor n*V_in/(jwR(C+dC)+n); reduces to sgsr_output at n = 1."""
    total_c = circuit.per_sensor_capacitance + delta_c
    if not total_c > 0.0:
        raise ValueError("total capacitance C + delta_c must stay positive")
    n = circuit.sensor_count
    resistance = resolved_resistance(circuit)
    return n * circuit.input_amplitude / (
        1j * circuit.angular_frequency * resistance * total_c + n
    )


def ogmr_bandwidth(circuit: OgmrSerialCircuit) -> float:
    """Chain bandwidth n/(2*pi*R*C); equals w/(2*pi) under the matched rule."""
    return circuit.sensor_count / (
        2.0 * math.pi * resolved_resistance(circuit) * circuit.per_sensor_capacitance
    )


def ogmr_noise(circuit: OgmrSerialCircuit) -> float:
    """RMS noise sqrt(4*kB*R*T*df + n*kB*T/C) with df = ogmr_bandwidth."""
    kt = BOLTZMANN_CONSTANT * circuit.temperature
    return math.sqrt(
        4.0 * kt * resolved_resistance(circuit) * ogmr_bandwidth(circuit)
        + circuit.sensor_count * kt / circuit.per_sensor_capacitance
    )


def ogmr_snr(circuit: OgmrSerialCircuit, delta_c: float) -> float:
    """Signal-to-noise ratio straight from the definition.

    eta = |V_out(0) - V_out(dC)| / noise, all terms evaluated exactly.
    Under the matched rule this falls as 1/sqrt(n); see the module
    docstring for how that relates to the simplified closed form.
    """
    if not (delta_c > 0.0 and math.isfinite(delta_c)):
        raise ValueError("delta_c must be positive and finite")
    signal = abs(ogmr_output(circuit, 0.0) - ogmr_output(circuit, delta_c))
    return signal / ogmr_noise(circuit)


def ogmr_snr_closed_form(
    n: int, k_const: float, z_over_r: float = 0.0, matched: bool = False
) -> float:
    """Simplified closed form eta(n) = K*sqrt(n)/(1+n*Z/R)^2.

    With matched=True the resistor tracks the chain (R = n*|Z|) and the
    expression collapses to K*sqrt(n)/4, independent of z_over_r. This
    is the labeled shortcut variant, kept separate from ogmr_snr because
    the two disagree under the matched rule (module docstring).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if matched:
        return k_const * math.sqrt(n) / 4.0
    return k_const * math.sqrt(n) / (1.0 + n * z_over_r) ** 2


def linear_output(circuit: LinearOgmrCircuit, x: float) -> tuple[float, float]:
    """DC and AC output of the gain -n stage: (-n*V_in, n*(x/d)*V_in)."""
    if x >= circuit.gap:
        raise ContactError(
            f"displacement {x:.6e} m reaches the gap {circuit.gap:.6e} m"
        )
    if not (x >= 0.0 and math.isfinite(x)):
        raise ValueError("displacement must be >= 0 and finite")
    n = circuit.sensor_count
    dc = -n * circuit.input_amplitude
    ac = n * x / circuit.gap * circuit.input_amplitude
    return dc, ac


def linear_noise(circuit: LinearOgmrCircuit) -> float:
    """RMS noise of the op-amp chain.

    sqrt( n*kB*T/C0 + (I_N*|Z|)^2*df*n^2/(n+1) + V_N^2*df*n ) with
    |Z| = 1/(w*C0): the sampled kTC term of n cells, the amplifier
    current noise across the source impedance, and its voltage noise.
    """
    n = circuit.sensor_count
    kt = BOLTZMANN_CONSTANT * circuit.temperature
    z_mag = 1.0 / (circuit.angular_frequency * circuit.rest_capacitance)
    amp = circuit.amplifier
    current_term = (
        (amp.current_noise_density * z_mag) ** 2
        * circuit.bandwidth * n * n / (n + 1)
    )
    voltage_term = amp.voltage_noise_density ** 2 * circuit.bandwidth * n
    return math.sqrt(n * kt / circuit.rest_capacitance + current_term + voltage_term)


def linear_snr(
    circuit: LinearOgmrCircuit, x: float, include_amp_noise: bool = True
) -> float:
    """AC signal over noise for a displacement x of every cell.

    include_amp_noise=False zeroes both amplifier densities, leaving the
    pure kTC floor; the ratio then scales exactly as sqrt(n).
    """
    _, ac = linear_output(circuit, x)
    if not include_amp_noise:
        circuit = replace(circuit, amplifier=QUIET_AMPLIFIER)
    return ac / linear_noise(circuit)


def thermal_noise_density(resistance: float, temperature: float) -> float:
    """Resistor voltage-noise density sqrt(4*kB*R*T) in V/sqrt(Hz)."""
    if resistance < 0.0 or temperature < 0.0:
        raise ValueError("resistance and temperature must be >= 0")
    return math.sqrt(4.0 * BOLTZMANN_CONSTANT * resistance * temperature)
