"""Design-file parsing and rendering.

An INI file describes one cell, optional readout-circuit templates, and
simulation defaults. Parsing is strict: unknown sections or keys, bad
numbers, and out-of-range values are all rejected with a one-line
diagnostic carrying the offending line number where it is known.

Keys carry their unit in the name (radius_um, youngs_modulus_gpa,
bandwidth_hz, ...); everything is converted to SI on the way in. Values
marked auto below default to quantities derived from the cell itself.

    [geometry]            radius_um*, gap_um*, damping_multiplier (50)
    [membrane]            thickness_um*, youngs_modulus_gpa*,
                          poisson_ratio*, density_kgm3*, name
    [electrode]           thickness_um*, density_kgm3*,
                          youngs_modulus_gpa (70), poisson_ratio (0.35), name
    [environment]         temperature_k (300), air_density_kgm3 (1.204),
                          sound_speed_ms (343)
    [simulation]          dt_s (auto: 1/(200 f0)), duration_s (2e-5),
                          contact_margin (0.999), external_pressure_pa (0)
    [circuit.ogmr]        n (1), resistance = matched | resistance_ohm,
                          capacitance_pf (auto: C0), vin_v (5),
                          frequency_hz (auto: f0)
    [circuit.linear]      n (1), vin_v (5), frequency_hz (auto: f0),
                          bandwidth_hz*, current_noise_pa_rthz (22),
                          voltage_noise_nv_rthz (1.673)

Starred keys are required; sections [geometry], [membrane], [electrode]
are required, the rest optional. Circuit temperatures follow the
environment. Comments use ``#`` or ``;``.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass

from .circuits import (
    AmplifierSpec,
    FixedResistance,
    LinearOgmrCircuit,
    MatchedResistance,
    OgmrSerialCircuit,
)
from .dynamics import SimConfig, default_timestep
from .errors import DesignFileError
from .model import CmutCell, Environment, Material, derive_lumped

_UM = 1e-6
_GPA = 1e9
_PF = 1e-12

_SCHEMA: dict[str, frozenset[str]] = {
    "geometry": frozenset({"radius_um", "gap_um", "damping_multiplier"}),
    "membrane": frozenset(
        {"thickness_um", "youngs_modulus_gpa", "poisson_ratio", "density_kgm3", "name"}
    ),
    "electrode": frozenset(
        {"thickness_um", "youngs_modulus_gpa", "poisson_ratio", "density_kgm3", "name"}
    ),
    "environment": frozenset({"temperature_k", "air_density_kgm3", "sound_speed_ms"}),
    "simulation": frozenset(
        {"dt_s", "duration_s", "contact_margin", "external_pressure_pa"}
    ),
    "circuit.ogmr": frozenset(
        {"n", "resistance", "resistance_ohm", "capacitance_pf", "vin_v", "frequency_hz"}
    ),
    "circuit.linear": frozenset(
        {
            "n", "vin_v", "frequency_hz", "bandwidth_hz",
            "current_noise_pa_rthz", "voltage_noise_nv_rthz",
        }
    ),
}
_REQUIRED_SECTIONS = ("geometry", "membrane", "electrode")

DEFAULT_DURATION = 2e-5  # s
DEFAULT_VIN = 5.0  # V


@dataclass(frozen=True)
class DesignFile:
    """Parsed design: the cell, optional circuit templates, sim defaults."""

    cell: CmutCell
    sim: SimConfig
    ogmr: OgmrSerialCircuit | None = None
    linear: LinearOgmrCircuit | None = None


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    """1-based line of a section header, or of a key inside that section."""
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        header = re.match(r"\s*\[(.+?)\]\s*$", line)
        if header:
            current = header.group(1)
            if key is None and current == section:
                return number
            continue
        if key is not None and current == section:
            if re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
                return number
    return None


class _Reader:
    """Typed, validating access to one parsed design text."""

    def __init__(self, parser: configparser.ConfigParser, text: str):
        self._parser = parser
        self._text = text

    def fail(self, section: str, key: str | None, message: str) -> DesignFileError:
        return DesignFileError(message, line=_line_of(self._text, section, key))

    def raw(self, section: str, key: str) -> str | None:
        if self._parser.has_option(section, key):
            return self._parser.get(section, key)
        return None

    def number(
        self,
        section: str,
        key: str,
        default: float | None = None,
        *,
        scale: float = 1.0,
    ) -> float | None:
        """Value of section.key scaled to SI, or default when absent."""
        raw = self.raw(section, key)
        if raw is None:
            return default
        try:
            value = float(raw)
        except ValueError:
            raise self.fail(
                section, key, f"[{section}] {key}: expected a number, got {raw!r}"
            ) from None
        if not math.isfinite(value):
            raise self.fail(section, key, f"[{section}] {key} must be finite")
        return value * scale

    def required(self, section: str, key: str, *, scale: float = 1.0) -> float:
        value = self.number(section, key, scale=scale)
        if value is None:
            raise self.fail(
                section, None, f"[{section}] is missing required key {key!r}"
            )
        return value

    def integer(self, section: str, key: str, default: int) -> int:
        raw = self.raw(section, key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise self.fail(
                section, key, f"[{section}] {key}: expected an integer, got {raw!r}"
            ) from None

    def check(self, ok: bool, section: str, key: str, detail: str) -> None:
        if not ok:
            raise self.fail(section, key, f"[{section}] {key} out of range: {detail}")


def _check_layout(parser: configparser.ConfigParser, text: str) -> None:
    for section in parser.sections():
        if section not in _SCHEMA:
            raise DesignFileError(
                f"unknown section [{section}]", line=_line_of(text, section)
            )
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise DesignFileError(
                    f"unknown key {key!r} in [{section}]",
                    line=_line_of(text, section, key),
                )
    for section in _REQUIRED_SECTIONS:
        if not parser.has_section(section):
            raise DesignFileError(f"missing required section [{section}]")


def _material(reader: _Reader, section: str, fallback_name: str,
              default_youngs: float | None = None,
              default_poisson: float | None = None) -> Material:
    youngs = reader.number(section, "youngs_modulus_gpa", default_youngs, scale=_GPA)
    if youngs is None:
        youngs = reader.required(section, "youngs_modulus_gpa", scale=_GPA)
    poisson = reader.number(section, "poisson_ratio", default_poisson)
    if poisson is None:
        poisson = reader.required(section, "poisson_ratio")
    density = reader.required(section, "density_kgm3")
    reader.check(youngs > 0.0, section, "youngs_modulus_gpa", "must be positive")
    reader.check(0.0 <= poisson < 0.5, section, "poisson_ratio",
                 "must lie in [0, 0.5)")
    reader.check(density > 0.0, section, "density_kgm3", "must be positive")
    name = reader.raw(section, "name") or fallback_name
    return Material(
        name=name, youngs_modulus=youngs, poisson_ratio=poisson, density=density
    )


def parse_design_file(text: str) -> DesignFile:
    """Parse UTF-8 design text into a DesignFile.

    Raises:
        DesignFileError: syntax error, unknown section or key, missing
            required entry, or out-of-range value; carries the line
            number when one is known.
    """
    parser = configparser.ConfigParser(
        interpolation=None, strict=True, inline_comment_prefixes=("#", ";")
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.ParsingError as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise DesignFileError(f"syntax error: {exc.message.splitlines()[0]}",
                              line=line) from None
    except configparser.Error as exc:
        raise DesignFileError(
            f"syntax error: {exc.message.splitlines()[0]}",
            line=getattr(exc, "lineno", None),
        ) from None
    _check_layout(parser, text)
    reader = _Reader(parser, text)

    radius = reader.required("geometry", "radius_um", scale=_UM)
    gap = reader.required("geometry", "gap_um", scale=_UM)
    kappa = reader.number("geometry", "damping_multiplier", 50.0)
    reader.check(radius > 0.0, "geometry", "radius_um", "must be positive")
    reader.check(gap > 0.0, "geometry", "gap_um", "must be positive")
    reader.check(kappa >= 1.0, "geometry", "damping_multiplier", "must be >= 1")

    thickness = reader.required("membrane", "thickness_um", scale=_UM)
    reader.check(thickness > 0.0, "membrane", "thickness_um", "must be positive")
    membrane = _material(reader, "membrane", "membrane")

    t_electrode = reader.required("electrode", "thickness_um", scale=_UM)
    reader.check(t_electrode >= 0.0, "electrode", "thickness_um", "must be >= 0")
    electrode = _material(reader, "electrode", "electrode",
                          default_youngs=70e9, default_poisson=0.35)

    temperature = reader.number("environment", "temperature_k", 300.0)
    air_density = reader.number("environment", "air_density_kgm3", 1.204)
    sound_speed = reader.number("environment", "sound_speed_ms", 343.0)
    reader.check(temperature > 0.0, "environment", "temperature_k",
                 "must be positive")
    reader.check(air_density > 0.0, "environment", "air_density_kgm3",
                 "must be positive")
    reader.check(sound_speed > 0.0, "environment", "sound_speed_ms",
                 "must be positive")
    environment = Environment(
        temperature=temperature, air_density=air_density, sound_speed=sound_speed
    )

    try:
        cell = CmutCell(
            vibrating_radius=radius,
            membrane_thickness=thickness,
            gap=gap,
            electrode_thickness=t_electrode,
            membrane_material=membrane,
            electrode_material=electrode,
            damping_multiplier=kappa,
            environment=environment,
        )
    except ValueError as exc:
        raise DesignFileError(str(exc)) from None
    params = derive_lumped(cell)

    dt = reader.number("simulation", "dt_s", default_timestep(cell))
    duration = reader.number("simulation", "duration_s", DEFAULT_DURATION)
    margin = reader.number("simulation", "contact_margin", 0.999)
    pressure = reader.number("simulation", "external_pressure_pa", 0.0)
    reader.check(dt > 0.0, "simulation", "dt_s", "must be positive")
    reader.check(duration >= dt, "simulation", "duration_s", "must be >= dt_s")
    reader.check(0.0 < margin < 1.0, "simulation", "contact_margin",
                 "must lie in (0, 1)")
    sim = SimConfig(
        dt=dt, duration=duration, contact_margin=margin, external_pressure=pressure
    )

    ogmr = None
    if parser.has_section("circuit.ogmr"):
        section = "circuit.ogmr"
        n = reader.integer(section, "n", 1)
        reader.check(n >= 1, section, "n", "must be >= 1")
        rule_raw = reader.raw(section, "resistance")
        fixed = reader.number(section, "resistance_ohm")
        if rule_raw is not None and fixed is not None:
            raise reader.fail(
                section, "resistance_ohm",
                f"[{section}] resistance and resistance_ohm are mutually exclusive",
            )
        if rule_raw is not None:
            if rule_raw.strip().lower() != "matched":
                raise reader.fail(
                    section, "resistance",
                    f"[{section}] resistance: expected 'matched', got {rule_raw!r}",
                )
            rule: FixedResistance | MatchedResistance = MatchedResistance()
        elif fixed is not None:
            reader.check(fixed > 0.0, section, "resistance_ohm", "must be positive")
            rule = FixedResistance(fixed)
        else:
            rule = MatchedResistance()
        capacitance = reader.number(section, "capacitance_pf",
                                    params.rest_capacitance, scale=_PF)
        vin = reader.number(section, "vin_v", DEFAULT_VIN)
        frequency = reader.number(section, "frequency_hz", params.lumped_frequency)
        reader.check(capacitance > 0.0, section, "capacitance_pf",
                     "must be positive")
        reader.check(vin > 0.0, section, "vin_v", "must be positive")
        reader.check(frequency > 0.0, section, "frequency_hz", "must be positive")
        ogmr = OgmrSerialCircuit(
            sensor_count=n,
            resistance_rule=rule,
            per_sensor_capacitance=capacitance,
            input_amplitude=vin,
            angular_frequency=2.0 * math.pi * frequency,
            temperature=temperature,
        )

    linear = None
    if parser.has_section("circuit.linear"):
        section = "circuit.linear"
        n = reader.integer(section, "n", 1)
        reader.check(n >= 1, section, "n", "must be >= 1")
        vin = reader.number(section, "vin_v", DEFAULT_VIN)
        frequency = reader.number(section, "frequency_hz", params.lumped_frequency)
        bandwidth = reader.required(section, "bandwidth_hz")
        current_noise = reader.number(section, "current_noise_pa_rthz", 22e-12,
                                      scale=1e-12)
        voltage_noise = reader.number(section, "voltage_noise_nv_rthz", 1.673e-9,
                                      scale=1e-9)
        reader.check(vin > 0.0, section, "vin_v", "must be positive")
        reader.check(frequency > 0.0, section, "frequency_hz", "must be positive")
        reader.check(bandwidth > 0.0, section, "bandwidth_hz", "must be positive")
        reader.check(current_noise >= 0.0, section, "current_noise_pa_rthz",
                     "must be >= 0")
        reader.check(voltage_noise >= 0.0, section, "voltage_noise_nv_rthz",
                     "must be >= 0")
        linear = LinearOgmrCircuit(
            sensor_count=n,
            rest_capacitance=params.rest_capacitance,
            gap=cell.gap,
            input_amplitude=vin,
            angular_frequency=2.0 * math.pi * frequency,
            temperature=temperature,
            bandwidth=bandwidth,
            amplifier=AmplifierSpec(
                current_noise_density=current_noise,
                voltage_noise_density=voltage_noise,
            ),
        )

    return DesignFile(cell=cell, sim=sim, ogmr=ogmr, linear=linear)


def _display(si_value: float, scale: float) -> float:
    """Display-unit value whose re-scaling reproduces si_value exactly.

    Division then multiplication by the unit scale can each round, so the
    naive si_value/scale may miss by an ulp; nudge until it lands.
    """
    shown = si_value / scale
    if shown * scale == si_value:
        return shown
    for direction in (math.inf, -math.inf):
        candidate = shown
        for _ in range(4):
            candidate = math.nextafter(candidate, direction)
            if candidate * scale == si_value:
                return candidate
    return shown


def format_design_file(design: DesignFile) -> str:
    """Render a DesignFile as design text; parsing it back is an identity.

    All keys are written explicitly (auto defaults resolved), in display
    units chosen so the re-parsed SI values match bit for bit. The op-amp
    chain's capacitance and gap always come from the cell, so templates
    built with differing values render as the cell-derived form.
    """
    cell = design.cell
    env = cell.environment
    lines = [
        "[geometry]",
        f"radius_um = {_display(cell.vibrating_radius, _UM)!r}",
        f"gap_um = {_display(cell.gap, _UM)!r}",
        f"damping_multiplier = {cell.damping_multiplier!r}",
        "",
        "[membrane]",
        f"name = {cell.membrane_material.name}",
        f"thickness_um = {_display(cell.membrane_thickness, _UM)!r}",
        f"youngs_modulus_gpa = {_display(cell.membrane_material.youngs_modulus, _GPA)!r}",
        f"poisson_ratio = {cell.membrane_material.poisson_ratio!r}",
        f"density_kgm3 = {cell.membrane_material.density!r}",
        "",
        "[electrode]",
        f"name = {cell.electrode_material.name}",
        f"thickness_um = {_display(cell.electrode_thickness, _UM)!r}",
        f"youngs_modulus_gpa = {_display(cell.electrode_material.youngs_modulus, _GPA)!r}",
        f"poisson_ratio = {cell.electrode_material.poisson_ratio!r}",
        f"density_kgm3 = {cell.electrode_material.density!r}",
        "",
        "[environment]",
        f"temperature_k = {env.temperature!r}",
        f"air_density_kgm3 = {env.air_density!r}",
        f"sound_speed_ms = {env.sound_speed!r}",
        "",
        "[simulation]",
        f"dt_s = {design.sim.dt!r}",
        f"duration_s = {design.sim.duration!r}",
        f"contact_margin = {design.sim.contact_margin!r}",
        f"external_pressure_pa = {design.sim.external_pressure!r}",
    ]
    two_pi = 2.0 * math.pi
    if design.ogmr is not None:
        ogmr = design.ogmr
        lines += ["", "[circuit.ogmr]", f"n = {ogmr.sensor_count}"]
        if isinstance(ogmr.resistance_rule, MatchedResistance):
            lines.append("resistance = matched")
        else:
            lines.append(f"resistance_ohm = {ogmr.resistance_rule.ohms!r}")
        lines += [
            f"capacitance_pf = {_display(ogmr.per_sensor_capacitance, _PF)!r}",
            f"vin_v = {ogmr.input_amplitude!r}",
            f"frequency_hz = {_display(ogmr.angular_frequency, two_pi)!r}",
        ]
    if design.linear is not None:
        linear = design.linear
        amp = linear.amplifier
        lines += [
            "",
            "[circuit.linear]",
            f"n = {linear.sensor_count}",
            f"vin_v = {linear.input_amplitude!r}",
            f"frequency_hz = {_display(linear.angular_frequency, two_pi)!r}",
            f"bandwidth_hz = {linear.bandwidth!r}",
            f"current_noise_pa_rthz = {_display(amp.current_noise_density, 1e-12)!r}",
            f"voltage_noise_nv_rthz = {_display(amp.voltage_noise_density, 1e-9)!r}",
        ]
    return "\n".join(lines) + "\n"
