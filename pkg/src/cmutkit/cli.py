"""Command-line interface: design files in, tables out.

Subcommands read one design file and emit CSV (default) or JSON to
stdout or --out. Numbers render in scientific notation with 9
significant digits; CSV uses comma separators, a name(unit) header row,
and newline-only line endings, so identical inputs give byte-identical
output.

Exit codes: 0 success; 1 computation failure (diverged integration,
infeasible target, bad root bracket); 2 input or usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields, replace
from typing import Sequence

import numpy as np

from .circuits import OgmrSerialCircuit
from .designfile import DesignFile, parse_design_file
from .dynamics import (
    BiasedSine,
    Constant,
    DriveSignal,
    Pulse,
    Zero,
    mechanical_response,
    simulate,
)
from .errors import (
    BracketError,
    DesignFileError,
    InfeasibleTargetError,
    IntegrationDivergedError,
    SweepConfigError,
)
from .explorer import (
    SweepSpec,
    calibrate_electrode_thickness,
    grid_sweep,
    sweep_sensor_count,
)
from .model import LumpedParams, Stable, derive_lumped, static_equilibrium

_UNITS = {
    "area": "m^2",
    "rest_capacitance": "F",
    "flexural_rigidity": "N*m",
    "spring_constant": "N/m",
    "membrane_mass": "kg",
    "radiation_mass": "kg",
    "electrode_mass": "kg",
    "total_mass": "kg",
    "plate_frequency": "Hz",
    "lumped_frequency": "Hz",
    "damping": "N*s/m",
    "quality_factor": "1",
    "pull_in_voltage": "V",
    "equilibrium_displacement": "m",
    "signal": "V",
    "noise": "V",
    "eta": "1",
    "eta_closed_form": "1",
    "eta_amp_free": "1",
}

_PARAMETER_UNITS = {
    "sensor_count": "1",
    "membrane_thickness": "m",
    "vibrating_radius": "m",
    "gap": "m",
    "electrode_thickness": "m",
    "bias_voltage": "V",
}

_DRIVE_HELP = (
    "drive waveform: 'zero', 'dc:<volts>', "
    "'sine:dc=<V>,ac=<V>,f=<Hz>[,phase=<rad>]', or "
    "'pulse:amp=<V>,start=<s>,width=<s>'"
)


def _fmt(value: float) -> str:
    return f"{value:.8e}"


def _csv(columns: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _table(args: argparse.Namespace,
           columns: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    if args.format == "json":
        payload = {"columns": list(columns), "rows": [list(r) for r in rows]}
        return json.dumps(payload, indent=2) + "\n"
    return _csv(columns, rows)


def _scalars(args: argparse.Namespace,
             text: str, payload: dict[str, object]) -> str:
    if args.format == "json":
        return json.dumps(payload, indent=2) + "\n"
    return text + "\n"


def _float_field(raw: str, what: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{what}: expected a number, got {raw!r}") from None


def _key_values(body: str, spec: str, required: Sequence[str],
                optional: Sequence[str] = ()) -> dict[str, float]:
    allowed = set(required) | set(optional)
    values: dict[str, float] = {}
    for part in body.split(","):
        key, sep, raw = part.partition("=")
        key = key.strip()
        if not sep or key not in allowed:
            raise ValueError(
                f"drive {spec!r}: expected comma-separated "
                f"{'/'.join([*required, *optional])} assignments"
            )
        if key in values:
            raise ValueError(f"drive {spec!r}: duplicate key {key!r}")
        values[key] = _float_field(raw.strip(), f"drive {spec!r} key {key!r}")
    missing = [key for key in required if key not in values]
    if missing:
        raise ValueError(f"drive {spec!r}: missing {'/'.join(missing)}")
    return values


def parse_drive(spec: str) -> DriveSignal:
    """Parse the command-line drive mini-grammar (see _DRIVE_HELP)."""
    head, _, body = spec.partition(":")
    head = head.strip().lower()
    if head == "zero":
        if body:
            raise ValueError(f"drive {spec!r}: 'zero' takes no parameters")
        return Zero()
    if head == "dc":
        return Constant(_float_field(body.strip(), f"drive {spec!r}"))
    if head == "sine":
        kv = _key_values(body, spec, required=("dc", "ac", "f"),
                         optional=("phase",))
        return BiasedSine(v_dc=kv["dc"], v_ac=kv["ac"], frequency=kv["f"],
                          phase=kv.get("phase", 0.0))
    if head == "pulse":
        kv = _key_values(body, spec, required=("amp", "start", "width"))
        return Pulse(amplitude=kv["amp"], start=kv["start"], width=kv["width"])
    raise ValueError(f"unknown drive kind in {spec!r}; {_DRIVE_HELP}")


def _load(path: str) -> DesignFile:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise DesignFileError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_design_file(text)


def _delta_c(circuit: OgmrSerialCircuit, x_frac: float) -> float:
    """Capacitance excursion when every cell deflects to x_frac of its gap."""
    return circuit.per_sensor_capacitance * x_frac / (1.0 - x_frac)


def _check_x_frac(x_frac: float) -> None:
    if not 0.0 < x_frac < 1.0:
        raise ValueError(f"--x-frac must lie in (0, 1), got {x_frac!r}")


def _cmd_derive(args: argparse.Namespace) -> str:
    design = _load(args.design)
    params = derive_lumped(design.cell)
    names = [f.name for f in fields(LumpedParams)]
    if args.format == "json":
        payload = {name: getattr(params, name) for name in names}
        return json.dumps(payload, indent=2) + "\n"
    lines = ["quantity,value,unit"]
    for name in names:
        lines.append(f"{name},{_fmt(getattr(params, name))},{_UNITS[name]}")
    return "\n".join(lines) + "\n"


def _cmd_equilibrium(args: argparse.Namespace) -> str:
    design = _load(args.design)
    result = static_equilibrium(design.cell, args.voltage)
    if isinstance(result, Stable):
        return _scalars(
            args,
            f"stable displacement = {_fmt(result.displacement)} m",
            {"result": "stable", "displacement": result.displacement},
        )
    return _scalars(args, "COLLAPSED", {"result": "collapsed"})


def _cmd_simulate(args: argparse.Namespace) -> str:
    design = _load(args.design)
    drive = parse_drive(args.drive)
    sim = design.sim
    if args.pressure is not None:
        sim = replace(sim, external_pressure=args.pressure)
    series = simulate(design.cell, drive, sim)
    if series.event is not None:
        print(f"collapse at t = {_fmt(series.event.time)} s", file=sys.stderr)
    columns = ["t(s)", "w(m)", "v(m/s)", "F_e(N)", "C(F)"]
    rows = np.column_stack([
        series.times, series.displacement, series.velocity,
        series.electrostatic_force, series.capacitance,
    ])
    return _table(args, columns, rows.tolist())


def _cmd_freq(args: argparse.Namespace) -> str:
    if not (0.0 < args.min < args.max):
        raise ValueError("require 0 < --min < --max")
    if args.points < 2:
        raise ValueError("--points must be >= 2")
    design = _load(args.design)
    rows = []
    for f in np.linspace(args.min, args.max, args.points):
        response = mechanical_response(design.cell, float(f))
        rows.append([
            float(f), abs(response), math.atan2(response.imag, response.real),
        ])
    return _table(args, ["f(Hz)", "|H|(m/N)", "phase(rad)"], rows)


def _snr_rows(args: argparse.Namespace,
              design: DesignFile) -> tuple[list[str], list[list[float]]]:
    _check_x_frac(args.x_frac)
    if args.circuit in ("ogmr", "ogmr-closed-form"):
        if design.ogmr is None:
            raise SweepConfigError(
                "the design file has no [circuit.ogmr] section"
            )
        rows = sweep_sensor_count(
            design.ogmr, args.n_max,
            delta_c=_delta_c(design.ogmr, args.x_frac),
            k_const=args.k_const,
        )
        if args.circuit == "ogmr-closed-form":
            columns = ["n(1)", "eta_closed_form(1)"]
            data = [[row.parameter_value, dict(row.metrics)["eta_closed_form"]]
                    for row in rows]
            return columns, data
    else:
        if design.linear is None:
            raise SweepConfigError(
                "the design file has no [circuit.linear] section"
            )
        rows = sweep_sensor_count(
            design.linear, args.n_max,
            displacement=args.x_frac * design.linear.gap,
            include_amp_noise=not args.no_amp_noise,
        )
    columns = ["n(1)"] + [f"{name}({_UNITS[name]})" for name, _ in rows[0].metrics]
    data = [[row.parameter_value, *(value for _, value in row.metrics)]
            for row in rows]
    return columns, data


def _cmd_snr(args: argparse.Namespace) -> str:
    design = _load(args.design)
    if args.n_max < 1:
        raise ValueError("--n-max must be >= 1")
    columns, data = _snr_rows(args, design)
    return _table(args, columns, data)


def _cmd_sweep(args: argparse.Namespace) -> str:
    design = _load(args.design)
    spec = SweepSpec(
        parameter=args.param,
        start=args.start,
        stop=args.stop,
        steps=args.steps,
        metrics=tuple(args.metric),
    )
    _check_x_frac(args.x_frac)
    delta_c = _delta_c(design.ogmr, args.x_frac) if design.ogmr else None
    displacement = (
        args.x_frac * design.linear.gap if design.linear else None
    )
    rows = grid_sweep(
        design.cell, spec,
        bias_voltage=args.bias_voltage,
        ogmr=design.ogmr,
        linear=design.linear,
        delta_c=delta_c,
        displacement=displacement,
        include_amp_noise=not args.no_amp_noise,
        k_const=args.k_const,
    )
    columns = [f"{spec.parameter}({_PARAMETER_UNITS[spec.parameter]})"]
    columns += [f"{name}({_UNITS[name]})" for name in spec.metrics]
    data = [[row.parameter_value, *(value for _, value in row.metrics)]
            for row in rows]
    return _table(args, columns, data)


def _cmd_calibrate(args: argparse.Namespace) -> str:
    design = _load(args.design)
    thickness = calibrate_electrode_thickness(design.cell, args.target_f0)
    return _scalars(
        args,
        f"electrode_thickness = {_fmt(thickness)} m",
        {"electrode_thickness": thickness},
    )


def _add_output_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", help="write output to this file instead of stdout")
    sub.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="output serialization (default csv)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmutkit",
        description="Lumped-parameter capacitive ultrasonic transducer toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="print all derived lumped quantities")
    p.add_argument("design", help="design file path")
    _add_output_options(p)
    p.set_defaults(handler=_cmd_derive)

    p = sub.add_parser("equilibrium", help="static membrane equilibrium at a bias")
    p.add_argument("design", help="design file path")
    p.add_argument("--voltage", type=float, required=True, help="bias voltage (V)")
    _add_output_options(p)
    p.set_defaults(handler=_cmd_equilibrium)

    p = sub.add_parser("simulate", help="integrate the driven membrane in time")
    p.add_argument("design", help="design file path")
    p.add_argument("--drive", required=True, help=_DRIVE_HELP)
    p.add_argument("--pressure", type=float,
                   help="override the external pressure (Pa)")
    _add_output_options(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("freq", help="linear frequency response table")
    p.add_argument("design", help="design file path")
    p.add_argument("--min", type=float, required=True, help="lowest frequency (Hz)")
    p.add_argument("--max", type=float, required=True, help="highest frequency (Hz)")
    p.add_argument("--points", type=int, required=True, help="number of rows")
    _add_output_options(p)
    p.set_defaults(handler=_cmd_freq)

    p = sub.add_parser("snr", help="signal-to-noise sweep over the chain length")
    p.add_argument("design", help="design file path")
    p.add_argument("--circuit", choices=("ogmr", "ogmr-closed-form", "linear"),
                   required=True,
                   help="serial chain (definition + closed form), closed form "
                        "only, or the op-amp chain")
    p.add_argument("--n-max", type=int, required=True, help="largest chain length")
    p.add_argument("--x-frac", type=float, default=1.0 / 3.0,
                   help="membrane displacement as a fraction of the gap "
                        "(default 1/3)")
    p.add_argument("--no-amp-noise", action="store_true",
                   help="zero the amplifier noise densities (linear circuit)")
    p.add_argument("--k-const", type=float,
                   help="override the closed-form prefactor K")
    _add_output_options(p)
    p.set_defaults(handler=_cmd_snr)

    p = sub.add_parser("sweep", help="evaluate metrics over a parameter grid")
    p.add_argument("design", help="design file path")
    p.add_argument("--param", required=True,
                   choices=sorted(_PARAMETER_UNITS),
                   help="swept parameter (SI units)")
    p.add_argument("--from", dest="start", type=float, required=True,
                   help="grid start (SI units)")
    p.add_argument("--to", dest="stop", type=float, required=True,
                   help="grid end (SI units)")
    p.add_argument("--steps", type=int, required=True, help="grid points")
    p.add_argument("--metric", action="append", required=True,
                   help="metric column; repeatable")
    p.add_argument("--bias-voltage", type=float,
                   help="bias for equilibrium_displacement metrics (V)")
    p.add_argument("--x-frac", type=float, default=1.0 / 3.0,
                   help="displacement fraction for SNR metrics (default 1/3)")
    p.add_argument("--no-amp-noise", action="store_true",
                   help="zero the amplifier noise densities (linear circuit)")
    p.add_argument("--k-const", type=float,
                   help="override the closed-form prefactor K")
    _add_output_options(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("calibrate", help="electrode thickness for a target "
                                         "resonance")
    p.add_argument("design", help="design file path")
    p.add_argument("--target-f0", type=float, required=True,
                   help="target lumped resonance (Hz)")
    _add_output_options(p)
    p.set_defaults(handler=_cmd_calibrate)

    return parser


def execute(argv: Sequence[str]) -> int:
    """Run one CLI invocation; returns the process exit code.

    Output is fully computed before anything is written, so a failing
    run leaves no partial --out file behind.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        output = args.handler(args)
    except (BracketError, InfeasibleTargetError, IntegrationDivergedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DesignFileError, SweepConfigError, ValueError, TypeError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(output)
    else:
        sys.stdout.write(output)
    return 0


def main() -> None:
    raise SystemExit(execute(sys.argv[1:]))
