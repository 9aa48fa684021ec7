"""Lumped-parameter model of a circular CMUT cell.

The clamped membrane is reduced to a piston on a spring-damper-mass, and
every static quantity follows in closed form from the cell geometry and
materials: rest capacitance, plate stiffness, effective masses, natural
frequencies, radiation damping, quality factor, and pull-in voltage.

All quantities are SI throughout (m, kg, s, N, V, F, Hz).

Damping model note: the radiation resistance of the baffled piston is
R_r = rho0 * c0 * k^2 * pi * r^4 / 2, where k is the ACOUSTIC WAVENUMBER
k = omega0 / c0, not the spring constant. A spring constant in that slot
gives dimensional nonsense; the wavenumber reproduces the standard
radiation resistance of a piston small against the wavelength. Mechanical
losses are folded in as a single multiplier `damping_multiplier` on R_r
(default 50), so R = damping_multiplier * R_r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ._solvers import bisect_root
from .errors import ContactError


def _require_finite_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class Material:
    """Isotropic elastic material."""

    name: str
    youngs_modulus: float  # Pa
    poisson_ratio: float   # dimensionless, [0, 0.5)
    density: float         # kg/m^3

    def __post_init__(self):
        _require_finite_positive("youngs_modulus", self.youngs_modulus)
        _require_finite_positive("density", self.density)
        if not (0.0 <= self.poisson_ratio < 0.5):
            raise ValueError(f"poisson_ratio must be in [0, 0.5), got {self.poisson_ratio!r}")


# <110> isotropic silicon and evaporated aluminum, the stock membrane and
# electrode materials for this device class.
SILICON = Material("Si", youngs_modulus=1.69e11, poisson_ratio=0.299, density=2330.0)
ALUMINUM = Material("Al", youngs_modulus=7.0e10, poisson_ratio=0.35, density=2700.0)


@dataclass(frozen=True)
class Environment:
    """Ambient conditions and physical constants."""

    temperature: float = 300.0            # K
    air_density: float = 1.204            # kg/m^3 (20 C)
    sound_speed: float = 343.0            # m/s
    vacuum_permittivity: float = 8.854e-12  # F/m
    boltzmann_constant: float = 1.380649e-23  # J/K

    def __post_init__(self):
        for name in ("temperature", "air_density", "sound_speed",
                     "vacuum_permittivity", "boltzmann_constant"):
            _require_finite_positive(name, getattr(self, name))


@dataclass(frozen=True)
class CmutCell:
    """Full physical description of one transducer cell.

    `vibrating_radius` is the radius of the moving part of the membrane
    (the clamped rim excluded). `damping_multiplier` scales the radiation
    resistance to the total damping, see the module docstring.
    """

    vibrating_radius: float        # m
    membrane_thickness: float      # m
    gap: float                     # m
    electrode_thickness: float     # m, >= 0
    membrane_material: Material = SILICON
    electrode_material: Material = ALUMINUM
    damping_multiplier: float = 50.0
    environment: Environment = field(default_factory=Environment)

    def __post_init__(self):
        _require_finite_positive("vibrating_radius", self.vibrating_radius)
        _require_finite_positive("membrane_thickness", self.membrane_thickness)
        _require_finite_positive("gap", self.gap)
        if not (math.isfinite(self.electrode_thickness) and self.electrode_thickness >= 0.0):
            raise ValueError(f"electrode_thickness must be >= 0, got {self.electrode_thickness!r}")
        if not (math.isfinite(self.damping_multiplier) and self.damping_multiplier >= 1.0):
            raise ValueError(f"damping_multiplier must be >= 1, got {self.damping_multiplier!r}")


@dataclass(frozen=True)
class LumpedParams:
    """Every derived lumped quantity of a cell, produced by derive_lumped."""

    area: float               # m^2, pi * r^2
    rest_capacitance: float   # F, eps0 * A / d
    flexural_rigidity: float  # N*m, E h^3 / (12 (1 - sigma^2))
    spring_constant: float    # N/m, 192 pi D / r^2
    membrane_mass: float      # kg
    radiation_mass: float     # kg, air loading of the piston
    electrode_mass: float     # kg
    total_mass: float         # kg, membrane + radiation + electrode
    plate_frequency: float    # Hz, clamped-plate first mode
    lumped_frequency: float   # Hz, sqrt(K/M) / 2pi
    damping: float            # kg/s, multiplier * piston radiation resistance
    quality_factor: float     # dimensionless, omega0 * M_membrane / R
    pull_in_voltage: float    # V


@dataclass(frozen=True)
class Stable:
    """Static equilibrium with the membrane held at a fixed displacement."""

    displacement: float  # m


@dataclass(frozen=True)
class Collapsed:
    """No stable equilibrium: the membrane snaps to the bottom plate."""


EquilibriumResult = Stable | Collapsed

# Bisection tolerance of static_equilibrium, as a fraction of the gap.
EQUILIBRIUM_XTOL_FRACTION = 1e-6


def derive_lumped(cell: CmutCell) -> LumpedParams:
    """Compute all closed-form lumped quantities of a cell.

    Deterministic and pure: identical cells give bit-identical results.
    The lumped frequency satisfies (2 pi f0)^2 * M = K by construction,
    and the quality factor uses the membrane mass alone.
    """
    env = cell.environment
    r = cell.vibrating_radius
    h = cell.membrane_thickness
    d = cell.gap
    mem = cell.membrane_material

    area = math.pi * r * r
    rest_capacitance = env.vacuum_permittivity * area / d
    one_minus_sigma2 = 1.0 - mem.poisson_ratio ** 2
    flexural_rigidity = mem.youngs_modulus * h ** 3 / (12.0 * one_minus_sigma2)
    spring_constant = 192.0 * math.pi * flexural_rigidity / (r * r)

    membrane_mass = mem.density * area * h
    radiation_mass = 8.0 * env.air_density * r ** 3 / 3.0
    electrode_mass = cell.electrode_material.density * area * cell.electrode_thickness
    total_mass = membrane_mass + radiation_mass + electrode_mass

    plate_frequency = (2.54 * h / (math.pi * r * r)) * math.sqrt(
        mem.youngs_modulus / (3.0 * mem.density * one_minus_sigma2))
    lumped_frequency = math.sqrt(spring_constant / total_mass) / (2.0 * math.pi)

    omega0 = 2.0 * math.pi * lumped_frequency
    wavenumber = omega0 / env.sound_speed
    damping = (cell.damping_multiplier * env.air_density * env.sound_speed
               * wavenumber ** 2 * math.pi * r ** 4 / 2.0)
    quality_factor = omega0 * membrane_mass / damping

    pull_in_voltage = math.sqrt(
        8.0 * spring_constant * d ** 3 / (27.0 * env.vacuum_permittivity * area))

    return LumpedParams(
        area=area,
        rest_capacitance=rest_capacitance,
        flexural_rigidity=flexural_rigidity,
        spring_constant=spring_constant,
        membrane_mass=membrane_mass,
        radiation_mass=radiation_mass,
        electrode_mass=electrode_mass,
        total_mass=total_mass,
        plate_frequency=plate_frequency,
        lumped_frequency=lumped_frequency,
        damping=damping,
        quality_factor=quality_factor,
        pull_in_voltage=pull_in_voltage,
    )


def capacitance_at(cell: CmutCell, x: float) -> float:
    """Plate capacitance at piston displacement x: eps0 * A / (d - x).

    x < 0 (outward bulge) is allowed; x >= d is a contact error.
    """
    if not math.isfinite(x):
        raise ValueError(f"displacement must be finite, got {x!r}")
    if x >= cell.gap:
        raise ContactError(f"displacement {x:.6e} m >= gap {cell.gap:.6e} m, plates touching")
    env = cell.environment
    r = cell.vibrating_radius
    # Same association as derive_lumped so that x = 0 reproduces
    # rest_capacitance bit for bit.
    area = math.pi * r * r
    return env.vacuum_permittivity * area / (cell.gap - x)


def electrostatic_force(cell: CmutCell, voltage: float, x: float) -> float:
    """Attractive force on the membrane: V^2 * eps0 * A / (2 (d - x)^2).

    Quadratic in V, so attraction holds regardless of polarity.
    """
    if not math.isfinite(voltage):
        raise ValueError(f"voltage must be finite, got {voltage!r}")
    if not math.isfinite(x):
        raise ValueError(f"displacement must be finite, got {x!r}")
    if x >= cell.gap:
        raise ContactError(f"displacement {x:.6e} m >= gap {cell.gap:.6e} m, plates touching")
    env = cell.environment
    r = cell.vibrating_radius
    area = math.pi * r * r
    g = cell.gap - x
    return 0.5 * voltage * voltage * env.vacuum_permittivity * area / (g * g)


def small_signal_deflection(cell: CmutCell, force: float) -> float:
    """Deflection of the piston under a static force: force / K."""
    if not math.isfinite(force):
        raise ValueError(f"force must be finite, got {force!r}")
    return force / derive_lumped(cell).spring_constant


def static_equilibrium(cell: CmutCell, voltage: float) -> EquilibriumResult:
    """Stable static displacement under a DC voltage, or Collapsed.

    Solves K x = V^2 eps0 A / (2 (d - x)^2) for the smallest root by
    bisection to 1e-6 * d. The net inward force at x = d/3 is <= 0 exactly
    when V <= V_pi, so [0, d/3] always brackets the stable root below
    pull-in and its absence above pull-in is decided without a root hunt.
    """
    if not (math.isfinite(voltage) and voltage >= 0.0):
        raise ValueError(f"voltage must be finite and >= 0, got {voltage!r}")
    if voltage == 0.0:
        return Stable(0.0)

    params = derive_lumped(cell)
    k = params.spring_constant
    half_eps_area = 0.5 * cell.environment.vacuum_permittivity * params.area
    d = cell.gap

    def net_inward(x: float) -> float:
        g = d - x
        return half_eps_area * voltage * voltage / (g * g) - k * x

    third = d / 3.0
    if net_inward(third) > 0.0:
        return Collapsed()
    # net_inward(0) > 0 for V > 0 and <= 0 at d/3: the first crossing is
    # the stable branch (restoring force on both sides).
    x = bisect_root(net_inward, 0.0, third, xtol=EQUILIBRIUM_XTOL_FRACTION * d)
    return Stable(x)
