"""Pure-Python RK4 kernel for the membrane equation of motion.

Fallback twin of the compiled kernel in ``_integrator.pyx``. The two
implementations keep the same arithmetic in the same order so that a run
produces the same trajectory whichever kernel is active.

State equation:  M w'' + R w' + K w = F_e(t, w) + F_const + F_hook(t)
with F_e = half_eps_area * V(t)^2 / (d - w)^2. Inside the step that
triggers the contact halt the gap is floored at ``gap_floor`` so stage
arithmetic stays finite; the recorded collapse sample is pinned at the
contact threshold.
"""
from __future__ import annotations

from math import isfinite, sin

BACKEND = "python"

STATUS_OK = 0
STATUS_COLLAPSED = 1
STATUS_DIVERGED = 2

DRIVE_ZERO = 0
DRIVE_CONSTANT = 1
DRIVE_BIASED_SINE = 2
DRIVE_PULSE = 3


def run_rk4(mass, damping, spring, half_eps_area, eps_area,
            gap, margin_gap, gap_floor,
            drive_kind, dp0, dp1, dp2, dp3,
            const_force, force_fn,
            dt, n_steps, w0, v0,
            out_t, out_w, out_v, out_fe, out_c):
    """Integrate n_steps fixed RK4 steps, filling the out arrays.

    Returns (status, last_index): last_index is the final valid sample for
    STATUS_OK/STATUS_COLLAPSED and the offending step for STATUS_DIVERGED.
    """
    half_dt = 0.5 * dt
    w = w0
    v = v0

    # sample 0
    if drive_kind == DRIVE_ZERO:
        volt = 0.0
    elif drive_kind == DRIVE_CONSTANT:
        volt = dp0
    elif drive_kind == DRIVE_BIASED_SINE:
        volt = dp0 + dp1 * sin(dp2 * 0.0 + dp3)
    else:
        volt = dp0 if (0.0 >= dp1 and 0.0 < dp1 + dp2) else 0.0
    g = gap - w
    if g < gap_floor:
        g = gap_floor
    out_t[0] = 0.0
    out_w[0] = w
    out_v[0] = v
    out_fe[0] = half_eps_area * volt * volt / (g * g)
    out_c[0] = eps_area / g

    for i in range(n_steps):
        t = i * dt

        # stage 1
        if drive_kind == DRIVE_ZERO:
            volt = 0.0
        elif drive_kind == DRIVE_CONSTANT:
            volt = dp0
        elif drive_kind == DRIVE_BIASED_SINE:
            volt = dp0 + dp1 * sin(dp2 * t + dp3)
        else:
            volt = dp0 if (t >= dp1 and t < dp1 + dp2) else 0.0
        g = gap - w
        if g < gap_floor:
            g = gap_floor
        f = half_eps_area * volt * volt / (g * g) + const_force
        if force_fn is not None:
            f = f + force_fn(t)
        k1w = v
        k1v = (f - spring * w - damping * v) / mass

        # stage 2
        ts = t + half_dt
        ws = w + half_dt * k1w
        vs = v + half_dt * k1v
        if drive_kind == DRIVE_ZERO:
            volt = 0.0
        elif drive_kind == DRIVE_CONSTANT:
            volt = dp0
        elif drive_kind == DRIVE_BIASED_SINE:
            volt = dp0 + dp1 * sin(dp2 * ts + dp3)
        else:
            volt = dp0 if (ts >= dp1 and ts < dp1 + dp2) else 0.0
        g = gap - ws
        if g < gap_floor:
            g = gap_floor
        f = half_eps_area * volt * volt / (g * g) + const_force
        if force_fn is not None:
            f = f + force_fn(ts)
        k2w = vs
        k2v = (f - spring * ws - damping * vs) / mass

        # stage 3
        ws = w + half_dt * k2w
        vs = v + half_dt * k2v
        # same stage time as stage 2, drive already at ts
        if drive_kind == DRIVE_ZERO:
            volt = 0.0
        elif drive_kind == DRIVE_CONSTANT:
            volt = dp0
        elif drive_kind == DRIVE_BIASED_SINE:
            volt = dp0 + dp1 * sin(dp2 * ts + dp3)
        else:
            volt = dp0 if (ts >= dp1 and ts < dp1 + dp2) else 0.0
        g = gap - ws
        if g < gap_floor:
            g = gap_floor
        f = half_eps_area * volt * volt / (g * g) + const_force
        if force_fn is not None:
            f = f + force_fn(ts)
        k3w = vs
        k3v = (f - spring * ws - damping * vs) / mass

        # stage 4
        te = t + dt
        ws = w + dt * k3w
        vs = v + dt * k3v
        if drive_kind == DRIVE_ZERO:
            volt = 0.0
        elif drive_kind == DRIVE_CONSTANT:
            volt = dp0
        elif drive_kind == DRIVE_BIASED_SINE:
            volt = dp0 + dp1 * sin(dp2 * te + dp3)
        else:
            volt = dp0 if (te >= dp1 and te < dp1 + dp2) else 0.0
        g = gap - ws
        if g < gap_floor:
            g = gap_floor
        f = half_eps_area * volt * volt / (g * g) + const_force
        if force_fn is not None:
            f = f + force_fn(te)
        k4w = vs
        k4v = (f - spring * ws - damping * vs) / mass

        w = w + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        j = i + 1
        tj = j * dt
        if not (isfinite(w) and isfinite(v)):
            return STATUS_DIVERGED, j

        collapsed = w >= margin_gap
        if collapsed:
            w = margin_gap  # pinned contact sample; post-contact motion not modeled

        if drive_kind == DRIVE_ZERO:
            volt = 0.0
        elif drive_kind == DRIVE_CONSTANT:
            volt = dp0
        elif drive_kind == DRIVE_BIASED_SINE:
            volt = dp0 + dp1 * sin(dp2 * tj + dp3)
        else:
            volt = dp0 if (tj >= dp1 and tj < dp1 + dp2) else 0.0
        g = gap - w
        if g < gap_floor:
            g = gap_floor
        out_t[j] = tj
        out_w[j] = w
        out_v[j] = v
        out_fe[j] = half_eps_area * volt * volt / (g * g)
        out_c[j] = eps_area / g

        if collapsed:
            return STATUS_COLLAPSED, j

    return STATUS_OK, n_steps
