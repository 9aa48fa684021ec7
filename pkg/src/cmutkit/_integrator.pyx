# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernel for the membrane equation of motion.

Twin of ``_integrator_py.run_rk4``: same arithmetic, same order, same
contract. Keep the two files in sync when touching either.
"""
from libc.math cimport isfinite, sin

BACKEND = "compiled"

STATUS_OK = 0
STATUS_COLLAPSED = 1
STATUS_DIVERGED = 2

DRIVE_ZERO = 0
DRIVE_CONSTANT = 1
DRIVE_BIASED_SINE = 2
DRIVE_PULSE = 3

DEF K_ZERO = 0
DEF K_CONSTANT = 1
DEF K_BIASED_SINE = 2
DEF K_PULSE = 3


cdef inline double _drive_volt(int kind, double t,
                               double dp0, double dp1, double dp2, double dp3):
    if kind == K_ZERO:
        return 0.0
    elif kind == K_CONSTANT:
        return dp0
    elif kind == K_BIASED_SINE:
        return dp0 + dp1 * sin(dp2 * t + dp3)
    else:
        return dp0 if (t >= dp1 and t < dp1 + dp2) else 0.0


def run_rk4(double mass, double damping, double spring,
            double half_eps_area, double eps_area,
            double gap, double margin_gap, double gap_floor,
            int drive_kind, double dp0, double dp1, double dp2, double dp3,
            double const_force, object force_fn,
            double dt, long n_steps, double w0, double v0,
            double[::1] out_t, double[::1] out_w, double[::1] out_v,
            double[::1] out_fe, double[::1] out_c):
    """Integrate n_steps fixed RK4 steps, filling the out arrays.

    Returns (status, last_index), see the pure-Python twin.
    """
    cdef double half_dt = 0.5 * dt
    cdef double w = w0
    cdef double v = v0
    cdef double t, ts, te, tj, volt, g, f
    cdef double k1w, k1v, k2w, k2v, k3w, k3v, k4w, k4v, ws, vs
    cdef long i, j
    cdef bint collapsed
    cdef bint has_hook = force_fn is not None

    volt = _drive_volt(drive_kind, 0.0, dp0, dp1, dp2, dp3)
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
        volt = _drive_volt(drive_kind, t, dp0, dp1, dp2, dp3)
        g = gap - w
        if g < gap_floor:
            g = gap_floor
        f = half_eps_area * volt * volt / (g * g) + const_force
        if has_hook:
            f = f + force_fn(t)
        k1w = v
        k1v = (f - spring * w - damping * v) / mass

        # stage 2
        ts = t + half_dt
        ws = w + half_dt * k1w
        vs = v + half_dt * k1v
        volt = _drive_volt(drive_kind, ts, dp0, dp1, dp2, dp3)
        g = gap - ws
        if g < gap_floor:
            g = gap_floor
        f = half_eps_area * volt * volt / (g * g) + const_force
        if has_hook:
            f = f + force_fn(ts)
        k2w = vs
        k2v = (f - spring * ws - damping * vs) / mass

        # stage 3
        ws = w + half_dt * k2w
        vs = v + half_dt * k2v
        volt = _drive_volt(drive_kind, ts, dp0, dp1, dp2, dp3)
        g = gap - ws
        if g < gap_floor:
            g = gap_floor
        f = half_eps_area * volt * volt / (g * g) + const_force
        if has_hook:
            f = f + force_fn(ts)
        k3w = vs
        k3v = (f - spring * ws - damping * vs) / mass

        # stage 4
        te = t + dt
        ws = w + dt * k3w
        vs = v + dt * k3v
        volt = _drive_volt(drive_kind, te, dp0, dp1, dp2, dp3)
        g = gap - ws
        if g < gap_floor:
            g = gap_floor
        f = half_eps_area * volt * volt / (g * g) + const_force
        if has_hook:
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

        volt = _drive_volt(drive_kind, tj, dp0, dp1, dp2, dp3)
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
