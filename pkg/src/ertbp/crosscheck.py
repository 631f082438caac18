"""Independent cross-check integrator: adaptive Runge-Kutta-Fehlberg 7(8).

This integrator shares no stepping code with the Taylor kernels: the
right-hand side is evaluated from the closed-form equations of motion and
advanced with the classical 13-stage Fehlberg tableau, whose coefficients
are stored as exact rationals and rounded once to the working precision.
Agreement between this propagator and the Taylor kernels validates both.
"""
import gmpy2
from gmpy2 import mpfr, mpq

from .dynamics import PhaseState
from .errors import CollisionSingularity, ToleranceNotMet
from .precision import as_mpfr, working_precision

# Fehlberg 7(8) tableau (exact rationals).
_ALPHA = [
    mpq(0), mpq(2, 27), mpq(1, 9), mpq(1, 6), mpq(5, 12), mpq(1, 2),
    mpq(5, 6), mpq(1, 6), mpq(2, 3), mpq(1, 3), mpq(1), mpq(0), mpq(1),
]

_BETA = {
    (1, 0): mpq(2, 27),
    (2, 0): mpq(1, 36), (2, 1): mpq(1, 12),
    (3, 0): mpq(1, 24), (3, 2): mpq(1, 8),
    (4, 0): mpq(5, 12), (4, 2): mpq(-25, 16), (4, 3): mpq(25, 16),
    (5, 0): mpq(1, 20), (5, 3): mpq(1, 4), (5, 4): mpq(1, 5),
    (6, 0): mpq(-25, 108), (6, 3): mpq(125, 108), (6, 4): mpq(-65, 27),
    (6, 5): mpq(125, 54),
    (7, 0): mpq(31, 300), (7, 4): mpq(61, 225), (7, 5): mpq(-2, 9),
    (7, 6): mpq(13, 900),
    (8, 0): mpq(2), (8, 3): mpq(-53, 6), (8, 4): mpq(704, 45),
    (8, 5): mpq(-107, 9), (8, 6): mpq(67, 90), (8, 7): mpq(3),
    (9, 0): mpq(-91, 108), (9, 3): mpq(23, 108), (9, 4): mpq(-976, 135),
    (9, 5): mpq(311, 54), (9, 6): mpq(-19, 60), (9, 7): mpq(17, 6),
    (9, 8): mpq(-1, 12),
    (10, 0): mpq(2383, 4100), (10, 3): mpq(-341, 164),
    (10, 4): mpq(4496, 1025), (10, 5): mpq(-301, 82),
    (10, 6): mpq(2133, 4100), (10, 7): mpq(45, 82), (10, 8): mpq(45, 164),
    (10, 9): mpq(18, 41),
    (11, 0): mpq(3, 205), (11, 5): mpq(-6, 41), (11, 6): mpq(-3, 205),
    (11, 7): mpq(-3, 41), (11, 8): mpq(3, 41), (11, 9): mpq(6, 41),
    (12, 0): mpq(-1777, 4100), (12, 3): mpq(-341, 164),
    (12, 4): mpq(4496, 1025), (12, 5): mpq(-289, 82),
    (12, 6): mpq(2193, 4100), (12, 7): mpq(51, 82), (12, 8): mpq(33, 164),
    (12, 9): mpq(12, 41), (12, 11): mpq(1),
}

# Weights of the 8th-order solution; stages 0 and 10 do not contribute.
_CH = {
    5: mpq(34, 105), 6: mpq(9, 35), 7: mpq(9, 35),
    8: mpq(9, 280), 9: mpq(9, 280), 11: mpq(41, 840), 12: mpq(41, 840),
}

_ERR_WEIGHT = mpq(41, 840)  # on k0 + k10 - k11 - k12


def _make_rhs(params, collision_floor, attractive):
    """Closed-form right-hand side of the 5-dimensional system."""
    e, mu = mpfr(params.e), mpfr(params.mu)
    cth = (1 - e) ** mpfr("-1.5")
    one_minus_e = 1 - e
    floor2 = as_mpfr(collision_floor) ** 2
    sign = mpfr(1) if attractive else mpfr(-1)
    minus32 = mpfr("-1.5")

    def rhs(y):
        th, z1, z2, v1, v2 = y
        c, s = gmpy2.cos(th), gmpy2.sin(th)
        w = 1 - e * c
        scale = one_minus_e / w
        fx = -mu * scale
        fy = (1 - mu) * scale
        dx1, dx2 = fx * c - z1, fx * s - z2
        dy1, dy2 = fy * c - z1, fy * s - z2
        rx2 = dx1 * dx1 + dx2 * dx2
        ry2 = dy1 * dy1 + dy2 * dy2
        if rx2 < floor2 or ry2 < floor2:
            raise CollisionSingularity("trajectory reached the collision floor")
        sx = rx2 ** minus32
        sy = ry2 ** minus32
        a1 = sign * ((1 - mu) * sx * dx1 + mu * sy * dy1)
        a2 = sign * ((1 - mu) * sx * dx2 + mu * sy * dy2)
        return (cth * w * w, v1, v2, a1, a2)

    return rhs


def propagate_crosscheck(state0, t_end, params, tolerance="1e-25",
                         precision_digits=35, max_steps=2_000_000,
                         collision_floor="1e-12", attractive=True):
    """Propagate to t_end with adaptive RKF7(8) at the given precision.

    Raises ToleranceNotMet when the controller cannot keep the local
    error estimate under the tolerance within the step budget.
    """
    with working_precision(precision_digits):
        tol = as_mpfr(tolerance)
        t_end = as_mpfr(t_end)
        rhs = _make_rhs(params, collision_floor, attractive)
        alpha = [mpfr(a) for a in _ALPHA]
        beta = {ij: mpfr(b) for ij, b in _BETA.items()}
        ch = {i: mpfr(c) for i, c in _CH.items()}
        ew = mpfr(_ERR_WEIGHT)

        t = mpfr(state0.t)
        y = (mpfr(state0.theta), mpfr(state0.z[0]), mpfr(state0.z[1]),
             mpfr(state0.v[0]), mpfr(state0.v[1]))
        if t_end == t:
            return state0
        span = t_end - t
        h = span / 100
        h_min = abs(span) * mpfr("1e-30")
        steps = 0
        t_eps = abs(span) * mpfr("1e-33")
        while t_end - t > t_eps:
            if steps >= max_steps:
                raise ToleranceNotMet(
                    f"step budget {max_steps} exhausted at t = {t}")
            h = min(h, t_end - t)
            k = [None] * 13
            k[0] = rhs(y)
            for i in range(1, 13):
                yi = list(y)
                for j in range(i):
                    b = beta.get((i, j))
                    if b is None:
                        continue
                    kj = k[j]
                    for m in range(5):
                        yi[m] += h * b * kj[m]
                k[i] = rhs(tuple(yi))
            err = mpfr(0)
            for m in range(5):
                te = ew * h * (k[0][m] + k[10][m] - k[11][m] - k[12][m])
                err = max(err, abs(te))
            if err <= tol:
                ynew = list(y)
                for i, c in ch.items():
                    ki = k[i]
                    for m in range(5):
                        ynew[m] += h * c * ki[m]
                y = tuple(ynew)
                t = t + h
                steps += 1
            if err > 0:
                h = mpfr("0.9") * h * (tol / err) ** (mpfr(1) / 8)
            else:
                h = 2 * h
            if h < h_min:
                raise ToleranceNotMet(
                    f"step size underflow ({h}) before reaching t_end")
        return PhaseState(t=t_end, theta=y[0], z=(y[1], y[2]),
                          v=(y[3], y[4]))
