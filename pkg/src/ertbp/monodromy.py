"""Monodromy matrix, Floquet multipliers and linear stability.

The state-transition matrix (STM) is the 4x4 Jacobian of the planar state
(z1, z2, v1, v2) at time T with respect to the initial state; theta is
excluded because the spacecraft does not influence the primaries. Two
independent methods are provided and expected to agree:

* variational: joint Taylor (jet) integration of Phi' = A(t) Phi with
  A(t) the Jacobian of the equations of motion along the orbit;
* central_difference: 8 extra propagations with symmetric perturbations.

Eigenvalues come from the characteristic quartic, solved in closed form
(resolvent cubic) in complex MPFR arithmetic with a Newton polish, which
keeps conjugate pairing exact for real input.
"""
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from ._taylor_pure import _horner, _step_coeffs
from .jets import mul_coeff, pow_coeff
from .dynamics import PhaseState
from .errors import DegenerateStep
from .linalg import det as _det
from .precision import as_mpfr, working_precision
from .taylor import _split_span, propagate

DELTA_DEFAULT = "1e-10"


@dataclass(frozen=True)
class Monodromy:
    matrix: tuple  # 4x4, rows of mpfr
    period: mpfr
    method: str

    def determinant(self):
        return _det(self.matrix)


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: tuple
    moduli: tuple
    classification: str
    modulus_tolerance: mpfr


def _variational_step(th, z1, z2, v1, v2, phi, order, e, mu, cth,
                      minus32, minus52, sign, floor2, h):
    """One joint Taylor step of the state and the 4x4 STM."""
    cs = _step_coeffs(th, z1, z2, v1, v2, order, e, mu, cth,
                      minus32, sign, floor2)
    (TH, Z1, Z2, V1, V2,
     _S, _C, _W, _U, DX1, DX2, DY1, DY2, RX, RY, SX, SY) = cs
    n = order + 1
    zero = mpfr(0)
    # QX = RX^(-5/2), QY likewise, via the power recurrence
    QX = [RX[0] ** minus52] + [zero] * order
    QY = [RY[0] ** minus52] + [zero] * order
    for k in range(1, n):
        QX[k] = pow_coeff(RX, QX, minus52, k)
        QY[k] = pow_coeff(RY, QY, minus52, k)
    # Jacobian of the acceleration: H = sum_p m_p (3 d d^T r^-5 - r^-3 I)
    one_minus_mu = 1 - mu
    H11 = [zero] * n
    H12 = [zero] * n
    H22 = [zero] * n
    # products (d_i d_j) first, then convolve with Q
    XX = [mul_coeff(DX1, DX1, k) for k in range(n)]
    XY = [mul_coeff(DX1, DX2, k) for k in range(n)]
    X2 = [mul_coeff(DX2, DX2, k) for k in range(n)]
    YY = [mul_coeff(DY1, DY1, k) for k in range(n)]
    YX = [mul_coeff(DY1, DY2, k) for k in range(n)]
    Y2 = [mul_coeff(DY2, DY2, k) for k in range(n)]
    for k in range(n):
        H11[k] = sign * (one_minus_mu * (3 * mul_coeff(XX, QX, k) - SX[k])
                         + mu * (3 * mul_coeff(YY, QY, k) - SY[k]))
        H12[k] = sign * (one_minus_mu * 3 * mul_coeff(XY, QX, k)
                         + mu * 3 * mul_coeff(YX, QY, k))
        H22[k] = sign * (one_minus_mu * (3 * mul_coeff(X2, QX, k) - SX[k])
                         + mu * (3 * mul_coeff(Y2, QY, k) - SY[k]))
    # STM columns: phi = (p1, p2, q1, q2), p' = q, q' = H p
    new_phi = []
    for col in phi:
        P1 = [col[0]] + [zero] * order
        P2 = [col[1]] + [zero] * order
        Q1 = [col[2]] + [zero] * order
        Q2 = [col[3]] + [zero] * order
        for k in range(order):
            kp1 = k + 1
            P1[kp1] = Q1[k] / kp1
            P2[kp1] = Q2[k] / kp1
            Q1[kp1] = (mul_coeff(H11, P1, k) + mul_coeff(H12, P2, k)) / kp1
            Q2[kp1] = (mul_coeff(H12, P1, k) + mul_coeff(H22, P2, k)) / kp1
        new_phi.append(tuple(_horner(c, h) for c in (P1, P2, Q1, Q2)))
    vals = tuple(_horner(c, h) for c in (TH, Z1, Z2, V1, V2))
    return vals, tuple(new_phi)


def _variational_stm(state0, period, params, config):
    with working_precision(config.precision_digits):
        e, mu = mpfr(params.e), mpfr(params.mu)
        cth = (1 - e) ** mpfr("-1.5")
        minus32, minus52 = mpfr("-1.5"), mpfr("-2.5")
        sign = mpfr(1) if config.attractive else mpfr(-1)
        floor = as_mpfr(config.collision_floor)
        floor2 = floor * floor
        h = config.resolve_step(params)
        n_steps, tau = _split_span(as_mpfr(period), h)
        th = mpfr(state0.theta)
        z1, z2 = mpfr(state0.z[0]), mpfr(state0.z[1])
        v1, v2 = mpfr(state0.v[0]), mpfr(state0.v[1])
        phi = tuple(tuple(mpfr(1 if i == j else 0) for i in range(4))
                    for j in range(4))
        steps = [h] * n_steps + ([tau] if tau is not None else [])
        for step in steps:
            vals, phi = _variational_step(
                th, z1, z2, v1, v2, phi, config.order, e, mu, cth,
                minus32, minus52, sign, floor2, step)
            th, z1, z2, v1, v2 = vals
        # columns of phi are d(state)/d(state0_j); transpose into rows
        matrix = tuple(tuple(phi[j][i] for j in range(4)) for i in range(4))
        return matrix


def _central_difference_stm(state0, period, params, config, delta):
    with working_precision(config.precision_digits):
        d = as_mpfr(delta)
        # below ~half the working digits the difference quotient is noise
        floor = mpfr(10) ** (-(config.precision_digits * 2) // 3)
        if d <= floor:
            raise DegenerateStep(
                f"perturbation {d} under the precision floor {floor}")
        t_end = state0.t + as_mpfr(period)
        cols = []
        for j in range(4):
            shifted = []
            for s in (d, -d):
                z = list(state0.z)
                v = list(state0.v)
                if j < 2:
                    z[j] += s
                else:
                    v[j - 2] += s
                pert = PhaseState(t=state0.t, theta=state0.theta,
                                  z=tuple(z), v=tuple(v))
                out = propagate(pert, t_end, params, config)
                shifted.append((out.z[0], out.z[1], out.v[0], out.v[1]))
            plus, minus = shifted
            cols.append(tuple((a - b) / (2 * d) for a, b in zip(plus, minus)))
        return tuple(tuple(cols[j][i] for j in range(4)) for i in range(4))


def state_transition_matrix(state0, period, params, config,
                            method="variational", delta=DELTA_DEFAULT):
    """4x4 monodromy/STM of the planar state over the given period."""
    with working_precision(config.precision_digits):
        period = as_mpfr(period)
        if period == 0:
            matrix = tuple(tuple(mpfr(1 if i == j else 0) for j in range(4))
                           for i in range(4))
            return Monodromy(matrix=matrix, period=period, method=method)
        if method == "variational":
            matrix = _variational_stm(state0, period, params, config)
        elif method == "central_difference":
            matrix = _central_difference_stm(state0, period, params, config,
                                             delta)
        else:
            raise ValueError(f"unknown STM method {method!r}")
        return Monodromy(matrix=matrix, period=period, method=method)


def _char_poly(m):
    """Coefficients of det(lambda I - M) for 4x4 M (Faddeev-LeVerrier)."""
    from .linalg import mat_mul

    n = 4
    c = [mpfr(1)]
    mk = m
    for k in range(1, n + 1):
        ck = -sum((mk[i][i] for i in range(n)), mpfr(0)) / k
        c.append(ck)
        if k < n:
            mk = mat_mul(m, tuple(tuple(mk[i][j] + (ck if i == j else 0)
                                        for j in range(n)) for i in range(n)))
    return c  # monic: lambda^4 + c1 l^3 + c2 l^2 + c3 l + c4


def _cbrt(w):
    """Principal complex cube root."""
    if w == 0:
        return mpc(0)
    return gmpy2.exp(gmpy2.log(mpc(w)) / 3)


def _solve_quartic(c):
    """Roots of a monic real quartic via the resolvent cubic (Ferrari)."""
    _, a, b, cc, d = (mpc(x) for x in c)
    # depressed quartic y^4 + p y^2 + q y + r, lambda = y - a/4
    p = b - 3 * a * a / 8
    q = cc - a * b / 2 + a * a * a / 8
    r = d - a * cc / 4 + a * a * b / 16 - 3 * a ** 4 / 256
    # resolvent cubic: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0
    b2 = p
    b1 = p * p / 4 - r
    b0 = -q * q / 8
    # Cardano for the cubic
    sh = b2 / 3
    pp = b1 - b2 * b2 / 3
    qq = 2 * b2 ** 3 / 27 - b2 * b1 / 3 + b0
    disc = (qq / 2) ** 2 + (pp / 3) ** 3
    sq = gmpy2.sqrt(mpc(disc))
    u3 = -qq / 2 + sq
    if abs(u3) < abs(-qq / 2 - sq):
        u3 = -qq / 2 - sq
    u = _cbrt(u3)
    if u == 0:
        m = -sh
    else:
        m = u - pp / (3 * u) - sh
    # pick the cubic root with the largest |2m| for a stable split
    s = gmpy2.sqrt(2 * m)
    if s == 0:
        # biquadratic case: y^4 + p y^2 + r = 0
        s1 = gmpy2.sqrt(p * p - 4 * r)
        y2 = ((-p + s1) / 2, (-p - s1) / 2)
        roots = []
        for w in y2:
            rt = gmpy2.sqrt(w)
            roots.extend((rt, -rt))
    else:
        t1 = -(2 * m + 2 * p + 2 * q / s)
        t2 = -(2 * m + 2 * p - 2 * q / s)
        r1 = gmpy2.sqrt(t1)
        r2 = gmpy2.sqrt(t2)
        roots = [(s + r1) / 2, (s - r1) / 2, (-s + r2) / 2, (-s - r2) / 2]
    shift = a / 4
    return [y - shift for y in roots]


def _polish(root, c, iterations=3):
    for _ in range(iterations):
        p = mpc(c[0])
        dp = mpc(0)
        for coef in c[1:]:
            dp = dp * root + p
            p = p * root + coef
        if dp != 0:
            root = root - p / dp
    return root


def _poly_residual(root, c):
    p = mpc(c[0])
    for coef in c[1:]:
        p = p * root + coef
    return abs(p)


def eigenvalues_4x4(matrix, precision_digits=35):
    """Eigenvalues of a real 4x4 matrix via the characteristic quartic.

    Conjugate pairing is enforced after the Newton polish; ill-conditioned
    cases re-run at 200 digits.
    """
    def compute():
        c = _char_poly(matrix)
        roots = [_polish(r, c) for r in _solve_quartic(c)]
        scale = max(max(abs(x) for x in row) for row in matrix)
        scale = max(scale, mpfr(1)) ** 4
        ok = all(_poly_residual(r, c) < mpfr("1e-25") * scale for r in roots)
        return _pair_conjugates(roots), ok

    with working_precision(precision_digits):
        eigs, ok = compute()
    if not ok:
        with working_precision(200):
            eigs, _ = compute()
    return eigs


def _pair_conjugates(roots, tol_scale="1e-20"):
    """Symmetrize near-conjugate root pairs of a real polynomial."""
    tol = mpfr(tol_scale) * max(max(abs(r) for r in roots), mpfr(1))
    out = []
    used = [False] * len(roots)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        if abs(r.imag) <= tol:
            out.append(mpc(r.real))
            used[i] = True
            continue
        best, bd = None, None
        for j in range(i + 1, len(roots)):
            if used[j]:
                continue
            d = abs(roots[j] - r.conjugate())
            if bd is None or d < bd:
                best, bd = j, d
        if best is not None and bd <= 4 * tol:
            s = roots[best]
            re = (r.real + s.real) / 2
            im = (abs(r.imag) + abs(s.imag)) / 2
            out.extend((mpc(re, im), mpc(re, -im)))
            used[i] = used[best] = True
        else:
            out.append(r)
            used[i] = True
    return tuple(out)


def classify_stability(eigenvalues, tolerance="1e-8"):
    """Stability report in the sense of Floquet multipliers.

    stable: all moduli <= 1+tol and eigenvalues pairwise distinct;
    marginal: any modulus within tol of 1 (or repeated eigenvalues);
    unstable: some modulus > 1+tol.
    """
    tol = as_mpfr(tolerance)
    moduli = tuple(abs(ev) for ev in eigenvalues)
    distinct = all(abs(a - b) > tol
                   for i, a in enumerate(eigenvalues)
                   for b in eigenvalues[i + 1:])
    if any(m > 1 + tol for m in moduli):
        cls = "unstable"
    elif any(abs(m - 1) <= tol for m in moduli) or not distinct:
        cls = "marginal"
    else:
        cls = "stable"
    return StabilityReport(eigenvalues=tuple(eigenvalues), moduli=moduli,
                           classification=cls, modulus_tolerance=tol)
