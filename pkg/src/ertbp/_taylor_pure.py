"""Pure-Python Taylor stepping kernel for the planar elliptic RTBP.

This is the fallback for the compiled MPFR kernel in ``_taylor_core``;
both implement the same contract:

    advance(state, e, mu, h, n_steps, tau, order, prec_bits,
            attractive, collision_floor) -> state

where ``state`` is a 5-tuple of decimal strings (theta, z1, z2, v1, v2)
and the return value is the state after ``n_steps`` full steps of size
``h`` plus, if ``tau`` is not None, one extra jet evaluation at offset
``tau`` (the grid itself is not advanced past the last full step).

Strings keep the contract precision-exact across both backends: a
round-trippable decimal string reconstructs the identical MPFR value.
"""
import gmpy2
from gmpy2 import mpfr

from .errors import CollisionSingularity
from .precision import mpfr_str

BACKEND = "pure"


def _step_coeffs(th, z1, z2, v1, v2, order, e, mu, cth, minus32, sign, floor2):
    """Taylor coefficient arrays for one step from the given state."""
    n = order + 1
    zero = mpfr(0)
    TH = [zero] * n; Z1 = [zero] * n; Z2 = [zero] * n
    V1 = [zero] * n; V2 = [zero] * n
    TH[0], Z1[0], Z2[0], V1[0], V2[0] = th, z1, z2, v1, v2
    S = [zero] * n; C = [zero] * n
    W = [zero] * n; U = [zero] * n
    DX1 = [zero] * n; DX2 = [zero] * n; DY1 = [zero] * n; DY2 = [zero] * n
    RX = [zero] * n; RY = [zero] * n; SX = [zero] * n; SY = [zero] * n
    ax = -(1 - e) * mu
    ay = (1 - e) * (1 - mu)
    one_minus_mu = 1 - mu
    for k in range(n):
        if k == 0:
            S[0], C[0] = gmpy2.sin(th), gmpy2.cos(th)
            W[0] = 1 - e * C[0]
            U[0] = 1 / W[0]
            uc, us = U[0] * C[0], U[0] * S[0]
        else:
            ss = zero
            cc = zero
            for j in range(1, k + 1):
                ss += j * TH[j] * C[k - j]
                cc += j * TH[j] * S[k - j]
            S[k] = ss / k
            C[k] = -cc / k
            W[k] = -e * C[k]
            acc = zero
            for j in range(k):
                acc += (-(k - j) - j) * W[k - j] * U[j]
            U[k] = acc / (k * W[0])
            uc = zero
            us = zero
            for j in range(k + 1):
                uc += U[j] * C[k - j]
                us += U[j] * S[k - j]
        DX1[k] = ax * uc - Z1[k]
        DX2[k] = ax * us - Z2[k]
        DY1[k] = ay * uc - Z1[k]
        DY2[k] = ay * us - Z2[k]
        rx = zero
        ry = zero
        for j in range(k + 1):
            rx += DX1[j] * DX1[k - j] + DX2[j] * DX2[k - j]
            ry += DY1[j] * DY1[k - j] + DY2[j] * DY2[k - j]
        RX[k] = rx
        RY[k] = ry
        if k == 0:
            if RX[0] < floor2 or RY[0] < floor2:
                raise CollisionSingularity("trajectory reached the collision floor")
            SX[0] = RX[0] ** minus32
            SY[0] = RY[0] ** minus32
        else:
            sx = zero
            sy = zero
            for j in range(k):
                coef = minus32 * (k - j) - j
                sx += coef * RX[k - j] * SX[j]
                sy += coef * RY[k - j] * SY[j]
            SX[k] = sx / (k * RX[0])
            SY[k] = sy / (k * RY[0])
        if k == order:
            break
        ww = zero
        a1 = zero
        a2 = zero
        for j in range(k + 1):
            ww += W[j] * W[k - j]
            a1 += SX[j] * DX1[k - j]
            a2 += SX[j] * DX2[k - j]
        b1 = zero
        b2 = zero
        for j in range(k + 1):
            b1 += SY[j] * DY1[k - j]
            b2 += SY[j] * DY2[k - j]
        kp1 = k + 1
        TH[kp1] = cth * ww / kp1
        Z1[kp1] = V1[k] / kp1
        Z2[kp1] = V2[k] / kp1
        V1[kp1] = sign * (one_minus_mu * a1 + mu * b1) / kp1
        V2[kp1] = sign * (one_minus_mu * a2 + mu * b2) / kp1
    # the trailing arrays feed the variational (linearized-flow) stepping
    return (TH, Z1, Z2, V1, V2,
            S, C, W, U, DX1, DX2, DY1, DY2, RX, RY, SX, SY)


def _horner(coeffs, h):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * h + c
    return acc


def advance(state, e, mu, h, n_steps, tau, order, prec_bits,
            attractive=True, collision_floor="1e-12"):
    ctx = gmpy2.get_context().copy()
    ctx.precision = prec_bits
    with ctx:
        th, z1, z2, v1, v2 = (mpfr(s) for s in state)
        e = mpfr(e)
        mu = mpfr(mu)
        h = mpfr(h)
        floor = mpfr(collision_floor)
        floor2 = floor * floor
        cth = (1 - e) ** mpfr("-1.5")
        minus32 = mpfr("-1.5")
        sign = mpfr(1) if attractive else mpfr(-1)
        for _ in range(n_steps):
            cs = _step_coeffs(th, z1, z2, v1, v2, order, e, mu, cth,
                              minus32, sign, floor2)
            th, z1, z2, v1, v2 = (_horner(c, h) for c in cs[:5])
        if tau is not None:
            t = mpfr(tau)
            cs = _step_coeffs(th, z1, z2, v1, v2, order, e, mu, cth,
                              minus32, sign, floor2)
            th, z1, z2, v1, v2 = (_horner(c, t) for c in cs[:5])
        return tuple(mpfr_str(x) for x in (th, z1, z2, v1, v2))
