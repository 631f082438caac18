"""Truncated Taylor series (jet) arithmetic over extended-precision scalars.

A Jet of order N stores coefficients c[0..N] of a series in the time
offset. The recurrences below are the standard automatic-differentiation
rules; mul is the truncated Cauchy product, pow and sin/cos use the
first-order ODE recurrences. Coefficient-level helpers (``mul_coeff`` and
friends) are exposed for steppers that fill coefficient arrays
incrementally instead of re-multiplying whole jets.
"""
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import NonpositiveLeadingCoefficient, OrderMismatch
from .precision import as_mpfr

_ZERO = mpfr(0)


def mul_coeff(a, b, k):
    """k-th coefficient of the Cauchy product of coefficient lists a, b."""
    s = _ZERO
    for j in range(k + 1):
        s += a[j] * b[k - j]
    return s


def pow_coeff(u, w, alpha, k):
    """k-th coefficient of w = u**alpha given w[0..k-1] and u[0..k]."""
    if k == 0:
        return u[0] ** alpha
    s = _ZERO
    for j in range(k):
        s += (alpha * (k - j) - j) * u[k - j] * w[j]
    return s / (k * u[0])


def sincos_coeff(u, s, c, k):
    """k-th coefficients of (sin u, cos u) given lower-order ones."""
    if k == 0:
        return gmpy2.sin(u[0]), gmpy2.cos(u[0])
    ss = _ZERO
    cc = _ZERO
    for j in range(1, k + 1):
        ss += j * u[j] * c[k - j]
        cc += j * u[j] * s[k - j]
    return ss / k, -cc / k


@dataclass(frozen=True)
class Jet:
    """Truncated Taylor series; coeffs has length order+1, never resized."""
    coeffs: tuple

    @classmethod
    def from_values(cls, values, order=None):
        coeffs = [as_mpfr(v) for v in values]
        if order is not None:
            if len(coeffs) > order + 1:
                raise OrderMismatch(f"{len(coeffs)} coefficients exceed order {order}")
            coeffs += [_ZERO] * (order + 1 - len(coeffs))
        return cls(tuple(coeffs))

    @classmethod
    def constant(cls, value, order):
        return cls.from_values([value], order)

    @classmethod
    def variable(cls, value, order):
        """Jet of the identity perturbation: value + t."""
        return cls.from_values([value, 1], order)

    @property
    def order(self):
        return len(self.coeffs) - 1

    def eval(self, h):
        """Horner evaluation of the polynomial at offset h."""
        h = as_mpfr(h)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * h + c
        return acc


def _check_orders(a, b):
    if a.order != b.order:
        raise OrderMismatch(f"jet orders differ: {a.order} vs {b.order}")


def jet_add(a, b):
    _check_orders(a, b)
    return Jet(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))


def jet_sub(a, b):
    _check_orders(a, b)
    return Jet(tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))


def jet_scale(a, factor):
    factor = as_mpfr(factor)
    return Jet(tuple(factor * x for x in a.coeffs))


def jet_mul(a, b):
    _check_orders(a, b)
    return Jet(tuple(mul_coeff(a.coeffs, b.coeffs, k) for k in range(a.order + 1)))


def jet_pow(u, alpha):
    if u.coeffs[0] <= 0:
        raise NonpositiveLeadingCoefficient(
            f"jet_pow needs a positive constant term, got {u.coeffs[0]}")
    alpha = as_mpfr(alpha)
    w = []
    for k in range(u.order + 1):
        w.append(pow_coeff(u.coeffs, w, alpha, k))
    return Jet(tuple(w))


def jet_sin_cos(u):
    s, c = [], []
    for k in range(u.order + 1):
        sk, ck = sincos_coeff(u.coeffs, s, c, k)
        s.append(sk)
        c.append(ck)
    return Jet(tuple(s)), Jet(tuple(c))
