"""Order-configurable Taylor integrator for the 5-dimensional ERTBP system.

The hot stepping loop lives in a kernel with two interchangeable
implementations: a compiled Cython/MPFR core (``_taylor_core``) and a
pure-Python fallback (``_taylor_pure``). Selection happens at import;
set ERTBP_PURE_KERNEL=1 to force the fallback. Both produce identical
MPFR results (same precision, same operation order).
"""
import os
from dataclasses import dataclass, field, replace

import gmpy2
from gmpy2 import mpfr

from .dynamics import COLLISION_FLOOR_DEFAULT, PhaseState, orbital_period
from .errors import ConfigError
from .precision import as_mpfr, digits_to_bits, mpfr_str, working_precision


def _load_kernel():
    if os.environ.get("ERTBP_PURE_KERNEL", "0").lower() not in ("1", "true", "yes"):
        try:
            from . import _taylor_core as kernel
            return kernel
        except ImportError:
            pass
    from . import _taylor_pure as kernel
    return kernel


_KERNEL = _load_kernel()


def active_backend():
    """Name of the stepping kernel in use: 'compiled' or 'pure'."""
    return _KERNEL.BACKEND


# 30-digit decimal approximation of T/10000 for e = 0.048, the published
# fixed step of the reference run.
REFERENCE_STEP = "0.0005856497259353531319661467"


@dataclass(frozen=True)
class IntegratorConfig:
    order: int = 9
    precision_digits: int = 35
    step: str | None = None  # None: T(e)/10000 at working precision
    mode: str = "fixed"
    adaptive_tolerance: str = "1e-25"
    collision_floor: str = COLLISION_FLOOR_DEFAULT
    attractive: bool = True

    def __post_init__(self):
        if self.order < 1:
            raise ConfigError(f"order must be >= 1, got {self.order}")
        if self.precision_digits < 16:
            raise ConfigError("precision_digits must be >= 16")
        if self.mode not in ("fixed", "adaptive"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.step is not None and as_mpfr(self.step, self.precision_digits) <= 0:
            raise ConfigError("step must be positive")

    def with_(self, **kw):
        return replace(self, **kw)

    def resolve_step(self, params):
        with working_precision(self.precision_digits):
            if self.step is not None:
                return mpfr(self.step)
            return orbital_period(params.e) / 10000


def reference_config():
    """The published reference configuration: order 9, 30-digit step."""
    return IntegratorConfig(order=9, precision_digits=35, step=REFERENCE_STEP)


@dataclass(frozen=True)
class Trajectory:
    samples: tuple  # ordered PhaseStates, times strictly increasing
    config: IntegratorConfig


def _state_strings(state):
    return tuple(mpfr_str(x) for x in
                 (state.theta, state.z[0], state.z[1], state.v[0], state.v[1]))


def _state_from_strings(t, strs):
    th, z1, z2, v1, v2 = (mpfr(s) for s in strs)
    return PhaseState(t=t, theta=th, z=(z1, z2), v=(v1, v2))


def _kernel_advance(state, params, config, n_steps, h, tau=None):
    strs = _KERNEL.advance(
        _state_strings(state),
        mpfr_str(params.e), mpfr_str(params.mu), mpfr_str(h),
        n_steps, None if tau is None else mpfr_str(tau),
        config.order, digits_to_bits(config.precision_digits),
        config.attractive, config.collision_floor)
    t = state.t + n_steps * h + (0 if tau is None else tau)
    return _state_from_strings(t, strs)


def ertbp_taylor_step(state, params, config):
    """Advance one fixed step of the configured size."""
    with working_precision(config.precision_digits):
        h = config.resolve_step(params)
        return _kernel_advance(state, params, config, 1, h)


def _split_span(span, h):
    """Number of full steps and the final partial offset covering span."""
    q = span / h
    n = int(gmpy2.floor(q))
    # q can land a hair under an integer when span was assembled from
    # rounded multiples of h; snap to the grid point in that case.
    if (n + 1) - q < mpfr("1e-18"):
        n += 1
    tau = span - n * h
    if abs(tau) <= abs(span) * mpfr("1e-30") or tau < 0:
        tau = None
    return n, tau


def propagate(state0, t_end, params, config):
    """Propagate to exactly t_end: full fixed steps plus a partial step."""
    with working_precision(config.precision_digits):
        t_end = as_mpfr(t_end)
        if t_end < state0.t:
            raise ConfigError("t_end precedes the initial time")
        if t_end == state0.t:
            return state0
        if config.mode == "adaptive":
            return _propagate_adaptive(state0, t_end, params, config)
        h = config.resolve_step(params)
        n, tau = _split_span(t_end - state0.t, h)
        out = _kernel_advance(state0, params, config, n, h, tau)
        return PhaseState(t=t_end, theta=out.theta, z=out.z, v=out.v)


def propagate_dense(state0, t_end, sample_times, params, config):
    """States at each requested time; samples are partial-step evaluations
    from the nearest grid point at or before them, so the fixed-step grid
    itself is identical to a plain propagate() run."""
    with working_precision(config.precision_digits):
        t_end = as_mpfr(t_end)
        times = [as_mpfr(t) for t in sample_times]
        if any(t2 < t1 for t1, t2 in zip(times, times[1:])):
            raise ConfigError("sample times must be sorted")
        if times and (times[0] < state0.t or times[-1] > t_end):
            raise ConfigError("sample times outside the propagation span")
        h = config.resolve_step(params)
        grid = state0
        samples = []
        for t in times:
            if t == grid.t:
                samples.append(grid)
                continue
            n, tau = _split_span(t - grid.t, h)
            if n > 0:
                grid = _kernel_advance(grid, params, config, n, h)
            if tau is None:
                s = grid
            else:
                s = _kernel_advance(grid, params, config, 0, h, tau)
            samples.append(PhaseState(t=t, theta=s.theta, z=s.z, v=s.v))
        return Trajectory(samples=tuple(samples), config=config)


def _propagate_adaptive(state0, t_end, params, config):
    """Fixed-order adaptive stepping; the step comes from the magnitude of
    the last Taylor coefficient: h = (tol / |c_N|)^(1/N), capped at the
    remaining span. Exploration aid, not used for reference runs."""
    from ._taylor_pure import _horner, _step_coeffs

    tol = as_mpfr(config.adaptive_tolerance)
    e, mu = params.e, params.mu
    cth = (1 - e) ** mpfr("-1.5")
    floor = as_mpfr(config.collision_floor)
    sign = mpfr(1) if config.attractive else mpfr(-1)
    order = config.order
    state = state0
    t = state0.t
    while t < t_end:
        cs = _step_coeffs(state.theta, state.z[0], state.z[1],
                          state.v[0], state.v[1], order, e, mu, cth,
                          mpfr("-1.5"), sign, floor * floor)[:5]
        top = max(abs(c[order]) for c in cs)
        if top == 0:
            h = t_end - t
        else:
            h = (tol / top) ** (mpfr(1) / order)
        h = min(h, t_end - t)
        vals = [_horner(c, h) for c in cs]
        t = t + h
        state = PhaseState(t=t, theta=vals[0], z=(vals[1], vals[2]),
                           v=(vals[3], vals[4]))
    return state
