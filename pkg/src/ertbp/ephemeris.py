"""Ephemeris generation and comparison against Horizons-format data.

Builds the immersed ideal-ellipse sequence for the lighter primary, the
dated spacecraft ephemeris table, the pointwise distance statistics
between two position sequences, and a derivative-free fit of the five
immersion parameters to a reference ephemeris.
"""
import datetime
from dataclasses import dataclass, replace

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .dynamics import JUPITER_PERIOD_DAYS, orbital_period
from .errors import LengthMismatch, NonConvergence
from .frames import (FrameParams, build_frame, days_per_ut, immerse,
                     primary_true_anomaly, velocity_immerse)
from .precision import as_mpfr, working_precision
from .taylor import propagate_dense


@dataclass(frozen=True)
class ComparisonStats:
    """Pointwise Euclidean distances between two 3D sequences (AU)."""
    dp: tuple
    min: float
    max: float
    rms: float
    count: int


def _ellipse_planar(day_offsets, e, mu):
    """Planar ellipse positions of the lighter primary at the given day
    offsets from aphelion, as float arrays (x1, x2)."""
    e, mu = float(e), float(mu)
    t_ut = np.asarray(day_offsets, dtype=float) * float(1 / days_per_ut())
    M = (1 + e) ** 1.5 * t_ut + np.pi
    E = M.copy()
    # quadratic convergence from E=M: 8 sweeps is far past double precision
    for _ in range(8):
        E = E - (E - e * np.sin(E) - M) / (1 - e * np.cos(E))
    beta = e / (1 + np.sqrt(1 - e * e))
    theta = E + 2 * np.arctan2(beta * np.sin(E), 1 - beta * np.cos(E)) - np.pi
    radius = (1 - e) * (1 - mu) / (1 - e * np.cos(theta))
    return radius * np.cos(theta), radius * np.sin(theta)


def _frame_floats(fp):
    frame = build_frame(fp)
    return (np.array([float(v) for v in frame.e1]),
            np.array([float(v) for v in frame.e2]),
            float(fp.aphelion_au), float(fp.offset_au))


def jupiter_ellipse_sequence(day_count, params, fp):
    """Immersed ideal-ellipse positions at daily steps, day_count rows.

    Row i is the immersion of the lighter primary's planar position at
    (i-1) days after the aphelion epoch. Evaluated in floating point:
    the comparison statistics this feeds are 6-digit quantities.
    """
    e1, e2, aph, off = _frame_floats(fp)
    x1, x2 = _ellipse_planar(np.arange(day_count), params.e, params.mu)
    pts = off * e1 + aph * (x1[:, None] * e1 + x2[:, None] * e2)
    return [tuple(row) for row in pts]


def compare_sequences(seq_a, seq_b):
    """Pointwise distance statistics between two equal-length sequences."""
    if len(seq_a) != len(seq_b):
        raise LengthMismatch(
            f"sequence lengths differ: {len(seq_a)} vs {len(seq_b)}")
    a = np.asarray(seq_a, dtype=float)
    b = np.asarray(seq_b, dtype=float)
    dp = np.linalg.norm(a - b, axis=1)
    return ComparisonStats(dp=tuple(dp), min=float(dp.min()), max=float(dp.max()),
                           rms=float(np.sqrt(np.mean(dp * dp))), count=len(dp))


def spacecraft_ephemeris(start_date, step_days, count, ic, params, config, fp):
    """Dated spacecraft records: immersed positions and velocities.

    Samples the high-precision trajectory at step_days intervals from
    start_date (which must coincide with the state's epoch t = ic.t) and
    applies the immersion to positions and its linear part to velocities.
    """
    from .frames import date_to_time
    from .horizons import EphemerisRecord
    with working_precision(config.precision_digits):
        frame = build_frame(fp)
        ut_days = days_per_ut(params.e, params.period_days or JUPITER_PERIOD_DAYS)
        t0 = date_to_time(start_date, params.e,
                          params.period_days or JUPITER_PERIOD_DAYS)
        step_t = as_mpfr(step_days) / ut_days
        times = [t0 + i * step_t for i in range(count)]
    trajectory = propagate_dense(ic, times[-1], times, params, config)
    records = []
    with working_precision(config.precision_digits):
        for i, state in enumerate(trajectory.samples):
            date = start_date + datetime.timedelta(days=i * step_days) \
                if isinstance(start_date, (datetime.date, datetime.datetime)) \
                else start_date + i * step_days
            position = immerse(state.z, frame, fp)
            v_ut, v_day = velocity_immerse(state.v, frame, fp, ut_days)
            records.append(EphemerisRecord(
                date=date, position=position,
                velocity_ut=v_ut, velocity_day=v_day))
    return records


def affine_table_velocity(velocity_ut, frame, fp):
    """Velocity column under the published table's convention.

    The published ephemeris table evidently applied the full affine
    immersion — constant offset included — to velocities rather than only
    its linear part: every golden velocity row equals the correct linear
    image plus offset_au * e1, component by component, to the table's
    printed precision. This helper reproduces that convention so golden
    comparisons are exact; EphemerisRecord.velocity_ut itself stays the
    physically meaningful linear image.
    """
    return tuple(v + fp.offset_au * e for v, e in zip(velocity_ut, frame.e1))


_FIT_FIELDS = ("inclination_deg", "node_deg", "argperi_deg",
               "aphelion_au", "offset_au")
# Initial coordinate-search steps, scaled to each parameter's sensitivity.
_FIT_STEPS = (1e-2, 1e-1, 1e-1, 1e-3, 1e-3)


def fit_frame_params(records, initial_guess=None, objective="rms",
                     budget=20000, tolerance=1e-9):
    """Fit the five immersion parameters to a reference ephemeris.

    Deterministic derivative-free coordinate search with shrinking steps,
    minimizing the rms (default) or max of the pointwise distances between
    the immersed ideal ellipse and the reference positions. Returns
    (FrameParams, ComparisonStats); if the evaluation budget runs out
    before the steps shrink below tolerance, raises NonConvergence with
    the best-so-far parameters and statistics attached.
    """
    if len(records) < 100:
        raise LengthMismatch(
            f"need at least 100 reference records, got {len(records)}")
    if objective not in ("rms", "max"):
        raise ValueError(f"objective must be 'rms' or 'max', got {objective!r}")
    positions = [r.position for r in records]
    fp = initial_guess or FrameParams.from_values()
    # mu enters only through the ellipse scale; the reference values apply
    from .dynamics import reference_params
    params = reference_params()

    def cost(candidate):
        stats = compare_sequences(
            jupiter_ellipse_sequence(len(positions), params, candidate), positions)
        return getattr(stats, objective), stats

    x = [float(getattr(fp, f)) for f in _FIT_FIELDS]
    steps = list(_FIT_STEPS)
    best_cost, best_stats = cost(fp.with_(**dict(zip(_FIT_FIELDS, map(repr, x)))))
    evaluations = 1
    converged = False
    while evaluations < budget:
        improved = False
        for k in range(len(x)):
            for direction in (+1, -1):
                trial = list(x)
                trial[k] += direction * steps[k]
                candidate = fp.with_(**dict(zip(_FIT_FIELDS, map(repr, trial))))
                c, stats = cost(candidate)
                evaluations += 1
                if c < best_cost:
                    x, best_cost, best_stats = trial, c, stats
                    improved = True
                    break
                if evaluations >= budget:
                    break
            if evaluations >= budget:
                break
        if not improved:
            if max(steps) < tolerance:
                converged = True
                break
            steps = [s / 2 for s in steps]
    fitted = fp.with_(**dict(zip(_FIT_FIELDS, map(repr, x))))
    if not converged:
        raise NonConvergence(
            f"budget of {budget} evaluations exhausted before convergence",
            best_params=fitted, best_stats=best_stats)
    return fitted, best_stats
