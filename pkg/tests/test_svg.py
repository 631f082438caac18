import math
from dataclasses import dataclass

import pytest
from gmpy2 import mpfr

from ertbp.dynamics import PhaseState
from ertbp.errors import ConfigError
from ertbp.svg import emit_svg_trace


@dataclass
class _Trajectory:
    samples: tuple


def _state(x, y, theta=0.0):
    return PhaseState.make(theta=repr(theta), z=(repr(x), repr(y)))


def _points(svg):
    coords = svg.split('points="')[1].split('"')[0]
    return [tuple(float(v) for v in pair.split(","))
            for pair in coords.split()]


def test_single_point_centers():
    svg = emit_svg_trace(_Trajectory((_state(0.3, -0.1),)), size=200)
    assert svg.startswith("<svg ")
    assert _points(svg) == [(100.0, 100.0)]


def test_circle_fills_frame():
    n = 64
    samples = tuple(_state(math.cos(2 * math.pi * k / n),
                           math.sin(2 * math.pi * k / n))
                    for k in range(n + 1))
    svg = emit_svg_trace(_Trajectory(samples), size=400, margin=40)
    pts = _points(svg)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    assert min(xs) == pytest.approx(40, abs=1)
    assert max(xs) == pytest.approx(360, abs=1)
    assert min(ys) == pytest.approx(40, abs=1)
    assert max(ys) == pytest.approx(360, abs=1)
    # SVG y grows downward: the first sample (x=1, y=0) sits at the right
    assert pts[0][0] == pytest.approx(360, abs=1)


def test_rotating_pulsating_fixes_corotating_point():
    # A point corotating rigidly with the primaries at fixed radius maps
    # to a single pulsating-frame point up to the pulsation factor.
    e = 0.048
    thetas = [0.0, 0.7, 1.9, 3.1, 4.5, 6.0]
    samples = tuple(_state(0.5 * math.cos(t), 0.5 * math.sin(t), theta=t)
                    for t in thetas)
    svg = emit_svg_trace(_Trajectory(samples),
                         frame_of_reference="rotating-pulsating", e=repr(e))
    pts = _points(svg)
    ys = [p[1] for p in pts]
    # all points collapse onto the positive pulsating x-axis
    assert max(ys) - min(ys) < 1e-6


def test_unknown_frame_rejected():
    with pytest.raises(ConfigError):
        emit_svg_trace(_Trajectory((_state(0, 0),)),
                       frame_of_reference="galactic")


def test_empty_trajectory_rejected():
    with pytest.raises(ConfigError):
        emit_svg_trace(_Trajectory(()))
