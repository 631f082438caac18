"""Minimal SVG trace of a planar trajectory.

Two frames of reference: 'inertial' plots the sampled positions as they
are; 'rotating-pulsating' rotates each sample by -theta(t) and scales it
by (1 - e cos theta)/(1 - e) so the two primaries become fixed points and
a near-periodic orbit closes into a multi-lobed curve. Deliberately
unstyled: the plots are diagnostics, not a product surface.
"""
import gmpy2

from .errors import ConfigError

FRAMES = ("inertial", "rotating-pulsating")


def _transform(samples, frame_of_reference, e):
    points = []
    for state in samples:
        x, y = float(state.z[0]), float(state.z[1])
        if frame_of_reference == "rotating-pulsating":
            th = state.theta
            c, s = float(gmpy2.cos(th)), float(gmpy2.sin(th))
            scale = (1 - float(e) * c) / (1 - float(e))
            x, y = scale * (c * x + s * y), scale * (c * y - s * x)
        points.append((x, y))
    return points


def emit_svg_trace(trajectory, frame_of_reference="inertial", e="0.048",
                   size=800, margin=40):
    """Render the trajectory's position samples as one SVG polyline."""
    if frame_of_reference not in FRAMES:
        raise ConfigError(
            f"frame of reference must be one of {FRAMES}, got {frame_of_reference!r}")
    if not trajectory.samples:
        raise ConfigError("trajectory has no samples")
    points = _transform(trajectory.samples, frame_of_reference, e)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    scale = (size - 2 * margin) / span
    cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
    half = size / 2

    def pix(p):
        # SVG y grows downward; flip so the plot is right-handed
        return (half + (p[0] - cx) * scale, half - (p[1] - cy) * scale)

    coords = " ".join("%.3f,%.3f" % pix(p) for p in points)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'  <rect width="{size}" height="{size}" fill="white"/>\n'
        f'  <polyline points="{coords}" fill="none" stroke="black" stroke-width="1"/>\n'
        f'</svg>\n'
    )
