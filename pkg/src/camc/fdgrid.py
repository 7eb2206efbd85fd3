"""Conservative finite differences for flux-form graph operators.

Operators of the form Div(P(grad z)) are discretized on a uniform grid by
evaluating the flux P at staggered half points and differencing back to
cell centers.  With P = grad z this collapses to the exact 5-point
Laplacian, so the scheme is second order and keeps a discrete divergence
structure (telescoping sums), which is what the residual checks rely on.

Grids are indexed [i, j] with axis 0 along x and axis 1 along y
(meshgrid indexing="ij"); spacing h is the same in both directions.
"""

import math

import numpy as np

__all__ = ["grid_1d", "staggered_divergence", "interior_mask", "cumulative_simpson"]


def grid_1d(lo, hi, h):
    """Uniform samples covering [lo, hi] with spacing h; the top end is
    stretched to the next multiple of h if it does not divide evenly."""
    if not hi > lo:
        raise ValueError("empty interval")
    n = int(math.ceil((hi - lo) / float(h) - 1e-12)) + 1
    return lo + float(h) * np.arange(n)


def staggered_divergence(Z, h, flux):
    """Div(flux(grad Z)) at interior nodes; NaN on the one-node border.

    flux maps (zx, zy) arrays to (px, py) arrays of the same shape.  The
    gradient at an x half point (i+1/2, j) pairs the one-sided zx with a
    four-point average of zy, and symmetrically at y half points, so both
    flux components see a full gradient at second order.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] < 3 or Z.shape[1] < 3:
        raise ValueError("need at least a 3x3 grid")
    h = float(h)

    # x half points (i+1/2, j), j restricted to 1..m-2
    zx = (Z[1:, 1:-1] - Z[:-1, 1:-1]) / h
    zy = (Z[:-1, 2:] + Z[1:, 2:] - Z[:-1, :-2] - Z[1:, :-2]) / (4.0 * h)
    px, _ = flux(zx, zy)

    # y half points (i, j+1/2), i restricted to 1..n-2
    zx = (Z[2:, :-1] + Z[2:, 1:] - Z[:-2, :-1] - Z[:-2, 1:]) / (4.0 * h)
    zy = (Z[1:-1, 1:] - Z[1:-1, :-1]) / h
    _, py = flux(zx, zy)

    out = np.full(Z.shape, np.nan)
    out[1:-1, 1:-1] = (px[1:] - px[:-1]) / h + (py[:, 1:] - py[:, :-1]) / h
    return out


def interior_mask(valid):
    """Nodes whose full 3x3 neighborhood is valid (the staggered stencil
    footprint); False on the border and wherever valid fails nearby."""
    valid = np.asarray(valid, dtype=bool)
    out = np.zeros_like(valid)
    core = np.ones((valid.shape[0] - 2, valid.shape[1] - 2), dtype=bool)
    for di in (0, 1, 2):
        for dj in (0, 1, 2):
            core &= valid[di : valid.shape[0] - 2 + di, dj : valid.shape[1] - 2 + dj]
    out[1:-1, 1:-1] = core
    return out


def cumulative_simpson(y, h):
    """Cumulative integral of uniform samples, fourth order, out[0] = 0.

    Even indices accumulate plain Simpson pairs; odd indices add the
    closed half-panel rule h (5 f0 + 8 f1 - f2)/12 on top of the previous
    even one (mirrored at the tail when the count is even).  Fixed-grid
    closed formulas keep reruns bitwise reproducible.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.size < 3:
        raise ValueError("need at least three samples")
    h = float(h)
    n = y.size
    out = np.empty_like(y)
    out[0] = 0.0
    pair = h * (y[:-2:2] + 4.0 * y[1:-1:2] + y[2::2]) / 3.0
    out[2::2] = np.cumsum(pair)
    odd = np.arange(1, n - 1, 2)
    out[odd] = out[odd - 1] + h * (5.0 * y[odd - 1] + 8.0 * y[odd] - y[odd + 1]) / 12.0
    if n % 2 == 0:
        out[-1] = out[-2] + h * (-y[-3] + 8.0 * y[-2] + 5.0 * y[-1]) / 12.0
    return out
