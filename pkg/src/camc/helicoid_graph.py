"""Helicoidal graphs z = g(r) + pitch*theta over the punctured plane.

For an axially symmetric density the graph Euler-Lagrange equation
Div(W(|grad z|^2) grad z) = Lambda admits a first integral on these
graphs: with nu3 = (1 + g_r^2 + pitch^2/r^2)^{-1/2},

    nu3 * r * g_r * m(nu3) = Lambda * r^2 / 2 + C,

where m = gamma - nu3 gamma' and W = nu3 * m(nu3).  Solving the algebraic
relation for g_r and integrating in r recovers the profile by
quadratures.  The pure helicoid z = pitch*theta satisfies the equation
with Lambda = 0 for every admissible density, because the flux field
W(pitch^2/r^2) * pitch * (-y, x)/r^2 is divergence free term by term.

A screw-motion level set F = Lambda(eta1^2+eta2^2) + 2 eta2 m/Q + A
describes the same surface with C = A/2 and pitch = -1/omega (the orbit
has r^2 = eta1^2 + eta2^2 and flux term -eta2 m/Q, so F = 0 is the first
integral rearranged), which is the bridge used to cross-check the two
constructions.
"""

import numpy as np

from .anisotropy import gamma_eval
from .errors import BranchLost, DomainError, NoRoot
from .fdgrid import cumulative_simpson, grid_1d, interior_mask, staggered_divergence
from .geometry_io import CurveTable
from .mesh import TriMesh, structured_grid_faces

__all__ = [
    "GraphProfile",
    "flux_w",
    "first_integral_residual",
    "solve_g_r",
    "integrate_profile",
    "from_sled",
    "elgraph_residual",
    "helicoid_slit_grid",
    "graph_mesh",
]


def flux_w(profile, grad_sq):
    """Flux coefficient W(|grad z|^2) = nu3 * m(nu3) of the graph equation."""
    grad_sq = np.asarray(grad_sq, dtype=np.float64)
    nu3 = 1.0 / np.sqrt(1.0 + grad_sq)
    m = gamma_eval(profile, nu3) - nu3 * gamma_eval(profile, nu3, 1)
    return nu3 * m


def _slope_residual(profile, pitch, lam, c, r, g_r):
    q = np.sqrt(1.0 + g_r * g_r + (pitch / r) ** 2)
    nu3 = 1.0 / q
    m = gamma_eval(profile, nu3) - nu3 * gamma_eval(profile, nu3, 1)
    return nu3 * r * g_r * m - 0.5 * lam * r * r - c


def _slope_residual_dt(profile, pitch, lam, c, r, t):
    # d/dt of nu3 * t * m(nu3) at fixed r, times r
    q = np.sqrt(1.0 + t * t + (pitch / r) ** 2)
    nu3 = 1.0 / q
    m = gamma_eval(profile, nu3) - nu3 * gamma_eval(profile, nu3, 1)
    dm = -nu3 * gamma_eval(profile, nu3, 2)
    dnu3 = -t / q**3
    return r * (nu3 * m + t * dnu3 * (m + nu3 * dm))


def first_integral_residual(profile, pitch, lam, c, r, g_r):
    """nu3 r g_r m(nu3) - Lambda r^2/2 - C, vectorized over r and g_r."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r <= 0.0):
        raise DomainError("first integral needs r > 0")
    return _slope_residual(profile, pitch, lam, c, r, np.asarray(g_r, dtype=np.float64))


def solve_g_r(profile, pitch, lam, c, r):
    """All real slopes g_r satisfying the first integral at radius r, ascending.

    A sign scan over a symmetric log-spaced slope grid brackets every
    crossing in [-1e6, 1e6]; each bracket is resolved by bisection and
    polished with Newton steps.  NoRoot reports the scanned residual range
    when the right side exceeds the bounded flux (slope breakdown).
    """
    r = float(r)
    if r <= 0.0:
        raise DomainError("first integral needs r > 0")
    grid = np.concatenate(
        [-np.logspace(6, -8, 57), [0.0], np.logspace(-8, 6, 57)]
    )
    res = _slope_residual(profile, pitch, lam, c, r, grid)
    ok = np.isfinite(res)
    roots = []
    scale = 1.0 + abs(0.5 * lam * r * r) + abs(c)
    for k in range(grid.size - 1):
        if not (ok[k] and ok[k + 1]):
            continue
        a, b = grid[k], grid[k + 1]
        fa, fb = res[k], res[k + 1]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb >= 0.0:
            continue
        for _ in range(90):  # plain bisection; the polish below does the rest
            mid = 0.5 * (a + b)
            fm = _slope_residual(profile, pitch, lam, c, r, mid)
            if fa * fm <= 0.0:
                b, fb = mid, fm
            else:
                a, fa = mid, fm
            if b - a < 1e-13 * (1.0 + abs(a)):
                break
        roots.append(0.5 * (a + b))
    if ok[-1] and res[-1] == 0.0:
        roots.append(grid[-1])

    polished = []
    for t in roots:
        for _ in range(6):
            f = _slope_residual(profile, pitch, lam, c, r, t)
            if abs(f) <= 1e-12 * scale:
                break
            df = _slope_residual_dt(profile, pitch, lam, c, r, t)
            if df == 0.0 or not np.isfinite(df):
                break
            t = t - f / df
        polished.append(float(t))
    polished.sort()
    out = []
    for t in polished:  # dedupe brackets that met at the same crossing
        if not out or abs(t - out[-1]) > 1e-9 * (1.0 + abs(t)):
            out.append(t)
    if not out:
        lo = np.nanmin(np.where(ok, res, np.nan))
        hi = np.nanmax(np.where(ok, res, np.nan))
        raise NoRoot(
            f"no slope satisfies the first integral at r={r:g}; "
            f"residual stays in [{lo:.3g}, {hi:.3g}]"
        )
    return out


def _continue_root(profile, pitch, lam, c, r, guess, scale):
    # Newton continuation from the previous radius; None on divergence
    t = guess
    for _ in range(12):
        f = _slope_residual(profile, pitch, lam, c, r, t)
        if not np.isfinite(f):
            return None
        if abs(f) <= 1e-12 * scale:
            return t
        df = _slope_residual_dt(profile, pitch, lam, c, r, t)
        if df == 0.0 or not np.isfinite(df):
            return None
        step = f / df
        if abs(step) > 0.5 * (1.0 + abs(t)):  # clearly leaving the branch
            return None
        t = t - step
    return None


class GraphProfile:
    """Quadrature solution (r, g, g_r) of the first integral.

    Plain container; table() exports the columns for CSV round trips.
    """

    def __init__(self, profile, pitch, lam, c, r, g, g_r, root_index=0):
        self.profile = profile
        self.pitch = float(pitch)
        self.lam = float(lam)
        self.c = float(c)
        self.r = np.asarray(r, dtype=np.float64)
        self.g = np.asarray(g, dtype=np.float64)
        self.g_r = np.asarray(g_r, dtype=np.float64)
        self.root_index = int(root_index)

    def __len__(self):
        return self.r.size

    def table(self):
        return CurveTable(("r", "g", "g_r"), np.column_stack([self.r, self.g, self.g_r]))


def integrate_profile(profile, pitch, lam, c, r_min, r_max, step=1e-3, root_index=0):
    """Track one slope branch over [r_min, r_max] and integrate it.

    The branch starts at the root_index-th slope (ascending) at r_min and
    is continued by nearest root; g is accumulated with a composite
    fourth-order rule on the fixed r grid, normalized to g(r_min) = 0.
    Raises BranchLost when the tracked root disappears.
    """
    if r_min <= 0.0:
        raise DomainError("first integral needs r > 0")
    if not r_max > r_min:
        raise ValueError("r_max must exceed r_min")
    r = grid_1d(r_min, r_max, step)
    starts = solve_g_r(profile, pitch, lam, c, r[0])
    if not -len(starts) <= root_index < len(starts):
        raise IndexError(
            f"root_index {root_index} out of range; {len(starts)} slope roots at r_min"
        )
    slopes = np.empty(r.size)
    slopes[0] = starts[root_index]
    prev = slopes[0]
    for k in range(1, r.size):
        rk = float(r[k])
        scale = 1.0 + abs(0.5 * lam * rk * rk) + abs(c)
        t = _continue_root(profile, pitch, lam, c, rk, prev, scale)
        if t is None:
            try:
                cands = solve_g_r(profile, pitch, lam, c, rk)
            except NoRoot as e:
                raise BranchLost(
                    f"slope branch lost between r={r[k - 1]:g} and r={rk:g}"
                ) from e
            t = min(cands, key=lambda x: abs(x - prev))
            if abs(t - prev) > 0.25 * (1.0 + abs(prev)):
                raise BranchLost(
                    f"slope branch lost near r={rk:g}: nearest root jumped "
                    f"from {prev:g} to {t:g}"
                )
        slopes[k] = t
        prev = t
    g = cumulative_simpson(slopes, float(r[1] - r[0]))
    return GraphProfile(profile, pitch, lam, c, r, g, slopes, root_index)


def from_sled(params):
    """(pitch, Lambda, C) of the graph description matching a sled level set.

    The level-set offset A corresponds to the first-integral constant
    C = A/2, and pitch = -1/omega.
    """
    return params.pitch, params.lam, 0.5 * params.big_a


def elgraph_residual(profile, Z, lam, h, valid=None):
    """Residual grid of Div(W(|grad z|^2) grad z) - Lambda.

    Returns a full-size array, NaN on the border and wherever the 3x3
    stencil leaves the valid region.
    """

    def flux(zx, zy):
        w = flux_w(profile, zx * zx + zy * zy)
        return w * zx, w * zy

    res = staggered_divergence(Z, h, flux) - lam
    if valid is not None:
        res = np.where(interior_mask(valid), res, np.nan)
    return res


def helicoid_slit_grid(pitch, r_in, r_out, h, band=0.15):
    """Grid sampling of the slit helicoid z = pitch * atan2(y, x).

    Returns (X, Y, Z, valid): valid keeps the annulus r_in <= r <= r_out
    minus the branch-cut wedge x < 0, |y| < band, where atan2 jumps.
    """
    x = grid_1d(-r_out - 2 * h, r_out + 2 * h, h)
    X, Y = np.meshgrid(x, x, indexing="ij")
    R = np.hypot(X, Y)
    Z = pitch * np.arctan2(Y, X)
    valid = (R >= r_in) & (R <= r_out) & ~((X < 0.0) & (np.abs(Y) < band))
    return X, Y, Z, valid


def graph_mesh(gp, theta_samples=128, turns=1.0):
    """Swept mesh of z = g(r) + pitch * theta with exact unit normals.

    theta runs over [0, turns*2*pi); the seam is stitched only for the
    pitchless full revolution, which closes exactly.
    """
    if theta_samples < 3:
        raise ValueError("theta_samples must be at least 3")
    wrap = gp.pitch == 0.0 and float(turns) == 1.0
    if wrap:
        theta = np.linspace(0.0, 2.0 * np.pi, theta_samples, endpoint=False)
    else:
        theta = np.linspace(0.0, float(turns) * 2.0 * np.pi, theta_samples)
    r = gp.r
    ct, st = np.cos(theta), np.sin(theta)
    X = r[:, None] * ct[None, :]
    Y = r[:, None] * st[None, :]
    Z = gp.g[:, None] + gp.pitch * theta[None, :]
    vertices = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    q = np.sqrt(1.0 + gp.g_r**2 + (gp.pitch / r) ** 2)
    Nx = (-gp.g_r[:, None] * ct[None, :] + (gp.pitch / r)[:, None] * st[None, :]) / q[:, None]
    Ny = (-gp.g_r[:, None] * st[None, :] - (gp.pitch / r)[:, None] * ct[None, :]) / q[:, None]
    Nz = np.broadcast_to((1.0 / q)[:, None], X.shape)
    normals = np.column_stack([Nx.ravel(), Ny.ravel(), Nz.ravel()])

    faces = structured_grid_faces(r.size, theta_samples, wrap_j=wrap)
    return TriMesh(vertices, faces, normals=normals)
