"""Axially symmetric surface energy densities and their Wulff shapes.

A density is a function gamma(nu3) of the vertical normal component
alone.  Everything downstream needs only gamma and its first three
derivatives, plus the two reciprocal radii of the Wulff shape

    1/mu2 = gamma - nu3*gamma'          (rotational direction)
    1/mu1 = (1 - nu3^2)*gamma'' + 1/mu2 (meridian direction)

both of which must stay positive for the construction to make sense
(convexity of the Wulff shape).
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _kernels
from .errors import ConvexityError, DomainError
from .mesh import TriMesh, structured_grid_faces

_DOMAIN_SLACK = 1.0e-12


@dataclass(frozen=True)
class AnisotropyProfile:
    """One member of the supported density family.

    kind is one of 'isotropic', 'rapini', 'poly', 'reciprocal'.  The
    first three are polynomials in nu3 on [-1, 1]; 'reciprocal' is
    gamma = (1/nu3 - nu3)/2 on (0, 1], normalized so that 1/mu2 = 1/nu3,
    the Wulff shape is the downward paraboloid xi1^2 + xi2^2 = -2*xi3
    (non-compact), and the graph equation collapses to Poisson's
    equation, i.e. zero-curvature graphs are harmonic functions.
    """

    kind: str
    coeffs: tuple = (1.0,)

    def __post_init__(self):
        if self.kind not in ("isotropic", "rapini", "poly", "reciprocal"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def domain(self):
        if self.kind == "reciprocal":
            return (0.0, 1.0)  # open at 0
        return (-1.0, 1.0)

    @property
    def noncompact_wulff(self):
        return self.kind == "reciprocal"

    def kernel_args(self):
        """(kind code, coefficient array) consumed by the trace kernels."""
        if self.kind == "reciprocal":
            return _kernels.KIND_RECIPROCAL, np.zeros(1)
        return _kernels.KIND_POLY, np.asarray(self.coeffs, dtype=np.float64)

    def label(self):
        if self.kind == "isotropic":
            return "isotropic"
        if self.kind == "rapini":
            return f"rapini:e={self.coeffs[2]:g}"
        if self.kind == "reciprocal":
            return "dirichlet"
        return "poly:" + ",".join(f"{c:g}" for c in self.coeffs)


def isotropic():
    return AnisotropyProfile("isotropic", (1.0,))


def rapini_papoular(e):
    """gamma = 1 + e*nu3^2."""
    return AnisotropyProfile("rapini", (1.0, 0.0, float(e)))


def dirichlet():
    """gamma = (1/nu3 - nu3)/2 on (0, 1] (harmonic-graph density)."""
    return AnisotropyProfile("reciprocal", ())


def polynomial(coeffs):
    """gamma = sum_i coeffs[i]*nu3^i on [-1, 1]."""
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs:
        raise ValueError("polynomial profile needs at least one coefficient")
    return AnisotropyProfile("poly", coeffs)


def parse_profile(text):
    """Parse the CLI grammar: isotropic | rapini:e=<real> | dirichlet | poly:c0,c1,..."""
    t = text.strip()
    if t == "isotropic":
        return isotropic()
    if t == "dirichlet":
        return dirichlet()
    if t.startswith("rapini:"):
        body = t[len("rapini:"):]
        if not body.startswith("e="):
            raise ValueError(f"expected rapini:e=<real>, got {text!r}")
        return rapini_papoular(float(body[2:]))
    if t.startswith("poly:"):
        parts = t[len("poly:"):].split(",")
        return polynomial([float(p) for p in parts])
    raise ValueError(f"unrecognized profile {text!r}")


def _check_domain(profile, nu3):
    x = np.asarray(nu3, dtype=np.float64)
    lo, hi = profile.domain
    if profile.kind == "reciprocal":
        if np.any(x <= 0.0):
            raise DomainError("reciprocal density needs nu3 > 0")
    elif np.any(x < lo - _DOMAIN_SLACK):
        raise DomainError(f"nu3 below domain [{lo}, {hi}]")
    if np.any(x > hi + _DOMAIN_SLACK):
        raise DomainError(f"nu3 above domain [{lo}, {hi}]")
    return x


def gamma_eval(profile, nu3, order=0):
    """gamma or one of its first three derivatives, elementwise."""
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0..3")
    x = _check_domain(profile, nu3)
    if profile.kind == "reciprocal":
        inv = 1.0 / x
        if order == 0:
            out = 0.5 * (inv - x)
        elif order == 1:
            out = -0.5 * (inv * inv + 1.0)
        elif order == 2:
            out = inv**3
        else:
            out = -3.0 * inv**4
    else:
        c = np.asarray(profile.coeffs, dtype=np.float64)
        for _ in range(order):
            c = npoly.polyder(c)
        out = npoly.polyval(x, c) if c.size else np.zeros_like(x)
    if np.isscalar(nu3):
        return float(out)
    return out


def inv_mu2(profile, nu3):
    """gamma - nu3*gamma' without the positivity check."""
    x = _check_domain(profile, nu3)
    return gamma_eval(profile, x, 0) - x * gamma_eval(profile, x, 1)


def inv_mu1(profile, nu3):
    """(1 - nu3^2)*gamma'' + 1/mu2 without the positivity check."""
    x = _check_domain(profile, nu3)
    return (1.0 - x * x) * gamma_eval(profile, x, 2) + inv_mu2(profile, x)


def mu2(profile, nu3):
    """Rotational curvature radius of the Wulff shape; positive iff convex."""
    m = inv_mu2(profile, nu3)
    if np.any(np.asarray(m) <= 0.0):
        raise ConvexityError("gamma - nu3*gamma' is not positive")
    out = 1.0 / m
    return float(out) if np.isscalar(nu3) else out


def mu1(profile, nu3):
    """Meridian curvature radius of the Wulff shape; positive iff convex."""
    d = inv_mu1(profile, nu3)
    if np.any(np.asarray(d) <= 0.0):
        raise ConvexityError("(1 - nu3^2)*gamma'' + 1/mu2 is not positive")
    out = 1.0 / d
    return float(out) if np.isscalar(nu3) else out


@dataclass(frozen=True)
class ConvexityReport:
    passed: bool
    min_inv_mu2: float
    nu3_at_min_inv_mu2: float
    min_inv_mu1: float
    nu3_at_min_inv_mu1: float
    samples: int
    noncompact_wulff: bool


def convexity_check(profile, samples=512, nu3_range=None):
    """Minima of 1/mu2 and 1/mu1 over a uniform nu3 grid; passes iff both > 0."""
    if samples < 3:
        raise ValueError("samples must be at least 3")
    lo, hi = nu3_range if nu3_range is not None else profile.domain
    if profile.kind == "reciprocal":
        lo = max(lo, 1.0e-6)
    grid = np.linspace(lo, hi, samples)
    m = inv_mu2(profile, grid)
    d = inv_mu1(profile, grid)
    i2 = int(np.argmin(m))
    i1 = int(np.argmin(d))
    return ConvexityReport(
        passed=bool(m[i2] > 0.0 and d[i1] > 0.0),
        min_inv_mu2=float(m[i2]),
        nu3_at_min_inv_mu2=float(grid[i2]),
        min_inv_mu1=float(d[i1]),
        nu3_at_min_inv_mu1=float(grid[i1]),
        samples=samples,
        noncompact_wulff=profile.noncompact_wulff,
    )


def harmonicity_residual(profile, lam, nu3):
    """gamma''' - (4/lam^2)*nu3*(1 - nu3^2)*gamma''.

    Zero for all nu3 exactly when helicoids of pitch lam are a critical
    family for the density; the only smooth densities with that property
    solve this third-order ODE.
    """
    if lam == 0.0:
        raise ValueError("lam must be nonzero")
    x = _check_domain(profile, nu3)
    out = gamma_eval(profile, x, 3) - (4.0 / lam**2) * x * (1.0 - x * x) * gamma_eval(
        profile, x, 2
    )
    return float(out) if np.isscalar(nu3) else out


def wulff_point(profile, nu3, azimuth):
    """Boundary point of the Wulff shape with outward normal direction
    (sqrt(1-nu3^2)cos a, sqrt(1-nu3^2)sin a, nu3)."""
    x = _check_domain(profile, nu3)
    m = inv_mu2(profile, x)
    rho = m * np.sqrt(np.maximum(0.0, 1.0 - x * x))
    z = m * x + gamma_eval(profile, x, 1)
    return np.stack(
        [rho * np.cos(azimuth), rho * np.sin(azimuth), z * np.ones_like(np.asarray(azimuth, dtype=np.float64))],
        axis=-1,
    )


@dataclass
class WulffMesh:
    mesh: TriMesh
    nu3: np.ndarray
    azimuth: np.ndarray
    profile: AnisotropyProfile


def wulff_mesh(profile, nu3_samples=65, azimuth_samples=128, nu3_range=None):
    """Triangulated Wulff boundary over a nu3 band, poles capped by fans.

    Vertex normals are the defining normal directions, so the support
    identity <point, normal> = gamma(nu3) holds at every vertex.  For the
    non-compact reciprocal density an explicit nu3_range is required.
    """
    if nu3_range is None:
        if profile.noncompact_wulff:
            raise DomainError(
                "non-compact Wulff shape: pass an explicit nu3_range"
            )
        nu3_range = profile.domain
    lo, hi = float(nu3_range[0]), float(nu3_range[1])
    dlo, dhi = profile.domain
    if lo < dlo - _DOMAIN_SLACK or hi > dhi + _DOMAIN_SLACK or lo >= hi:
        raise DomainError(f"nu3_range [{lo}, {hi}] outside density domain")
    if nu3_samples < 2 or azimuth_samples < 3:
        raise ValueError("need nu3_samples >= 2 and azimuth_samples >= 3")
    rep = convexity_check(profile, samples=max(nu3_samples, 64), nu3_range=(lo, hi))
    if not rep.passed:
        raise ConvexityError(
            f"density not convex on [{lo}, {hi}]: "
            f"min 1/mu2 = {rep.min_inv_mu2:.3g}, min 1/mu1 = {rep.min_inv_mu1:.3g}"
        )

    band = np.linspace(lo, hi, nu3_samples)
    pole_hi = hi >= 1.0 - 1.0e-14
    pole_lo = lo <= -1.0 + 1.0e-14
    rings = band[(band > -1.0 + 1.0e-14) & (band < 1.0 - 1.0e-14)]
    if rings.size < 2:
        raise ValueError("nu3_samples too small: fewer than two interior rings")
    az = 2.0 * np.pi * np.arange(azimuth_samples) / azimuth_samples

    nu3_grid = np.repeat(rings, azimuth_samples)
    az_grid = np.tile(az, rings.size)
    verts = wulff_point(profile, nu3_grid, az_grid)
    # grid normal d/d(nu3) x d/d(azimuth) points into the body; flip
    faces = structured_grid_faces(rings.size, azimuth_samples, wrap_j=True)[:, [0, 2, 1]]

    vlist = [verts]
    nu3_list = [nu3_grid]
    az_list = [az_grid]
    flist = [faces]
    nv = verts.shape[0]
    j = np.arange(azimuth_samples)
    jn = (j + 1) % azimuth_samples
    if pole_hi:
        # apex carries gamma(1) on the axis; fan to the last ring
        apex = np.array([[0.0, 0.0, float(gamma_eval(profile, 1.0))]])
        top = (rings.size - 1) * azimuth_samples
        fan = np.stack([top + j, top + jn, np.full_like(j, nv)], axis=-1)
        vlist.append(apex)
        nu3_list.append(np.array([1.0]))
        az_list.append(np.array([0.0]))
        flist.append(fan)
        nv += 1
    if pole_lo:
        apex = np.array([[0.0, 0.0, -float(gamma_eval(profile, -1.0))]])
        fan = np.stack([jn, j, np.full_like(j, nv)], axis=-1)
        vlist.append(apex)
        nu3_list.append(np.array([-1.0]))
        az_list.append(np.array([0.0]))
        flist.append(fan)
        nv += 1

    vertices = np.concatenate(vlist)
    nu3_all = np.concatenate(nu3_list)
    az_all = np.concatenate(az_list)
    normals = np.stack(
        [
            np.sqrt(np.maximum(0.0, 1.0 - nu3_all**2)) * np.cos(az_all),
            np.sqrt(np.maximum(0.0, 1.0 - nu3_all**2)) * np.sin(az_all),
            nu3_all,
        ],
        axis=-1,
    )
    mesh = TriMesh(vertices, np.concatenate(flist), normals=normals)
    return WulffMesh(mesh=mesh, nu3=nu3_all, azimuth=az_all, profile=profile)
