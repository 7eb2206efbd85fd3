"""Catenoid/helicoid conjugate pairs for p-norm surface energies.

For the energy whose Wulff shape is the p-ball W_p, the graph functional
is the dual-norm area integral (1 + |z_x|^q + |z_y|^q)^{1/q} d^2x with
1/p + 1/q = 1, and its Euler-Lagrange operator is

    M[z] = Div[(1 + z_x^q + z_y^q)^{(1-q)/q} (z_x^{q-1}, z_y^{q-1})],

fractional powers read as sign-preserving.  Radial graphs z = Z(omega),
omega = (|x|^p + |y|^p)^{1/p}, turn the equation into a first integral
because the flux collapses to f(omega)(x, y) with

    f = [Z'/(1 + Z'^q)^{1/q}]^{q-1} / omega,   omega f' + 2 f = 0,

so f = c/omega^2 and Z' follows by inverting one scalar relation
(catenoid_slope).  The conjugate height w has gradient c(-y, x)/omega^2,
is constant on rays (a ruled graph), and is multivalued with period
2 f(a) Area({omega <= a}); it satisfies the operator with p and q
swapped.  The same construction runs for split horizontal/vertical
planar norms (dual_pair_check): the flux of w(Psi*) is g(Psi*)(x, y)
with g = dPhi/ds at (w', 1) divided by Psi*, forcing g = c/Psi*^2, and
the conjugate solves the dual equation provided Psi* is invariant under
the quarter turn J(x, y) = (-y, x).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import BranchCutError, DomainError, HypothesisError, WaistError
from .fdgrid import grid_1d, interior_mask, staggered_divergence
from .geometry_io import CurveTable

__all__ = [
    "spow",
    "PlanarNorm",
    "PNormSpec",
    "ConjugatePair",
    "DualPairReport",
    "catenoid_slope",
    "catenoid_height",
    "catenoid_grid",
    "m_operator_residual",
    "norm_graph_residual",
    "conjugate_height",
    "conjugate_period",
    "conjugate_gradient",
    "conjugate_grid",
    "conjugate_helicoid",
    "superellipse_area",
    "period_from_flux",
    "dual_pair_check",
]

# fixed-order Gauss nodes keep every quadrature deterministic and exact
# to roundoff for the smooth integrands used here
_GX, _GW = np.polynomial.legendre.leggauss(48)


def spow(x, a):
    """Sign-preserving power sign(x)|x|^a."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.abs(x) ** a


def _integral_to(fn, a, b, chunk=1 << 16):
    """integral of fn from a to each b, Gauss-Legendre per element.

    fn must accept arrays; a may be a scalar or broadcast with b, and b
    may have any shape.  Evaluation is chunked so big residual grids do
    not allocate (grid x nodes) at once.
    """
    b = np.asarray(b, dtype=np.float64)
    a = np.broadcast_to(np.asarray(a, dtype=np.float64), b.shape)
    flat_b = b.ravel()
    flat_a = a.ravel()
    out = np.empty(flat_b.size)
    for k in range(0, flat_b.size, chunk):
        blk = flat_b[k : k + chunk]
        alk = flat_a[k : k + chunk]
        half = 0.5 * (blk - alk)
        mid = 0.5 * (blk + alk)
        t = mid[:, None] + half[:, None] * _GX[None, :]
        out[k : k + chunk] = (fn(t) @ _GW) * half
    return out.reshape(b.shape)


def _circle_integral_to(fn, theta):
    """integral of fn from 0 to each theta, split at multiples of pi/2.

    Angular integrands built from a planar norm are smooth inside each
    quadrant but lose higher derivatives where a component of the unit
    vector vanishes; splitting there keeps the fixed Gauss rule at full
    accuracy for fractional exponents.
    """
    theta = np.asarray(theta, dtype=np.float64)
    h = 0.5 * math.pi
    n = np.floor(theta / h)
    k_lo = min(0, int(n.min()))
    k_hi = max(0, int(n.max()))
    prefix = {0: 0.0}
    for k in range(0, k_hi):
        prefix[k + 1] = prefix[k] + float(_integral_to(fn, k * h, (k + 1) * h))
    for k in range(0, k_lo, -1):
        prefix[k - 1] = prefix[k] - float(_integral_to(fn, (k - 1) * h, k * h))
    svals = np.array([prefix[k] for k in range(k_lo, k_hi + 1)])
    base = svals[(n - k_lo).astype(np.intp)]
    return base + _integral_to(fn, n * h, theta)


@dataclass(frozen=True)
class PlanarNorm:
    """Weighted planar p-norm (w1 |v1|^p + w2 |v2|^p)^{1/p}, p > 1.

    Fractional p is allowed; smoothness away from the axes is all the
    staggered residuals need, and duals of even norms land here anyway.
    """

    p: float
    weights: tuple = (1.0, 1.0)

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError("norm exponent must exceed 1")
        w = tuple(float(x) for x in self.weights)
        if len(w) != 2 or min(w) <= 0.0:
            raise ValueError("need two positive weights")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "weights", w)

    def value(self, vx, vy):
        w1, w2 = self.weights
        vx = np.asarray(vx, dtype=np.float64)
        vy = np.asarray(vy, dtype=np.float64)
        return (w1 * np.abs(vx) ** self.p + w2 * np.abs(vy) ** self.p) ** (1.0 / self.p)

    def grad(self, vx, vy):
        """Gradient of the norm; zero at the origin (any subgradient works
        there because every flux below multiplies it by a vanishing factor)."""
        w1, w2 = self.weights
        n = self.value(vx, vy)
        safe = np.where(n > 0.0, n, 1.0) ** (self.p - 1.0)
        gx = np.where(n > 0.0, w1 * spow(vx, self.p - 1.0) / safe, 0.0)
        gy = np.where(n > 0.0, w2 * spow(vy, self.p - 1.0) / safe, 0.0)
        return gx, gy

    def coefficient(self, s):
        """d/ds of value(s, 1) for s >= 0; bounded by w1^{1/p}."""
        w1, w2 = self.weights
        s = np.asarray(s, dtype=np.float64)
        return w1 * s ** (self.p - 1.0) / (w1 * s**self.p + w2) ** ((self.p - 1.0) / self.p)

    def slope_from_coefficient(self, g):
        """Invert coefficient(s) = g for s >= 0.

        With y = (g/w1)^{p/(p-1)} the inverse is (y w2 / (1 - w1 y))^{1/p};
        g at or beyond the supremum w1^{1/p} means the requested flux sits
        inside the catenoid waist.
        """
        w1, w2 = self.weights
        g = np.asarray(g, dtype=np.float64)
        if np.any(g < 0.0):
            raise DomainError("flux coefficient must be nonnegative")
        y = (g / w1) ** (self.p / (self.p - 1.0))
        if np.any(w1 * y >= 1.0):
            raise WaistError("flux coefficient reaches the norm's slope bound w1^(1/p)")
        return (y * w2 / (1.0 - w1 * y)) ** (1.0 / self.p)

    def circle(self, theta):
        """Radius function of the unit circle, value(cos t, sin t)."""
        return self.value(np.cos(theta), np.sin(theta))

    def dual(self):
        q = self.p / (self.p - 1.0)
        w1, w2 = self.weights
        return PlanarNorm(q, (w1 ** (1.0 - q), w2 ** (1.0 - q)))

    def j_invariance_gap(self, samples=1000, seed=0):
        """max relative defect of value(Jv) = value(v) over random vectors."""
        rng = np.random.default_rng(seed)
        v = rng.standard_normal((int(samples), 2))
        a = self.value(v[:, 0], v[:, 1])
        b = self.value(-v[:, 1], v[:, 0])
        return float(np.max(np.abs(a - b) / a))


@dataclass(frozen=True)
class PNormSpec:
    """Catenoid data for the Wulff shape W_p: even p and waist constant c."""

    p: int
    c: float = 1.0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 2 or self.p % 2 != 0:
            raise ValueError("p must be an even integer >= 2")
        if not self.c > 0.0:
            raise ValueError("c must be positive")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "c", float(self.c))

    @property
    def q(self):
        return self.p / (self.p - 1.0)

    def omega(self, x, y):
        """The radial variable (|x|^p + |y|^p)^{1/p}."""
        return PlanarNorm(self.p).value(x, y)


def catenoid_slope(spec, omega):
    """Profile slope z_omega = u (1 - u^q)^{-1/q}, u = (c/omega)^{p-1}.

    Solves the first integral f(omega) = c/omega^2 of the radial graph
    equation; for p = 2 it reduces to c/sqrt(omega^2 - c^2).
    """
    omega = np.asarray(omega, dtype=np.float64)
    if np.any(omega <= spec.c):
        raise WaistError(f"omega <= waist c = {spec.c:g}: no graph slope exists")
    u = (spec.c / omega) ** (spec.p - 1)
    return u * (1.0 - u**spec.q) ** (-1.0 / spec.q)


def catenoid_height(spec, omega, omega_ref):
    """z(omega) with z(omega_ref) = 0, by per-element Gauss quadrature."""
    if not omega_ref > spec.c:
        raise WaistError("reference radius must sit outside the waist")
    omega = np.asarray(omega, dtype=np.float64)
    if np.any(omega <= spec.c):
        raise WaistError("height sample inside the waist")
    return _integral_to(lambda t: catenoid_slope(spec, t), omega_ref, omega)


def _square_grid(L, h):
    x = grid_1d(-L, L, h)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return x, X, Y


def catenoid_grid(spec, annulus, h, band=0.15):
    """Grid sampling of the catenoid over a p-annulus, with its residual mask.

    Returns (X, Y, Z, valid); valid keeps annulus[0] <= omega <= annulus[1]
    away from the coordinate axes (|x|, |y| > band), where the fractional
    q-powers of the operator lose smoothness.
    """
    a, b = float(annulus[0]), float(annulus[1])
    if not spec.c < a < b:
        raise WaistError("annulus must sit strictly outside the waist")
    _, X, Y = _square_grid(b + 3.0 * h, h)
    omega = spec.omega(X, Y)
    Z = np.full(X.shape, np.nan)
    ok = omega > spec.c * (1.0 + 1e-9)
    Z[ok] = catenoid_height(spec, omega[ok], a)
    valid = (
        (omega >= a)
        & (omega <= b)
        & (np.abs(X) > band)
        & (np.abs(Y) > band)
        & np.isfinite(Z)
    )
    return X, Y, Z, valid


def norm_graph_residual(psi, phi, Z, h, valid=None):
    """Residual of Div[dPhi(Psi(grad z), 1) * grad Psi(grad z)] on a grid.

    psi is the horizontal planar norm, phi the vertical one; this is the
    zero-anisotropic-mean-curvature operator of the split norm
    |(Psi(horizontal), height)|_Phi.  NaN outside the valid interior.
    """

    def flux(zx, zy):
        s = psi.value(zx, zy)
        coef = phi.coefficient(s)
        gx, gy = psi.grad(zx, zy)
        return coef * gx, coef * gy

    res = staggered_divergence(Z, h, flux)
    if valid is not None:
        res = np.where(interior_mask(valid), res, np.nan)
    return res


def m_operator_residual(spec, Z, h, dual=False, valid=None):
    """Residual of the W_p graph operator M[z] (exponent q) on a uniform grid.

    dual=True swaps the exponent roles (q -> p), giving the operator the
    conjugate helicoid must satisfy.
    """
    e = spec.p if dual else spec.q
    nrm = PlanarNorm(e)
    return norm_graph_residual(nrm, nrm, Z, h, valid=valid)


def conjugate_height(spec, theta):
    """w(theta) = c * integral of circle(t)^{-2} from 0 to theta.

    The conjugate is constant on rays, so the polar angle determines it;
    beyond one branch (|theta| > pi) the caller owes period bookkeeping.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(np.abs(theta) > np.pi + 1e-12):
        raise BranchCutError("angle beyond the branch cut; add multiples of the period")
    sigma = PlanarNorm(spec.p).circle
    return spec.c * _integral_to(lambda t: sigma(t) ** (-2.0), 0.0, theta)


def conjugate_period(spec, samples=4096):
    """Increase of w around one full turn, c * integral over [0, 2 pi).

    The integrand is smooth and periodic for even p, so the trapezoid sum
    converges spectrally; samples is a safety margin, not a tolerance knob.
    """
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    sigma = PlanarNorm(spec.p).circle(theta)
    return spec.c * (2.0 * np.pi / samples) * float(np.sum(sigma**-2.0))


def conjugate_gradient(spec, x, y):
    """Exact gradient c (-y, x)/omega^2 of the conjugate height."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    omega = spec.omega(x, y)
    if np.any(omega == 0.0):
        raise DomainError("conjugate gradient undefined at the origin")
    f = spec.c / omega**2
    return -f * y, f * x


def conjugate_grid(spec, annulus, h, band=0.15):
    """Grid sampling of the conjugate over a slit p-annulus.

    Returns (X, Y, W, valid); the wedge x < 0, |y| < band is removed so
    no residual stencil straddles the branch cut.  Integer powers keep
    the dual operator smooth across the axes, so no axis band is needed.
    """
    a, b = float(annulus[0]), float(annulus[1])
    if not 0.0 < a < b:
        raise DomainError("annulus radii must be positive and increasing")
    _, X, Y = _square_grid(b + 3.0 * h, h)
    omega = spec.omega(X, Y)
    W = conjugate_height(spec, np.arctan2(Y, X))
    valid = (omega >= a) & (omega <= b) & ~((X < 0.0) & (np.abs(Y) < band))
    return X, Y, W, valid


@dataclass(frozen=True)
class ConjugatePair:
    """Sampled catenoid profile and conjugate sector with recorded period."""

    spec: PNormSpec
    catenoid: CurveTable
    helicoid: CurveTable
    period: float


def conjugate_helicoid(spec, annulus, angular_samples=721):
    """Catenoid profile plus conjugate sector samples with their period.

    The conjugate is tabulated over one slit turn theta in [-pi, pi]; the
    stored period is what continuation across the cut must add.
    """
    a, b = float(annulus[0]), float(annulus[1])
    if not a < b:
        raise DomainError("annulus radii must be increasing")
    if not a > spec.c:
        raise WaistError(f"annulus must start outside the waist c = {spec.c:g}")
    if angular_samples < 2:
        raise ValueError("need at least two angular samples")
    omega = np.linspace(a, b, 513)
    z = catenoid_height(spec, omega, a)
    z_omega = catenoid_slope(spec, omega)
    catenoid = CurveTable(("omega", "z", "z_omega"), np.column_stack([omega, z, z_omega]))
    theta = np.linspace(-np.pi, np.pi, int(angular_samples))
    w = conjugate_height(spec, theta)
    helicoid = CurveTable(("theta", "w"), np.column_stack([theta, w]))
    return ConjugatePair(
        spec=spec, catenoid=catenoid, helicoid=helicoid, period=conjugate_period(spec)
    )


def superellipse_area(p, a):
    """Area of {|x|^p + |y|^p <= a^p} by adaptive boundary quadrature."""
    if int(p) != p or p < 2 or p % 2 != 0:
        raise ValueError("p must be an even integer >= 2")
    if not a > 0.0:
        raise ValueError("a must be positive")
    sigma = PlanarNorm(float(p)).circle
    val, _ = quad(lambda t: sigma(t) ** (-2.0), 0.0, 0.5 * math.pi, epsabs=1e-13, epsrel=1e-11)
    return 2.0 * a * a * val


def period_from_flux(spec, radius):
    """Period via 2 f(a) Area({omega <= a}); radius-independent exactly."""
    if not radius > 0.0:
        raise DomainError("radius must be positive")
    return 2.0 * (spec.c / radius**2) * superellipse_area(spec.p, radius)


@dataclass(frozen=True)
class DualPairReport:
    """Max residuals of the split-norm catenoid and its conjugate."""

    catenoid_residual: float
    conjugate_residual: float
    period: float
    j_gap: float
    h: float
    annulus: tuple


def dual_pair_check(norm_h, norm_v, c=1.0, annulus=(1.5, 3.0), h=0.02, band=0.2, seed=0):
    """Build the catenoid for the split norm (Psi, Phi) = (norm_h, norm_v),
    conjugate it, and evaluate both graph equations by finite differences.

    The catenoid w(Psi*) has slope fixed by dPhi/ds at (w', 1) = c/Psi*;
    its conjugate alpha has gradient c (-y, x)/Psi*^2 and must satisfy the
    equation of the dual pair (Psi*, Phi*).  That step needs the quarter
    turn J to preserve Psi*, which is checked on 1000 random vectors first.
    """
    if not c > 0.0:
        raise ValueError("c must be positive")
    a, b = float(annulus[0]), float(annulus[1])
    if not 0.0 < a < b:
        raise DomainError("annulus radii must be positive and increasing")
    gmax = norm_v.weights[0] ** (1.0 / norm_v.p)
    if not a > c / gmax:
        raise WaistError(
            f"annulus must start outside the waist radius {c / gmax:g} of this pair"
        )
    psi_star = norm_h.dual()
    phi_star = norm_v.dual()
    gap = psi_star.j_invariance_gap(samples=1000, seed=seed)
    if gap > 1e-12:
        raise HypothesisError(
            f"dual horizontal norm is not quarter-turn invariant (gap {gap:.3g}); "
            "the conjugate construction does not apply"
        )

    # grid square covering Psi* <= b with a stencil halo
    theta = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
    L = b / float(np.min(psi_star.circle(theta))) + 3.0 * h
    _, X, Y = _square_grid(L, h)
    T = psi_star.value(X, Y)

    def slope(t):
        return norm_v.slope_from_coefficient(c / t)

    # the slope saturates where the coefficient equation hits its supremum
    Z = np.full(X.shape, np.nan)
    ok = T > (c / gmax) * (1.0 + 1e-9)
    Z[ok] = _integral_to(slope, a, T[ok])
    vz = (
        (T >= a)
        & (T <= b)
        & (np.abs(X) > band)
        & (np.abs(Y) > band)
        & np.isfinite(Z)
    )
    res_cat = norm_graph_residual(norm_h, norm_v, Z, h, valid=vz)

    sigma_star = psi_star.circle
    A = c * _circle_integral_to(lambda t: sigma_star(t) ** (-2.0), np.arctan2(Y, X))
    va = (
        (T >= a)
        & (T <= b)
        & (np.abs(X) > band)
        & (np.abs(Y) > band)
        & ~((X < 0.0) & (np.abs(Y) < 4.0 * h + band))
    )
    res_conj = norm_graph_residual(psi_star, phi_star, A, h, valid=va)

    period = c * float(_circle_integral_to(lambda t: sigma_star(t) ** (-2.0), 2.0 * np.pi))
    return DualPairReport(
        catenoid_residual=float(np.nanmax(np.abs(res_cat))),
        conjugate_residual=float(np.nanmax(np.abs(res_conj))),
        period=float(period),
        j_gap=gap,
        h=float(h),
        annulus=(a, b),
    )
