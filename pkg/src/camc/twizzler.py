"""Helicoidal surfaces of constant anisotropic mean curvature by quadratures.

A helicoidal surface swept from a planar curve w(s) by the screw motion

    X(s, theta) = (e^{-i omega theta} w(s), theta),   pitch = -1/omega,

has constant anisotropic mean curvature Lambda for the density gamma(nu3)
exactly when the tangent-frame coordinates of the curve,

    eta1 + i*eta2 = -w e^{-i phi},    phi = tangent angle of w,

stay on one level set

    F(eta1, eta2) = Lambda*(eta1^2 + eta2^2) + 2*eta2*m(nu3)/Q + A = 0

with Q = sqrt(1 + omega^2 eta1^2), nu3 = omega*eta1/Q and
m = gamma - nu3*gamma'.  Tracing F = 0 by the sled system

    eta1' = kappa*eta2 - 1,  eta2' = -kappa*eta1,  phi' = kappa,
    kappa = P/(eta2*P - F_eta2),  P = F_eta1/eta1,

and unspooling w = -(eta1 + i*eta2) e^{i phi} reconstructs the surface up
to quadratures; s is arc length of w throughout.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .anisotropy import AnisotropyProfile, inv_mu2
from .errors import (
    ConvexityError,
    DegenerateEquation,
    DegenerateFace,
    DomainError,
    NoRealRoot,
    SingularTurning,
)
from .geometry_io import CurveTable
from .mesh import TriMesh, structured_grid_faces


@dataclass(frozen=True)
class SledParams:
    """Level-set data: density, curvature Lambda, offset A, screw rate omega."""

    profile: AnisotropyProfile
    lam: float
    big_a: float
    omega: float

    def __post_init__(self):
        if self.omega == 0.0:
            raise ValueError("omega must be nonzero (finite pitch)")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "big_a", float(self.big_a))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def pitch(self):
        return -1.0 / self.omega

    def kernel_args(self):
        return self.profile.kernel_args()


def cylinder_params(profile, radius, omega):
    """Level-set data whose trace is the round cylinder of the given radius.

    The cylinder r = radius is the fixed point (0, radius) of the sled
    system; it requires Lambda = -m(0)/radius and A = -radius*m(0), so
    Lambda*A = m(0)^2 independently of the radius.
    """
    r = float(radius)
    if r <= 0.0:
        raise ValueError("radius must be positive")
    m0 = float(inv_mu2(profile, 0.0))
    if m0 <= 0.0:
        raise ConvexityError("gamma - nu3*gamma' not positive at nu3 = 0")
    return SledParams(profile=profile, lam=-m0 / r, big_a=-r * m0, omega=float(omega))


def level_set_value(params, eta1, eta2):
    """F(eta1, eta2), vectorized through the numpy density evaluators.

    Independent of the scalar trace kernels, so the two paths check each
    other.
    """
    e1 = np.asarray(eta1, dtype=np.float64)
    e2 = np.asarray(eta2, dtype=np.float64)
    q = np.sqrt(1.0 + params.omega**2 * e1**2)
    nu3 = params.omega * e1 / q
    m = inv_mu2(params.profile, nu3)
    f = params.lam * (e1**2 + e2**2) + 2.0 * e2 * m / q + params.big_a
    return float(f) if np.isscalar(eta1) and np.isscalar(eta2) else f


def discriminant(params, eta1):
    """Quarter discriminant of F = 0 as a quadratic in eta2.

    Equals (1 - nu3^2)*m^2 - Lambda^2*eta1^2 - Lambda*A; nonnegative iff
    the vertical line through eta1 meets the level set.
    """
    e1 = np.asarray(eta1, dtype=np.float64)
    q2 = 1.0 + params.omega**2 * e1**2
    nu3 = params.omega * e1 / np.sqrt(q2)
    m = inv_mu2(params.profile, nu3)
    d = m * m / q2 - params.lam**2 * e1**2 - params.lam * params.big_a
    return float(d) if np.isscalar(eta1) else d


def solve_eta2(params, eta1, branch=-1):
    """Root eta2 of F(eta1, .) = 0; branch picks the sign of sqrt(disc).

    Raises NoRealRoot outside the admissible eta1 band and
    DegenerateEquation when the equation loses its eta2 dependence.
    Tiny negative discriminants (tangency hit within roundoff, e.g. the
    cylinder) are clamped to zero.
    """
    if branch not in (-1, 1):
        raise ValueError("branch must be -1 or +1")
    e1 = float(eta1)
    q = math.sqrt(1.0 + params.omega**2 * e1 * e1)
    nu3 = params.omega * e1 / q
    m = float(inv_mu2(params.profile, nu3))
    if m <= 0.0:
        raise ConvexityError(f"gamma - nu3*gamma' = {m:.3g} at nu3 = {nu3:.6g}")
    b = 2.0 * m / q
    c = params.lam * e1 * e1 + params.big_a
    if params.lam == 0.0:
        if b == 0.0:
            raise DegenerateEquation("level set independent of eta2")
        return -c / b
    disc = b * b - 4.0 * params.lam * c
    scale = b * b + abs(4.0 * params.lam * c)
    if disc < 0.0:
        if disc < -64.0 * np.finfo(float).eps * scale:
            raise NoRealRoot(
                f"no real eta2 at eta1 = {e1:.6g} (disc = {disc:.3g})"
            )
        disc = 0.0
    # b > 0 always, so -(b + sqrt(disc))/2 is the stable half
    qq = -0.5 * (b + math.sqrt(disc))
    e2 = qq / params.lam if branch == -1 else c / qq
    # one Newton touch-up unless the root is a tangency (F_eta2 = 0 there)
    f = params.lam * e2 * e2 + b * e2 + c
    f_e2 = 2.0 * params.lam * e2 + b
    if abs(f_e2) > 1.0e-8 * (abs(b) + 1.0):
        e2 -= f / f_e2
    return e2


def seed_state(params, eta1=0.0, branch=-1):
    """(eta1, eta2) on the level set at the requested abscissa."""
    return float(eta1), solve_eta2(params, eta1, branch=branch)


@dataclass
class SledTrace:
    """Arc-length samples of one level-set orbit and its tangent angle."""

    params: SledParams
    s: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    phi: np.ndarray
    kappa: np.ndarray
    status: str
    closed: bool
    period: float | None = None
    delta_phi: float | None = None
    closure_gap: float | None = None

    def __len__(self):
        return self.s.shape[0]


def _advance(kind, coeffs, params, state, dt, h_ref):
    """Integrate the sled system from state by signed dt without projection."""
    e1, e2, phi = state
    if dt == 0.0:
        return e1, e2, phi
    nsub = max(1, int(math.ceil(abs(dt) / h_ref)))
    h = dt / nsub
    for _ in range(nsub):
        e1, e2, phi, _k, code = _kernels.rk4_step(
            kind, coeffs, params.lam, params.omega, e1, e2, phi, h
        )
        if code != _kernels.TRACE_OK:
            raise SingularTurning("sled step failed during closure refinement")
    return e1, e2, phi


def _seed_flow(kind, coeffs, params, seed):
    d1, d2, _k, code = _kernels.sled_rhs(
        kind, coeffs, params.lam, params.omega, seed[0], seed[1]
    )
    speed = math.hypot(d1, d2)
    if code != _kernels.TRACE_OK or speed < 1.0e-12:
        return None
    return d1 / speed, d2 / speed


def _refine_closure(kind, coeffs, params, row, span, seed, t0, step):
    """Resolve the section crossing within [0, span] past one trace row.

    The section is the line through the seed transversal to the flow
    direction t0 there.  Returns (period, state_at_crossing) or None when
    the crossing does not bracket.
    """
    anchor = (row[1], row[2], row[3])

    def section(delta):
        e1, e2, _phi = _advance(kind, coeffs, params, anchor, delta, 0.5 * step)
        return (e1 - seed[0]) * t0[0] + (e2 - seed[1]) * t0[1]

    sa = section(0.0)
    if sa == 0.0:
        delta = 0.0
    else:
        sb = section(span)
        if sa * sb > 0.0:
            return None
        delta = brentq(section, 0.0, span, xtol=1.0e-14, rtol=1.0e-15)
    state = _advance(kind, coeffs, params, anchor, delta, 0.5 * step)
    return row[0] + delta, state


def trace_sled(
    params,
    s_max=200.0,
    step=1.0e-3,
    seed=None,
    branch=-1,
    capture=None,
    detect_closure=True,
):
    """Trace one orbit of the sled system starting on the level set.

    seed may be None (start at eta1 = 0), a scalar eta1, or an explicit
    (eta1, eta2) pair, which is projected back onto F = 0.  When closure
    detection is on (capture radius defaults to 3*step; loops smaller than
    about four times that go undetected) the returned trace ends exactly
    at the refined period.  Returns are recognized at step resolution, so
    a sharply curved loop may need a smaller step to register as closed.
    status is 'closed', 'open' (s_max reached) or 'capacity'.
    """
    if step <= 0.0 or s_max <= 0.0:
        raise ValueError("step and s_max must be positive")
    kind, coeffs = params.kernel_args()
    if seed is None:
        e1, e2 = seed_state(params, 0.0, branch=branch)
    elif np.isscalar(seed):
        e1, e2 = seed_state(params, float(seed), branch=branch)
    else:
        e1, e2 = float(seed[0]), float(seed[1])
        e1, e2, resid, code = _kernels.project_level_set(
            kind, coeffs, params.lam, params.big_a, params.omega, e1, e2
        )
        if code != _kernels.TRACE_OK or resid > 1.0e-9 * (1.0 + abs(params.big_a)):
            raise DomainError(
                f"seed does not reach the level set (|F| = {resid:.3g})"
            )
    if capture is None:
        capture = 3.0 * step
    t0 = _seed_flow(kind, coeffs, params, (e1, e2)) if detect_closure else None
    if t0 is None:
        capture = 0.0
        t0 = (1.0, 0.0)
    tol_perp = max(1.0e-6 * (1.0 + math.hypot(e1, e2)), 10.0 * step * step)

    status_code, n, out = _kernels.trace_kernel(
        kind,
        coeffs,
        params.lam,
        params.big_a,
        params.omega,
        e1,
        e2,
        0.0,
        s_max,
        step,
        capture,
        t0[0],
        t0[1],
        tol_perp,
    )
    rows = out[:n].copy()
    where = f"s = {rows[-1, 0]:.6g}" if n else "the seed"
    if status_code == _kernels.TRACE_NONCONVEX:
        raise ConvexityError(f"density convexity fails along the trace at {where}")
    if status_code == _kernels.TRACE_SINGULAR:
        raise SingularTurning(f"singular turning point at {where}")

    closed = status_code == _kernels.TRACE_CLOSED
    period = None
    delta_phi = None
    gap = None
    if closed:
        # the section crossing sits between the last two kernel rows
        refined = None
        if rows.shape[0] >= 2:
            span = rows[-1, 0] - rows[-2, 0]
            refined = _refine_closure(
                kind, coeffs, params, rows[-2], span, (e1, e2), t0, step
            )
        if refined is not None:
            period, (re1, re2, rphi) = refined
            keep = rows[:, 0] <= period - 0.25 * step
            rows = rows[keep]
            _d1, _d2, rkap, rcode = _kernels.sled_rhs(
                kind, coeffs, params.lam, params.omega, re1, re2
            )
            if rcode != _kernels.TRACE_OK:
                rkap = 0.0
            rows = np.vstack([rows, [period, re1, re2, rphi, rkap]])
            gap = math.hypot(re1 - e1, re2 - e2)
            delta_phi = rphi - rows[0, 3]
        else:
            period = float(rows[-1, 0])
            gap = math.hypot(rows[-1, 1] - e1, rows[-1, 2] - e2)
            delta_phi = float(rows[-1, 3] - rows[0, 3])

    status = {
        _kernels.TRACE_OK: "open",
        _kernels.TRACE_CLOSED: "closed",
        _kernels.TRACE_CAPACITY: "capacity",
    }[status_code]
    return SledTrace(
        params=params,
        s=rows[:, 0],
        eta1=rows[:, 1],
        eta2=rows[:, 2],
        phi=rows[:, 3],
        kappa=rows[:, 4],
        status=status,
        closed=closed,
        period=period,
        delta_phi=delta_phi,
        closure_gap=gap,
    )


def eq_H_residual(params, trace):
    """max |F| along the trace, through the numpy path (kernel cross-check)."""
    return float(np.max(np.abs(level_set_value(params, trace.eta1, trace.eta2))))


def generating_curve(trace):
    """Planar curve w = -(eta1 + i eta2) e^{i phi}, tabulated over s.

    The unit tangent of the result is e^{i phi}, so s is its arc length.
    """
    c = np.cos(trace.phi)
    s_ = np.sin(trace.phi)
    x = -(trace.eta1 * c - trace.eta2 * s_)
    y = -(trace.eta1 * s_ + trace.eta2 * c)
    data = np.column_stack(
        [trace.s, x, y, trace.phi, trace.kappa, trace.eta1, trace.eta2]
    )
    return CurveTable(("s", "x", "y", "phi", "kappa", "eta1", "eta2"), data)


@dataclass
class HelicoidalMesh:
    """Swept surface band with its exact unit normals and nu3 per vertex."""

    mesh: TriMesh
    s: np.ndarray
    theta: np.ndarray
    nu3: np.ndarray
    params: SledParams
    curve: CurveTable


def sweep(curve, params, theta_samples=96, turns=1.0, offset=0.0, s_stride=1):
    """Apply the screw motion (x, y, 0) -> (e^{-i omega theta}(x+iy), theta + offset).

    curve may be a SledTrace or the CurveTable from generating_curve.
    Grid rows follow s, columns follow theta in [0, turns*2*pi/|omega|];
    face windings match the analytic normal

        nu = (sin(a), -cos(a), omega*eta1)/Q,   a = phi - omega*theta,

    which is stored per vertex.
    """
    if theta_samples < 2:
        raise ValueError("theta_samples must be at least 2")
    if isinstance(curve, SledTrace):
        curve = generating_curve(curve)
    n = len(curve)
    idx = np.arange(0, n, max(1, int(s_stride)))
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    x = curve.column("x")[idx]
    y = curve.column("y")[idx]
    phi = curve.column("phi")[idx]
    eta1 = curve.column("eta1")[idx]
    s_used = curve.column("s")[idx]

    gap = np.hypot(np.diff(x), np.diff(y))
    if gap.size and gap.min() < 1e-12:
        k = int(np.argmin(gap))
        raise DegenerateFace(
            f"coincident curve samples {idx[k]} and {idx[k + 1]} would "
            "produce zero-area faces"
        )

    theta_max = float(turns) * 2.0 * np.pi / abs(params.omega)
    theta = np.linspace(0.0, theta_max, theta_samples)
    ang = params.omega * theta
    ct, st = np.cos(ang), np.sin(ang)

    # vertex (i, j) -> row i*nt + j, matching structured_grid_faces
    X = x[:, None] * ct[None, :] + y[:, None] * st[None, :]
    Y = y[:, None] * ct[None, :] - x[:, None] * st[None, :]
    Z = np.broadcast_to(theta[None, :] + offset, X.shape)
    vertices = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    q = np.sqrt(1.0 + params.omega**2 * eta1**2)
    alpha = phi[:, None] - ang[None, :]
    Nx = np.sin(alpha) / q[:, None]
    Ny = -np.cos(alpha) / q[:, None]
    Nz = np.broadcast_to((params.omega * eta1 / q)[:, None], alpha.shape)
    normals = np.column_stack([Nx.ravel(), Ny.ravel(), Nz.ravel()])
    nu3 = np.broadcast_to((params.omega * eta1 / q)[:, None], X.shape).ravel().copy()

    faces = structured_grid_faces(idx.size, theta_samples, wrap_j=False)
    mesh = TriMesh(vertices, faces, normals=normals)
    return HelicoidalMesh(
        mesh=mesh, s=s_used, theta=theta, nu3=nu3, params=params, curve=curve
    )
