"""Scalar kernels for the sled trace, numba-compiled when available.

The generating-curve trace is a sequential fixed-step integration with a
per-step constraint projection, so it does not vectorize; everything here
is written as plain scalar math that numba can compile in nopython mode.
Set ``CAMC_DISABLE_NUMBA=1`` to run the identical Python bodies instead
(see benchmarks/bench_trace.py for the speed comparison).
"""

import math
import os

import numpy as np

_flag = os.environ.get("CAMC_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in {"1", "true", "yes", "on"}

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by CAMC_DISABLE_NUMBA")
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:

    def _njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def deco(func):
            return func

        return deco

    NUMBA_ENABLED = False

# Density encodings understood by the kernels.
KIND_POLY = 0  # gamma(x) = sum_i coeffs[i] * x**i
KIND_RECIPROCAL = 1  # gamma(x) = (1/x - x)/2, x > 0

# Trace status codes.
TRACE_OK = 0
TRACE_CLOSED = 1
TRACE_SINGULAR = 2
TRACE_NONCONVEX = 3
TRACE_CAPACITY = 4

MIN_TRACE_STEP = 1.0e-7


@_njit(cache=True)
def gamma_scalar(kind, coeffs, x, order):
    """Energy density derivative of given order (0..3) at a single x."""
    if kind == KIND_RECIPROCAL:
        inv = 1.0 / x
        if order == 0:
            return 0.5 * (inv - x)
        if order == 1:
            return -0.5 * (inv * inv + 1.0)
        if order == 2:
            return inv * inv * inv
        return -3.0 * inv * inv * inv * inv
    acc = 0.0
    for i in range(coeffs.shape[0] - 1, order - 1, -1):
        c = coeffs[i]
        for k in range(order):
            c *= i - k
        acc = acc * x + c
    return acc


@_njit(cache=True)
def gamma012(kind, coeffs, x):
    """gamma, gamma', gamma'' in one Horner pass."""
    if kind == KIND_RECIPROCAL:
        inv = 1.0 / x
        return 0.5 * (inv - x), -0.5 * (inv * inv + 1.0), inv * inv * inv
    p = 0.0
    p1 = 0.0
    p2 = 0.0
    for i in range(coeffs.shape[0] - 1, -1, -1):
        p2 = p2 * x + p1
        p1 = p1 * x + p
        p = p * x + coeffs[i]
    return p, p1, 2.0 * p2


@_njit(cache=True)
def level_set(kind, coeffs, lam, big_a, omega, e1, e2):
    """Level-set value and partials at a sled point.

    Returns (f, f_e1, f_e2, m, p) where m = gamma - nu3*gamma' = 1/mu2
    and f_e1 = e1*p with p smooth through e1 = 0, which is what makes
    the turning rate finite on the symmetry axis.
    """
    q2 = 1.0 + omega * omega * e1 * e1
    q = math.sqrt(q2)
    nu3 = omega * e1 / q
    g, g1, g2 = gamma012(kind, coeffs, nu3)
    m = g - nu3 * g1
    q3 = q2 * q
    q5 = q3 * q2
    gfac = -omega * omega * (g2 / q5 + m / q3)
    p = 2.0 * lam + 2.0 * e2 * gfac
    f = lam * (e1 * e1 + e2 * e2) + 2.0 * e2 * m / q + big_a
    f_e2 = 2.0 * lam * e2 + 2.0 * m / q
    return f, e1 * p, f_e2, m, p


@_njit(cache=True)
def sled_rhs(kind, coeffs, lam, omega, e1, e2):
    """Right-hand side of the sled system.

    d(eta1)/ds = kappa*eta2 - 1
    d(eta2)/ds = -kappa*eta1
    d(phi)/ds  = kappa
    with kappa = P/(eta2*P - F_eta2); the shared eta1 factor of F_eta1
    and the raw denominator has been cancelled analytically.

    Returns (d1, d2, kappa, code); code 0 ok, 2 singular turning,
    3 convexity failure.
    """
    q2 = 1.0 + omega * omega * e1 * e1
    q = math.sqrt(q2)
    nu3 = omega * e1 / q
    g, g1, g2 = gamma012(kind, coeffs, nu3)
    m = g - nu3 * g1
    if not (m > 0.0):  # also catches nan from out-of-domain nu3
        return 0.0, 0.0, 0.0, TRACE_NONCONVEX
    q3 = q2 * q
    q5 = q3 * q2
    gfac = -omega * omega * (g2 / q5 + m / q3)
    p = 2.0 * lam + 2.0 * e2 * gfac
    f_e2 = 2.0 * lam * e2 + 2.0 * m / q
    den = e2 * p - f_e2
    scale = 1.0 + abs(e2 * p) + abs(f_e2)
    if abs(den) < 1.0e-14 * scale:
        return 0.0, 0.0, 0.0, TRACE_SINGULAR
    kap = p / den
    return kap * e2 - 1.0, -kap * e1, kap, TRACE_OK


@_njit(cache=True)
def rk4_step(kind, coeffs, lam, omega, e1, e2, phi, h):
    """One classical RK4 step; returns (e1, e2, phi, kappa_at_start, code)."""
    a1, b1, k1, c1 = sled_rhs(kind, coeffs, lam, omega, e1, e2)
    if c1 != TRACE_OK:
        return e1, e2, phi, 0.0, c1
    a2, b2, k2, c2 = sled_rhs(kind, coeffs, lam, omega, e1 + 0.5 * h * a1, e2 + 0.5 * h * b1)
    if c2 != TRACE_OK:
        return e1, e2, phi, k1, c2
    a3, b3, k3, c3 = sled_rhs(kind, coeffs, lam, omega, e1 + 0.5 * h * a2, e2 + 0.5 * h * b2)
    if c3 != TRACE_OK:
        return e1, e2, phi, k1, c3
    a4, b4, k4, c4 = sled_rhs(kind, coeffs, lam, omega, e1 + h * a3, e2 + h * b3)
    if c4 != TRACE_OK:
        return e1, e2, phi, k1, c4
    e1n = e1 + h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
    e2n = e2 + h * (b1 + 2.0 * b2 + 2.0 * b3 + b4) / 6.0
    phin = phi + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return e1n, e2n, phin, k1, TRACE_OK


@_njit(cache=True)
def project_level_set(kind, coeffs, lam, big_a, omega, e1, e2):
    """Newton projection along grad F back onto F = 0.

    Returns (e1, e2, |F|, code). The fixed point of the sled system (the
    cylinder) has a vanishing gradient; there the input is returned as is,
    which is correct because F is already zero on that orbit.
    """
    ftol = 1.0e-13 * (1.0 + abs(big_a))
    for _ in range(8):
        f, f1, f2, m, _p = level_set(kind, coeffs, lam, big_a, omega, e1, e2)
        if not (m > 0.0):
            return e1, e2, abs(f), TRACE_NONCONVEX
        if abs(f) <= ftol:
            return e1, e2, abs(f), TRACE_OK
        gsq = f1 * f1 + f2 * f2
        if gsq < 1.0e-30:
            return e1, e2, abs(f), TRACE_OK
        t = -f / gsq
        e1 += t * f1
        e2 += t * f2
    f, _f1, _f2, m, _p = level_set(kind, coeffs, lam, big_a, omega, e1, e2)
    return e1, e2, abs(f), TRACE_OK


@_njit(cache=True)
def trace_kernel(
    kind, coeffs, lam, big_a, omega, e1, e2, phi0, s_max, h0, capture,
    t01, t02, tol_perp,
):
    """Fixed-step trace of the sled system with per-step projection.

    capture > 0 arms closure detection: once the state has left a ball of
    radius 4*capture around the start, the trace stops with TRACE_CLOSED
    when the section coordinate along (t01, t02) changes sign inside the
    capture ball with transversal offset below tol_perp.  The offset test
    tells a genuine return apart from a pinched loop passing the seed on
    the far branch of the level set, which a plain ball test mistakes for
    closure.

    Near a singular turning point the step is halved transiently; below
    MIN_TRACE_STEP the trace aborts with TRACE_SINGULAR.

    Returns (status, n, out) with out[:n] rows (s, eta1, eta2, phi, kappa).
    """
    n_expected = int(s_max / h0) + 2
    cap = 4 * n_expected + 64
    out = np.empty((cap, 5))

    e1_0 = e1
    e2_0 = e2
    armed = False
    arm_sq = 16.0 * capture * capture
    cap_sq = capture * capture
    along_prev = 0.0

    s = 0.0
    _d1, _d2, kap, code = sled_rhs(kind, coeffs, lam, omega, e1, e2)
    if code == TRACE_SINGULAR:
        kap = 0.0  # fixed point: gradient vanished, curvature recorded as 0
    elif code != TRACE_OK:
        return code, 0, out
    out[0, 0] = s
    out[0, 1] = e1
    out[0, 2] = e2
    out[0, 3] = phi0
    out[0, 4] = kap
    n = 1
    phi = phi0

    while s < s_max - 1.0e-12:
        h = h0
        if s + h > s_max:
            h = s_max - s
        while True:
            e1n, e2n, phin, kap0, code = rk4_step(kind, coeffs, lam, omega, e1, e2, phi, h)
            if code == TRACE_OK:
                # keep the local resolution commensurate with the turning rate
                if abs(kap0) * h > 0.25 and h > MIN_TRACE_STEP:
                    code = TRACE_SINGULAR
                else:
                    break
            if code == TRACE_NONCONVEX:
                return code, n, out
            h *= 0.5
            if h < MIN_TRACE_STEP:
                return TRACE_SINGULAR, n, out
        e1n, e2n, resid, pcode = project_level_set(kind, coeffs, lam, big_a, omega, e1n, e2n)
        if pcode != TRACE_OK:
            return pcode, n, out
        e1 = e1n
        e2 = e2n
        phi = phin
        s += h
        _d1, _d2, kap, code = sled_rhs(kind, coeffs, lam, omega, e1, e2)
        if code == TRACE_SINGULAR:
            kap = 0.0
        elif code != TRACE_OK:
            return code, n, out
        if n >= cap:
            return TRACE_CAPACITY, n, out
        out[n, 0] = s
        out[n, 1] = e1
        out[n, 2] = e2
        out[n, 3] = phi
        out[n, 4] = kap
        n += 1
        if capture > 0.0:
            dx = e1 - e1_0
            dy = e2 - e2_0
            dsq = dx * dx + dy * dy
            along = dx * t01 + dy * t02
            if not armed:
                if dsq > arm_sq:
                    armed = True
            elif (
                along_prev < 0.0
                and along >= 0.0
                and dsq < cap_sq
                and abs(dx * t02 - dy * t01) < tol_perp
            ):
                return TRACE_CLOSED, n, out
            along_prev = along
    return TRACE_OK, n, out
