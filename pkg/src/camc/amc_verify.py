"""Variational verification of anisotropic mean curvature on meshes.

The anisotropic mean curvature is estimated as Lambda = -dF/dV: each
interior vertex is displaced by +-amplitude along its area-weighted
normal, the induced changes in total energy F = sum gamma(nu3) area and
enclosed volume are differenced, and their ratio is reported.  Nothing
here reuses the construction formulas, so constancy of the estimates is
an independent check of any surface the other modules emit.

Sign convention: with outward normals the unit sphere gives -2 and the
radius-R cylinder -1/(R mu2(0)); the swept helicoidal surfaces carry the
orientation that makes their prescribed Lambda come out positive.
"""

import json
from dataclasses import dataclass

import numpy as np

from .anisotropy import gamma_eval
from .errors import DegenerateFace, DegenerateStencil, DomainError

__all__ = [
    "mesh_energy",
    "mesh_volume",
    "lambda_estimate",
    "lambda_estimates",
    "MeshEnergyReport",
    "energy_report",
    "report_json",
    "grid_mean_curvature_sum",
]


def _face_energy_volume(P, profile):
    """Per-face energy gamma(nu3) area and signed tetra volume det/6.

    P has shape (faces, 3 corners, xyz).  DomainError lists the faces
    whose normals leave the density domain; DegenerateFace the slivers.
    """
    cr = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
    nrm = np.linalg.norm(cr, axis=1)
    bad = nrm <= 1e-30
    if np.any(bad):
        raise DegenerateFace(f"zero-area faces: {_head(np.flatnonzero(bad))}")
    nu3 = cr[:, 2] / nrm
    lo, hi = profile.domain
    out = nu3 > hi + 1e-12
    out |= (nu3 <= 0.0) if lo == 0.0 else (nu3 < lo - 1e-12)
    if np.any(out):
        raise DomainError(
            f"face normals outside the density domain: {_head(np.flatnonzero(out))}"
        )
    energy = gamma_eval(profile, np.clip(nu3, lo + 1e-300, hi)) * (0.5 * nrm)
    vol = np.einsum("ij,ij->i", P[:, 0], np.cross(P[:, 1], P[:, 2])) / 6.0
    return energy, vol


def _head(idx, n=8):
    s = ", ".join(str(i) for i in idx[:n])
    return s if idx.size <= n else f"{s}, ... ({idx.size} total)"


def mesh_energy(mesh, profile):
    """Total anisotropic energy sum over faces of gamma(nu3) * area."""
    e, _ = _face_energy_volume(mesh.vertices[mesh.faces], profile)
    return float(np.sum(e))


def mesh_volume(mesh):
    """Signed enclosed volume (1/3) sum <centroid, normal> area.

    Orientation-sensitive and translation-invariant for closed meshes;
    for bands it is the flux bookkeeping the bump estimator differences.
    """
    P = mesh.vertices[mesh.faces]
    vol = np.einsum("ij,ij->i", P[:, 0], np.cross(P[:, 1], P[:, 2])) / 6.0
    return float(np.sum(vol))


def _max_incident_edge(mesh):
    V, F = mesh.vertices, mesh.faces
    out = np.zeros(V.shape[0])
    for a, b in ((0, 1), (1, 2), (2, 0)):
        ln = np.linalg.norm(V[F[:, a]] - V[F[:, b]], axis=1)
        np.maximum.at(out, F[:, a], ln)
        np.maximum.at(out, F[:, b], ln)
    return out


def lambda_estimates(mesh, profile, amplitude_scale=1e-4):
    """Per-vertex -dF/dV estimates; NaN at boundary or degenerate stencils.

    All vertices are bumped in six batched passes (one per face corner and
    sign), accumulating per-vertex energy and volume differences, so the
    cost is a few face-array evaluations regardless of mesh size.
    """
    V, F = mesh.vertices, mesh.faces
    n = V.shape[0]
    normals = mesh.vertex_normals(weighted=True)
    amp = amplitude_scale * mesh.min_edge_per_vertex()
    P0 = V[F]
    e0, w0 = _face_energy_volume(P0, profile)
    dF = np.zeros((2, n))
    dV = np.zeros((2, n))
    for k in range(3):
        vid = F[:, k]
        disp = amp[vid, None] * normals[vid]
        for row, sgn in ((0, 1.0), (1, -1.0)):
            P = P0.copy()
            P[:, k, :] += sgn * disp
            e, w = _face_energy_volume(P, profile)
            np.add.at(dF[row], vid, e - e0)
            np.add.at(dV[row], vid, w - w0)
    den = dV[0] - dV[1]
    est = np.full(n, np.nan)
    ok = ~mesh.boundary_vertex_mask() & (np.abs(den) >= 1e-14)
    est[ok] = -(dF[0, ok] - dF[1, ok]) / den[ok]
    return est


def lambda_estimate(mesh, profile, vertex, amplitude=None):
    """Single-vertex -dF/dV via centered bump along the area-weighted normal."""
    V, F = mesh.vertices, mesh.faces
    vertex = int(vertex)
    if mesh.boundary_vertex_mask()[vertex]:
        raise ValueError(f"vertex {vertex} is on the boundary; no full one-ring")
    if amplitude is None:
        amplitude = 1e-4 * float(mesh.min_edge_per_vertex()[vertex])
    normal = mesh.vertex_normals(weighted=True)[vertex]
    inc = np.flatnonzero(np.any(F == vertex, axis=1))
    P0 = V[F[inc]]
    hit = F[inc] == vertex
    vals = []
    for sgn in (1.0, -1.0):
        P = P0.copy()
        P[hit] += sgn * amplitude * normal
        vals.append(_face_energy_volume(P, profile))
    d_energy = np.sum(vals[0][0]) - np.sum(vals[1][0])
    d_volume = np.sum(vals[0][1]) - np.sum(vals[1][1])
    if abs(d_volume) < 1e-14:
        raise DegenerateStencil(
            f"volume change {d_volume:.3g} below 1e-14 at vertex {vertex}"
        )
    return float(-d_energy / d_volume)


@dataclass
class MeshEnergyReport:
    """Interior Lambda estimates and their spread for one mesh/profile pair."""

    estimates: np.ndarray  # per-vertex, NaN off the interior
    mean: float
    max_deviation: float  # from the mean, over interior vertices
    bump_radius: float  # mean one-ring radius of the bumped vertices
    bump_amplitude: float  # mean displacement amplitude


def energy_report(mesh, profile, amplitude_scale=1e-4):
    est = lambda_estimates(mesh, profile, amplitude_scale)
    ok = np.isfinite(est)
    if not np.any(ok):
        raise DegenerateStencil("no interior vertex produced an estimate")
    mean = float(np.mean(est[ok]))
    amp = amplitude_scale * mesh.min_edge_per_vertex()
    return MeshEnergyReport(
        estimates=est,
        mean=mean,
        max_deviation=float(np.max(np.abs(est[ok] - mean))),
        bump_radius=float(np.mean(_max_incident_edge(mesh)[ok])),
        bump_amplitude=float(np.mean(amp[ok])),
    )


def report_json(report):
    """Deterministic JSON text of a report; NaN-free for strict parsers."""
    est = report.estimates
    ok = np.isfinite(est)
    doc = {
        "vertices": [int(i) for i in np.flatnonzero(ok)],
        "estimates": [float(v) for v in est[ok]],
        "mean": report.mean,
        "max_deviation": report.max_deviation,
        "bump_radius": report.bump_radius,
        "bump_amplitude": report.bump_amplitude,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def grid_mean_curvature_sum(P):
    """Classical kappa1 + kappa2 at interior nodes of a structured grid.

    P has shape (ni, nj, 3).  Second fundamental form over first, both in
    index space, so the parametrization scale cancels; the normal is the
    same cross(d_i, d_j) the face winding of swept meshes follows.
    """
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 3 or P.shape[2] != 3 or P.shape[0] < 3 or P.shape[1] < 3:
        raise ValueError("need an (ni, nj, 3) grid with ni, nj >= 3")
    Xu = 0.5 * (P[2:, 1:-1] - P[:-2, 1:-1])
    Xv = 0.5 * (P[1:-1, 2:] - P[1:-1, :-2])
    Xuu = P[2:, 1:-1] - 2.0 * P[1:-1, 1:-1] + P[:-2, 1:-1]
    Xvv = P[1:-1, 2:] - 2.0 * P[1:-1, 1:-1] + P[1:-1, :-2]
    Xuv = 0.25 * (P[2:, 2:] - P[2:, :-2] - P[:-2, 2:] + P[:-2, :-2])
    n = np.cross(Xu, Xv)
    ln = np.linalg.norm(n, axis=2, keepdims=True)
    n = n / np.where(ln > 0.0, ln, np.nan)
    E = np.einsum("ijk,ijk->ij", Xu, Xu)
    Fm = np.einsum("ijk,ijk->ij", Xu, Xv)
    G = np.einsum("ijk,ijk->ij", Xv, Xv)
    L = np.einsum("ijk,ijk->ij", Xuu, n)
    M = np.einsum("ijk,ijk->ij", Xuv, n)
    N = np.einsum("ijk,ijk->ij", Xvv, n)
    return (E * N - 2.0 * Fm * M + G * L) / (E * G - Fm * Fm)
