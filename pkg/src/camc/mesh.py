"""Triangle mesh container and small structured-grid helpers."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFace


@dataclass
class TriMesh:
    """Triangle mesh with optional per-vertex unit normals.

    Faces are wound so that the right-hand-rule normal is the mesh's
    outward/reference orientation; all downstream signed quantities
    (volume, curvature estimates) follow the winding.
    """

    vertices: np.ndarray
    faces: np.ndarray
    normals: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64)
        self.faces = np.ascontiguousarray(self.faces, dtype=np.int64)
        if self.normals is not None:
            self.normals = np.ascontiguousarray(self.normals, dtype=np.float64)

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_faces(self):
        return self.faces.shape[0]

    def face_normals_areas(self, check=False):
        """Unit face normals and face areas; optionally error on slivers."""
        p = self.vertices[self.faces]
        raw = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        norm = np.linalg.norm(raw, axis=1)
        if check and np.any(norm <= 0.0):
            bad = np.flatnonzero(norm <= 0.0)
            raise DegenerateFace(f"zero-area faces at indices {bad[:8].tolist()}")
        safe = np.where(norm > 0.0, norm, 1.0)
        return raw / safe[:, None], 0.5 * norm

    def vertex_normals(self, weighted=False):
        """Stored normals if present, else area-weighted face averages.

        weighted=True skips stored normals; verifiers use this so the
        estimate cannot inherit errors from analytic normals.
        """
        if self.normals is not None and not weighted:
            return self.normals
        fn, fa = self.face_normals_areas()
        acc = np.zeros_like(self.vertices)
        w = fn * fa[:, None]
        for c in range(3):
            np.add.at(acc, self.faces[:, c], w)
        norm = np.linalg.norm(acc, axis=1)
        norm = np.where(norm > 0.0, norm, 1.0)
        return acc / norm[:, None]

    def edges(self):
        """Undirected edge array (k, 2) with a count of incident faces."""
        e = np.concatenate(
            [self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]]
        )
        e = np.sort(e, axis=1)
        uniq, counts = np.unique(e, axis=0, return_counts=True)
        return uniq, counts

    def boundary_vertex_mask(self):
        """True for vertices touching an edge with a single incident face."""
        uniq, counts = self.edges()
        mask = np.zeros(self.n_vertices, dtype=bool)
        open_edges = uniq[counts == 1]
        mask[open_edges.ravel()] = True
        return mask

    def min_edge_per_vertex(self):
        """Length of the shortest incident edge, per vertex."""
        uniq, _ = self.edges()
        length = np.linalg.norm(
            self.vertices[uniq[:, 0]] - self.vertices[uniq[:, 1]], axis=1
        )
        out = np.full(self.n_vertices, np.inf)
        np.minimum.at(out, uniq[:, 0], length)
        np.minimum.at(out, uniq[:, 1], length)
        return out


def structured_grid_faces(ni, nj, wrap_j=False):
    """Triangulate an ni x nj vertex grid (vertex index = i*nj + j).

    Each quad (i, j)-(i+1, j+1) splits into two triangles wound so the
    normal follows d/di x d/dj. With wrap_j the last column connects
    back to the first.
    """
    i = np.arange(ni - 1)
    j = np.arange(nj if wrap_j else nj - 1)
    jj, ii = np.meshgrid(j, i)
    jn = (jj + 1) % nj if wrap_j else jj + 1
    v00 = ii * nj + jj
    v01 = ii * nj + jn
    v10 = (ii + 1) * nj + jj
    v11 = (ii + 1) * nj + jn
    t1 = np.stack([v00, v10, v11], axis=-1).reshape(-1, 3)
    t2 = np.stack([v00, v11, v01], axis=-1).reshape(-1, 3)
    faces = np.empty((t1.shape[0] * 2, 3), dtype=np.int64)
    faces[0::2] = t1
    faces[1::2] = t2
    return faces
