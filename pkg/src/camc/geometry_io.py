"""Deterministic ASCII export and import for meshes and sampled curves.

Same input, same bytes: fixed float formats, LF newlines, no timestamps.
Meshes travel as Wavefront OBJ (v/vn/f), sampled curves as headered CSV,
planar curves additionally as standalone SVG polylines.
"""

from dataclasses import dataclass, field

import numpy as np

from .mesh import TriMesh

# %.9g round-trips float32-scale geometry and keeps files small; curve
# tables use %.17g so downstream checks see exact float64 values.
_OBJ_FMT = "%.9g"
_CSV_FMT = "%.17g"


def write_obj(path, mesh):
    """Write a TriMesh as OBJ; emits vn records iff normals are stored."""
    v = mesh.vertices
    f = mesh.faces
    # fixed header keeps reruns byte-identical; an empty mesh is just this line
    lines = ["# camc mesh"]
    for i in range(v.shape[0]):
        lines.append(
            "v %s %s %s" % (_OBJ_FMT % v[i, 0], _OBJ_FMT % v[i, 1], _OBJ_FMT % v[i, 2])
        )
    if mesh.normals is not None:
        n = mesh.normals
        for i in range(n.shape[0]):
            lines.append(
                "vn %s %s %s"
                % (_OBJ_FMT % n[i, 0], _OBJ_FMT % n[i, 1], _OBJ_FMT % n[i, 2])
            )
        for i in range(f.shape[0]):
            a, b, c = f[i, 0] + 1, f[i, 1] + 1, f[i, 2] + 1
            lines.append(f"f {a}//{a} {b}//{b} {c}//{c}")
    else:
        for i in range(f.shape[0]):
            lines.append(f"f {f[i, 0] + 1} {f[i, 1] + 1} {f[i, 2] + 1}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_obj(path):
    """Read v/vn/f records back into a TriMesh; ignores everything else."""
    verts = []
    normals = []
    faces = []
    with open(path) as fh:
        for raw in fh:
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(p) for p in parts[1:4]])
            elif parts[0] == "vn":
                normals.append([float(p) for p in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) - 1 for p in parts[1:4]]
                faces.append(idx)
    return TriMesh(
        np.asarray(verts, dtype=np.float64).reshape(-1, 3),
        np.asarray(faces, dtype=np.int64).reshape(-1, 3),
        normals=np.asarray(normals, dtype=np.float64) if normals else None,
    )


@dataclass
class CurveTable:
    """Named columns over a common sample index, e.g. (s, x, y, z)."""

    columns: tuple
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.columns = tuple(str(c) for c in self.columns)
        self.data = np.ascontiguousarray(np.atleast_2d(np.asarray(self.data, dtype=np.float64)))
        if self.data.shape[1] != len(self.columns):
            raise ValueError(
                f"{len(self.columns)} column names but data has {self.data.shape[1]} columns"
            )

    def column(self, name):
        return self.data[:, self.columns.index(name)]

    def __len__(self):
        return self.data.shape[0]


def write_csv(path, table):
    """Header line of column names, then one %.17g row per sample."""
    lines = [",".join(table.columns)]
    for row in table.data:
        lines.append(",".join(_CSV_FMT % x for x in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty csv")
        columns = tuple(header.split(","))
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return CurveTable(columns=columns, data=data)


def write_svg_polyline(path, points, width=640, stroke="#1f3a5f", closed=False):
    """One planar curve (or several) as an SVG with a 5% padded viewBox.

    points is an (n, 2) array or a list of them.  The y axis is negated
    so that mathematical y-up renders upright.
    """
    curves = [np.asarray(points, dtype=np.float64)] if not isinstance(points, (list, tuple)) else [
        np.asarray(p, dtype=np.float64) for p in points
    ]
    allpts = np.concatenate(curves)
    if allpts.shape[0] == 0:
        raise ValueError("no points to draw")
    xy = allpts * np.array([1.0, -1.0])
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    span = np.maximum(hi - lo, 1.0e-9)
    pad = 0.05 * float(span.max())
    lo -= pad
    span += 2.0 * pad
    height = width * span[1] / span[0]
    sw = 0.004 * float(span.max())
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{_OBJ_FMT % width}" height="{_OBJ_FMT % height}" '
        f'viewBox="{_OBJ_FMT % lo[0]} {_OBJ_FMT % lo[1]} '
        f'{_OBJ_FMT % span[0]} {_OBJ_FMT % span[1]}">'
    ]
    tag = "polygon" if closed else "polyline"
    for c in curves:
        pts = " ".join(
            "%s,%s" % (_OBJ_FMT % p[0], _OBJ_FMT % (-p[1])) for p in c
        )
        lines.append(
            f'<{tag} fill="none" stroke="{stroke}" '
            f'stroke-width="{_OBJ_FMT % sw}" points="{pts}"/>'
        )
    lines.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
