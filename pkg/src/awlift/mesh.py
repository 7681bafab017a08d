"""Triangle/quad meshes of the surface and its reflected copy.

Vertices follow the polar grid order (center, then rings); faces are quads
between neighbouring rings and a triangle fan around the center.  Vertices
at infinity or with non-finite coordinates are dropped together with every
face that uses them.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .extension import ExtensionMap, chordal, dilatation_at
from .grid import GridParams, sweep
from .harmonic import condition_report
from .lift import lift_point
from .reflection import reflect


@dataclass
class MeshOutput:
    vertices: np.ndarray  # (n, 3)
    faces: list[tuple[int, ...]]  # 0-based
    attributes: dict[str, np.ndarray] = field(default_factory=dict)
    dropped: int = 0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.vertices)
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("mesh vertices must be finite")
        for f in self.faces:
            if min(f) < 0 or max(f) >= n:
                raise ValueError(f"face {f} refers to a missing vertex")

    def bounding_box(self) -> tuple[list[float], list[float]]:
        if len(self.vertices) == 0:
            return [], []
        return self.vertices.min(axis=0).tolist(), self.vertices.max(axis=0).tolist()

    def summary(self) -> dict:
        lo, hi = self.bounding_box()
        return {
            "vertices": len(self.vertices),
            "faces": len(self.faces),
            "dropped_vertices": self.dropped,
            "bbox_min": lo,
            "bbox_max": hi,
            **self.info,
        }


def _num(x: float) -> str:
    return format(float(x), ".17g")


def grid_faces(n_radial: int, n_angular: int, offset: int = 0) -> list[tuple[int, ...]]:
    def v(i, j):
        return offset + 1 + i * n_angular + j % n_angular

    faces = [(offset, v(0, j), v(0, j + 1)) for j in range(n_angular)]
    for i in range(n_radial - 1):
        faces.extend((v(i, j), v(i, j + 1), v(i + 1, j + 1), v(i + 1, j)) for j in range(n_angular))
    return faces


def _compact(vertices, faces, attributes, info) -> MeshOutput:
    keep = np.all(np.isfinite(vertices), axis=-1)
    new_index = np.cumsum(keep) - 1
    kept_faces = [tuple(int(new_index[k]) for k in f) for f in faces if all(keep[k] for k in f)]
    attrs = {k: np.asarray(a)[keep] for k, a in attributes.items()}
    return MeshOutput(vertices[keep], kept_faces, attrs, int(np.count_nonzero(~keep)), info)


def surface_mesh(spec, grid: GridParams) -> MeshOutput:
    pts = grid.points()
    verts = sweep(lambda z: lift_point(spec, z), pts)
    report = condition_report(spec, grid)
    attrs = {
        "region": np.array(["interior"] * len(pts)),
        "re": pts.real,
        "im": pts.imag,
        "margin_t": report.margin_field,
        "dilatation": np.ones(len(pts)),
    }
    return _compact(verts, grid_faces(grid.n_radial, grid.n_angular), attrs, {"sup_t": report.sup_t})


def extension_mesh(spec, grid: GridParams) -> MeshOutput:
    """Interior grid through f~ plus its mirror image 1/conj(z) through the extension.

    The exterior vertex for grid point p is R(f~(p)) = F~(1/conj(p)); the
    center maps to the image of infinity.  Both seam rings are kept, one
    per region.
    """
    ext = ExtensionMap(spec, grid)
    pts = grid.points()
    n = len(pts)
    inner = sweep(lambda z: lift_point(spec, z), pts)
    outer = sweep(lambda z: reflect(spec, z), pts)
    with np.errstate(divide="ignore"):
        zext = np.where(pts == 0, complex(np.inf, 0), 1 / np.conj(np.where(pts == 0, 1, pts)))
    finite = np.isfinite(zext)
    dil = np.full(n, np.nan)
    if finite.any():
        ds = dilatation_at(ext, zext[finite])
        dil[finite] = ds.ratio
    margin = ext.report.margin_field
    seam = 1 + (grid.n_radial - 1) * grid.n_angular + np.arange(grid.n_angular)
    seam_gap = float(np.max(chordal(inner[seam], outer[seam])))
    verts = np.concatenate([inner, outer])
    faces = grid_faces(grid.n_radial, grid.n_angular)
    # reversed winding keeps the outward side consistent across the seam
    faces += [tuple(reversed(f)) for f in grid_faces(grid.n_radial, grid.n_angular, offset=n)]
    attrs = {
        "region": np.array(["interior"] * n + ["exterior"] * n),
        "re": np.concatenate([pts.real, zext.real]),
        "im": np.concatenate([pts.imag, np.where(finite, zext.imag, np.inf)]),
        "margin_t": np.concatenate([margin, margin]),
        "dilatation": np.concatenate([np.ones(n), dil]),
    }
    info = {"sup_t": ext.t, "seam_gap": seam_gap, "seam_epsilon": 1 - grid.r_max}
    return _compact(verts, faces, attrs, info)


def to_obj(mesh: MeshOutput, header: str = "") -> str:
    out = io.StringIO()
    for line in header.splitlines():
        out.write(f"# {line}\n")
    out.write(f"# vertices {len(mesh.vertices)} faces {len(mesh.faces)} dropped {mesh.dropped}\n")
    for x, y, z in mesh.vertices:
        out.write(f"v {_num(x)} {_num(y)} {_num(z)}\n")
    for f in mesh.faces:
        out.write("f " + " ".join(str(k + 1) for k in f) + "\n")
    return out.getvalue()


def to_ply(mesh: MeshOutput, header: str = "") -> str:
    out = io.StringIO()
    out.write("ply\nformat ascii 1.0\n")
    for line in header.splitlines():
        out.write(f"comment {line}\n")
    out.write(f"element vertex {len(mesh.vertices)}\n")
    out.write("property double x\nproperty double y\nproperty double z\n")
    out.write(f"element face {len(mesh.faces)}\n")
    out.write("property list uchar int vertex_indices\nend_header\n")
    for x, y, z in mesh.vertices:
        out.write(f"{_num(x)} {_num(y)} {_num(z)}\n")
    for f in mesh.faces:
        out.write(f"{len(f)} " + " ".join(str(k) for k in f) + "\n")
    return out.getvalue()


ATTRIBUTE_COLUMNS = ["index", "region", "re", "im", "margin_t", "dilatation"]


def attributes_csv(mesh: MeshOutput) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ATTRIBUTE_COLUMNS)
    a = mesh.attributes
    for k in range(len(mesh.vertices)):
        w.writerow([k + 1, a["region"][k], _opt(a["re"][k]), _opt(a["im"][k]),
                    _num(a["margin_t"][k]), _opt(a["dilatation"][k])])
    return out.getvalue()


def _opt(x: float) -> str:
    # blank for the point at infinity and for skipped samples
    return _num(x) if np.isfinite(x) else ""


def parse_obj(text: str) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Minimal reader for the files written here (used to check round trips)."""
    verts, faces = [], []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        tag, *rest = line.split()
        if tag == "v":
            verts.append([float(v) for v in rest])
        elif tag == "f":
            faces.append(tuple(int(k) - 1 for k in rest))
        else:
            raise ValueError(f"unexpected OBJ line: {line!r}")
    return np.array(verts), faces
