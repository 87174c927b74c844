"""Triangle meshes and OBJ / label-sidecar file I/O."""

from __future__ import annotations

import numpy as np

from .errors import DataError, DegenerateInputError


class TriMesh:
    """Triangle mesh in model units (millimeters canonical).

    vertices : (N, 3) float64
    faces    : (F, 3) int, indices into vertices
    labels   : optional (N,) int part ids (0 background, 1-6 body parts)
    """

    def __init__(self, vertices, faces, labels=None):
        self.vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        self.labels = None if labels is None else np.asarray(labels, dtype=np.int64)
        self._validate()

    def _validate(self):
        if not np.isfinite(self.vertices).all():
            raise DataError("mesh has non-finite vertex coordinates")
        if len(self.faces):
            if self.faces.min() < 0 or self.faces.max() >= len(self.vertices):
                raise DataError("face index out of range")
            f = self.faces
            if ((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])).any():
                raise DataError("degenerate face with repeated vertex index")
        if self.labels is not None and len(self.labels) != len(self.vertices):
            raise DataError("label count does not match vertex count")

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    def bounds(self):
        """(min, max) corners of the axis-aligned bounding box."""
        if not len(self.vertices):
            raise DegenerateInputError("empty mesh has no bounds")
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def triangles(self):
        """(F, 3, 3) array of face corner coordinates."""
        return self.vertices[self.faces]

    def transformed(self, scale, translation):
        """New mesh with vertices mapped v -> v * scale + translation."""
        v = self.vertices * float(scale) + np.asarray(translation, dtype=np.float64)
        return TriMesh(v, self.faces, self.labels)

    def with_labels(self, labels):
        return TriMesh(self.vertices, self.faces, labels)

    def edge_face_counts(self):
        """Dict mapping each undirected edge to the number of faces using it."""
        e = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        e = np.sort(e, axis=1)
        uniq, counts = np.unique(e, axis=0, return_counts=True)
        return {tuple(k): int(c) for k, c in zip(uniq, counts)}

    def is_watertight(self):
        """True when every edge is shared by exactly two faces."""
        if not len(self.faces):
            return False
        e = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        e = np.sort(e, axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return bool((counts == 2).all())

    def euler_characteristic(self):
        e = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        e = np.sort(e, axis=1)
        n_edges = len(np.unique(e, axis=0))
        return self.n_vertices - n_edges + self.n_faces


def read_obj(path):
    """Read an OBJ file, honoring only ``v`` and ``f`` records.

    Face records may carry ``v/vt/vn`` slash syntax (extra fields ignored) and
    polygons are fan-triangulated. Indices are 1-based per the format; negative
    indices reference from the end.
    """
    vertices = []
    faces = []
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise DataError(f"{path}:{lineno}: vertex record needs 3 coordinates")
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            elif tag == "f":
                idx = []
                for token in parts[1:]:
                    head = token.split("/")[0]
                    if not head:
                        raise DataError(f"{path}:{lineno}: empty face index")
                    i = int(head)
                    idx.append(i - 1 if i > 0 else len(vertices) + i)
                if len(idx) < 3:
                    raise DataError(f"{path}:{lineno}: face with fewer than 3 vertices")
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
            # all other records (vn, vt, usemtl, ...) are ignored
    return TriMesh(np.array(vertices, dtype=np.float64).reshape(-1, 3),
                   np.array(faces, dtype=np.int64).reshape(-1, 3))


def write_obj(path, mesh, vertex_scalars=None):
    """Write an OBJ file; optional per-vertex scalars are emitted as greyscale
    ``v x y z r g b`` colors (a common viewer extension)."""
    with open(path, "w") as fh:
        if vertex_scalars is not None:
            s = np.asarray(vertex_scalars, dtype=np.float64)
            hi = s.max() if len(s) and s.max() > 0 else 1.0
            for v, c in zip(mesh.vertices, s / hi):
                fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g} {c:.6f} {c:.6f} {c:.6f}\n")
        else:
            for v in mesh.vertices:
                fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def read_labels(path, n_vertices):
    """Read a ``vertex_index part_id`` sidecar file (0-based vertex indices)."""
    labels = np.zeros(n_vertices, dtype=np.int64)
    seen = np.zeros(n_vertices, dtype=bool)
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'vertex_index part_id'")
            i, pid = int(parts[0]), int(parts[1])
            if not 0 <= i < n_vertices:
                raise DataError(f"{path}:{lineno}: vertex index {i} out of range")
            labels[i] = pid
            seen[i] = True
    if not seen.all():
        raise DataError(f"{path}: {int((~seen).sum())} vertices missing a label")
    return labels


def write_labels(path, labels):
    with open(path, "w") as fh:
        for i, pid in enumerate(np.asarray(labels).ravel()):
            fh.write(f"{i} {int(pid)}\n")
