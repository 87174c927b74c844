"""Occupancy grids, probability volumes, and mesh-to-grid alignment.

Grid convention: cell (i, j, k) covers the unit box [i, i+1) x [j, j+1) x
[k, k+1) in grid coordinates, so its center sits at (i+0.5, j+0.5, k+0.5).
Data arrays are indexed ``data[x, y, z]`` with shape (W, H, D).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateInputError, DimensionMismatchError
from .mesh import TriMesh

LOGIT, PROB, LABEL = "logit", "prob", "label"
N_PART_CLASSES = 7  # background + 6 body parts


@dataclass(frozen=True)
class GridTransform:
    """Uniform map between grid and model coordinates.

    model = translation + scale * grid_point, with scale in mm per cell.
    """

    scale: float
    translation: tuple

    def __post_init__(self):
        if not self.scale > 0:
            raise DataError("transform scale must be positive")

    def to_model(self, pts):
        return np.asarray(pts, dtype=np.float64) * self.scale + np.asarray(self.translation)

    def to_grid(self, pts):
        return (np.asarray(pts, dtype=np.float64) - np.asarray(self.translation)) / self.scale

    def cell_centers_to_model(self, idx):
        """Model-space positions of cell centers given integer indices."""
        return self.to_model(np.asarray(idx, dtype=np.float64) + 0.5)


IDENTITY_TRANSFORM = GridTransform(1.0, (0.0, 0.0, 0.0))


@dataclass(frozen=True)
class AlignConfig:
    """Controls how a mesh is scaled and placed inside the voxel grid."""

    resolution: int = 128
    # fraction of the xy extent the body footprint occupies; the default
    # leaves a margin so closed surfaces never touch the grid boundary
    fill_ratio: float = 0.95

    def __post_init__(self):
        if self.resolution < 1:
            raise DataError("resolution must be >= 1")
        if not 0 < self.fill_ratio <= 1:
            raise DataError("fill_ratio must lie in (0, 1]")


class VoxelGrid:
    """Binary occupancy on a W x H x D lattice, with a grid-to-model transform."""

    def __init__(self, data, transform=IDENTITY_TRANSFORM, surface_only=False):
        self.data = np.ascontiguousarray(data, dtype=bool)
        if self.data.ndim != 3:
            raise DataError("voxel grid data must be 3-dimensional")
        self.transform = transform
        # set when a solid fill was requested on a non-watertight mesh
        self.surface_only = bool(surface_only)

    @property
    def dims(self):
        return self.data.shape

    def count(self):
        return int(self.data.sum())

    def occupied_indices(self):
        """(M, 3) integer indices of occupied cells."""
        return np.argwhere(self.data)

    def __eq__(self, other):
        return isinstance(other, VoxelGrid) and self.dims == other.dims and bool(
            (self.data == other.data).all())


class ProbVolume:
    """Per-voxel scalar field: logits, probabilities, or integer class labels."""

    def __init__(self, data, space=PROB, transform=IDENTITY_TRANSFORM):
        if space not in (LOGIT, PROB, LABEL):
            raise DataError(f"unknown volume space {space!r}")
        dtype = np.int64 if space == LABEL else np.float64
        self.data = np.ascontiguousarray(data, dtype=dtype)
        if self.data.ndim != 3:
            raise DataError("volume data must be 3-dimensional")
        self.space = space
        self.transform = transform
        if space == PROB and len(self.data) and (
                self.data.min() < 0 or self.data.max() > 1):
            raise DataError("probability volume values must lie in [0, 1]")
        if space == LABEL and len(self.data) and (
                self.data.min() < 0 or self.data.max() >= N_PART_CLASSES):
            raise DataError("label volume values must lie in [0, 7)")

    @property
    def dims(self):
        return self.data.shape

    def to_prob(self):
        if self.space == PROB:
            return self
        if self.space == LOGIT:
            return ProbVolume(sigmoid(self.data), PROB, self.transform)
        raise DataError("label volumes carry classes, not probabilities")

    def threshold(self, level=0.5):
        """Binarize at ``level`` (inclusive); label volumes binarize foreground."""
        if self.space == LABEL:
            return VoxelGrid(self.data > 0, self.transform)
        return VoxelGrid(self.to_prob().data >= level, self.transform)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def from_grid(grid, space=PROB):
    """Lift a binary grid to a {0, 1} probability volume."""
    if space != PROB:
        raise DataError("grids lift to probability space only")
    return ProbVolume(grid.data.astype(np.float64), PROB, grid.transform)


def align(mesh, root, cfg=AlignConfig()):
    """Scale and translate a mesh into grid coordinates.

    The xy footprint is scaled to fill ``resolution * fill_ratio`` cells along
    its larger side and centered in the grid; the root point maps to depth D/2.
    Returns the grid-space mesh and the GridTransform mapping grid coordinates
    back to model space.
    """
    if not mesh.n_vertices:
        raise DegenerateInputError("cannot align an empty mesh")
    root = np.asarray(root, dtype=np.float64).reshape(3)
    if not np.isfinite(root).all():
        raise DataError("root point must be finite")
    lo, hi = mesh.bounds()
    extent_xy = max(hi[0] - lo[0], hi[1] - lo[1])
    if extent_xy <= 0:
        raise DegenerateInputError("mesh has zero xy extent")
    res = cfg.resolution
    s = res * cfg.fill_ratio / extent_xy  # cells per model unit
    center = np.array([(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, root[2]])
    grid_center = np.array([res / 2.0, res / 2.0, res / 2.0])
    grid_vertices = (mesh.vertices - center) * s + grid_center
    transform = GridTransform(1.0 / s, tuple(center - grid_center / s))
    return TriMesh(grid_vertices, mesh.faces, mesh.labels), transform


def voxel_iou(a, b):
    """Intersection over union of two occupancy grids; 1.0 when both empty."""
    if isinstance(a, ProbVolume):
        a = a.threshold()
    if isinstance(b, ProbVolume):
        b = b.threshold()
    if a.dims != b.dims:
        raise DimensionMismatchError(f"grid dims differ: {a.dims} vs {b.dims}")
    inter = int(np.logical_and(a.data, b.data).sum())
    union = int(np.logical_or(a.data, b.data).sum())
    return 1.0 if union == 0 else inter / union
