"""Structured conforming triangulations of rectangles and disks, P1 plumbing.

Disks are masked rectangle grids whose boundary vertices are snapped onto the
circle; the polygonal boundary then interpolates the circle with O(h^2)
geometric error.  All triangles are positively oriented, and hat-function
gradients, areas, and centroids are precomputed for assembly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ValidationError


def _triangle_geometry(vertices: np.ndarray, triangles: np.ndarray):
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    det = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) \
        - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0])
    areas = 0.5 * det
    grads = np.empty((triangles.shape[0], 3, 2))
    # Hat gradient at vertex i is the inward normal of the opposite edge / (2A).
    grads[:, 0, 0] = p1[:, 1] - p2[:, 1]
    grads[:, 0, 1] = p2[:, 0] - p1[:, 0]
    grads[:, 1, 0] = p2[:, 1] - p0[:, 1]
    grads[:, 1, 1] = p0[:, 0] - p2[:, 0]
    grads[:, 2, 0] = p0[:, 1] - p1[:, 1]
    grads[:, 2, 1] = p1[:, 0] - p0[:, 0]
    grads /= det[:, None, None]
    centroids = (p0 + p1 + p2) / 3.0
    return areas, grads, centroids


def _boundary_vertices(nv: int, triangles: np.ndarray) -> np.ndarray:
    edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]],
                            triangles[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    mask = np.zeros(nv, dtype=bool)
    mask[uniq[counts == 1].ravel()] = True
    return mask


@dataclass(eq=False)
class Mesh2D:
    """Conforming triangulation with precomputed P1 geometry."""

    vertices: np.ndarray
    triangles: np.ndarray
    h: float
    kind: str = "custom"
    areas: np.ndarray = field(init=False, repr=False)
    grads: np.ndarray = field(init=False, repr=False)
    centroids: np.ndarray = field(init=False, repr=False)
    boundary_mask: np.ndarray = field(init=False, repr=False)
    _locator: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.triangles = np.asarray(self.triangles, dtype=np.int64)
        areas, grads, centroids = _triangle_geometry(self.vertices, self.triangles)
        if np.any(areas <= 0):
            raise ValidationError("triangulation contains non-positively oriented cells")
        self.areas, self.grads, self.centroids = areas, grads, centroids
        self.boundary_mask = _boundary_vertices(self.vertices.shape[0], self.triangles)

    # ------------------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def total_area(self) -> float:
        return float(np.sum(self.areas))

    # ------------------------------------------------------------------
    @classmethod
    def rectangle(cls, x0: float, x1: float, y0: float, y1: float,
                  nx: int, ny: int) -> "Mesh2D":
        """Structured grid, each cell split along its up-right diagonal."""
        if nx < 1 or ny < 1 or not (x1 > x0 and y1 > y0):
            raise ParameterError("rectangle mesh needs positive extents and resolution")
        xs = np.linspace(x0, x1, nx + 1)
        ys = np.linspace(y0, y1, ny + 1)
        X, Y = np.meshgrid(xs, ys)
        vertices = np.column_stack([X.ravel(), Y.ravel()])

        def vid(ix, iy):
            return iy * (nx + 1) + ix

        ix, iy = np.meshgrid(np.arange(nx), np.arange(ny))
        ix, iy = ix.ravel(), iy.ravel()
        a = vid(ix, iy)
        b = vid(ix + 1, iy)
        c = vid(ix + 1, iy + 1)
        d = vid(ix, iy + 1)
        lower = np.column_stack([a, b, c])
        upper = np.column_stack([a, c, d])
        triangles = np.empty((2 * nx * ny, 3), dtype=np.int64)
        triangles[0::2] = lower
        triangles[1::2] = upper
        h = max((x1 - x0) / nx, (y1 - y0) / ny)
        mesh = cls(vertices, triangles, h, kind="rectangle")
        mesh._locator = {"x0": x0, "y0": y0, "dx": (x1 - x0) / nx,
                         "dy": (y1 - y0) / ny, "nx": nx, "ny": ny,
                         "cell_tris": np.arange(2 * nx * ny).reshape(nx * ny, 2)
                                        .reshape(ny, nx, 2)}
        return mesh

    @classmethod
    def disk(cls, radius: float, h: float, center=(0.0, 0.0)) -> "Mesh2D":
        """Masked square grid with the staircase boundary snapped to the circle."""
        if radius <= 0 or h <= 0 or h > radius / 4:
            raise ParameterError("disk mesh needs 0 < h <= radius/4")
        n = 2 * max(4, int(round(radius / h)))
        cx, cy = center
        base = cls.rectangle(cx - radius, cx + radius, cy - radius, cy + radius, n, n)
        dist = np.hypot(base.vertices[:, 0] - cx, base.vertices[:, 1] - cy)
        tol = 1e-12 * max(1.0, radius)
        keep_v = dist <= radius + tol
        keep_t = np.all(keep_v[base.triangles], axis=1)
        tris = base.triangles[keep_t]
        used = np.unique(tris)
        remap = -np.ones(base.n_vertices, dtype=np.int64)
        remap[used] = np.arange(used.size)
        vertices = base.vertices[used].copy()
        triangles = remap[tris]
        # Snap boundary vertices radially onto the circle, guarding orientation.
        bmask = _boundary_vertices(vertices.shape[0], triangles)
        snapped = vertices.copy()
        r_v = np.hypot(vertices[:, 0] - cx, vertices[:, 1] - cy)
        move = bmask & (r_v > tol)
        snapped[move] = np.column_stack([cx, cy]) + \
            (vertices[move] - [cx, cy]) * (radius / r_v[move])[:, None]
        for _ in range(4):
            p0, p1, p2 = (snapped[triangles[:, i]] for i in range(3))
            det = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) \
                - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0])
            bad = det <= 0
            if not np.any(bad):
                break
            revert = np.unique(triangles[bad])
            snapped[revert] = vertices[revert]
        else:
            raise ValidationError("disk boundary snap kept inverting cells")
        mesh = cls(snapped, triangles, 2 * radius / n, kind="disk")
        loc = dict(base._locator)
        tri_remap = -np.ones(base.n_triangles, dtype=np.int64)
        tri_remap[np.nonzero(keep_t)[0]] = np.arange(triangles.shape[0])
        loc["cell_tris"] = tri_remap[loc["cell_tris"]]
        mesh._locator = loc
        return mesh

    # ------------------------------------------------------------------
    def locate(self, points, slack: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
        """Containing triangle and barycentric coordinates for each point.

        Returns (tri_index, bary) with tri_index = -1 when a point lies
        outside the mesh.  Structured meshes use cell lookup with a
        neighborhood sweep (boundary snapping can shift cell ownership).
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        idx = np.full(pts.shape[0], -1, dtype=np.int64)
        bary = np.zeros((pts.shape[0], 3))
        for k, p in enumerate(pts):
            cand = self._candidate_triangles(p)
            for t in cand:
                lam = self._barycentric(int(t), p)
                if np.all(lam >= -slack):
                    idx[k] = t
                    bary[k] = np.clip(lam, 0.0, None)
                    bary[k] /= bary[k].sum()
                    break
        return idx, bary

    def _candidate_triangles(self, p: np.ndarray) -> np.ndarray:
        if self._locator is not None:
            loc = self._locator
            ix = int(math.floor((p[0] - loc["x0"]) / loc["dx"]))
            iy = int(math.floor((p[1] - loc["y0"]) / loc["dy"]))
            cells = loc["cell_tris"]
            # Sweep the 5x5 neighborhood outward: snapped boundary cells can
            # own points that nominally fall in an adjacent (or missing) cell.
            out = []
            for r in range(3):
                for dy in range(-r, r + 1):
                    for dx in range(-r, r + 1):
                        if max(abs(dx), abs(dy)) != r:
                            continue
                        jx, jy = ix + dx, iy + dy
                        if 0 <= jx < loc["nx"] and 0 <= jy < loc["ny"]:
                            out.extend(t for t in cells[jy, jx] if t >= 0)
            return np.asarray(out, dtype=np.int64)
        near = np.argsort(np.sum((self.centroids - p) ** 2, axis=1))[:32]
        return near

    def _barycentric(self, t: int, p: np.ndarray) -> np.ndarray:
        tri = self.triangles[t]
        a, b, c = self.vertices[tri]
        det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (p[1] - a[1]) * (c[0] - a[0])) / det
        l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / det
        return np.array([1.0 - l1 - l2, l1, l2])

    # ------------------------------------------------------------------
    def submesh(self, tri_mask) -> tuple["Mesh2D", np.ndarray]:
        """Mesh restricted to masked triangles plus the old-vertex index map."""
        tri_mask = np.asarray(tri_mask, dtype=bool)
        if not np.any(tri_mask):
            raise ParameterError("submesh selection is empty")
        tris = self.triangles[tri_mask]
        used = np.unique(tris)
        remap = -np.ones(self.n_vertices, dtype=np.int64)
        remap[used] = np.arange(used.size)
        sub = Mesh2D(self.vertices[used].copy(), remap[tris], self.h, kind="sub")
        return sub, used

    def ball_triangles(self, x0, r: float) -> np.ndarray:
        """Mask of triangles whose centroid lies in the closed ball."""
        x0 = np.asarray(x0, dtype=float)
        return np.hypot(self.centroids[:, 0] - x0[0],
                        self.centroids[:, 1] - x0[1]) <= r


@dataclass(eq=False)
class VectorField2D:
    """Per-vertex values of a field with m components on a mesh."""

    mesh: Mesh2D
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[0] != self.mesh.n_vertices:
            raise ParameterError("field values must be per-vertex")
        self.values = vals

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_function(cls, mesh: Mesh2D, func) -> "VectorField2D":
        vals = np.asarray(func(mesh.vertices), dtype=float)
        return cls(mesh, vals)

    def gradients(self) -> np.ndarray:
        """Piecewise-constant gradient, shape (n_triangles, m, 2)."""
        uv = self.values[self.mesh.triangles]  # (nt, 3, m)
        return np.einsum("tim,tid->tmd", uv, self.mesh.grads)

    def vertex_values_at(self, points) -> np.ndarray:
        idx, bary = self.mesh.locate(points)
        if np.any(idx < 0):
            raise ParameterError("a query point lies outside the mesh")
        return np.einsum("ki,kim->km", bary, self.values[self.mesh.triangles[idx]])

    def to_csv(self, path) -> None:
        m = self.m
        header = "x,y," + ",".join(f"u{j + 1}" for j in range(m))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for v, row in zip(self.mesh.vertices, self.values):
                cells = [f"{v[0]:.12e}", f"{v[1]:.12e}"] + [f"{x:.12e}" for x in row]
                fh.write(",".join(cells) + "\n")
