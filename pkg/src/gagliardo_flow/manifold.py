"""Target manifolds: the round sphere S^(L-1) in R^L and the flat torus
S^1 x S^1 in R^4.

Each target knows its nearest-point projection, the tangent-space projector,
and a family of rotation generator fields X_alpha together with dual fields
Y_alpha satisfying, at every point p,

    v = sum_alpha <X_alpha(p), v> Y_alpha(p)   for tangent v,
    sum_alpha X_alpha(p) Y_alpha(p)^T = tangent projector at p.

For both targets Y_alpha = X_alpha. The generators come from isometric group
actions, so <X_alpha(p) - X_alpha(q), p - q> = 0 for any p, q on the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, OutsideTubularNeighbourhood

# nearest-point projection is well defined within this distance of the target
TUBE_RADIUS = 0.5

# |constraint residual| allowed for a point claimed to lie on the target
CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class ManifoldPoint:
    """Ambient coordinates of a point on the target."""

    coords: np.ndarray


def _coords(p) -> np.ndarray:
    return np.asarray(getattr(p, "coords", p), dtype=float)


class TargetManifold:
    """Common interface; concrete targets fill in the geometry."""

    kind: str
    ambient_dim: int
    intrinsic_dim: int
    killing_count: int

    # -- single-point operations ------------------------------------------

    def project(self, v) -> ManifoldPoint:
        """Nearest point on the target; raises OutsideTubularNeighbourhood
        when v is more than TUBE_RADIUS from the target."""
        rows = self.project_rows(_coords(v)[None, :])
        return ManifoldPoint(rows[0])

    def tangent_projector(self, p, v) -> np.ndarray:
        """Orthogonal projection of ambient v onto the tangent space at p."""
        return self.tangent_project_rows(_coords(p)[None, :], _coords(v)[None, :])[0]

    def projector_matrix(self, p) -> np.ndarray:
        """The tangent projector at p as a dense L x L matrix."""
        eye = np.eye(self.ambient_dim)
        return self.tangent_project_rows(
            np.repeat(_coords(p)[None, :], self.ambient_dim, axis=0), eye
        ).T

    def killing_fields(self, p) -> list[np.ndarray]:
        pt = _coords(p)[None, :]
        return [self.killing_field_rows(pt, a)[0] for a in range(self.killing_count)]

    def dual_fields(self, p) -> list[np.ndarray]:
        pt = _coords(p)[None, :]
        return [self.dual_field_rows(pt, a)[0] for a in range(self.killing_count)]

    # -- row-vectorized operations (one point per row) --------------------

    def project_rows(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tangent_project_rows(self, points: np.ndarray, vectors: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def killing_field_rows(self, points: np.ndarray, alpha: int) -> np.ndarray:
        raise NotImplementedError

    def dual_field_rows(self, points: np.ndarray, alpha: int) -> np.ndarray:
        # self-dual generator families for both concrete targets
        return self.killing_field_rows(points, alpha)

    def constraint_residual_rows(self, arr: np.ndarray) -> np.ndarray:
        """Per-row distance-like residual, zero exactly on the target."""
        raise NotImplementedError

    def on_manifold(self, arr, tol: float = CONSTRAINT_TOL) -> bool:
        arr = np.atleast_2d(_coords(arr))
        return bool(np.all(self.constraint_residual_rows(arr) <= tol))

    def random_rows(self, count: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def _check_alpha(self, alpha: int):
        if not 0 <= alpha < self.killing_count:
            raise IndexOutOfRange(
                f"generator index {alpha} outside 0..{self.killing_count - 1}"
            )


class Sphere(TargetManifold):
    """Unit sphere S^(L-1) embedded in R^L, L >= 2.

    Generator fields are the full rotation algebra: for the coordinate pair
    (i, j) with i < j (lexicographic order),

        X_(i,j)(p) = p_j e_i - p_i e_j.

    There are L(L-1)/2 of them; they over-span the tangent space for L > 2
    but the reconstruction identity still holds with Y = X.
    """

    def __init__(self, ambient_dim: int = 3):
        if ambient_dim < 2:
            raise ValueError("sphere needs ambient dimension >= 2")
        self.ambient_dim = int(ambient_dim)
        self.intrinsic_dim = self.ambient_dim - 1
        self.killing_count = self.ambient_dim * (self.ambient_dim - 1) // 2
        self.kind = f"sphere{self.ambient_dim}"
        self._pairs = [
            (i, j)
            for i in range(self.ambient_dim)
            for j in range(i + 1, self.ambient_dim)
        ]

    def project_rows(self, arr):
        arr = np.atleast_2d(np.asarray(arr, dtype=float))
        norms = np.linalg.norm(arr, axis=1)
        if np.any(norms < TUBE_RADIUS):
            raise OutsideTubularNeighbourhood(
                f"row norm {norms.min():.3g} below tube radius {TUBE_RADIUS}"
            )
        return arr / norms[:, None]

    def tangent_project_rows(self, points, vectors):
        points = np.atleast_2d(points)
        vectors = np.atleast_2d(vectors)
        return vectors - np.sum(points * vectors, axis=1, keepdims=True) * points

    def killing_field_rows(self, points, alpha):
        self._check_alpha(alpha)
        points = np.atleast_2d(points)
        i, j = self._pairs[alpha]
        out = np.zeros_like(points)
        out[:, i] = points[:, j]
        out[:, j] = -points[:, i]
        return out

    def constraint_residual_rows(self, arr):
        return np.abs(np.sum(arr * arr, axis=1) - 1.0)

    def random_rows(self, count, rng):
        raw = rng.standard_normal((count, self.ambient_dim))
        # resample the (measure-zero in practice) rows too short to normalize
        while True:
            norms = np.linalg.norm(raw, axis=1)
            bad = norms < 1e-8
            if not np.any(bad):
                break
            raw[bad] = rng.standard_normal((int(bad.sum()), self.ambient_dim))
        return raw / norms[:, None]


class Torus2(TargetManifold):
    """Flat torus S^1 x S^1 embedded in R^4 as two unit-circle blocks,
    coordinates (0,1) and (2,3). One rotation generator per block."""

    ambient_dim = 4
    intrinsic_dim = 2
    killing_count = 2
    kind = "torus2"

    _blocks = ((0, 2), (2, 4))

    def project_rows(self, arr):
        arr = np.atleast_2d(np.asarray(arr, dtype=float))
        out = np.empty_like(arr)
        for lo, hi in self._blocks:
            norms = np.linalg.norm(arr[:, lo:hi], axis=1)
            if np.any(norms < TUBE_RADIUS):
                raise OutsideTubularNeighbourhood(
                    f"circle-block norm {norms.min():.3g} below tube radius"
                    f" {TUBE_RADIUS}"
                )
            out[:, lo:hi] = arr[:, lo:hi] / norms[:, None]
        return out

    def tangent_project_rows(self, points, vectors):
        points = np.atleast_2d(points)
        vectors = np.atleast_2d(vectors)
        out = np.empty_like(vectors, dtype=float)
        for lo, hi in self._blocks:
            b = points[:, lo:hi]
            v = vectors[:, lo:hi]
            out[:, lo:hi] = v - np.sum(b * v, axis=1, keepdims=True) * b
        return out

    def killing_field_rows(self, points, alpha):
        self._check_alpha(alpha)
        points = np.atleast_2d(points)
        out = np.zeros_like(points)
        lo = 2 * alpha
        out[:, lo] = -points[:, lo + 1]
        out[:, lo + 1] = points[:, lo]
        return out

    def constraint_residual_rows(self, arr):
        res = np.zeros(arr.shape[0])
        for lo, hi in self._blocks:
            res = np.maximum(
                res, np.abs(np.sum(arr[:, lo:hi] ** 2, axis=1) - 1.0)
            )
        return res

    def random_rows(self, count, rng):
        t1 = rng.uniform(0.0, 2.0 * np.pi, count)
        t2 = rng.uniform(0.0, 2.0 * np.pi, count)
        return np.column_stack([np.cos(t1), np.sin(t1), np.cos(t2), np.sin(t2)])


def make_target(name: str) -> TargetManifold:
    """Build a target from its config string: 'sphere<L>' or 'torus2'."""
    name = name.strip().lower()
    if name == "torus2":
        return Torus2()
    if name.startswith("sphere"):
        try:
            dim = int(name[len("sphere"):])
        except ValueError:
            raise ValueError(f"unknown target {name!r}") from None
        if dim < 2:
            raise ValueError("sphere ambient dimension must be >= 2")
        return Sphere(dim)
    raise ValueError(f"unknown target {name!r}")
