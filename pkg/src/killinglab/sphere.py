"""Points, tangent vectors, stereographic charts and seeded sampling on odd spheres.

Everything lives in ambient coordinates: a point of S^(2n+1) is a unit vector
in R^(2n+2), a tangent vector is an ambient vector orthogonal to its base
point.  Charts (stereographic projection from a pole) only enter where a
metric has to be differentiated numerically; the chart inverse and its
Jacobian are closed-form, so the only finite differences in the pipeline are
the ones applied to metric components.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

UNIT_TOL = 1e-12        # |x| - 1 allowed on construction
TANGENCY_TOL = 1e-10    # <v, x> allowed on construction
POLE_EXCLUSION = 1e-6   # chart refuses points this close to its pole
DEFAULT_POLE_MARGIN = 1e-3


class ChartDomainError(ValueError):
    """Raised when a point is too close to the chart pole to be projected."""


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """Unit vector in R^(2n+2); ambient dimension must be even and >= 4."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _readonly(self.coords))
        if self.coords.ndim != 1:
            raise ValueError("coords must be a flat vector")
        d = self.coords.shape[0]
        if d % 2 != 0 or d < 4:
            raise ValueError(f"ambient dimension must be even and >= 4, got {d}")
        r = float(np.linalg.norm(self.coords))
        if abs(r - 1.0) > UNIT_TOL:
            raise ValueError(f"|coords| = {r} is not 1 within {UNIT_TOL}")

    @property
    def dim(self) -> int:
        """Ambient dimension 2n+2."""
        return self.coords.shape[0]

    @property
    def sphere_dim(self) -> int:
        """Intrinsic dimension 2n+1."""
        return self.coords.shape[0] - 1


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Ambient vector attached to a point and orthogonal to it."""

    base: SpherePoint
    vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vec", _readonly(self.vec))
        if self.vec.shape != self.base.coords.shape:
            raise ValueError("tangent vector and base point have mismatched shapes")
        ip = float(np.dot(self.vec, self.base.coords))
        scale = 1.0 + float(np.linalg.norm(self.vec))
        if abs(ip) > TANGENCY_TOL * scale:
            raise ValueError(f"<v, base> = {ip} violates tangency within {TANGENCY_TOL}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


def sphere_point(coords, normalize: bool = False) -> SpherePoint:
    x = np.asarray(coords, dtype=float)
    if normalize:
        x = x / np.linalg.norm(x)
    return SpherePoint(x)


def project_tangent(p: SpherePoint, v) -> TangentVector:
    """Orthogonal projection of an ambient vector onto T_p."""
    v = np.asarray(v, dtype=float)
    w = v - np.dot(v, p.coords) * p.coords
    return TangentVector(p, w)


def project_tangent_array(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Raw-array tangent projection, no wrapping."""
    return v - np.dot(v, x) * x


def orthonormal_tangent_frame(x: np.ndarray) -> np.ndarray:
    """Euclidean orthonormal basis of x^perp, columns of a (d, d-1) array.

    Deterministic pivot: the ambient axis most parallel to x is dropped,
    the remaining axes are Gram-Schmidt orthonormalized in index order.
    """
    d = x.shape[0]
    drop = int(np.argmax(np.abs(x)))
    cols = []
    for i in range(d):
        if i == drop:
            continue
        v = -x[i] * x
        v[i] += 1.0  # e_i projected to the tangent space
        for c in cols:
            v = v - np.dot(v, c) * c
        n = np.linalg.norm(v)
        if n < 1e-8:
            raise RuntimeError("degenerate tangent frame pivot")
        cols.append(v / n)
    return np.stack(cols, axis=1)


@dataclass(frozen=True, eq=False)
class Chart:
    """Stereographic projection from a pole onto the pole's orthocomplement."""

    pole: SpherePoint
    basis: np.ndarray  # (d, d-1) orthonormal basis of pole^perp

    @staticmethod
    def from_pole(pole: SpherePoint) -> "Chart":
        q = pole.coords
        d = q.shape[0]
        cols = []
        for i in range(d):
            v = -q[i] * q
            v[i] += 1.0
            for c in cols:
                v = v - np.dot(v, c) * c
            n = np.linalg.norm(v)
            if n < 0.5:  # the axis closest to the pole drops out here
                continue
            cols.append(v / n)
            if len(cols) == d - 1:
                break
        return Chart(pole, _readonly(np.stack(cols, axis=1)))

    @property
    def dim(self) -> int:
        return self.pole.dim

    def contains(self, p: SpherePoint) -> bool:
        return float(np.linalg.norm(p.coords - self.pole.coords)) > POLE_EXCLUSION

    def coords(self, p: SpherePoint) -> np.ndarray:
        x = p.coords
        q = self.pole.coords
        if float(np.linalg.norm(x - q)) <= POLE_EXCLUSION:
            raise ChartDomainError("point within pole exclusion radius of the chart")
        denom = 1.0 - float(np.dot(x, q))
        return (self.basis.T @ x) / denom

    def point_coords(self, u: np.ndarray) -> np.ndarray:
        """Chart inverse as a raw ambient array (exactly unit up to rounding)."""
        s = float(np.dot(u, u)) + 1.0
        return ((s - 2.0) * self.pole.coords + 2.0 * (self.basis @ u)) / s

    def point(self, u: np.ndarray) -> SpherePoint:
        return SpherePoint(self.point_coords(np.asarray(u, dtype=float)))

    def conformal_factor(self, u: np.ndarray) -> float:
        """The chart inverse is conformal with J^T J = lam^2 I, lam = 2/(1+|u|^2)."""
        return 2.0 / (1.0 + float(np.dot(u, u)))

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        """d(point)/du, shape (d, d-1); closed form, no finite differences."""
        u = np.asarray(u, dtype=float)
        s = float(np.dot(u, u)) + 1.0
        core = self.pole.coords - self.basis @ u  # shape (d,)
        return (4.0 / s**2) * np.outer(core, u) + (2.0 / s) * self.basis

    def to_chart_vector(self, u: np.ndarray, ambient: np.ndarray) -> np.ndarray:
        """Chart components of a tangent vector at point(u); exact by conformality."""
        lam2 = self.conformal_factor(u) ** 2
        return (self.jacobian(u).T @ ambient) / lam2

    def push(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Ambient image of a chart-coordinate vector."""
        return self.jacobian(u) @ w


def default_atlas(dim: int) -> tuple[Chart, Chart]:
    """Two-chart atlas with poles at +e1 and -e1."""
    e1 = np.zeros(dim)
    e1[0] = 1.0
    return (Chart.from_pole(SpherePoint(e1)), Chart.from_pole(SpherePoint(-e1)))


def chart_for_point(p: SpherePoint, atlas: Sequence[Chart] | None = None) -> Chart:
    """Chart of the atlas whose pole is farther from p."""
    charts = atlas if atlas is not None else default_atlas(p.dim)
    dists = [float(np.linalg.norm(p.coords - c.pole.coords)) for c in charts]
    return charts[int(np.argmax(dists))]


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Deterministic batch of sphere points; regeneration is bit-for-bit."""

    points: tuple[SpherePoint, ...]
    seed: int
    count: int

    def __post_init__(self):
        if len(self.points) != self.count:
            raise ValueError("count does not match number of points")

    @property
    def dim(self) -> int:
        return self.points[0].dim

    def arrays(self) -> np.ndarray:
        return np.stack([p.coords for p in self.points], axis=0)


def sample_sphere(n: int, count: int, seed: int,
                  pole_margin: float = DEFAULT_POLE_MARGIN) -> SampleSet:
    """Seeded uniform samples on S^(2n+1), kept clear of the default chart poles.

    Uniformity comes from normalized Gaussian draws; points closer than
    pole_margin (ambient distance) to +-e1 are rejected and redrawn from the
    same generator stream, so the result is a pure function of (n, count, seed).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    d = 2 * n + 2
    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    while len(kept) < count:
        batch = rng.standard_normal((max(count, 64), d))
        norms = np.linalg.norm(batch, axis=1)
        batch = batch[norms > 1e-8] / norms[norms > 1e-8, None]
        for row in batch:
            if abs(row[0] - 1.0) < 1e-12 or abs(row[0] + 1.0) < 1e-12:
                continue
            dplus = np.linalg.norm(row - np.eye(d)[0])
            dminus = np.linalg.norm(row + np.eye(d)[0])
            if dplus <= pole_margin or dminus <= pole_margin:
                continue
            kept.append(row)
            if len(kept) == count:
                break
    return SampleSet(tuple(SpherePoint(row) for row in kept), seed, count)
