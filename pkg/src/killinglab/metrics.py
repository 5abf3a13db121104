"""Metric fields on odd spheres and their Levi-Civita machinery.

A metric is stored as an ambient Gram operator: a symmetric matrix field
M(x) on R^d with g_x(u, v) = u^T M(x) v for tangent vectors u, v at x.
The round metric is M = Id; deformed metrics supply their own M.

Differentiation strategy:
  * round metric + (projected-)linear field  ->  closed forms, no stepping;
  * anything else  ->  stereographic chart, closed-form chart Jacobian,
    central finite differences applied to metric components and field
    components only.

Every finite-difference covariant derivative can be wrapped in a Richardson
step-halving guard; disagreement beyond ``RICHARDSON_REL_TOL`` raises
``NumericalQualityError`` instead of returning a silently bad number.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .sphere import (
    Chart,
    SpherePoint,
    TangentVector,
    chart_for_point,
    default_atlas,
    orthonormal_tangent_frame,
)

DEFAULT_FD_STEP = 1e-4
MAX_FD_STEP = 0.02
RICHARDSON_REL_TOL = 1e-3
SECOND_DERIV_INNER_SHRINK = 3.0   # inner first-derivative step = h / 3
SECOND_DERIV_OUTER_GROWTH = 10.0  # outer second-derivative step = 10 h
FRAME_RANK_TOL = 1e-8


class NumericalQualityError(RuntimeError):
    """A finite-difference result failed its step-halving consistency check."""


class MetricDegeneracyError(ValueError):
    """A metric stopped being positive definite on the tangent space."""


# ---------------------------------------------------------------------------
# fields and metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VectorField:
    """Tangent vector field given by an ambient-coordinates callable.

    ``kind`` is "linear" (value A x with A skew, hence tangent), or
    "projected-linear" (value E x projected to the tangent space), or
    "general".  ``matrix`` keeps the generator for the two linear kinds.
    """

    kind: str
    func: Callable[[np.ndarray], np.ndarray]
    matrix: np.ndarray | None = None
    name: str = ""

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.func(np.asarray(x, dtype=float))

    def at(self, p: SpherePoint) -> TangentVector:
        return TangentVector(p, self.value(p.coords))


def linear_field(A, name: str = "") -> VectorField:
    """Field x -> A x; A must be skew so the values are tangent everywhere."""
    A = np.array(A, dtype=float)
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A + A.T).max() > 1e-12 * scale:
        raise ValueError("linear_field requires a skew-symmetric generator")
    A.setflags(write=False)
    return VectorField("linear", lambda x: A @ x, matrix=A, name=name)


def projected_linear_field(E, name: str = "") -> VectorField:
    """Field x -> E x - <E x, x> x, the tangential part of a linear map."""
    E = np.array(E, dtype=float)
    E.setflags(write=False)

    def val(x: np.ndarray) -> np.ndarray:
        w = E @ x
        return w - np.dot(w, x) * x

    return VectorField("projected-linear", val, matrix=E, name=name)


def general_field(func: Callable[[np.ndarray], np.ndarray], name: str = "") -> VectorField:
    return VectorField("general", func, matrix=None, name=name)


@dataclass(frozen=True, eq=False)
class MetricField:
    """Riemannian metric as an ambient Gram-operator field."""

    kind: str
    matrix_func: Callable[[np.ndarray], np.ndarray]
    dim: int
    exact_round: bool = False
    name: str = ""

    def matrix_at(self, x: np.ndarray) -> np.ndarray:
        return self.matrix_func(np.asarray(x, dtype=float))


def round_metric(dim: int) -> MetricField:
    """Induced metric of the unit embedding; Gram operator is the identity."""
    eye = np.eye(dim)
    eye.setflags(write=False)
    return MetricField("round", lambda x: eye, dim=dim, exact_round=True, name="round")


def check_positive_definite(metric: MetricField, x: np.ndarray, tol: float = 1e-10) -> None:
    """Raise MetricDegeneracyError if g is not positive definite on T_x."""
    F = orthonormal_tangent_frame(x)
    G = F.T @ metric.matrix_at(x) @ F
    lo = float(np.linalg.eigvalsh(0.5 * (G + G.T))[0])
    if lo <= tol:
        raise MetricDegeneracyError(
            f"metric '{metric.name or metric.kind}' has tangent eigenvalue {lo} <= {tol}")


def g_orthonormal_frame(metric_matrix: np.ndarray, x: np.ndarray,
                        exclude: Sequence[np.ndarray] = ()) -> np.ndarray:
    """g-orthonormal basis of the tangent space, columns of a (d, k) array.

    Vectors in ``exclude`` are orthonormalized first and then dropped, so the
    returned columns span the g-orthogonal complement of their span inside
    T_x.  With no exclusions k = d - 1.
    """
    M = metric_matrix
    seeds = [np.asarray(v, dtype=float) for v in exclude]
    seeds += [c for c in orthonormal_tangent_frame(x).T]
    kept: list[np.ndarray] = []
    n_excluded = 0
    for idx, v in enumerate(seeds):
        w = v.copy()
        for c in kept:
            w = w - (c @ M @ w) * c
        nrm = float(np.sqrt(max(w @ M @ w, 0.0)))
        if idx < len(exclude):
            if nrm < FRAME_RANK_TOL:
                raise ValueError("excluded vectors are g-degenerate or dependent")
            kept.append(w / nrm)
            n_excluded += 1
            continue
        if nrm < FRAME_RANK_TOL:
            continue  # linearly dependent on what we already have
        kept.append(w / nrm)
    cols = kept[n_excluded:]
    if len(cols) != x.shape[0] - 1 - n_excluded:
        raise ValueError("tangent frame construction lost rank")
    if not cols:
        return np.zeros((x.shape[0], 0))
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# structure bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StructureTensors:
    """Pointwise package used by the verification batteries.

    ``nabla_endo`` is the ambient matrix N with N v = (covariant derivative
    of the field along v) for tangent v; ``dxi`` is the ambient matrix D of
    the exterior derivative of the field's metric-dual one-form, with
    d(eta)(u, v) = u^T D v; ``phi_frame``/``phi_ambient`` represent the
    skew endomorphism defined by g(phi u, v) = d(eta)(u, v) / 2.
    """

    point: SpherePoint
    xi: np.ndarray
    metric_matrix: np.ndarray
    frame: np.ndarray
    nabla_endo: np.ndarray
    dxi: np.ndarray
    phi_frame: np.ndarray
    phi_ambient: np.ndarray

    @property
    def dim(self) -> int:
        return self.point.dim

    def g(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ self.metric_matrix @ v)

    def eta(self, u: np.ndarray) -> float:
        """Metric dual one-form of the field, evaluated on an ambient vector."""
        return float(self.xi @ self.metric_matrix @ u)


# ---------------------------------------------------------------------------
# Levi-Civita machinery
# ---------------------------------------------------------------------------

class LeviCivita:
    """Covariant differentiation for a metric field on an odd sphere."""

    def __init__(self, metric: MetricField, fd_step: float = DEFAULT_FD_STEP,
                 atlas: Sequence[Chart] | None = None):
        if fd_step <= 0:
            raise ValueError("fd_step must be positive")
        if fd_step > MAX_FD_STEP:
            # Stereographic charts of the unit sphere have O(1) coordinate
            # scale; a difference step beyond a few hundredths samples the
            # metric far outside the neighbourhood of the base point and the
            # Richardson check cannot detect the failure (both halvings
            # collapse to the same wrong value).
            raise NumericalQualityError(
                f"fd_step={fd_step:g} exceeds the usable chart scale "
                f"(max {MAX_FD_STEP:g} on unit-sphere charts)")
        self.metric = metric
        self.fd_step = float(fd_step)
        self.atlas = tuple(atlas) if atlas is not None else default_atlas(metric.dim)
        self._gamma_cache: dict = {}

    # -- chart-level pieces -------------------------------------------------

    def chart_metric(self, chart: Chart, u: np.ndarray) -> np.ndarray:
        """Metric components g_ij(u) in chart coordinates."""
        J = chart.jacobian(u)
        M = self.metric.matrix_at(chart.point_coords(u))
        return J.T @ M @ J

    def christoffel(self, chart: Chart, u: np.ndarray, step: float | None = None) -> np.ndarray:
        """Christoffel symbols Gamma[k, i, j] in chart coordinates.

        Round metric: closed conformal-factor form.  Otherwise: central
        differences of the chart metric components with the given step.
        """
        m = chart.dim - 1
        if self.metric.exact_round:
            s = float(u @ u) + 1.0
            eye = np.eye(m)
            Gamma = (np.einsum("ik,j->kij", eye, u) + np.einsum("jk,i->kij", eye, u)
                     - np.einsum("ij,k->kij", eye, u))
            return (-2.0 / s) * Gamma
        h = float(step) if step is not None else self.fd_step
        key = (id(chart), h, u.tobytes())
        hit = self._gamma_cache.get(key)
        if hit is not None:
            return hit
        dg = np.empty((m, m, m))  # dg[l, i, j] = d g_ij / d u_l
        for l in range(m):
            e = np.zeros(m)
            e[l] = h
            dg[l] = (self.chart_metric(chart, u + e) - self.chart_metric(chart, u - e)) / (2 * h)
        g = self.chart_metric(chart, u)
        # Gamma_{kij} (lower) = (d_i g_jk + d_j g_ik - d_k g_ij) / 2
        lower = 0.5 * (np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg)
                       - np.einsum("kij->kij", dg))
        Gamma = np.linalg.solve(g, lower.reshape(m, m * m)).reshape(m, m, m)
        if len(self._gamma_cache) > 4096:
            self._gamma_cache.clear()
        self._gamma_cache[key] = Gamma
        return Gamma

    def field_chart_components(self, chart: Chart, u: np.ndarray,
                               fld: VectorField) -> np.ndarray:
        x = chart.point_coords(u)
        return chart.to_chart_vector(u, fld.value(x))

    # -- first covariant derivative ------------------------------------------

    def _nabla_exact(self, fld: VectorField, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Round metric + linear generator: tangential part of the flat derivative."""
        E = fld.matrix
        w = E @ v
        if fld.kind == "projected-linear":
            w = w - np.dot(E @ x, x) * v
        return w - np.dot(w, x) * x

    def _nabla_fd_chart(self, fld: VectorField, chart: Chart, u: np.ndarray,
                        v_chart: np.ndarray, h: float) -> np.ndarray:
        """Chart components of the covariant derivative along v (chart comps)."""
        m = chart.dim - 1
        dX = np.empty((m, m))  # dX[i, k] = d X^k / d u_i
        for i in range(m):
            e = np.zeros(m)
            e[i] = h
            dX[i] = (self.field_chart_components(chart, u + e, fld)
                     - self.field_chart_components(chart, u - e, fld)) / (2 * h)
        Gamma = self.christoffel(chart, u, step=h)
        Xc = self.field_chart_components(chart, u, fld)
        return v_chart @ dX + np.einsum("kij,i,j->k", Gamma, v_chart, Xc)

    def nabla(self, fld: VectorField, point: SpherePoint, direction: np.ndarray,
              method: str = "auto", guard: bool = True) -> np.ndarray:
        """Ambient components of the covariant derivative of ``fld`` along
        ``direction`` (an ambient tangent vector) at ``point``.

        method: "auto" picks the closed form when available, else finite
        differences; "exact" / "fd" force a path.  With ``guard`` the FD path
        is recomputed at half step and must agree to RICHARDSON_REL_TOL.
        """
        x = point.coords
        exact_ok = self.metric.exact_round and fld.matrix is not None \
            and fld.kind in ("linear", "projected-linear")
        if method not in ("auto", "exact", "fd"):
            raise ValueError(f"unknown method {method!r}")
        if method == "exact" and not exact_ok:
            raise ValueError("exact covariant derivative needs round metric and linear field")
        if exact_ok and method != "fd":
            return self._nabla_exact(fld, x, np.asarray(direction, dtype=float))

        chart = chart_for_point(point, self.atlas)
        u = chart.coords(point)
        v_chart = chart.to_chart_vector(u, np.asarray(direction, dtype=float))
        h = self.fd_step
        out = self._nabla_fd_chart(fld, chart, u, v_chart, h)
        if guard:
            out_half = self._nabla_fd_chart(fld, chart, u, v_chart, h / 2)
            rel = np.linalg.norm(out - out_half) / max(1.0, np.linalg.norm(out_half))
            if rel > RICHARDSON_REL_TOL:
                raise NumericalQualityError(
                    f"covariant derivative unstable under step halving: rel drift {rel:.3e} "
                    f"at fd_step={h:.3e}")
            out = out_half
        return chart.push(u, out)

    def nabla_endo(self, fld: VectorField, point: SpherePoint,
                   method: str = "auto", guard: bool = False) -> np.ndarray:
        """Ambient matrix N with N v = nabla_v(field) for tangent v, N x = 0."""
        x = point.coords
        exact_ok = self.metric.exact_round and fld.matrix is not None \
            and fld.kind in ("linear", "projected-linear")
        if exact_ok and method != "fd":
            proj = np.eye(x.shape[0]) - np.outer(x, x)
            E = fld.matrix
            N = proj @ E @ proj
            if fld.kind == "projected-linear":
                N = N - np.dot(E @ x, x) * proj
            return N
        F = orthonormal_tangent_frame(x)
        cols = [self.nabla(fld, point, F[:, j], method=method, guard=guard)
                for j in range(F.shape[1])]
        return np.stack(cols, axis=1) @ F.T

    # -- second covariant derivative ------------------------------------------

    def _chart_nabla_endo(self, fld: VectorField, chart: Chart, u: np.ndarray,
                          h: float) -> np.ndarray:
        """Chart matrix H[k, j] = (nabla_{d_j} field)^k at chart point u."""
        m = chart.dim - 1
        dX = np.empty((m, m))
        for i in range(m):
            e = np.zeros(m)
            e[i] = h
            dX[i] = (self.field_chart_components(chart, u + e, fld)
                     - self.field_chart_components(chart, u - e, fld)) / (2 * h)
        Gamma = self.christoffel(chart, u, step=h)
        Xc = self.field_chart_components(chart, u, fld)
        # H[k, j] = d_j X^k + Gamma^k_{j l} X^l
        return dX.T + np.einsum("kjl,l->kj", Gamma, Xc)

    def second_nabla_frame(self, fld: VectorField, point: SpherePoint,
                           frame: np.ndarray, method: str = "auto") -> np.ndarray:
        """Tensor T[:, i, j] = (nabla^2 field)(frame_i, frame_j), ambient values.

        T(u, v) = nabla_u (nabla field)(v); the closed form on the round
        sphere with field A x is  <A x, v> u - <u, v> A x + corrections that
        vanish for skew A.  The FD path differentiates the chart endomorphism
        of the first covariant derivative: inner step h/3, outer step 10 h.
        """
        x = point.coords
        k = frame.shape[1]
        T = np.empty((x.shape[0], k, k))
        exact_ok = self.metric.exact_round and fld.matrix is not None \
            and fld.kind in ("linear", "projected-linear")
        if exact_ok and method != "fd":
            E = fld.matrix
            Ex = E @ x
            Ex_t = Ex - np.dot(Ex, x) * x
            proj = np.eye(x.shape[0]) - np.outer(x, x)
            for i in range(k):
                u = frame[:, i]
                for j in range(k):
                    v = frame[:, j]
                    # tangential part of (D_u H) v - <u, v> H x
                    val = -np.dot(E @ v, x) * proj @ u - np.dot(u, v) * Ex_t
                    if fld.kind == "projected-linear":
                        val = val - (np.dot(E @ u, x) + np.dot(Ex, u)) * proj @ v
                    T[:, i, j] = val
            return T

        chart = chart_for_point(point, self.atlas)
        u0 = chart.coords(point)
        m = chart.dim - 1
        h_in = self.fd_step / SECOND_DERIV_INNER_SHRINK
        h_out = self.fd_step * SECOND_DERIV_OUTER_GROWTH
        dH = np.empty((m, m, m))  # dH[i, k, j] = d_i H^k_j
        for i in range(m):
            e = np.zeros(m)
            e[i] = h_out
            dH[i] = (self._chart_nabla_endo(fld, chart, u0 + e, h_in)
                     - self._chart_nabla_endo(fld, chart, u0 - e, h_in)) / (2 * h_out)
        H0 = self._chart_nabla_endo(fld, chart, u0, h_in)
        Gamma = self.christoffel(chart, u0, step=h_in)
        # T_chart[k, i, j] = d_i H^k_j + Gamma^k_{i l} H^l_j - Gamma^l_{i j} H^k_l
        T_chart = (np.einsum("ikj->kij", dH)
                   + np.einsum("kil,lj->kij", Gamma, H0)
                   - np.einsum("lij,kl->kij", Gamma, H0))
        J = chart.jacobian(u0)
        frame_chart = np.stack([chart.to_chart_vector(u0, frame[:, i]) for i in range(k)],
                               axis=1)
        return np.einsum("dk,kab,ai,bj->dij", J, T_chart, frame_chart, frame_chart)

    # -- derived structure ----------------------------------------------------

    def lie_metric_frame(self, fld: VectorField, point: SpherePoint,
                         method: str = "auto") -> np.ndarray:
        """Lie derivative of g along the field, as a matrix in a g-orthonormal
        frame; identically zero iff the field is Killing at this point."""
        x = point.coords
        M = self.metric.matrix_at(x)
        N = self.nabla_endo(fld, point, method=method)
        F = g_orthonormal_frame(M, x)
        return F.T @ (N.T @ M + M @ N) @ F

    def structure_at(self, fld: VectorField, point: SpherePoint,
                     method: str = "auto") -> StructureTensors:
        """Pointwise bundle: field value, metric, frame, first covariant
        derivative, two-form of the dual one-form, and the half-two-form
        endomorphism in frame and ambient forms."""
        x = point.coords
        M = self.metric.matrix_at(x)
        xi = fld.value(x)
        N = self.nabla_endo(fld, point, method=method)
        D = N.T @ M - M @ N
        F = g_orthonormal_frame(M, x)
        phi_frame = 0.5 * (F.T @ D @ F).T
        phi_ambient = F @ phi_frame @ F.T @ M
        return StructureTensors(point=point, xi=xi, metric_matrix=M, frame=F,
                                nabla_endo=N, dxi=D, phi_frame=phi_frame,
                                phi_ambient=phi_ambient)

    def dxi_square_eigenvalues(self, fld: VectorField, point: SpherePoint,
                               method: str = "auto") -> np.ndarray:
        """Sorted eigenvalues of the square of the two-form endomorphism
        (g(e u, v) = d(eta)(u, v)); round unit fields give -4 on the
        transverse space and 0 along the field."""
        st = self.structure_at(fld, point, method=method)
        e_frame = (st.frame.T @ st.dxi @ st.frame).T
        vals = np.linalg.eigvals(e_frame @ e_frame)
        return np.sort(vals.real)
