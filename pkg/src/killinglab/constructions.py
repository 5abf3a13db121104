"""Concrete unit-Killing-field structures on odd spheres.

Builders for the example families exercised by the verification batteries:

  * ``build_round``         — round sphere with the standard circle field;
  * ``build_quaternionic``  — round S^(4m+3) with the right-multiplication
                              triple of unit Killing fields;
  * ``build_flip_fixture``  — mixed right/left quaternionic triple on R^8,
                              the (4,4) splitting + sign-flip fixture;
  * ``build_hopf``          — circle bundle over the half-radius 2-sphere;
                              lifting base Killing fields with a quadrature
                              potential reproduces linear ambient fields;
  * ``build_deformed``      — boundary-localized metric deformation keeping
                              the contact structure but breaking the wedge
                              identity and CR integrability (strength c);
  * ``build_irregular``     — metric making a dense-orbit (irrational rate
                              mix) linear field a unit Killing field with
                              the full wedge identity intact.

All generators are ambient matrices; all metrics are Gram-operator fields
(see metrics.MetricField).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import IsometryAlgebra, commutant_skew_basis, so_basis
from .flows import ExactScalar, RotationProfile
from .metrics import (
    MetricDegeneracyError,
    MetricField,
    VectorField,
    general_field,
    linear_field,
    round_metric,
)
from .sphere import SpherePoint

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])

# Quaternion multiplication operators on R^4 ~ (1, i, j, k) coordinates.
# RIGHT_* is q -> q * unit, LEFT_* is q -> unit * q; rights pairwise
# anticommute with R_a R_b = -R_c (cyclic), lefts give L_a L_b = +L_c,
# and every right commutes with every left.
RIGHT_I = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0]])
RIGHT_J = np.array([
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0]])
RIGHT_K = np.array([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0]])
LEFT_I = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0]])
LEFT_J = np.array([
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0]])
LEFT_K = np.array([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0]])


def std_complex_structure(d: int) -> np.ndarray:
    """Block-diagonal rotation by a quarter turn in each coordinate 2-plane."""
    if d % 2 != 0:
        raise ValueError("dimension must be even")
    return np.kron(np.eye(d // 2), J2)


def block_embed(block: np.ndarray, d: int, offset: int) -> np.ndarray:
    out = np.zeros((d, d))
    k = block.shape[0]
    out[offset:offset + k, offset:offset + k] = block
    return out


def unitary_block_basis(n: int) -> list[np.ndarray]:
    """Real 2n x 2n generators of the skew matrices commuting with the
    standard complex structure (complex skew-hermitian matrices)."""
    eye2 = np.eye(2)
    basis = []

    def put(p, q, re, im):
        A = np.zeros((2 * n, 2 * n))
        A[2 * p:2 * p + 2, 2 * q:2 * q + 2] = re * eye2 + im * J2
        return A

    for p in range(n):
        basis.append(put(p, p, 0.0, 1.0))
    for p in range(n):
        for q in range(p + 1, n):
            basis.append(put(p, q, 1.0, 0.0) - put(q, p, 1.0, 0.0))
            basis.append(put(p, q, 0.0, 1.0) + put(q, p, 0.0, 1.0))
    return basis


# ---------------------------------------------------------------------------
# round structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RoundStructure:
    n: int
    dim: int
    metric: MetricField
    field: VectorField
    j0: np.ndarray

    def isometry_algebra(self) -> IsometryAlgebra:
        return IsometryAlgebra(so_basis(self.dim), name=f"so({self.dim})",
                               validate=False)

    def profile(self) -> RotationProfile:
        one = ExactScalar(Fraction(1))
        return RotationProfile(tuple([one] * (self.dim // 2)))


def build_round(n: int) -> RoundStructure:
    """Round S^(2n+1) with the unit Killing field of simultaneous rotation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = 2 * n + 2
    j0 = std_complex_structure(d)
    return RoundStructure(n=n, dim=d, metric=round_metric(d),
                          field=linear_field(j0, name="circle_field"), j0=j0)


# ---------------------------------------------------------------------------
# quaternionic triple
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuaternionicStructure:
    m: int
    dim: int
    metric: MetricField
    fields: tuple[VectorField, VectorField, VectorField]
    generators: tuple[np.ndarray, np.ndarray, np.ndarray]


def build_quaternionic(m: int) -> QuaternionicStructure:
    """Round S^(4m+3) with the right-multiplication triple of Killing fields."""
    if m < 0:
        raise ValueError("m must be >= 0")
    d = 4 * m + 4
    gens = tuple(np.kron(np.eye(m + 1), R) for R in (RIGHT_I, RIGHT_J, RIGHT_K))
    fields = tuple(linear_field(g, name=f"triple_{k}") for k, g in enumerate(gens))
    return QuaternionicStructure(m=m, dim=d, metric=round_metric(d),
                                 fields=fields, generators=gens)


# ---------------------------------------------------------------------------
# splitting fixtures
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlipFixture:
    """Mixed-type anticommuting triple on R^8 with a (4,4) splitting.

    The first quaternionic block carries right multiplications, the second
    left multiplications; the triple product is +Id on the first block and
    -Id on the second, so the plus space has dimension 4 — the smallest a
    genuine anticommuting triple allows (plus-space dimensions are multiples
    of 4, which is why a direct (2,2) triple fixture cannot exist).
    """

    J: tuple[np.ndarray, np.ndarray, np.ndarray]
    metric_matrix: np.ndarray
    projector_plus: np.ndarray
    dim: int


def build_flip_fixture() -> FlipFixture:
    def two_block(right, left):
        out = np.zeros((8, 8))
        out[:4, :4] = right
        out[4:, 4:] = left
        return out

    J = (two_block(RIGHT_I, LEFT_I), two_block(RIGHT_J, LEFT_J),
         two_block(RIGHT_K, LEFT_K))
    proj = np.zeros((8, 8))
    proj[:4, :4] = np.eye(4)
    return FlipFixture(J=J, metric_matrix=np.eye(8), projector_plus=proj, dim=8)


def split_fixture_operator() -> np.ndarray:
    """Direct (2,2) involution for the eigensplit machinery.

    Dimensions (2, 2) cannot arise from an anticommuting triple (see
    FlipFixture), so this fixture feeds the splitting code an explicit
    self-adjoint involution instead.
    """
    return np.diag([1.0, 1.0, -1.0, -1.0])


# ---------------------------------------------------------------------------
# circle bundle over the half-radius 2-sphere
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HopfBundle:
    metric: MetricField
    field: VectorField
    j0: np.ndarray
    base_radius: float
    anchor: np.ndarray       # base point where lift potentials vanish
    quadrature_steps: int

    def vertical_basis(self) -> list[np.ndarray]:
        """Generators commuting with the circle action (fiberwise unitary)."""
        return commutant_skew_basis([self.j0], 4)


def build_hopf(quadrature_steps: int = 10_000) -> HopfBundle:
    j0 = std_complex_structure(4)
    return HopfBundle(metric=round_metric(4), field=linear_field(j0, name="fiber_field"),
                      j0=j0, base_radius=0.5, anchor=np.array([0.0, 0.0, -0.5]),
                      quadrature_steps=quadrature_steps)


def hopf_projection(x: np.ndarray) -> np.ndarray:
    """Quotient map S^3 -> S^2(1/2); fibers are the circle-field orbits."""
    x0, x1, x2, x3 = x
    return np.array([x0 * x2 + x1 * x3,
                     x1 * x2 - x0 * x3,
                     0.5 * (x0 * x0 + x1 * x1 - x2 * x2 - x3 * x3)])


def hopf_differential(x: np.ndarray) -> np.ndarray:
    """Jacobian of hopf_projection, shape (3, 4)."""
    x0, x1, x2, x3 = x
    return np.array([
        [x2, x3, x0, x1],
        [-x3, x2, x1, -x0],
        [x0, x1, -x2, -x3]])


def hopf_section(y: np.ndarray, guard: float = 1e-12) -> np.ndarray:
    """One point in the fiber over y (real-positive gauge on the last pair)."""
    w_sq = 0.5 - y[2]
    if w_sq <= guard:
        return np.array([1.0, 0.0, 0.0, 0.0])
    w = math.sqrt(w_sq)
    return np.array([y[0] / w, y[1] / w, w, 0.0])


def _batched_sections(ys: np.ndarray) -> np.ndarray:
    w = np.sqrt(0.5 - ys[:, 2])
    return np.stack([ys[:, 0] / w, ys[:, 1] / w, w, np.zeros(len(ys))], axis=1)


def _batched_differentials(xs: np.ndarray) -> np.ndarray:
    x0, x1, x2, x3 = xs[:, 0], xs[:, 1], xs[:, 2], xs[:, 3]
    rows = [
        np.stack([x2, x3, x0, x1], axis=1),
        np.stack([-x3, x2, x1, -x0], axis=1),
        np.stack([x0, x1, -x2, -x3], axis=1)]
    return np.stack(rows, axis=1)  # (N, 3, 4)


def horizontal_lift_batch(j0: np.ndarray, xs: np.ndarray, ys: np.ndarray,
                          us: np.ndarray) -> np.ndarray:
    """Horizontal lifts of base vectors us at base points ys to fiber points xs.

    The lift is tangent, orthogonal to the circle field, and pushes forward
    to us; computed by a regularized batched 3x3 solve (the radial base
    direction is added to make the pushforward Gram invertible).
    """
    xis = xs @ j0.T
    dpis = _batched_differentials(xs)
    PH = (np.eye(4)[None, :, :]
          - np.einsum("ni,nj->nij", xs, xs)
          - np.einsum("ni,nj->nij", xis, xis))
    dph = np.einsum("nai,nij->naj", dpis, PH)          # (N, 3, 4)
    G = np.einsum("nai,nbi->nab", dph, dpis)           # (N, 3, 3)
    yhat = 2.0 * ys
    G = G + np.einsum("na,nb->nab", yhat, yhat)
    w3 = np.linalg.solve(G, us[:, :, None])[:, :, 0]
    return np.einsum("nij,naj,na->ni", PH, dpis, w3)


def curvature_form(bundle: HopfBundle, y: np.ndarray, u: np.ndarray,
                   v: np.ndarray) -> float:
    """Two-form on the base measuring the bracket defect of horizontal lifts:
    twice the complex pairing of the lifts at any fiber point."""
    ys = y[None, :]
    x = _batched_sections(ys)
    lu = horizontal_lift_batch(bundle.j0, x, ys, u[None, :])
    lv = horizontal_lift_batch(bundle.j0, x, ys, v[None, :])
    return 2.0 * float((bundle.j0 @ lu[0]) @ lv[0])


def so3_basis() -> list[np.ndarray]:
    return [np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
            np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
            np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])]


def lift_potential(bundle: HopfBundle, base_gen: np.ndarray, y: np.ndarray,
                   n_steps: int | None = None) -> float:
    """Potential f at y with df = -(base field) contracted into the curvature
    two-form, normalized to vanish at the bundle anchor.

    Quadrature: composite Simpson along the great-circle arc from the anchor
    to y.  Base points too close to the anchor's antipode are refused (the
    batteries filter samples instead of integrating through the bad chart).
    """
    if n_steps is None:
        n_steps = bundle.quadrature_steps
    if n_steps % 2 != 0:
        n_steps += 1
    r = bundle.base_radius
    a = bundle.anchor / r
    b = np.asarray(y, dtype=float) / r
    cos_t = float(np.clip(a @ b, -1.0, 1.0))
    theta = math.acos(cos_t)
    if theta < 1e-9:
        return 0.0
    if theta > math.pi - 0.2:
        raise ValueError("base point too close to the anchor antipode; "
                         "filter samples before lifting")
    ts = np.linspace(0.0, 1.0, n_steps + 1)
    sin_t = math.sin(theta)
    gam = (np.outer(np.sin((1 - ts) * theta), a)
           + np.outer(np.sin(ts * theta), b)) * (r / sin_t)
    dgam = (np.outer(-theta * np.cos((1 - ts) * theta), a)
            + np.outer(theta * np.cos(ts * theta), b)) * (r / sin_t)
    xs = _batched_sections(gam)
    x_vals = gam @ base_gen.T
    lift_x = horizontal_lift_batch(bundle.j0, xs, gam, x_vals)
    lift_d = horizontal_lift_batch(bundle.j0, xs, gam, dgam)
    # integrand: F(X, gamma') with F(u, v) = 2 <j0 u*, v*>
    integrand = 2.0 * np.einsum("ni,ni->n", lift_x @ bundle.j0.T, lift_d)
    h = 1.0 / n_steps
    w = np.ones(n_steps + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(-(h / 3.0) * (w @ integrand))


def lifted_field_value(bundle: HopfBundle, base_gen: np.ndarray,
                       x: np.ndarray, n_steps: int | None = None) -> np.ndarray:
    """Value at x of the lift of the base Killing field: horizontal lift of
    the base value plus the potential times the circle field."""
    y = hopf_projection(x)
    f = lift_potential(bundle, base_gen, y, n_steps=n_steps)
    lift = horizontal_lift_batch(bundle.j0, x[None, :], y[None, :],
                                 (base_gen @ y)[None, :])[0]
    return lift + f * (bundle.j0 @ x)


def fit_linear_generator(xs: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares ambient matrix B with B x_i ~ values_i, plus max defect."""
    sol, *_ = np.linalg.lstsq(xs, values, rcond=None)
    B = sol.T
    resid = float(np.abs(xs @ sol - values).max())
    return B, resid


def hopf_sample_filter(points: Sequence[SpherePoint], margin: float = 0.05,
                       ) -> list[SpherePoint]:
    """Drop samples whose base image sits near the anchor antipode (there the
    quadrature path and the section gauge both degenerate)."""
    kept = []
    for p in points:
        y = hopf_projection(p.coords)
        if 0.5 - y[2] > margin:
            kept.append(p)
    return kept


def solve_lift(bundle: HopfBundle, base_gen: np.ndarray,
               points: Sequence[SpherePoint],
               n_steps: int | None = None) -> tuple[np.ndarray, float]:
    """Lift a base Killing generator through sampled potentials and fit the
    resulting ambient field by one linear generator.

    Returns (fitted matrix, max fit defect).  The defect doubles as the
    check that the lift construction lands on a linear — hence genuinely
    Killing — field.
    """
    xs = np.stack([p.coords for p in points])
    vals = np.stack([lifted_field_value(bundle, base_gen, p.coords, n_steps=n_steps)
                     for p in points])
    return fit_linear_generator(xs, vals)


# ---------------------------------------------------------------------------
# boundary-localized deformation (contact structure kept, wedge broken)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DeformedStructure:
    n: int
    c: float
    dim: int
    metric: MetricField
    field: VectorField
    j0: np.ndarray
    x_field: VectorField        # the deformation direction field (vertical part)
    f_of: Callable[[np.ndarray], float]
    support_lo: float           # chi = 0 at |X|^2 <= support_lo
    support_hi: float

    def isometry_algebra(self) -> IsometryAlgebra:
        d = self.dim
        basis = [block_embed(B, d, 0) for B in so_basis(d - 4)] + [self.j0]
        return IsometryAlgebra(basis, name="deformation_invariance", validate=False)


def smooth_transition(t: float) -> float:
    """C-infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    b0 = math.exp(-1.0 / t)
    b1 = math.exp(-1.0 / (1.0 - t))
    return b0 / (b0 + b1)


DEFORM_SUPPORT_LO = 0.05
DEFORM_SUPPORT_HI = 0.5
DEGENERACY_FLOOR = 1e-8


def build_deformed(n: int = 3, c: float = 0.3) -> DeformedStructure:
    """Metric deformation localized where a vertical direction field is large.

    The sphere splits as V1 (+) V2 with V2 the last four coordinates.  The
    direction field X lives in V2, is orthogonal to the circle field, and is
    equivariant under its flow; the metric stretches the plane (X, J0 X) by
    e^(2F) / e^(-2F) with F = c * chi(|X|^2) supported away from X = 0.  The
    circle field stays unit Killing with the same contact form (the metric is
    the round one transported by a field-direction scaling), but the wedge
    identity and CR integrability break on the support of F.

    Rejected as degenerate when the stretch reaches the conditioning floor.
    """
    if n < 3:
        raise ValueError("need n >= 3 so the fixed block V1 has dimension >= 4")
    if math.exp(-2.0 * abs(c)) < DEGENERACY_FLOOR:
        raise MetricDegeneracyError(
            f"deformation strength c={c} makes the metric numerically degenerate "
            f"(stretch factor below {DEGENERACY_FLOOR})")
    d = 2 * n + 2
    j0 = std_complex_structure(d)
    lo, hi = DEFORM_SUPPORT_LO, DEFORM_SUPPORT_HI

    def x_vec(x: np.ndarray) -> np.ndarray:
        x2 = x[-4:]
        n2 = float(x2 @ x2)
        out = np.zeros(d)
        if n2 < 1e-14:
            return out
        w = RIGHT_J @ x2
        xi2 = LEFT_I @ x2
        w = w - (float(w @ xi2) / n2) * xi2
        out[-4:] = w
        return out

    def f_of(x: np.ndarray) -> float:
        v = x_vec(x)
        s = float(v @ v)
        return c * smooth_transition((s - lo) / (hi - lo))

    eye = np.eye(d)

    def matrix_func(x: np.ndarray) -> np.ndarray:
        F = f_of(x)
        if F == 0.0:
            return eye
        X = x_vec(x)
        nx = float(np.linalg.norm(X))
        Xh = X / nx
        Yh = (j0 @ X) / nx
        return (eye + (math.exp(-2.0 * F) - 1.0) * np.outer(Xh, Xh)
                + (math.exp(2.0 * F) - 1.0) * np.outer(Yh, Yh))

    metric = MetricField("deformed", matrix_func, dim=d, exact_round=False,
                         name=f"deformed(c={c})")
    return DeformedStructure(
        n=n, c=c, dim=d, metric=metric,
        field=linear_field(j0, name="circle_field"), j0=j0,
        x_field=general_field(x_vec, name="deformation_direction"),
        f_of=f_of, support_lo=lo, support_hi=hi)


# ---------------------------------------------------------------------------
# inhomogeneous-rate unit Killing structure (dense generic orbits)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IrregularStructure:
    n: int
    a: ExactScalar
    dim: int
    metric: MetricField
    field: VectorField
    j0: np.ndarray
    j1: np.ndarray

    def profile(self) -> RotationProfile:
        one = ExactScalar(Fraction(1))
        first = ExactScalar(self.a.p + 1, self.a.q, self.a.tag)
        return RotationProfile((first,) + (one,) * ((self.dim - 2) // 2))

    def isometry_algebra(self) -> IsometryAlgebra:
        d = self.dim
        basis = [block_embed(J2, d, 0)]
        basis += [block_embed(B, d, 2) for B in unitary_block_basis((d - 2) // 2)]
        return IsometryAlgebra(basis, name="irregular_invariance", validate=False)


def build_irregular(n: int = 2, a: ExactScalar | None = None) -> IrregularStructure:
    """Metric on S^(2n+1) making the field x -> (J0 + a J1) x unit Killing.

    J1 rotates only the first coordinate pair, so the field's rotation rates
    are (1 + a, 1, ..., 1); with irrational a the generic orbits are dense in
    2-tori while the structure identities (wedge included) all hold.  The
    metric rescales the contact splitting of the new generator: unit along
    it, conformal factor 1/(1 + a|x_1|^2) transversally.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if a is None:
        a = ExactScalar(Fraction(-1), Fraction(1), "sqrt2")  # sqrt(2) - 1
    a_val = a.value()
    if a_val <= -0.99:
        raise MetricDegeneracyError("rate offset a <= -0.99 degenerates the metric")
    d = 2 * n + 2
    j0 = std_complex_structure(d)
    j1 = block_embed(J2, d, 0)
    gen = j0 + a_val * j1
    eye = np.eye(d)
    coef = 2.0 * a_val + a_val * a_val

    def matrix_func(x: np.ndarray) -> np.ndarray:
        x1sq = float(x[0] * x[0] + x[1] * x[1])
        alpha = 1.0 / (1.0 + a_val * x1sq)
        t0 = j0 @ x
        t = gen @ x
        t_sq = 1.0 + coef * x1sq
        outer00 = np.outer(t0, t0)
        cross = np.outer(t, t0)
        return (alpha * alpha * outer00
                + alpha * (eye - alpha * (cross + cross.T)
                           + alpha * alpha * t_sq * outer00))

    metric = MetricField("irregular", matrix_func, dim=d, exact_round=False,
                         name=f"irregular(a={a})")
    return IrregularStructure(n=n, a=a, dim=d, metric=metric,
                              field=linear_field(gen, name="mixed_rate_field"),
                              j0=j0, j1=j1)
