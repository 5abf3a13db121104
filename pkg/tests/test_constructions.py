"""Builders: round, quaternionic triple, flip fixture, circle-bundle lift,
boundary-localized deformation, and the inhomogeneous-rate structure."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from killinglab import (
    LeviCivita,
    MetricDegeneracyError,
    build_deformed,
    build_flip_fixture,
    build_hopf,
    build_irregular,
    build_quaternionic,
    build_round,
    check_killing,
    check_kcontact,
    check_nijenhuis,
    check_sasakian,
    check_unit_length,
    classify,
    sample_sphere,
    standard_decomposition,
)
from killinglab.algebra import centralizer_check, field_bracket
from killinglab.constructions import (
    curvature_form,
    fit_linear_generator,
    hopf_differential,
    hopf_projection,
    hopf_sample_filter,
    hopf_section,
    lift_potential,
    lifted_field_value,
    so3_basis,
    solve_lift,
    split_fixture_operator,
)
from killinglab.verify import (
    check_contact_form_preserved,
    check_flip_quaternionic,
    check_transverse_derivative,
    involution_split,
)


# -- round ---------------------------------------------------------------------

def test_build_round_shapes():
    st = build_round(2)
    assert st.dim == 6
    assert np.abs(st.j0 @ st.j0 + np.eye(6)).max() == 0.0
    with pytest.raises(ValueError):
        build_round(0)


def test_round_profile_is_all_ones():
    st = build_round(3)
    assert st.profile().values() == (1.0,) * 4
    assert classify(st.profile()).kind == "regular"


# -- quaternionic triple ---------------------------------------------------------

def test_quaternionic_generator_relations():
    st = build_quaternionic(1)
    g = st.generators
    eye = np.eye(8)
    for a in range(3):
        assert np.abs(g[a] @ g[a] + eye).max() == 0.0
        for b in range(a + 1, 3):
            assert np.abs(g[a] @ g[b] + g[b] @ g[a]).max() == 0.0
    # brackets close onto the third generator with one uniform sign
    br01 = field_bracket(g[0], g[1])
    assert min(np.abs(br01 - 2.0 * g[2]).max(),
               np.abs(br01 + 2.0 * g[2]).max()) == 0.0


def test_quaternionic_rejects_negative_m():
    with pytest.raises(ValueError):
        build_quaternionic(-1)


def test_quaternionic_triple_is_killing_s3_s7():
    for m in (0, 1):
        st = build_quaternionic(m)
        lc = LeviCivita(st.metric)
        pts = sample_sphere((st.dim - 2) // 2, 15, seed=42).points
        for f in st.fields:
            assert check_killing(lc, f, pts, tol=1e-12).passed
            assert check_unit_length(lc, f, pts).passed


# -- flip fixture ----------------------------------------------------------------

def test_flip_fixture_repair():
    fx = build_flip_fixture()
    checks, extras = check_flip_quaternionic(fx.J, fx.metric_matrix,
                                             fx.projector_plus, tol=1e-12)
    by_name = {c.name: c for c in checks}
    assert all(c.as_expected for c in checks)
    assert by_name["unflipped_uniform_cyclic"].expected == "fail"
    assert by_name["unflipped_uniform_cyclic"].max_residual >= 0.5
    assert by_name["flipped_uniform_cyclic"].max_residual < 1e-12
    assert extras["flipped_sign"] in (-1, +1)
    assert extras["unflipped_best_sign"] is None


def test_flip_fixture_plus_space_dimension():
    fx = build_flip_fixture()
    P = fx.J[0] @ fx.J[1] @ fx.J[2]
    split = involution_split(P)
    assert (split.dim_plus, split.dim_minus) == (4, 4)
    assert np.abs(fx.projector_plus @ P - fx.projector_plus).max() < 1e-12


def test_split_fixture_operator_two_by_two():
    split = involution_split(split_fixture_operator())
    assert (split.dim_plus, split.dim_minus) == (2, 2)
    assert split.ok


# -- circle bundle ----------------------------------------------------------------

def test_hopf_projection_lands_on_half_sphere():
    xs = sample_sphere(1, 30, seed=42).arrays()
    for x in xs:
        y = hopf_projection(x)
        assert abs(np.linalg.norm(y) - 0.5) < 1e-12


def test_hopf_projection_constant_on_fibers(hopf):
    x = sample_sphere(1, 1, seed=3).arrays()[0]
    from scipy.linalg import expm
    for t in (0.4, 1.1, 2.9):
        moved = expm(t * hopf.j0) @ x
        assert np.abs(hopf_projection(moved) - hopf_projection(x)).max() < 1e-12


def test_hopf_section_is_a_section():
    for y in (np.array([0.1, 0.2, 0.3]), np.array([0.0, 0.0, 0.5 - 1e-3])):
        y = 0.5 * y / np.linalg.norm(y)
        x = hopf_section(y)
        assert abs(np.linalg.norm(x) - 1.0) < 1e-12
        assert np.abs(hopf_projection(x) - y).max() < 1e-12


def test_hopf_differential_kills_fiber(hopf):
    x = sample_sphere(1, 1, seed=8).arrays()[0]
    assert np.abs(hopf_differential(x) @ (hopf.j0 @ x)).max() < 1e-12


def test_curvature_is_minus_two_times_area(hopf):
    rng = np.random.default_rng(5)
    for _ in range(4):
        x = rng.standard_normal(4)
        y = hopf_projection(x / np.linalg.norm(x))
        u = rng.standard_normal(3)
        u -= (u @ y) * y / (y @ y)
        v = rng.standard_normal(3)
        v -= (v @ y) * y / (y @ y)
        F = curvature_form(hopf, y, u, v)
        area = float((y / np.linalg.norm(y)) @ np.cross(u, v))
        assert F == pytest.approx(-2.0 * area, abs=1e-12)


def test_solve_lift_fits_linear_killing(hopf):
    pts = hopf_sample_filter(sample_sphere(1, 60, seed=42).points)
    assert len(pts) >= 30
    lc = LeviCivita(hopf.metric)
    for gen in so3_basis():
        B, defect = solve_lift(hopf, gen, pts[:30])
        assert defect < 1e-8
        assert np.abs(B + B.T).max() < 1e-10  # skew: a genuine isometry generator
        from killinglab.metrics import linear_field
        lifted = linear_field(0.5 * (B - B.T), name="lift")
        probe = sample_sphere(1, 10, seed=7).points
        assert check_killing(lc, lifted, probe, tol=1e-12).passed


def test_lift_potential_path_independence(hopf):
    """Recompute the potential through a displaced anchor: values must agree
    up to one global constant (fixed by evaluating at the new anchor)."""
    pts = hopf_sample_filter(sample_sphere(1, 40, seed=42).points)
    gen = so3_basis()[0]
    waypoint = hopf_projection(pts[1].coords)
    alt = replace(hopf, anchor=waypoint)
    leg0 = lift_potential(hopf, gen, waypoint)
    worst = 0.0
    tested = 0
    for p in pts[2:]:
        y = hopf_projection(p.coords)
        cos_w = float(waypoint @ y) / (0.5 * 0.5)
        if cos_w < -0.8:
            continue  # near the alternate anchor's antipode: quadrature refuses
        direct = lift_potential(hopf, gen, y)
        two_leg = leg0 + lift_potential(alt, gen, y)
        worst = max(worst, abs(direct - two_leg))
        tested += 1
        if tested >= 6:
            break
    assert tested >= 4
    assert worst < 1e-6


def test_lift_refuses_antipode(hopf):
    gen = so3_basis()[0]
    antipode = -hopf.anchor
    with pytest.raises(ValueError, match="antipode"):
        lift_potential(hopf, gen, antipode)


def test_pushdown_matches_base(hopf):
    """d(projection) maps each fitted lift back onto its base generator."""
    pts = hopf_sample_filter(sample_sphere(1, 50, seed=42).points)[:25]
    for gen in so3_basis():
        B, _ = solve_lift(hopf, gen, pts)
        for p in pts[:8]:
            x = p.coords
            got = hopf_differential(x) @ (B @ x)
            want = gen @ hopf_projection(x)
            assert np.abs(got - want).max() < 1e-8


def test_pushdown_kernel_is_fiber_direction(hopf):
    """Among {lift_1, lift_2, lift_3, fiber field}, the pushdown annihilates
    exactly the fiber coordinate: the lift splits the projection."""
    pts = hopf_sample_filter(sample_sphere(1, 50, seed=42).points)[:25]
    fits = [solve_lift(hopf, gen, pts)[0] for gen in so3_basis()]
    rows = []
    for B in fits + [hopf.j0]:
        coef = []
        for p in pts[:10]:
            x = p.coords
            coef.append(hopf_differential(x) @ (B @ x))
        rows.append(np.concatenate(coef))
    A = np.stack(rows)  # (4, 30): pushdown action of the four generators
    u, sv, _ = np.linalg.svd(A)
    assert sv[2] > 0.5          # the three lifts push down onto independent rotations
    assert sv[3] < 1e-10        # exactly one combination dies...
    kvec = u[:, -1]
    e_fiber = np.array([0.0, 0.0, 0.0, 1.0])
    assert min(np.abs(kvec - e_fiber).max(),
               np.abs(kvec + e_fiber).max()) < 1e-8  # ...and it is the fiber field


def test_lift_brackets_close_mod_vertical(hopf):
    pts = hopf_sample_filter(sample_sphere(1, 50, seed=42).points)[:25]
    fits = [solve_lift(hopf, gen, pts)[0] for gen in so3_basis()]
    span = np.stack([M.ravel() for M in fits + [hopf.j0]], axis=1)
    for a, b in ((0, 1), (1, 2), (2, 0)):
        br = field_bracket(fits[a], fits[b])
        _, res, *_ = np.linalg.lstsq(span, br.ravel(), rcond=None)
        resid = float(np.sqrt(res[0])) if res.size else 0.0
        assert resid < 1e-8


# -- boundary-localized deformation -----------------------------------------------

def test_build_deformed_validation():
    with pytest.raises(ValueError):
        build_deformed(n=2)
    with pytest.raises(MetricDegeneracyError):
        build_deformed(n=3, c=25.0)


def test_deformed_metric_is_round_off_support(deformed):
    xs = sample_sphere(deformed.n, 200, seed=42).arrays()
    off = [x for x in xs if deformed.f_of(x) == 0.0]
    assert off, "no off-support samples at this scale"
    for x in off[:10]:
        assert np.array_equal(deformed.metric.matrix_at(x), np.eye(deformed.dim))


def test_deformed_field_still_unit_killing(deformed):
    lc = LeviCivita(deformed.metric)
    pts = sample_sphere(deformed.n, 25, seed=42).points
    assert check_unit_length(lc, deformed.field, pts, tol=1e-10).passed
    assert check_killing(lc, deformed.field, pts, tol=1e-6).passed
    assert check_kcontact(lc, deformed.field, pts, tol=1e-6).passed


def test_deformed_contact_form_preserved(deformed, round3, lc_round3):
    lc = LeviCivita(deformed.metric)
    pts = sample_sphere(deformed.n, 20, seed=42).points
    r = check_contact_form_preserved(lc, lc_round3, deformed.field, pts, tol=1e-8)
    assert r.passed


def test_deformed_transverse_scaling(deformed):
    from killinglab.cli import _deformed_scaling_check
    lc = LeviCivita(deformed.metric)
    pts = sample_sphere(deformed.n, 25, seed=42).points
    assert _deformed_scaling_check(lc, deformed, pts, tol=1e-6).passed


def test_deformed_breaks_wedge_identity_on_support(deformed):
    lc = LeviCivita(deformed.metric)
    xs = sample_sphere(deformed.n, 120, seed=42)
    on = [p for p in xs.points if deformed.f_of(p.coords) > 0.1 * deformed.c]
    assert len(on) >= 5
    r = check_sasakian(lc, deformed.field, on[:12], tol=1e-5,
                       expected="fail", fail_floor=1e-2)
    assert r.as_expected
    assert r.max_residual > 1e-2


def test_deformed_breaks_cr_integrability(deformed):
    lc = LeviCivita(deformed.metric)
    xs = sample_sphere(deformed.n, 120, seed=42)
    on = [p for p in xs.points if deformed.f_of(p.coords) > 0.1 * deformed.c]
    r = check_nijenhuis(lc, deformed.field, on[:12], expected="fail",
                        fail_floor=1e-3)
    assert r.as_expected


def test_deformed_invariance_algebra(deformed):
    alg = deformed.isometry_algebra()
    assert alg.dim == (deformed.dim - 4) * (deformed.dim - 5) // 2 + 1
    lc = LeviCivita(deformed.metric)
    pts = sample_sphere(deformed.n, 10, seed=42).points
    from killinglab.metrics import linear_field
    for B in alg.basis[:4] + [alg.basis[-1]]:
        fld = linear_field(B, name="invariance")
        assert check_killing(lc, fld, pts, tol=1e-5).passed


def test_deformed_decomposition(deformed):
    dec = standard_decomposition(deformed.isometry_algebra(), deformed.j0)
    assert [(round(r, 9), m) for r, m in dec.summary()] == [(0.0, 5), (2.0, 2)]


# -- inhomogeneous-rate structure ---------------------------------------------------

def test_irregular_default_rate(irregular):
    assert irregular.a.tag == "sqrt2"
    assert irregular.a.value() == pytest.approx(math.sqrt(2) - 1)
    assert irregular.profile().values()[0] == pytest.approx(math.sqrt(2))


def test_irregular_field_identities(irregular):
    lc = LeviCivita(irregular.metric)
    pts = sample_sphere(irregular.n, 25, seed=42).points
    assert check_unit_length(lc, irregular.field, pts, tol=1e-10).passed
    assert check_killing(lc, irregular.field, pts, tol=1e-6).passed
    assert check_kcontact(lc, irregular.field, pts, tol=1e-6).passed
    assert check_sasakian(lc, irregular.field, pts, tol=1e-5).passed
    assert check_nijenhuis(lc, irregular.field, pts[:12]).passed


def test_irregular_transverse_derivative(irregular):
    lc = LeviCivita(irregular.metric)
    pts = sample_sphere(irregular.n, 20, seed=42).points
    r = check_transverse_derivative(lc, irregular.field, irregular.j0, pts,
                                    tol=1e-5)
    assert r.passed


def test_irregular_flow_is_dense_in_two_torus(irregular):
    c = classify(irregular.profile())
    assert c.kind == "irregular"
    assert c.closure_torus_dim == 2


def test_irregular_central_pair(irregular):
    out = centralizer_check(irregular.isometry_algebra(),
                            [irregular.j0, irregular.j1])
    assert out["ok"]


def test_irregular_decomposition_single_block(irregular):
    dec = standard_decomposition(irregular.isometry_algebra(),
                                 irregular.field.matrix)
    assert [(round(r, 9), m) for r, m in dec.summary()] == [(0.0, 5)]


def test_irregular_rejects_degenerate_offset():
    from killinglab import ExactScalar
    from fractions import Fraction
    with pytest.raises(MetricDegeneracyError):
        build_irregular(a=ExactScalar(Fraction(-999, 1000)))
