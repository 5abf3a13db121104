"""Command-line surface: build example structures, run verification batteries,
decompose isometry algebras, classify flows; emit text or JSON reports.

Exit codes: 0 all checks as expected, 1 some check not as expected, 2 usage
error (unknown selector, malformed rate, bad parameters), 3 numerical-quality
failure (untrustworthy finite differences, degenerate metric or clustering).

Every battery declares which checks are expected to pass and which are
expected to fail (with a residual floor), so controlled breakage — the whole
point of the deformed examples — is a first-class green result.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import verify
from .algebra import (
    DegenerateClusterError,
    centralizer_check,
    eigenfield_residuals,
    field_bracket,
    standard_decomposition,
)
from .constructions import (
    build_deformed,
    build_flip_fixture,
    build_hopf,
    build_irregular,
    build_quaternionic,
    build_round,
    hopf_differential,
    hopf_projection,
    hopf_sample_filter,
    lift_potential,
    so3_basis,
    solve_lift,
)
from .constructions import J2
from .flows import RotationProfile, classify, numeric_orbit_probe, parse_rate
from .metrics import (
    LeviCivita,
    MetricDegeneracyError,
    NumericalQualityError,
    linear_field,
)
from .report import CheckResult, VerificationReport
from .sphere import sample_sphere

EXIT_OK = 0
EXIT_CHECKS = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

VERIFY_EXAMPLES = ("round", "quaternionic", "hopf-lift", "gF", "irregular")
DECOMPOSE_EXAMPLES = ("round", "gF", "irregular")


@dataclass
class RunConfig:
    """Effective run parameters; echoed verbatim into every report."""

    example: str = "round"
    n: int = 2
    m: int = 1
    c: float = 0.3
    a: str = "irr:sqrt2m1"
    seed: int = 42
    samples: int = 200
    fd_step: float = 1e-4
    format: str = "text"
    no_timestamp: bool = False


_INT_KEYS = {"n", "m", "seed", "samples"}
_FLOAT_KEYS = {"c", "fd_step"}
_BOOL_KEYS = {"no_timestamp"}


def load_config_file(path: str) -> dict:
    """Flat key=value lines mirroring the flags; '#' starts a comment."""
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {raw.strip()!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key in _INT_KEYS:
                out[key] = int(val)
            elif key in _FLOAT_KEYS:
                out[key] = float(val)
            elif key in _BOOL_KEYS:
                out[key] = val.lower() in ("1", "true", "yes", "on")
            else:
                out[key] = val
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        file_vals = load_config_file(args.config)
        unknown = set(file_vals) - set(asdict(cfg)) - {"rates", "horizon"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **{k: v for k, v in file_vals.items()
                              if k in asdict(cfg)})
    overrides = {}
    for key in asdict(cfg):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if getattr(args, "no_timestamp", False):
        overrides["no_timestamp"] = True
    return replace(cfg, **overrides)


def _merge(name: str, parts: list[CheckResult], tol: float,
           detail: str = "") -> CheckResult:
    """Aggregate same-shaped pass checks: max of maxes, mean of means."""
    return CheckResult(
        name=name,
        max_residual=max(p.max_residual for p in parts),
        mean_residual=float(np.mean([p.mean_residual for p in parts])),
        tolerance=tol,
        detail=detail or "; ".join(sorted({p.detail for p in parts if p.detail})),
    )


# ---------------------------------------------------------------------------
# verification batteries
# ---------------------------------------------------------------------------

def _battery_round(cfg: RunConfig) -> VerificationReport:
    rs = build_round(cfg.n)
    lc = LeviCivita(rs.metric, fd_step=cfg.fd_step)
    pts = sample_sphere(cfg.n, cfg.samples, cfg.seed).points
    verify.covariant_canary(lc, rs.field, pts[0])

    rep = VerificationReport(title=f"round unit Killing structure on S^{2 * cfg.n + 1}",
                             config=asdict(cfg))
    rep.add(verify.check_tangency(rs.field, pts))
    rep.add(verify.check_unit_length(lc, rs.field, pts))
    rep.add(verify.check_killing(lc, rs.field, pts, tol=verify.EXACT_TOL))
    rep.add(verify.check_sasakian(lc, rs.field, pts, tol=verify.EXACT_TOL))
    rep.add(verify.check_kcontact(lc, rs.field, pts))
    reference = [-4.0] * (2 * cfg.n) + [0.0]
    rep.add(verify.check_dxi_spectrum(lc, rs.field, pts, reference=reference,
                                      tol=1e-8))
    rep.add(verify.check_nijenhuis(lc, rs.field, pts))

    alg = rs.isometry_algebra()
    dec = standard_decomposition(alg, rs.j0)
    nz = [k for k, lam in enumerate(dec.rates) if lam > 0.5][0]
    worst = {"orthogonality": 0.0, "bracket_identity": 0.0, "eigenvalue_identity": 0.0}
    for a_mat in dec.blocks[nz]:
        res = eigenfield_residuals(lc, rs.field, a_mat, pts, rate=dec.rates[nz])
        for key in worst:
            worst[key] = max(worst[key], res[key])
    rep.add(CheckResult(name="eigenfield_identities",
                        max_residual=max(worst.values()),
                        mean_residual=float(np.mean(list(worst.values()))),
                        tolerance=1e-6,
                        detail="orthogonality + bracket + eigenvalue identities "
                               "over the whole nonzero-rate block"))
    rep.extras["decomposition"] = [(round(lam, 9), dim)
                                   for lam, dim in dec.summary()]
    return rep


def _battery_quaternionic(cfg: RunConfig) -> VerificationReport:
    qs = build_quaternionic(cfg.m)
    lc = LeviCivita(qs.metric, fd_step=cfg.fd_step)
    pts = sample_sphere(2 * cfg.m + 1, cfg.samples, cfg.seed).points
    verify.covariant_canary(lc, qs.fields[0], pts[0])

    rep = VerificationReport(
        title=f"right-multiplication contact triple on S^{4 * cfg.m + 3}",
        config=asdict(cfg))
    rep.add(verify.check_triple_orthonormality(lc, qs.fields, pts, tol=1e-10))
    rep.add(verify.check_triple_brackets(qs.fields, tol=1e-12))
    rep.add(_merge("triple_killing",
                   [verify.check_killing(lc, f, pts, tol=verify.EXACT_TOL)
                    for f in qs.fields], tol=verify.EXACT_TOL))
    rep.add(_merge("triple_wedge_second_derivative",
                   [verify.check_sasakian(lc, f, pts, tol=verify.EXACT_TOL)
                    for f in qs.fields], tol=verify.EXACT_TOL))
    rep.add(verify.check_triple_products(lc, qs.fields, pts, tol=1e-10,
                                         variant="aligned"))
    rep.add(verify.check_triple_products(lc, qs.fields, pts, tol=1e-10,
                                         variant="transposed", expected="fail",
                                         fail_floor=1e-2,
                                         name="triple_products_transposed"))
    rep.add(verify.check_anticommutators(lc, qs.fields, pts, tol=1e-10))
    rep.add(verify.check_squares(lc, qs.fields, pts, tol=1e-10))
    rep.add(verify.check_pair_completion(lc, qs.fields[0], qs.fields[1], pts,
                                         tol=1e-6))

    split_pts = pts[:min(len(pts), 10)]
    worst = 0.0
    dims = set()
    for p in split_pts:
        sp = verify.horizontal_split(lc, qs.fields, p)
        dims.add((sp.split.dim_plus, sp.split.dim_minus))
        worst = max(worst, sp.split.involution_residual, sp.split.symmetry_residual,
                    sp.invariance_residual, sp.commutation_residual,
                    float(sp.split.dim_plus))
    rep.add(CheckResult(name="horizontal_split_plus_trivial", max_residual=worst,
                        mean_residual=worst, tolerance=1e-8,
                        detail=f"(dim+, dim-) over samples: {sorted(dims)}"))

    fixture = build_flip_fixture()
    flip_checks, flip_extras = verify.check_flip_quaternionic(
        fixture.J, fixture.metric_matrix, fixture.projector_plus)
    for chk in flip_checks:
        rep.add(chk)
    rep.extras["flip_fixture"] = flip_extras
    return rep


def _battery_hopf(cfg: RunConfig) -> VerificationReport:
    bundle = build_hopf()
    rs = build_round(1)
    lc = LeviCivita(rs.metric, fd_step=cfg.fd_step)
    pts = sample_sphere(1, cfg.samples, cfg.seed).points
    verify.covariant_canary(lc, rs.field, pts[0])
    kept = hopf_sample_filter(pts)

    rep = VerificationReport(title="circle-bundle lift of base rotation fields",
                             config=asdict(cfg))
    gens = so3_basis()
    fits = [solve_lift(bundle, g, kept) for g in gens]
    mats = [B for B, _ in fits]
    defect = max(d for _, d in fits)
    rep.add(CheckResult(name="lift_fit_defect", max_residual=defect,
                        mean_residual=float(np.mean([d for _, d in fits])),
                        tolerance=1e-8,
                        detail="largest pointwise defect of the linear fit"))
    skew = max(float(np.abs(B + B.T).max()) for B in mats)
    rep.add(CheckResult(name="lift_skewness", max_residual=skew,
                        mean_residual=skew, tolerance=1e-10))
    rep.add(_merge("lift_killing",
                   [verify.check_killing(lc, linear_field(B, name=f"lift{i}"),
                                         pts, tol=1e-5)
                    for i, B in enumerate(mats)], tol=1e-5))

    # path independence: direct potential vs a two-leg path through a waypoint
    waypoint = hopf_projection(kept[1].coords)
    alt = replace(bundle, anchor=waypoint)
    leg0 = lift_potential(bundle, gens[0], waypoint)
    worst_path = 0.0
    n_path = 0
    for p in kept[2:]:
        y = hopf_projection(p.coords)
        cos_w = float(y @ waypoint) / bundle.base_radius**2
        if cos_w < -0.8:
            continue  # keep the second leg away from the waypoint's antipode
        direct = lift_potential(bundle, gens[0], y)
        two_leg = leg0 + lift_potential(alt, gens[0], y)
        worst_path = max(worst_path, abs(direct - two_leg))
        n_path += 1
        if n_path >= 8:
            break
    rep.add(CheckResult(name="potential_path_independence", max_residual=worst_path,
                        mean_residual=worst_path, tolerance=1e-6,
                        detail=f"two-leg vs direct quadrature at {n_path} targets"))

    # pushdown: fitted lifts project onto the base generators; the kernel of
    # the projection on span{lifts, circle generator} is the circle generator
    xs = np.stack([p.coords for p in kept[:40]])
    ys = np.stack([hopf_projection(x) for x in xs])

    def pushdown_matrix(B: np.ndarray) -> tuple[np.ndarray, float]:
        vals = np.stack([hopf_differential(x) @ (B @ x) for x in xs])
        sol, *_ = np.linalg.lstsq(ys, vals, rcond=None)
        P = sol.T
        return P, float(np.abs(ys @ sol - vals).max())

    basis = mats + [bundle.j0]
    downs = [pushdown_matrix(B) for B in basis]
    push_res = max(r for _, r in downs)
    agree = max(float(np.abs(downs[i][0] - gens[i]).max()) for i in range(3))
    rep.add(CheckResult(name="pushdown_matches_base", max_residual=max(push_res, agree),
                        mean_residual=max(push_res, agree), tolerance=1e-8,
                        detail="fitted lifts project onto the requested rotations"))
    stacked = np.stack([d[0].ravel() for d, _ in zip(downs, basis)])
    u, sv, _ = np.linalg.svd(stacked)
    # left null vector = coefficients (in the {lift1..3, circle} basis) of the
    # combination the pushdown annihilates; it must be the circle generator
    kvec = u[:, -1]
    e_vert = np.array([0.0, 0.0, 0.0, 1.0])
    k_align = min(float(np.abs(kvec - e_vert).max()),
                  float(np.abs(kvec + e_vert).max()))
    k_res = max(float(sv[3]), k_align)
    rep.add(CheckResult(name="pushdown_kernel_is_vertical", max_residual=float(k_res),
                        mean_residual=float(k_res), tolerance=1e-6,
                        detail=f"singular values {np.round(sv, 8).tolist()}"))

    # brackets close modulo the vertical direction
    worst_vert = 0.0
    for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        C = field_bracket(mats[i], mats[j])
        base_br = field_bracket(gens[i], gens[j])
        coef = np.array([np.tensordot(base_br, g) / np.tensordot(g, g)
                         for g in gens])
        D = C - sum(cc * B for cc, B in zip(coef, mats))
        lam = np.tensordot(D, bundle.j0) / np.tensordot(bundle.j0, bundle.j0)
        worst_vert = max(worst_vert, float(np.abs(D - lam * bundle.j0).max()))
    rep.add(CheckResult(name="brackets_close_mod_vertical", max_residual=worst_vert,
                        mean_residual=worst_vert, tolerance=1e-8))
    rep.extras["kept_samples"] = len(kept)
    return rep


def _deformed_scaling_check(lc: LeviCivita, ds, pts, tol: float) -> CheckResult:
    """Pinned transverse scaling: phi X = e^{-2F} J0 X and phi J0 X = -e^{2F} X."""
    res = []
    for p in pts:
        x = p.coords
        X = ds.x_field.value(x)
        if float(X @ X) < 1e-12:
            continue
        F = ds.f_of(x)
        st = lc.structure_at(ds.field, p)
        r1 = float(np.abs(st.phi_ambient @ X - np.exp(-2 * F) * (ds.j0 @ X)).max())
        r2 = float(np.abs(st.phi_ambient @ (ds.j0 @ X) + np.exp(2 * F) * X).max())
        res.append(max(r1, r2))
    arr = np.asarray(res if res else [np.inf])
    return CheckResult(name="deformed_transverse_scaling",
                       max_residual=float(arr.max()),
                       mean_residual=float(arr.mean()), tolerance=tol,
                       detail=f"{len(res)} samples carry the transverse plane")


def _battery_deformed(cfg: RunConfig) -> VerificationReport:
    ds = build_deformed(n=cfg.n, c=cfg.c)
    lc = LeviCivita(ds.metric, fd_step=cfg.fd_step)
    lc_round = LeviCivita(build_round(cfg.n).metric, fd_step=cfg.fd_step)
    pts = sample_sphere(cfg.n, cfg.samples, cfg.seed).points
    verify.covariant_canary(lc, ds.field, pts[0])

    rep = VerificationReport(
        title=f"boundary-localized deformation on S^{2 * cfg.n + 1} (c={cfg.c})",
        config=asdict(cfg))
    rep.add(verify.check_tangency(ds.field, pts))
    rep.add(verify.check_unit_length(lc, ds.field, pts))
    rep.add(verify.check_killing(lc, ds.field, pts, tol=1e-6))
    rep.add(verify.check_kcontact(lc, ds.field, pts))
    rep.add(verify.check_contact_form_preserved(lc, lc_round, ds.field, pts,
                                                tol=1e-8))
    reference = [-4.0] * (2 * cfg.n) + [0.0]
    rep.add(verify.check_dxi_spectrum(lc, ds.field, pts, reference=reference,
                                      tol=1e-5))
    rep.add(_deformed_scaling_check(lc, ds, pts, tol=1e-6))
    rep.add(verify.check_sasakian(lc, ds.field, pts, tol=verify.FD_TOL,
                                  expected="fail", fail_floor=1e-2))
    rep.add(verify.check_nijenhuis(lc, ds.field, pts, expected="fail",
                                   fail_floor=1e-3))

    alg = ds.isometry_algebra()
    rep.add(_merge("invariance_algebra_killing",
                   [verify.check_killing(lc, linear_field(B, name=f"inv{i}"),
                                         pts[:min(len(pts), 40)], tol=1e-5)
                    for i, B in enumerate(alg.basis)], tol=1e-5))
    dec = standard_decomposition(alg, ds.j0)
    rep.extras["decomposition"] = [(round(lam, 9), dim)
                                   for lam, dim in dec.summary()]
    on_support = sum(1 for p in pts if ds.f_of(p.coords) > 0.0)
    rep.extras["support_fraction"] = on_support / len(pts)
    return rep


def _battery_irregular(cfg: RunConfig) -> VerificationReport:
    ir = build_irregular(n=cfg.n, a=parse_rate(cfg.a))
    lc = LeviCivita(ir.metric, fd_step=cfg.fd_step)
    pts = sample_sphere(cfg.n, cfg.samples, cfg.seed).points
    verify.covariant_canary(lc, ir.field, pts[0])

    rep = VerificationReport(
        title=f"irregular unit Killing structure on S^{2 * cfg.n + 1} (a={cfg.a})",
        config=asdict(cfg))
    rep.add(verify.check_tangency(ir.field, pts))
    rep.add(verify.check_unit_length(lc, ir.field, pts))
    rep.add(verify.check_killing(lc, ir.field, pts, tol=1e-6))
    rep.add(verify.check_kcontact(lc, ir.field, pts))
    rep.add(verify.check_sasakian(lc, ir.field, pts, tol=verify.FD_TOL))
    rep.add(verify.check_nijenhuis(lc, ir.field, pts))
    reference = [-4.0] * (2 * cfg.n) + [0.0]
    rep.add(verify.check_dxi_spectrum(lc, ir.field, pts, reference=reference,
                                      tol=1e-5))
    rep.add(verify.check_transverse_derivative(lc, ir.field, ir.j0, pts,
                                               tol=verify.FD_TOL))

    alg = ir.isometry_algebra()
    cen = centralizer_check(alg, [ir.j0, ir.j1])
    cen_res = cen["max_commutator"] + (0.0 if all(cen["members"]) else 1.0)
    rep.add(CheckResult(name="central_pair", max_residual=cen_res,
                        mean_residual=cen_res, tolerance=1e-10,
                        detail="J0, J1 commute with and belong to the algebra"))
    rep.add(_merge("invariance_algebra_killing",
                   [verify.check_killing(lc, linear_field(B, name=f"inv{i}"),
                                         pts[:min(len(pts), 40)], tol=1e-5)
                    for i, B in enumerate(alg.basis)], tol=1e-5))

    dec = standard_decomposition(alg, ir.field.matrix)
    rep.extras["decomposition"] = [(round(lam, 9), dim)
                                   for lam, dim in dec.summary()]
    cls = classify(ir.profile())
    rep.extras["flow"] = {"kind": cls.kind,
                          "closure_torus_dim": cls.closure_torus_dim}
    probe = numeric_orbit_probe(ir.field.matrix, pts[0].coords, t_max=60.0)
    rep.extras["orbit_probe"] = {"returns": len(probe.return_times),
                                 "min_distance": probe.min_distance}
    return rep


_BATTERIES = {
    "round": _battery_round,
    "quaternionic": _battery_quaternionic,
    "hopf-lift": _battery_hopf,
    "gF": _battery_deformed,
    "irregular": _battery_irregular,
}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _emit(rep: VerificationReport, cfg: RunConfig) -> None:
    if cfg.format == "json":
        print(rep.to_json(include_timestamp=not cfg.no_timestamp))
    else:
        print(rep.render_text())


def cmd_verify(cfg: RunConfig) -> int:
    rep = _BATTERIES[cfg.example](cfg)
    _emit(rep, cfg)
    return EXIT_OK if rep.all_as_expected else EXIT_CHECKS


def cmd_decompose(cfg: RunConfig) -> int:
    if cfg.example == "round":
        st = build_round(cfg.n)
        lc = LeviCivita(st.metric, fd_step=cfg.fd_step)
        alg, xi_mat, fld = st.isometry_algebra(), st.j0, st.field
    elif cfg.example == "gF":
        st = build_deformed(n=cfg.n, c=cfg.c)
        lc = LeviCivita(st.metric, fd_step=cfg.fd_step)
        alg, xi_mat, fld = st.isometry_algebra(), st.j0, st.field
    else:
        st = build_irregular(n=cfg.n, a=parse_rate(cfg.a))
        lc = LeviCivita(st.metric, fd_step=cfg.fd_step)
        alg, xi_mat, fld = st.isometry_algebra(), st.field.matrix, st.field

    dec = standard_decomposition(alg, xi_mat)
    rep = VerificationReport(
        title=f"adjoint-square decomposition ({cfg.example}, S^{2 * cfg.n + 1})",
        config=asdict(cfg))
    pts = sample_sphere(cfg.n, min(cfg.samples, 40), cfg.seed).points
    for rate, block in zip(dec.rates, dec.blocks):
        if rate == 0.0:
            continue
        worst = {"orthogonality": 0.0, "bracket_identity": 0.0,
                 "eigenvalue_identity": 0.0}
        for a_mat in block:
            res = eigenfield_residuals(lc, fld, a_mat, pts, rate=rate)
            for key in worst:
                worst[key] = max(worst[key], res[key])
        rep.add(CheckResult(name=f"eigenfield_identities_rate_{rate:g}",
                            max_residual=max(worst.values()),
                            mean_residual=float(np.mean(list(worst.values()))),
                            tolerance=1e-6))
    summary = [(round(lam, 9), dim) for lam, dim in dec.summary()]
    rep.extras["table"] = "; ".join(
        [f"g0: {dec.zero_block_dim}"]
        + [f"lambda={lam:g}: {dim}" for lam, dim in summary if lam != 0.0])
    rep.extras["blocks"] = summary
    rep.extras["algebra_dim"] = alg.dim
    _emit(rep, cfg)
    return EXIT_OK if rep.all_as_expected else EXIT_CHECKS


def cmd_classify_flow(args: argparse.Namespace, cfg: RunConfig) -> int:
    rates = tuple(parse_rate(r) for r in args.rates)
    profile = RotationProfile(rates)
    cls = classify(profile)
    rep = VerificationReport(title="flow classification", config={
        **asdict(cfg), "rates": list(args.rates),
        "horizon": args.horizon, "probe": bool(args.probe)})
    rep.extras["classification"] = {
        "kind": cls.kind,
        "closure_torus_dim": cls.closure_torus_dim,
        "rate_values": list(cls.rate_values),
        "integer_profile": (list(cls.integer_profile)
                            if cls.integer_profile is not None else None),
        "generic_period": cls.generic_period,
        "exceptional_periods": list(cls.exceptional_periods),
    }
    if args.probe:
        k = len(rates)
        gen = np.zeros((2 * k, 2 * k))
        for i, r in enumerate(rates):
            gen[2 * i:2 * i + 2, 2 * i:2 * i + 2] = r.value() * J2
        x0 = np.zeros(2 * k)
        x0[0::2] = 1.0 / np.sqrt(k)
        horizon = args.horizon or (1.5 * cls.generic_period
                                   if cls.generic_period else 50.0)
        probe = numeric_orbit_probe(gen, x0, t_max=horizon)
        rep.extras["orbit_probe"] = {
            "return_times": list(probe.return_times),
            "min_distance": probe.min_distance,
        }
        if cls.generic_period is not None:
            res = (abs(probe.return_times[0] - cls.generic_period)
                   if probe.return_times else np.inf)
            rep.add(CheckResult(name="orbit_return_matches_period",
                                max_residual=float(res), mean_residual=float(res),
                                tolerance=1e-5))
        else:
            res = 0.0 if not probe.return_times else 1.0
            rep.add(CheckResult(name="orbit_never_returns",
                                max_residual=float(res), mean_residual=float(res),
                                tolerance=0.5,
                                detail=f"min distance {probe.min_distance:.3e} "
                                       f"over horizon {horizon:g}"))
    _emit(rep, cfg)
    return EXIT_OK if rep.all_as_expected else EXIT_CHECKS


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser, *, with_example: bool,
                examples: tuple[str, ...] = VERIFY_EXAMPLES) -> None:
    if with_example:
        parser.add_argument("--example", choices=examples, default=None,
                            help="which construction to run")
    parser.add_argument("--n", type=int, default=None,
                        help="odd-sphere index: the sphere is S^(2n+1)")
    parser.add_argument("--m", type=int, default=None,
                        help="quaternionic index: the sphere is S^(4m+3)")
    parser.add_argument("--c", type=float, default=None,
                        help="deformation amplitude")
    parser.add_argument("--a", type=str, default=None,
                        help="irregularity rate offset (fraction or irr:<alias>)")
    parser.add_argument("--seed", type=int, default=None, help="sampling seed")
    parser.add_argument("--samples", type=int, default=None,
                        help="number of sample points")
    parser.add_argument("--fd-step", dest="fd_step", type=float, default=None,
                        help="finite-difference step")
    parser.add_argument("--format", choices=("text", "json"), default=None,
                        help="report format")
    parser.add_argument("--no-timestamp", dest="no_timestamp",
                        action="store_true", default=False,
                        help="suppress the timestamp field in JSON reports")
    parser.add_argument("--config", type=str, default=None,
                        help="flat key=value config file; flags override it")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="killinglab",
        description="Numerical verification batteries for unit Killing fields "
                    "on odd spheres and their contact-type structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run an example's check battery")
    _add_common(p_verify, with_example=True)

    p_dec = sub.add_parser("decompose",
                           help="adjoint-square decomposition of an example's "
                                "invariance algebra")
    _add_common(p_dec, with_example=True, examples=DECOMPOSE_EXAMPLES)

    p_cls = sub.add_parser("classify-flow",
                           help="classify a rotation-rate profile")
    p_cls.add_argument("rates", nargs="+",
                       help="rotation rates: integers, fractions, or "
                            "irr:<alias> tagged irrationals")
    p_cls.add_argument("--probe", action="store_true",
                       help="cross-check with a matrix-exponential orbit probe")
    p_cls.add_argument("--horizon", type=float, default=None,
                       help="orbit probe time horizon")
    _add_common(p_cls, with_example=False)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "decompose":
            return cmd_decompose(cfg)
        return cmd_classify_flow(args, cfg)
    except (NumericalQualityError, MetricDegeneracyError,
            DegenerateClusterError) as exc:
        print(f"numerical quality failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
