"""Orbit classification for linear Killing flows on odd spheres.

A skew generator decomposes the ambient space into invariant 2-planes with
rotation rates rho_i.  Whether every orbit closes — and with what period —
is a question about Q-linear dependence of the rates, which floats cannot
answer.  Rates are therefore carried exactly as p + q*sqrt(k) with rational
p, q (``ExactScalar``); classification over Q is exact integer arithmetic.

A numeric probe (matrix exponential along the flow, coarse grid plus
bounded scalar refinement of near-returns) cross-checks the exact verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

TAG_VALUES = {
    "sqrt2": math.sqrt(2.0),
    "sqrt5": math.sqrt(5.0),
}

# CLI-facing aliases for common irrational rate offsets
RATE_ALIASES = {
    "sqrt2m1": ("sqrt2 - 1", Fraction(-1), Fraction(1), "sqrt2"),
    "golden": ("(1 + sqrt5)/2", Fraction(1, 2), Fraction(1, 2), "sqrt5"),
}


@dataclass(frozen=True)
class ExactScalar:
    """Exact number p + q*sqrt(k), with p, q rational and k a fixed tag."""

    p: Fraction
    q: Fraction = Fraction(0)
    tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q == 0:
            object.__setattr__(self, "tag", None)
        elif self.tag not in TAG_VALUES:
            raise ValueError(f"unknown irrational tag {self.tag!r}")

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def value(self) -> float:
        out = float(self.p)
        if self.q != 0:
            out += float(self.q) * TAG_VALUES[self.tag]
        return out

    def scaled(self, c) -> "ExactScalar":
        c = Fraction(c)
        return ExactScalar(self.p * c, self.q * c, self.tag)

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.p)
        return f"{self.p} + {self.q}*sqrt({self.tag[4:]})"


def parse_rate(spec: str) -> ExactScalar:
    """Parse "3", "-5/2", or "irr:<alias>" into an exact rate."""
    spec = spec.strip()
    if spec.startswith("irr:"):
        alias = spec[4:]
        if alias not in RATE_ALIASES:
            raise ValueError(f"unknown irrational alias {alias!r}; "
                             f"known: {sorted(RATE_ALIASES)}")
        _, p, q, tag = RATE_ALIASES[alias]
        return ExactScalar(p, q, tag)
    return ExactScalar(Fraction(spec))


@dataclass(frozen=True)
class RotationProfile:
    """Exact rotation rates of a skew generator, one per invariant 2-plane."""

    rates: tuple[ExactScalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(self.rates))
        if not self.rates:
            raise ValueError("empty rotation profile")

    def values(self) -> tuple[float, ...]:
        return tuple(r.value() for r in self.rates)

    def scaled(self, c) -> "RotationProfile":
        return RotationProfile(tuple(r.scaled(c) for r in self.rates))


def rotation_profile(xi: np.ndarray, declared: Sequence[ExactScalar],
                     tol: float = 1e-9) -> RotationProfile:
    """Validate declared exact rates against the spectrum of a skew matrix.

    The positive imaginary parts of the eigenvalues of ``xi`` must match the
    absolute declared rates (with multiplicity) within ``tol``.
    """
    xi = np.asarray(xi, dtype=float)
    d = xi.shape[0]
    if len(declared) * 2 != d:
        raise ValueError(f"need {d // 2} rates for a {d}x{d} generator, "
                         f"got {len(declared)}")
    ev = np.linalg.eigvals(xi)
    numeric = np.sort(ev.imag[ev.imag > -1e-14])[-d // 2:]
    numeric = np.sort(np.abs(numeric))
    stated = np.sort([abs(r.value()) for r in declared])
    if float(np.abs(numeric - stated).max()) > tol:
        raise ValueError(
            f"declared rates {stated} disagree with generator spectrum {numeric}")
    return RotationProfile(tuple(declared))


@dataclass(frozen=True)
class FlowClassification:
    """Verdict on the orbit structure of a linear Killing flow.

    kind: "regular" (all orbits circles of one common period),
    "quasi-regular" (all orbits close, exceptional shorter periods exist), or
    "irregular" (generic orbits dense in a torus of dimension
    ``closure_torus_dim`` > 1).  ``integer_profile`` holds the coprime
    integer rate vector in the periodic cases.
    """

    kind: str
    closure_torus_dim: int
    rate_values: tuple[float, ...]
    integer_profile: tuple[int, ...] | None
    generic_period: float | None
    exceptional_periods: tuple[float, ...]


def _q_rank(rates: Sequence[ExactScalar]) -> int:
    """Dimension over Q of the span of the rates (exact arithmetic)."""
    nz = [r for r in rates if r.p != 0 or r.q != 0]
    if not nz:
        return 0
    for a, b in combinations(nz, 2):
        if a.p * b.q - b.p * a.q != 0:
            return 2
    return 1


def classify(profile: RotationProfile) -> FlowClassification:
    """Exact orbit classification of the flow with the given rotation rates."""
    rates = profile.rates
    tags = {r.tag for r in rates if r.q != 0}
    if len(tags) > 1:
        raise ValueError(f"mixed irrational tags {sorted(tags)} are not comparable "
                         f"with exact arithmetic")
    if any(r.p == 0 and r.q == 0 for r in rates):
        raise ValueError("zero rotation rate: the generator vanishes on a subsphere "
                         "and the flow is not classified here")
    values = profile.values()
    rank = _q_rank(rates)
    if rank == 2:
        return FlowClassification(
            kind="irregular", closure_torus_dim=2, rate_values=values,
            integer_profile=None, generic_period=None, exceptional_periods=())

    # rank 1: every rate is a rational multiple of the first one
    r0 = rates[0]
    cs = []
    for r in rates:
        c = r.q / r0.q if r0.q != 0 else r.p / r0.p
        cs.append(Fraction(c))
    L = math.lcm(*[c.denominator for c in cs])
    ms = [int(c * L) for c in cs]
    g = math.gcd(*[abs(m) for m in ms])
    ms = [m // g for m in ms]
    base = r0.scaled(Fraction(g, L))  # rate_i = ms[i] * base exactly
    generic_period = 2.0 * math.pi / abs(base.value())
    kind = "regular" if all(abs(m) == 1 for m in ms) else "quasi-regular"

    abs_ms = sorted(set(abs(m) for m in ms))
    excl = set()
    for size in range(1, len(abs_ms) + 1):
        for sub in combinations(abs_ms, size):
            gs = math.gcd(*sub)
            if gs > 1:
                excl.add(generic_period / gs)
    return FlowClassification(
        kind=kind, closure_torus_dim=1, rate_values=values,
        integer_profile=tuple(ms), generic_period=generic_period,
        exceptional_periods=tuple(sorted(excl)))


def rational_subprofiles(profile: RotationProfile) -> list[tuple[tuple[int, ...],
                                                                 FlowClassification]]:
    """Maximal plane subsets whose rates are pairwise Q-dependent.

    Each subset spans an invariant subsphere on which the flow is periodic;
    for an irregular flow these are exactly its families of closed orbits.
    Returns (plane indices, classification of the restricted flow) pairs.
    """
    rates = profile.rates
    groups: list[list[int]] = []
    for i, r in enumerate(rates):
        placed = False
        for grp in groups:
            s = rates[grp[0]]
            if r.p * s.q - s.p * r.q == 0:
                grp.append(i)
                placed = True
                break
        if not placed:
            groups.append([i])
    out = []
    for grp in groups:
        sub = RotationProfile(tuple(rates[i] for i in grp))
        out.append((tuple(grp), classify(sub)))
    return out


@dataclass(frozen=True)
class OrbitProbe:
    """Numeric near-return survey of one orbit of a linear flow."""

    return_times: tuple[float, ...]
    return_distances: tuple[float, ...]
    min_distance: float
    t_max: float

    @property
    def first_return(self) -> float | None:
        return self.return_times[0] if self.return_times else None


def numeric_orbit_probe(xi: np.ndarray, x0: np.ndarray, t_max: float,
                        coarse_step: float = 2.0 * math.pi / 512.0,
                        candidate_threshold: float = 0.25,
                        return_tol: float = 1e-7,
                        chunk: int = 16384,
                        max_candidates: int = 4096) -> OrbitProbe:
    """Scan |exp(t xi) x0 - x0| on a coarse grid and refine its local minima.

    Local minima below ``candidate_threshold`` are polished with bounded
    scalar minimization; polished minima below ``return_tol`` count as
    returns.  ``min_distance`` is the smallest distance seen anywhere past
    the initial departure from x0, so an orbit that never returns reports a
    large floor instead of a spurious period.
    """
    xi = np.asarray(xi, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    evals, evecs = np.linalg.eig(xi)
    c0 = np.linalg.solve(evecs, x0.astype(complex))

    def dist(ts: np.ndarray) -> np.ndarray:
        phases = np.exp(np.multiply.outer(np.asarray(ts, dtype=float), evals))
        pos = (phases * c0) @ evecs.T
        return np.linalg.norm(pos.real - x0, axis=-1)

    def dist_scalar(t: float) -> float:
        return float(dist(np.array([t]))[0])

    n = int(np.ceil(t_max / coarse_step))
    ts_all = coarse_step * np.arange(1, n + 1)
    min_dist = np.inf
    departed = False  # true once the distance has passed its first local max
    last_d: float | None = None
    candidates: list[float] = []
    prev_tail: np.ndarray | None = None  # last two (t, d) rows of previous chunk
    for start in range(0, n, chunk):
        ts = ts_all[start:start + chunk]
        ds = dist(ts)
        if prev_tail is not None:
            ts_ext = np.concatenate([prev_tail[0], ts])
            ds_ext = np.concatenate([prev_tail[1], ds])
        else:
            ts_ext, ds_ext = ts, ds
        if departed:
            min_dist = min(min_dist, float(ds.min()))
        else:
            full = np.concatenate([[last_d], ds]) if last_d is not None else ds
            drops = np.nonzero(np.diff(full) < 0.0)[0]
            if drops.size:
                departed = True
                min_dist = min(min_dist, float(full[drops[0] + 1:].min()))
            last_d = float(ds[-1])
        interior = (ds_ext[1:-1] < ds_ext[:-2]) & (ds_ext[1:-1] <= ds_ext[2:]) \
            & (ds_ext[1:-1] < candidate_threshold)
        for t in ts_ext[1:-1][interior]:
            if len(candidates) < max_candidates:
                candidates.append(float(t))
        prev_tail = (ts[-2:], ds[-2:])

    returns: list[tuple[float, float]] = []
    for t in candidates:
        res = minimize_scalar(dist_scalar, bounds=(t - coarse_step, t + coarse_step),
                              method="bounded", options={"xatol": 1e-12})
        d_ref = float(res.fun)
        t_ref = float(res.x)
        min_dist = min(min_dist, d_ref)
        if d_ref < return_tol and t_ref > coarse_step:
            if not returns or t_ref - returns[-1][0] > 10 * coarse_step:
                returns.append((t_ref, d_ref))
    if not np.isfinite(min_dist):
        # the orbit was still monotonically departing at t_max
        min_dist = last_d if last_d is not None else 0.0
    return OrbitProbe(
        return_times=tuple(t for t, _ in returns),
        return_distances=tuple(d for _, d in returns),
        min_distance=float(min_dist),
        t_max=float(t_max))
