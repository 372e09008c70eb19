"""Quantitative verification: closure residuals, cone fits, smoothness,
the SU(4) evidence certificate and the singular-orbit catalog.

Closure checks recompute time derivatives by centered finite differences of
a coefficient sampler, never from the ODE right-hand sides, so they probe
the derived systems rather than restating them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .algebra import LaurentPoly
from .closed_form import ProfileM, ProfileQ, compare, profile
from .flow import (
    KaehlerCertificate,
    ODESystem,
    coefficient_map,
    derive_flow,
    exterior_d_time,
    kaehler_search,
)
from .homogeneous import CosetModel
from .integrate import (
    ORBIT_COLLAPSING,
    IntegratorConfig,
    OrbitSpec,
    Trajectory,
    series_start,
)
from .structures import Spin7Structure, build_invariant_structure, rotate_structure


class VerifyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# samplers: coefficient values as functions of arclength
# ---------------------------------------------------------------------------


class TrajectorySampler:
    """Dense-output backed coefficient values along an integrated run."""

    def __init__(self, traj: Trajectory):
        self.traj = traj
        self.names = traj.state_names
        self.t_min = float(traj.ts[0])
        self.t_max = float(traj.ts[-1])

    def __call__(self, t: float) -> Dict[str, float]:
        row = self.traj.interpolate(t)
        return {n: float(row[j]) for j, n in enumerate(self.names)}

    def sample_points(self, n: int, margin: float) -> List[float]:
        lo = self.t_min + margin
        hi = self.t_max - margin
        return list(np.linspace(lo, hi, n))


class ProfileSampler:
    """Closed-form coefficient values as a function of arclength.

    Inverts t(s) locally by Newton iteration anchored on an integrated
    trajectory; evaluation error is at machine-epsilon level, which makes
    the finite-difference closure residual purely a truncation effect.
    """

    _GAUSS_X = (
        -0.8611363115940526,
        -0.3399810435848563,
        0.3399810435848563,
        0.8611363115940526,
    )
    _GAUSS_W = (
        0.34785484513745385,
        0.6521451548625461,
        0.6521451548625461,
        0.34785484513745385,
    )

    def __init__(self, prof: Union[ProfileQ, ProfileM], anchors: Trajectory):
        if anchors.model_kind != prof.model_kind:
            raise VerifyError("profile and anchor trajectory disagree on the model")
        self.prof = prof
        self.anchors = anchors
        self.names = anchors.state_names
        self.collapsing_name = self.names[-1]  # f or c
        i0 = min(2, anchors.n_samples - 1)
        self.sign = {
            n: (1.0 if anchors.ys[i0, j] >= 0 else -1.0)
            for j, n in enumerate(self.names)
        }
        self.t_min = float(anchors.ts[0])
        self.t_max = float(anchors.ts[-1])

    def _speed(self, s: float) -> float:
        g = self.prof.value_squared(s)
        if g <= 0:
            raise VerifyError("profile speed vanished during inversion")
        return self.sign[self.collapsing_name] * math.sqrt(g)

    def _gauss_panel(self, s0: float, s1: float) -> float:
        mid = 0.5 * (s0 + s1)
        half = 0.5 * (s1 - s0)
        acc = 0.0
        for x, w in zip(self._GAUSS_X, self._GAUSS_W):
            acc += w / self._speed(mid + half * x)
        return acc * half

    def _dt_integral(self, s0: float, s1: float) -> float:
        # t(s1) - t(s0) = int ds / xtilde(s); composite Gauss with panel
        # widths small relative to |s| (the integrand varies on that scale)
        total = s1 - s0
        if total == 0.0:
            return 0.0
        n = 1 + int(abs(total) / (0.05 * (min(abs(s0), abs(s1)) + 1.0)))
        n = min(n, 256)
        acc = 0.0
        prev = s0
        for i in range(1, n + 1):
            nxt = s0 + total * i / n
            acc += self._gauss_panel(prev, nxt)
            prev = nxt
        return acc

    def s_of_t(self, t: float) -> float:
        ts = self.anchors.ts
        k = int(np.searchsorted(ts, t))
        k = min(max(k, 1), len(ts) - 1)
        if abs(float(ts[k - 1]) - t) < abs(float(ts[k]) - t):
            k -= 1
        t_k = float(ts[k])
        s_k = float(self.anchors.ys[k, -1])
        s = s_k
        for _ in range(4):
            resid = t_k + self._dt_integral(s_k, s) - t
            s -= resid * self._speed(s)
        return s

    def __call__(self, t: float) -> Dict[str, float]:
        s = self.s_of_t(t)
        squares = self.prof.coefficient_squares(s)
        return {
            n: self.sign[n] * math.sqrt(max(float(squares[n]), 0.0))
            for n in self.names
        }

    def sample_points(self, n: int, margin: float) -> List[float]:
        lo = self.t_min + margin
        hi = self.t_max - margin
        return list(np.linspace(lo, hi, n))


# ---------------------------------------------------------------------------
# closure residuals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosureReport:
    d_omega_residual: float
    d_eta_residual: float
    n_samples: int
    fd_step: float

    @property
    def max_residual(self) -> float:
        return max(self.d_omega_residual, self.d_eta_residual)


def check_closure(
    sampler,
    struct: Spin7Structure,
    cert: KaehlerCertificate,
    t_points: Optional[Sequence[float]] = None,
    fd_step: float = 1e-5,
    n_samples: int = 40,
) -> ClosureReport:
    """Finite-difference closure residuals of Omega and eta along a run.

    The residual of each form is the largest coefficient of its exterior
    derivative (with chain-rule slopes replaced by centered differences of
    the sampler), normalized by the largest coefficient of the form itself.
    """
    model = struct.model
    names = tuple(model.symbols.base)
    d_omega = exterior_d_time(struct.Omega, model, names)
    d_eta = exterior_d_time(cert.eta, model, names)
    if t_points is None:
        t_points = sampler.sample_points(n_samples, margin=2 * fd_step * (1 + abs(sampler.t_max)))
    if len(t_points) < 3:
        raise VerifyError("need at least 3 samples for centered differences")

    worst_omega = 0.0
    worst_eta = 0.0
    for t in t_points:
        h = fd_step * max(1.0, abs(t))
        lo = sampler(t - h)
        hi = sampler(t + h)
        mid = sampler(t)
        assign = dict(mid)
        for n in names:
            assign[n + "'"] = (hi[n] - lo[n]) / (2 * h)
        omega_scale = struct.Omega.eval_numeric(mid).max_abs_coefficient()
        eta_scale = cert.eta.eval_numeric(mid).max_abs_coefficient()
        r_omega = d_omega.eval_numeric(assign).max_abs_coefficient() / omega_scale
        r_eta = d_eta.eval_numeric(assign).max_abs_coefficient() / eta_scale
        worst_omega = max(worst_omega, r_omega)
        worst_eta = max(worst_eta, r_eta)
    return ClosureReport(worst_omega, worst_eta, len(t_points), fd_step)


def check_closure_samples(
    traj: Trajectory,
    struct: Spin7Structure,
    cert: KaehlerCertificate,
    max_samples: int = 200,
) -> ClosureReport:
    """Closure residuals from raw accepted steps (non-uniform differences).

    Used when only a stored trajectory is available; the sample spacing
    limits the attainable residual, so the appropriate bar is looser than
    for the profile-backed check.
    """
    model = struct.model
    names = tuple(model.symbols.base)
    if traj.n_samples < 3:
        raise VerifyError("need at least 3 samples for centered differences")
    d_omega = exterior_d_time(struct.Omega, model, names)
    d_eta = exterior_d_time(cert.eta, model, names)
    stride = max(1, (traj.n_samples - 2) // max_samples)
    worst_omega = 0.0
    worst_eta = 0.0
    count = 0
    for i in range(1, traj.n_samples - 1, stride):
        hm = float(traj.ts[i] - traj.ts[i - 1])
        hp = float(traj.ts[i + 1] - traj.ts[i])
        assign = {n: float(traj.ys[i, j]) for j, n in enumerate(names)}
        for j, n in enumerate(names):
            fm, f0, fp = (float(traj.ys[k, j]) for k in (i - 1, i, i + 1))
            assign[n + "'"] = (
                -hp / (hm * (hm + hp)) * fm
                + (hp - hm) / (hm * hp) * f0
                + hm / (hp * (hm + hp)) * fp
            )
        mid = {n: assign[n] for n in names}
        omega_scale = struct.Omega.eval_numeric(mid).max_abs_coefficient()
        eta_scale = cert.eta.eval_numeric(mid).max_abs_coefficient()
        worst_omega = max(
            worst_omega, d_omega.eval_numeric(assign).max_abs_coefficient() / omega_scale
        )
        worst_eta = max(
            worst_eta, d_eta.eval_numeric(assign).max_abs_coefficient() / eta_scale
        )
        count += 1
    return ClosureReport(worst_omega, worst_eta, count, 0.0)


# ---------------------------------------------------------------------------
# cone asymptotics
# ---------------------------------------------------------------------------

CONE_REFS = {
    "Q": {"a^2/t^2": 0.125, "b^2/t^2": 0.125, "c^2/t^2": 0.125, "|f|/t": 0.75},
    "M": {"a^2/t^2": 0.75, "b^2/t^2": 0.5, "c/t": 2.0},
}


@dataclass(frozen=True)
class ConeFit:
    limits: Dict[str, float]  # fitted constants over the final decade
    endpoint: Dict[str, float]  # quantities at the final sample
    refs: Dict[str, float]
    deltas: Dict[str, float]  # |endpoint - ref|
    corrections: Dict[str, float]  # fitted 1/t coefficients
    fit_residual: float
    partial: bool = False

    @property
    def max_delta(self) -> float:
        return max(self.deltas.values())


def _cone_quantities(kind: str, t: np.ndarray, ys: np.ndarray) -> Dict[str, np.ndarray]:
    if kind == "Q":
        return {
            "a^2/t^2": ys[:, 0] ** 2 / t**2,
            "b^2/t^2": ys[:, 1] ** 2 / t**2,
            "c^2/t^2": ys[:, 2] ** 2 / t**2,
            "|f|/t": np.abs(ys[:, 3]) / t,
        }
    return {
        "a^2/t^2": ys[:, 0] ** 2 / t**2,
        "b^2/t^2": ys[:, 1] ** 2 / t**2,
        "c/t": np.abs(ys[:, 2]) / t,
    }


def cone_fit(traj: Trajectory, min_span_ratio: float = 1e3) -> ConeFit:
    """Fit coefficient/t against a constant plus 1/t on the final decade."""
    t = np.asarray(traj.ts, dtype=float)
    initial_scale = float(np.max(np.abs(traj.ys[0, :-1])))
    partial = bool(
        traj.status != "done" or t[-1] < min_span_ratio * max(initial_scale, 1e-300)
    )
    sel = t >= t[-1] / 10.0
    tt = t[sel]
    quantities = _cone_quantities(traj.model_kind, t, traj.ys)
    refs = CONE_REFS[traj.model_kind]
    design = np.vstack([np.ones_like(tt), 1.0 / tt]).T
    limits = {}
    corrections = {}
    endpoint = {}
    deltas = {}
    residual = 0.0
    for name, series in quantities.items():
        sol, res, *_ = np.linalg.lstsq(design, series[sel], rcond=None)
        limits[name] = float(sol[0])
        corrections[name] = float(sol[1])
        endpoint[name] = float(series[-1])
        deltas[name] = abs(endpoint[name] - refs[name])
        if len(res):
            residual = max(residual, float(np.sqrt(res[0] / sel.sum())))
    return ConeFit(limits, endpoint, refs, deltas, corrections, residual, partial)


# ---------------------------------------------------------------------------
# collapsing-sphere geometry and smoothness verdicts
# ---------------------------------------------------------------------------


def _lattice_gcd(a: Fraction, b: Fraction) -> Fraction:
    # generator of the group a*Z + b*Z inside Q
    num = math.gcd(a.numerator * b.denominator, b.numerator * a.denominator)
    return Fraction(num, a.denominator * b.denominator)


def s_action_circle(kind: str) -> Dict[str, object]:
    """Exact period data of the vertical circle action, per the group facts.

    Q: exp(theta e7) has period 4 pi; it lies in the isotropy torus iff
    theta (1,1,1) differs from the span of (1,-1,0), (1,1,-2) by an integer
    vector in the 4 pi lattice, i.e. iff 3 theta is a multiple of 4 pi.

    M: the central generator (the displayed one, half of this package's
    basis vector) has period 4 pi; membership in SU(2) x U(1) reduces to
    theta in the lattice generated by pi and 3 pi / 2.
    """
    if kind == "Q":
        period = Fraction(4)  # multiples of pi
        u1 = (1, -1, 0)
        u2 = (1, 1, -2)
        w = (1, 1, 1)
        normal = (
            u1[1] * u2[2] - u1[2] * u2[1],
            u1[2] * u2[0] - u1[0] * u2[2],
            u1[0] * u2[1] - u1[1] * u2[0],
        )
        content = math.gcd(math.gcd(abs(normal[0]), abs(normal[1])), abs(normal[2]))
        pairing = abs(sum(wi * ni for wi, ni in zip(w, normal))) // content
        # tau * pairing must be integral, with theta = 4 pi tau
        step = period / pairing
        order = pairing
    else:
        period = Fraction(4)
        step = _lattice_gcd(Fraction(1), Fraction(3, 2))
        order = int(period / step)
    return {
        "period_over_pi": period,
        "intersection_order": order,
        "circle_step_over_pi": step,
        "required_slope": Fraction(2) * order / period,
    }


REQUIRED_SLOPES: Dict[Tuple[str, str], Dict[str, Fraction]] = {
    ("Q", "s2xs2xs2"): {"f": Fraction(3, 2)},
    ("Q", "s2xs2"): {"a": Fraction(1, 2), "f": Fraction(3, 2)},
    ("M", "cp2xs2"): {"c": Fraction(4)},
    ("M", "cp2"): {"b": Fraction(1), "c": Fraction(4)},
    ("M", "s2"): {"a": Fraction(1), "c": Fraction(4)},
}

GEOMETRY_NOTES: Dict[Tuple[str, str], str] = {
    ("Q", "s2xs2xs2"): "collapsing circle of length (4 pi / 3) |f|",
    ("Q", "s2xs2"): "collapsing 3-sphere; great circles along e1 and e7",
    ("M", "cp2xs2"): "collapsing circle of length (pi / 2) |c| in display units",
    ("M", "cp2"): "collapsing 3-sphere; sectional curvature 1/t^2 condition",
    ("M", "s2"): "collapsing S^5/Z_3; orbifold smoothness condition",
}


@dataclass(frozen=True)
class SmoothnessReport:
    model_kind: str
    orbit: str
    computed: Dict[str, Fraction]
    required: Dict[str, Fraction]
    verdict: str  # "smooth" | "non-smooth"
    note: str

    @property
    def smooth(self) -> bool:
        return self.verdict == "smooth"

    def to_json_dict(self) -> dict:
        return {
            "computed": {k: str(v) for k, v in self.computed.items()},
            "required": {k: str(v) for k, v in self.required.items()},
            "verdict": self.verdict,
            "note": self.note,
        }


def smoothness_report(
    model: CosetModel, orbit: str, sys: Optional[ODESystem] = None
) -> SmoothnessReport:
    """Exact limiting derivatives against the hardcoded requirements."""
    key = (model.kind, orbit)
    if key not in REQUIRED_SLOPES:
        raise VerifyError(f"{orbit!r} is not a singular orbit of the {model.kind} model")
    sys = sys or derive_flow(model)
    state = sys.state
    collapsing = ORBIT_COLLAPSING[model.kind][orbit]
    values = {x: Fraction(1) for x in state if x not in collapsing}
    spec = OrbitSpec(model.kind, orbit, values)
    _, slopes = series_start(sys, spec)
    required = REQUIRED_SLOPES[key]
    computed = {k: slopes[k] for k in required}
    smooth = all(abs(computed[k]) == required[k] for k in required)
    circle = s_action_circle(model.kind)
    note = (
        f"{GEOMETRY_NOTES[key]}; vertical circle: period {circle['period_over_pi']} pi,"
        f" isotropy intersection of order {circle['intersection_order']}"
    )
    return SmoothnessReport(
        model.kind,
        orbit,
        computed,
        required,
        "smooth" if smooth else "non-smooth",
        note,
    )


# ---------------------------------------------------------------------------
# SU(4) family certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SU4Certificate:
    family_parallel: bool  # d Omega_theta = 0 for all theta, symbolically
    family_moves: bool  # Omega_theta differs from Omega off the period
    kaehler_unique: bool
    no_parallel_vector: bool

    @property
    def passed(self) -> bool:
        return (
            self.family_parallel
            and self.family_moves
            and self.kaehler_unique
            and self.no_parallel_vector
        )

    def to_json_dict(self) -> dict:
        return {
            "family_parallel": self.family_parallel,
            "family_moves": self.family_moves,
            "kaehler_unique": self.kaehler_unique,
            "no_parallel_vector": self.no_parallel_vector,
            "passed": self.passed,
        }


def su4_family_check(
    model: CosetModel,
    sys: ODESystem,
    cert: Optional[KaehlerCertificate] = None,
) -> SU4Certificate:
    """Certify the SU(4) evidence: a full circle of parallel structures,
    a unique closed invariant two-form, and no invariant parallel vector."""
    struct = build_invariant_structure(model)

    # (1) the whole rotation family stays parallel: symbolic in (C, S)
    rotated = rotate_structure(struct, "symbolic")
    table = rotated.table
    d_rot = exterior_d_time(rotated.Omega, model, sys.state)
    subs = sys.rhs_substitution(table)
    d_rot = coefficient_map(d_rot, lambda p: p.subs_derivatives(subs))
    d_rot = coefficient_map(d_rot, lambda p: p.reduce_circle("C", "S"))
    family_parallel = d_rot.is_zero

    # (2) the family genuinely moves: an exact non-lattice angle changes Omega
    moved = rotate_structure(struct, (Fraction(3, 5), Fraction(4, 5)))
    family_moves = moved.Omega != struct.Omega
    ident = rotate_structure(struct, (Fraction(1), Fraction(0)))
    family_moves = family_moves and ident.Omega == struct.Omega

    # (3) unique Kaehler candidate up to global sign
    try:
        cert = cert or kaehler_search(model, sys)
        kaehler_unique = cert.unique_up_to_sign
    except Exception:
        kaehler_unique = False

    # (4) no invariant parallel vector field: the vertical coefficient cannot
    # be constant (its derivative is forced nonzero at the collapsing locus),
    # and a pure d/dt field would freeze every coefficient
    last = sys.state[-1]
    collapsed = _substitute_zero(sys.rhs[last], last)
    no_parallel_vector = (not collapsed.is_zero) and (not sys.rhs[sys.state[0]].is_zero)

    return SU4Certificate(family_parallel, family_moves, kaehler_unique, no_parallel_vector)


def _substitute_zero(poly: LaurentPoly, name: str) -> LaurentPoly:
    idx = poly.table.index(name)
    out = {}
    for vec, c in poly.terms.items():
        if vec[idx] == 0:
            out[vec] = c
        elif vec[idx] < 0:
            raise VerifyError("cannot evaluate a pole at the collapsing locus")
    return LaurentPoly(poly.table, out)


# ---------------------------------------------------------------------------
# singular-orbit catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogRow:
    isotropy: str
    collapsing_sphere: str
    singular_orbit: str
    orbit_key: Optional[str]  # None for excluded rows
    collapsing: Tuple[str, ...]
    note: str = ""


ORBIT_CATALOG: Dict[str, Tuple[CatalogRow, ...]] = {
    "Q": (
        CatalogRow("U(1)^3", "S^1", "S^2 x S^2 x S^2", "s2xs2xs2", ("f",)),
        CatalogRow("U(1)^2 x SU(2)", "S^3", "S^2 x S^2", "s2xs2", ("a", "f")),
        CatalogRow(
            "U(1) x SU(2)^2",
            "not a sphere quotient",
            "S^2",
            None,
            (),
            "no cohomogeneity-one space",
        ),
        CatalogRow(
            "SU(2)^3",
            "not a sphere quotient",
            "point",
            None,
            (),
            "no cohomogeneity-one space",
        ),
    ),
    "M": (
        CatalogRow("U(2) x U(1)", "S^1", "CP^2 x S^2", "cp2xs2", ("c",)),
        CatalogRow("U(2) x SU(2)", "S^3", "CP^2", "cp2", ("b", "c")),
        CatalogRow(
            "SU(3) x U(1)",
            "S^5/Z_3",
            "S^2",
            "s2",
            ("a", "c"),
            "orbifold, not a manifold",
        ),
        CatalogRow(
            "SU(3) x SU(2)",
            "not a sphere quotient",
            "point",
            None,
            (),
            "no cohomogeneity-one space",
        ),
    ),
}


def orbit_catalog(model: Union[CosetModel, str]) -> Tuple[CatalogRow, ...]:
    kind = model.kind if isinstance(model, CosetModel) else str(model).upper()
    if kind not in ORBIT_CATALOG:
        raise VerifyError(f"unknown model kind {kind!r}")
    return ORBIT_CATALOG[kind]


def catalog_row(model: Union[CosetModel, str], orbit: str) -> CatalogRow:
    for row in orbit_catalog(model):
        if row.orbit_key == orbit:
            return row
    raise VerifyError(f"{orbit!r} is not an admissible singular orbit")


# ---------------------------------------------------------------------------
# the full verification report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    model: str
    orbit: str
    closure: ClosureReport
    cone: ConeFit
    kaehler_signs: Tuple[int, ...]
    smoothness: SmoothnessReport
    su4: SU4Certificate
    closed_form_deviation: float
    provenance: Dict[str, float]

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "orbit": self.orbit,
            "closure_residual": {
                "d_omega": self.closure.d_omega_residual,
                "d_eta": self.closure.d_eta_residual,
                "fd_step": self.closure.fd_step,
                "n_samples": self.closure.n_samples,
            },
            "cone": {
                "limits": self.cone.limits,
                "refs": self.cone.refs,
                "deltas": self.cone.deltas,
                "endpoint": self.cone.endpoint,
                "corrections": self.cone.corrections,
                "partial": self.cone.partial,
            },
            "kaehler": {
                "signs": list(self.kaehler_signs),
                "residual": 0.0 if self.kaehler_signs else None,
            },
            "smoothness": self.smoothness.to_json_dict(),
            "su4_certificate": self.su4.passed,
            "closed_form_deviation": self.closed_form_deviation,
            "provenance": self.provenance,
        }


#: default pass/fail bars; the raw-sample closure check is limited by the
#: accepted step spacing, hence its much looser bar
DEFAULT_BARS = {
    "closure": 1e-9,
    "closure_trajectory": 1e-3,
    "cone": 1e-3,
    "closed_form": 1e-8,
}


def run_report(
    model: CosetModel,
    spec: OrbitSpec,
    cfg: IntegratorConfig,
    n_closure_samples: int = 40,
) -> Tuple[VerificationReport, Trajectory]:
    """Full pipeline for one singular orbit: derive, solve, verify."""
    from .integrate import solve_orbit

    sys = derive_flow(model)
    traj, _ = solve_orbit(sys, spec, cfg)
    struct = build_invariant_structure(model)
    cert = kaehler_search(model, sys)
    prof = profile(model, spec)
    sampler = ProfileSampler(prof, traj)
    closure = check_closure(sampler, struct, cert, n_samples=n_closure_samples)
    cone = cone_fit(traj)
    smooth = smoothness_report(model, spec.orbit, sys)
    su4 = su4_family_check(model, sys, cert)
    dev = compare(traj, prof)
    report = VerificationReport(
        model=model.label,
        orbit=spec.orbit,
        closure=closure,
        cone=cone,
        kaehler_signs=cert.signs,
        smoothness=smooth,
        su4=su4,
        closed_form_deviation=dev,
        provenance={
            "rtol": cfg.rtol,
            "atol": cfg.atol,
            "t_end": cfg.t_end,
            "eps": cfg.eps if cfg.eps is not None else float("nan"),
            "fd_step": closure.fd_step,
        },
    )
    return report, traj
