"""Symbolic derivation of the holonomy ODE systems from closure of Omega.

The exterior derivative on the product of the orbit with a time interval
splits into the invariant orbit derivative plus a dt wedge chain-rule term
with formal derivative symbols.  Collecting coefficients of d(Omega) = 0
yields an exact linear system in the derivative symbols, solved here by
Gaussian elimination over the fraction field of the Laurent ring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import LaurentPoly, Multivector, SymbolTable, wedge
from .homogeneous import CosetModel, invariant_d
from .structures import Spin7Structure, build_invariant_structure


class DerivationError(RuntimeError):
    """The linear system extracted from d(Omega) = 0 is not well-posed."""


# ---------------------------------------------------------------------------
# exact rational functions (only used inside the linear solve)
# ---------------------------------------------------------------------------


def try_divide(num: LaurentPoly, den: LaurentPoly) -> Optional[LaurentPoly]:
    """Exact division in the Laurent ring, or None if it does not divide."""
    if den.is_zero:
        raise ZeroDivisionError
    if num.is_zero:
        return LaurentPoly.zero(num.table)
    rem = num
    q_terms: Dict[Tuple[int, ...], Fraction] = {}
    lead_key = max(den.terms)
    lead_c = den.terms[lead_key]
    guard = 4 * (len(num.terms) + 1) * (len(den.terms) + 1) + 50
    while not rem.is_zero:
        guard -= 1
        if guard < 0:
            return None
        rk = max(rem.terms)
        qvec = tuple(a - b for a, b in zip(rk, lead_key))
        if any(qvec[i] < 0 for i in range(num.table.nbase, len(qvec))):
            return None
        qc = rem.terms[rk] / lead_c
        q_terms[qvec] = q_terms.get(qvec, Fraction(0)) + qc
        rem = rem - den * LaurentPoly(num.table, {qvec: qc})
    return LaurentPoly(num.table, {v: c for v, c in q_terms.items() if c})


class RatFunc:
    """Numerator/denominator pair over the Laurent ring, exact arithmetic."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: Optional[LaurentPoly] = None):
        if den is None:
            den = LaurentPoly.const(num.table, 1)
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            den = LaurentPoly.const(num.table, 1)
        elif len(den.terms) == 1:
            num = num * den**-1
            den = LaurentPoly.const(num.table, 1)
        else:
            q = try_divide(num, den)
            if q is not None:
                num, den = q, LaurentPoly.const(num.table, 1)
        self.num = num
        self.den = den

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __add__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero:
            raise ZeroDivisionError
        return RatFunc(self.num * other.den, self.den * other.num)

    def as_laurent(self) -> LaurentPoly:
        if len(self.den.terms) == 1:
            return self.num * self.den**-1
        q = try_divide(self.num, self.den)
        if q is None:
            raise DerivationError("solution is not a Laurent polynomial")
        return q


# ---------------------------------------------------------------------------
# d on the orbit x interval
# ---------------------------------------------------------------------------


def coefficient_map(form: Multivector, fn) -> Multivector:
    return Multivector(
        form.gens, {m: fn(c) for m, c in form.terms.items()}, form.dt_index
    )


def time_chain(form: Multivector, metric_symbols: Sequence[str]) -> Multivector:
    """Coefficient-wise d/dt via the chain rule with derivative symbols."""

    def ddt(poly: LaurentPoly) -> LaurentPoly:
        out = LaurentPoly.zero(poly.table)
        for x in metric_symbols:
            out = out + poly.diff(x) * LaurentPoly.variable(poly.table, x + "'")
        return out

    return coefficient_map(form, ddt)


def exterior_d_time(
    form: Multivector, model: CosetModel, metric_symbols: Optional[Sequence[str]] = None
) -> Multivector:
    """d on G/H x I: invariant orbit derivative plus dt wedge chain rule."""
    metric_symbols = tuple(metric_symbols or model.symbols.base)
    spatial = invariant_d(form, model)
    table = next(iter(form.terms.values())).table if form.terms else model.symbols
    one = LaurentPoly.const(table, 1)
    dt = Multivector.basis(form.gens, [form.dt_index], one, dt_index=form.dt_index)
    return spatial + wedge(dt, time_chain(form, metric_symbols))


def split_dt(form: Multivector) -> Tuple[Multivector, Multivector]:
    """(spatial part, dt-part with the dt factor removed from the left)."""
    bit = 1 << form.dt_index
    spatial = Multivector(
        form.gens, {m: c for m, c in form.terms.items() if not m & bit}, form.dt_index
    )
    rest = Multivector(
        form.gens, {m: c for m, c in form.terms.items() if m & bit}, form.dt_index
    )
    return spatial, rest.contract(form.dt_index)


# ---------------------------------------------------------------------------
# the ODE system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ODESystem:
    """State symbols with exact Laurent right-hand sides."""

    model_kind: str
    indices: Tuple[int, ...]
    state: Tuple[str, ...]
    rhs: Mapping[str, LaurentPoly]
    rank: int
    n_equations: int

    @property
    def table(self) -> SymbolTable:
        return self.rhs[self.state[0]].table

    def rhs_substitution(self, table: Optional[SymbolTable] = None) -> Dict[str, LaurentPoly]:
        """Derivative-symbol substitution map, optionally lifted to a table."""
        if table is None:
            return {x + "'": p for x, p in self.rhs.items()}
        return {x + "'": p.lift(table) for x, p in self.rhs.items()}

    def numerator_denominator(self, name: str) -> Tuple[LaurentPoly, LaurentPoly]:
        """Clear negative exponents into a monomial denominator."""
        poly = self.rhs[name]
        width = len(poly.table.names)
        mins = [0] * width
        for vec in poly.terms:
            for i, e in enumerate(vec):
                mins[i] = min(mins[i], e)
        den_vec = tuple(-m for m in mins)
        den = LaurentPoly(poly.table, {den_vec: Fraction(1)})
        return poly * den, den

    def to_json_dict(self) -> dict:
        names = self.table.names

        def poly_terms(p: LaurentPoly) -> list:
            out = []
            for vec, c in p.sorted_terms():
                exps = {n: e for n, e in zip(names, vec) if e}
                out.append({"coeff": str(c), "exponents": exps})
            return out

        rhs = {}
        for x in self.state:
            num, den = self.numerator_denominator(x)
            rhs[x] = {"numerator": poly_terms(num), "denominator": poly_terms(den)}
        return {
            "model": self.model_kind,
            "indices": list(self.indices),
            "state": list(self.state),
            "rhs": rhs,
            "rank": self.rank,
            "n_equations": self.n_equations,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)


def _linear_system(
    dt_part: Multivector, unknowns: Sequence[str], table: SymbolTable
) -> List[Tuple[Dict[str, LaurentPoly], LaurentPoly]]:
    """Decompose each coefficient as sum(A_x * x') + B, exactly."""
    idx = {x: table.index(x + "'") for x in unknowns}
    base_width = len(table.names)
    eqs = []
    for mask, poly in dt_part.sorted_terms():
        a: Dict[str, Dict] = {x: {} for x in unknowns}
        b: Dict[Tuple[int, ...], Fraction] = {}
        for vec, c in poly.terms.items():
            deg = sum(vec[table.nbase :])
            if deg == 0:
                b[vec] = c
            elif deg == 1:
                for x, j in idx.items():
                    if vec[j] == 1:
                        nv = list(vec)
                        nv[j] = 0
                        a[x][tuple(nv)] = c
                        break
                else:
                    raise DerivationError("unexpected derivative symbol in equation")
            else:
                raise DerivationError("equation is nonlinear in the derivative symbols")
        eqs.append(
            (
                {x: LaurentPoly(table, t) for x, t in a.items() if t},
                LaurentPoly(table, b),
            )
        )
    return eqs


def _solve_linear(
    eqs: List[Tuple[Dict[str, LaurentPoly], LaurentPoly]],
    unknowns: Sequence[str],
    table: SymbolTable,
) -> Tuple[Dict[str, LaurentPoly], int]:
    """Exact Gaussian elimination; pivots chosen by smallest support."""
    work = [
        ({x: RatFunc(p) for x, p in a.items()}, RatFunc(b)) for a, b in eqs
    ]
    solved: Dict[str, Tuple[Dict[str, RatFunc], RatFunc]] = {}
    rank = 0
    for x in unknowns:
        best = None
        for i, (a, b) in enumerate(work):
            if x in a and not a[x].is_zero:
                key = (len(a[x].num.terms) + len(a[x].den.terms), len(a), i)
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            continue
        _, i = best
        a, b = work.pop(i)
        pivot = a.pop(x)
        row = {y: c / pivot for y, c in a.items()}
        const = b / pivot
        # substitute into the remaining equations
        new_work = []
        for a2, b2 in work:
            if x in a2:
                coeff = a2.pop(x)
                for y, c in row.items():
                    a2[y] = (a2.get(y, RatFunc(LaurentPoly.zero(table)))) - coeff * c
                b2 = b2 - coeff * const
                a2 = {y: c for y, c in a2.items() if not c.is_zero}
            new_work.append((a2, b2))
        work = new_work
        solved[x] = (row, const)
        rank += 1
    for a, b in work:
        if any(not c.is_zero for c in a.values()) or not b.is_zero:
            raise DerivationError("inconsistent closure equations")
    if rank != len(unknowns):
        missing = [x for x in unknowns if x not in solved]
        raise DerivationError(f"underdetermined system; no pivot for {missing}")
    # back substitution: x + sum(row_y * y) + const = 0
    values: Dict[str, RatFunc] = {}
    for x in reversed(list(solved)):
        row, const = solved[x]
        acc = const
        for y, c in row.items():
            acc = acc + c * values[y]
        values[x] = -acc
    return {x: v.as_laurent() for x, v in values.items()}, rank


def derive_flow(model: CosetModel, struct: Optional[Spin7Structure] = None) -> ODESystem:
    """Derive the holonomy ODE system from d(Omega) = 0, exactly."""
    struct = struct or build_invariant_structure(model)
    table = struct.table
    d_omega = exterior_d_time(struct.Omega, model, model.symbols.base)
    iso_mask = 0
    for i in model.isotropy_indices:
        iso_mask |= 1 << i
    for mask in d_omega.terms:
        if mask & iso_mask:
            raise DerivationError("d(Omega) is not basic; bookkeeping error")
    spatial, dt_part = split_dt(d_omega)
    if not spatial.is_zero:
        raise DerivationError(
            f"spatial part of d(Omega) does not vanish identically: {spatial!r}"
        )
    unknowns = tuple(model.symbols.base)
    eqs = _linear_system(dt_part, unknowns, table)
    rhs, rank = _solve_linear(eqs, unknowns, table)
    sys = ODESystem(
        model_kind=model.kind,
        indices=model.indices,
        state=unknowns,
        rhs=rhs,
        rank=rank,
        n_equations=len(eqs),
    )
    residual = closure_residual(struct, sys, model)
    if not residual.is_zero:
        raise DerivationError("back-substitution of the derived system fails")
    return sys


def closure_residual(
    struct: Spin7Structure, sys: ODESystem, model: Optional[CosetModel] = None
) -> Multivector:
    """d(Omega) with the derivative symbols replaced by the derived sides."""
    model = model or struct.model
    table = struct.table
    d_omega = exterior_d_time(struct.Omega, model, sys.state)
    subs = sys.rhs_substitution(table)
    return coefficient_map(d_omega, lambda p: p.subs_derivatives(subs))


# ---------------------------------------------------------------------------
# cosymplectic constraints and the Hitchin flow residual
# ---------------------------------------------------------------------------


def cosymplectic_constraints(model: CosetModel) -> List[LaurentPoly]:
    """Polynomial constraints forcing d(*omega) = 0 on the orbit.

    An empty list means every structure in the invariant ansatz is
    cosymplectic.
    """
    struct = build_invariant_structure(model)
    d_star = invariant_d(struct.star_omega, model)
    return [poly for _, poly in d_star.sorted_terms()]


def hitchin_residual(model: CosetModel, sys: ODESystem) -> Multivector:
    """d/dt(*omega) - d_orbit(omega) under the derived system; contract: 0."""
    struct = build_invariant_structure(model)
    subs = sys.rhs_substitution(struct.table)
    lhs = coefficient_map(
        time_chain(struct.star_omega, sys.state),
        lambda p: p.subs_derivatives(subs),
    )
    rhs = invariant_d(struct.omega, model)
    return lhs - rhs


def perturbed_system(sys: ODESystem, name: str, factor: Fraction = Fraction(2)) -> ODESystem:
    """Scale one right-hand side; used by the mutation checks."""
    rhs = dict(sys.rhs)
    rhs[name] = rhs[name] * factor
    return ODESystem(
        sys.model_kind, sys.indices, sys.state, rhs, sys.rank, sys.n_equations
    )


# ---------------------------------------------------------------------------
# the Kaehler certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KaehlerCertificate:
    """Unique closed invariant two-form, up to overall sign."""

    model_kind: str
    signs: Tuple[int, ...]
    eta: Multivector
    all_solutions: Tuple[Tuple[int, ...], ...]

    @property
    def unique_up_to_sign(self) -> bool:
        return len(self.all_solutions) == 2


def invariant_two_form_terms(model: CosetModel, struct: Spin7Structure) -> List[Multivector]:
    """Basis of invariant two-forms paired with their metric coefficients."""
    table = struct.table
    gens = struct.gens
    dt = struct.dt_index

    def term(sym_exps, idx):
        coeff = LaurentPoly.monomial(table, 1, sym_exps)
        return Multivector.basis(gens, [i - 1 if i > 0 else dt for i in idx], coeff, dt_index=dt)

    if model.kind == "Q":
        return [
            term({"a": 2}, (1, 2)),
            term({"b": 2}, (3, 4)),
            term({"c": 2}, (5, 6)),
            term({"f": 1}, (7, 0)),  # f e7 ^ dt
        ]
    return [
        term({"a": 2}, (1, 2)) + term({"a": 2}, (3, 4)),
        term({"b": 2}, (5, 6)),
        term({"c": 1}, (7, 0)),
    ]


def kaehler_search(model: CosetModel, sys: ODESystem) -> KaehlerCertificate:
    """Enumerate sign vectors; keep those with d(eta) = 0 under the system."""
    struct = build_invariant_structure(model)
    basis = invariant_two_form_terms(model, struct)
    subs = sys.rhs_substitution(struct.table)
    winners = []
    for signs in product((1, -1), repeat=len(basis)):
        eta = Multivector.zero(struct.gens, struct.dt_index)
        for s, term in zip(signs, basis):
            eta = eta + (term if s == 1 else -term)
        d_eta = exterior_d_time(eta, model, sys.state)
        d_eta = coefficient_map(d_eta, lambda p: p.subs_derivatives(subs))
        if d_eta.is_zero:
            winners.append(signs)
    if not winners or len(winners) != 2:
        raise DerivationError(
            f"expected exactly one closed sign vector up to global sign, got {winners}"
        )
    signs = max(winners)  # representative with leading +1
    eta = Multivector.zero(struct.gens, struct.dt_index)
    for s, term in zip(signs, basis):
        eta = eta + (term if s == 1 else -term)
    # eta^4 must be a nonzero multiple of the volume form
    power = eta
    for _ in range(3):
        power = wedge(power, eta)
    if len(power.terms) != 1 or next(iter(power.terms.values())).is_zero:
        raise DerivationError("eta^4 is not a volume multiple")
    return KaehlerCertificate(model.kind, signs, eta, tuple(winners))
