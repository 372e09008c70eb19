"""Lie-algebra data for the two coset models and the invariant calculus.

The bases are stored as tuples of complex matrices with exact Gaussian
rational entries, so traces, commutators and the induced structure constants
never round.  The Q model lives in three copies of su(2); the M model in
su(3) + su(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

from .algebra import LaurentPoly, Multivector, SymbolTable

# complex entries are (real, imaginary) pairs of Fractions
Entry = Tuple[Fraction, Fraction]
Matrix = Tuple[Tuple[Entry, ...], ...]
MatrixTuple = Tuple[Matrix, ...]

_ZERO = (Fraction(0), Fraction(0))


class ModelError(ValueError):
    """Raised for invalid coset-model input."""


# ---------------------------------------------------------------------------
# exact complex matrix helpers
# ---------------------------------------------------------------------------


def _c(re=0, im=0) -> Entry:
    return (Fraction(re), Fraction(im))


def _cadd(x: Entry, y: Entry) -> Entry:
    return (x[0] + y[0], x[1] + y[1])


def _cmul(x: Entry, y: Entry) -> Entry:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _cneg(x: Entry) -> Entry:
    return (-x[0], -x[1])


def _zeros(n: int) -> Matrix:
    return tuple(tuple(_ZERO for _ in range(n)) for _ in range(n))


def _madd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(_cadd(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
    )


def _mneg(a: Matrix) -> Matrix:
    return tuple(tuple(_cneg(x) for x in row) for row in a)


def _mscale(a: Matrix, s: Fraction) -> Matrix:
    return tuple(tuple((x[0] * s, x[1] * s) for x in row) for row in a)


def _mmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = _ZERO
            for k in range(n):
                acc = _cadd(acc, _cmul(a[i][k], b[k][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _mtrace(a: Matrix) -> Entry:
    acc = _ZERO
    for i in range(len(a)):
        acc = _cadd(acc, a[i][i])
    return acc


def tuple_bracket(x: MatrixTuple, y: MatrixTuple) -> MatrixTuple:
    return tuple(
        _madd(_mmul(a, b), _mneg(_mmul(b, a))) for a, b in zip(x, y)
    )


def tuple_add(x: MatrixTuple, y: MatrixTuple) -> MatrixTuple:
    return tuple(_madd(a, b) for a, b in zip(x, y))


def tuple_scale(x: MatrixTuple, s: Fraction) -> MatrixTuple:
    return tuple(_mscale(a, s) for a in x)


def tuple_is_zero(x: MatrixTuple) -> bool:
    return all(e == _ZERO for m in x for row in m for e in row)


def q_inner(x: MatrixTuple, y: MatrixTuple) -> Fraction:
    """Biinvariant metric q(X,Y) = -tr(XY), summed over matrix blocks."""
    acc = _ZERO
    for a, b in zip(x, y):
        acc = _cadd(acc, _mtrace(_mmul(a, b)))
    if acc[1] != 0:
        raise ModelError("q(X,Y) is not real; basis matrices are not skew-hermitian")
    return -acc[0]


# ---------------------------------------------------------------------------
# model bases
# ---------------------------------------------------------------------------


def _sigma() -> Tuple[Matrix, Matrix, Matrix]:
    h = Fraction(1, 2)
    s1 = ((_c(0, 0), _c(0, h)), (_c(0, h), _c(0, 0)))
    s2 = ((_c(0, 0), _c(h, 0)), (_c(-h, 0), _c(0, 0)))
    s3 = ((_c(0, h), _c(0, 0)), (_c(0, 0), _c(0, -h)))
    return s1, s2, s3


def _eij(n: int, i: int, j: int, re=0, im=0) -> Matrix:
    rows = [[_ZERO for _ in range(n)] for _ in range(n)]
    rows[i][j] = _c(re, im)
    return tuple(tuple(r) for r in rows)


def _m3(*pieces: Matrix) -> Matrix:
    out = _zeros(3)
    for p in pieces:
        out = _madd(out, p)
    return out


def _q_basis(k: int, l: int, m: int) -> Tuple[MatrixTuple, ...]:
    s1, s2, s3 = _sigma()
    z2 = _zeros(2)

    def trip(a, b, c):
        return (a, b, c)

    e = [
        trip(s1, z2, z2),
        trip(s2, z2, z2),
        trip(z2, s1, z2),
        trip(z2, s2, z2),
        trip(z2, z2, s1),
        trip(z2, z2, s2),
        trip(_mscale(s3, Fraction(k)), _mscale(s3, Fraction(l)), _mscale(s3, Fraction(m))),
        trip(_mscale(s3, Fraction(l)), _mscale(s3, Fraction(-k)), z2),
        trip(
            _mscale(s3, Fraction(m * k)),
            _mscale(s3, Fraction(m * l)),
            _mscale(s3, Fraction(-(k * k + l * l))),
        ),
    ]
    return tuple(e)


def _m_basis(k: int, l: int) -> Tuple[MatrixTuple, ...]:
    z2 = _zeros(2)
    z3 = _zeros(3)

    # su(3) block pieces
    e13 = lambda re, im: _m3(_eij(3, 0, 2, re, im))
    e31 = lambda re, im: _m3(_eij(3, 2, 0, re, im))
    e23 = lambda re, im: _m3(_eij(3, 1, 2, re, im))
    e32 = lambda re, im: _m3(_eij(3, 2, 1, re, im))
    e12 = lambda re, im: _m3(_eij(3, 0, 1, re, im))
    e21 = lambda re, im: _m3(_eij(3, 1, 0, re, im))

    def diag3(d1: Fraction, d2: Fraction, d3: Fraction) -> Matrix:
        out = _zeros(3)
        out = _madd(out, _mscale(_eij(3, 0, 0, 0, 1), d1))
        out = _madd(out, _mscale(_eij(3, 1, 1, 0, 1), d2))
        out = _madd(out, _mscale(_eij(3, 2, 2, 0, 1), d3))
        return out

    def diag2(d1: Fraction, d2: Fraction) -> Matrix:
        out = _zeros(2)
        out = _madd(out, _mscale(_eij(2, 0, 0, 0, 1), d1))
        out = _madd(out, _mscale(_eij(2, 1, 1, 0, 1), d2))
        return out

    # t1 = i diag(1/2, 1/2, -1) in su(3); t2 = i diag(-1/2, 1/2) in su(2)
    t1 = (diag3(Fraction(1, 2), Fraction(1, 2), Fraction(-1)), z2)
    t2 = (z3, diag2(Fraction(-1, 2), Fraction(1, 2)))

    su2_12 = lambda re, im: (_zeros(3), _madd(_eij(2, 0, 1, re, im), _zeros(2)))
    su2_21 = lambda re, im: (_zeros(3), _madd(_eij(2, 1, 0, re, im), _zeros(2)))

    def pair(a: Matrix, b: Matrix) -> MatrixTuple:
        return (a, b)

    # e7 carries twice the central direction so that the metric coefficient c
    # matches the normalization of the holonomy ODE system and its solutions
    e = [
        pair(_madd(e13(1, 0), e31(-1, 0)), z2),
        pair(_madd(e13(0, 1), e31(0, 1)), z2),
        pair(_madd(e23(1, 0), e32(-1, 0)), z2),
        pair(_madd(e23(0, 1), e32(0, 1)), z2),
        tuple_add(su2_12(1, 0), su2_21(-1, 0)),
        tuple_add(su2_12(0, 1), su2_21(0, 1)),
        tuple_add(tuple_scale(t1, Fraction(2 * k)), tuple_scale(t2, Fraction(2 * l))),
        pair(_madd(e12(1, 0), e21(-1, 0)), z2),
        pair(_madd(e12(0, 1), e21(0, 1)), z2),
        pair(diag3(Fraction(1), Fraction(-1), Fraction(0)), z2),
        tuple_add(tuple_scale(t1, Fraction(2 * l, 3)), tuple_scale(t2, Fraction(-2 * k))),
    ]
    return tuple(e)


# ---------------------------------------------------------------------------
# structure constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StructureTensor:
    """Exact c^k_{ij} for i < j, stored sparsely."""

    n: int
    table: Mapping[Tuple[int, int], Mapping[int, Fraction]]

    def c(self, i: int, j: int, k: int) -> Fraction:
        if i == j:
            return Fraction(0)
        if i < j:
            return self.table.get((i, j), {}).get(k, Fraction(0))
        return -self.table.get((j, i), {}).get(k, Fraction(0))

    def bracket_coeffs(self, i: int, j: int) -> Dict[int, Fraction]:
        if i == j:
            return {}
        if i < j:
            return dict(self.table.get((i, j), {}))
        return {k: -v for k, v in self.table.get((j, i), {}).items()}


@dataclass(frozen=True)
class CosetModel:
    """One of Q(k,l,m) or M(k,l) with its exact matrix basis.

    Indices 0..6 span the tangent space; the rest span the isotropy algebra.
    The metric q(X,Y) = -tr(XY) is diagonal on the basis (verified at build
    time), which is what makes exact projection of brackets possible.
    """

    kind: str
    indices: Tuple[int, ...]
    basis: Tuple[MatrixTuple, ...]
    gen_names: Tuple[str, ...]
    q_norms: Tuple[Fraction, ...]
    structure: StructureTensor

    TANGENT = 7

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def isotropy_indices(self) -> Tuple[int, ...]:
        return tuple(range(self.TANGENT, self.n))

    @property
    def label(self) -> str:
        return f"{self.kind}{self.indices}"

    @property
    def symbols(self) -> SymbolTable:
        if self.kind == "Q":
            return SymbolTable(("a", "b", "c", "f")).with_derivatives()
        return SymbolTable(("a", "b", "c")).with_derivatives()

    #: Cartan-invariant two-plane index pairs of the tangent space + fixed line
    PLANES = ((0, 1), (2, 3), (4, 5))
    FIXED = (6,)

    @property
    def modules(self) -> Tuple[Tuple[int, ...], ...]:
        """Irreducible isotropy submodules of the tangent space."""
        if self.kind == "Q":
            return ((0, 1), (2, 3), (4, 5), (6,))
        return ((0, 1, 2, 3), (4, 5), (6,))


def _project(model_basis, q_norms, x: MatrixTuple) -> Dict[int, Fraction]:
    out = {}
    for idx, e in enumerate(model_basis):
        c = q_inner(x, e) / q_norms[idx]
        if c:
            out[idx] = c
    return out


def _build_structure(basis: Tuple[MatrixTuple, ...]) -> Tuple[StructureTensor, Tuple[Fraction, ...]]:
    n = len(basis)
    # q must be diagonal and nonzero on the basis
    norms = []
    for i in range(n):
        for j in range(n):
            v = q_inner(basis[i], basis[j])
            if i == j:
                if v <= 0:
                    raise ModelError("basis vector with non-positive q-norm")
                norms.append(v)
            elif v != 0:
                raise ModelError(f"basis is not q-orthogonal at pair {(i + 1, j + 1)}")
    table: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            br = tuple_bracket(basis[i], basis[j])
            coeffs = _project(basis, norms, br)
            # closure: the projection must reproduce the bracket exactly
            recon = None
            for k, c in coeffs.items():
                piece = tuple_scale(basis[k], c)
                recon = piece if recon is None else tuple_add(recon, piece)
            residual = br if recon is None else tuple_add(br, tuple_scale(recon, Fraction(-1)))
            if not tuple_is_zero(residual):
                raise ModelError("basis is not closed under brackets")
            if coeffs:
                table[(i, j)] = coeffs
    # Jacobi identity on the structure tensor (closure already ties it to
    # the matrices exactly)
    st = StructureTensor(n, table)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                acc: Dict[int, Fraction] = {}
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for mid, cm in st.bracket_coeffs(a, b).items():
                        for fin, cf in st.bracket_coeffs(mid, c).items():
                            acc[fin] = acc.get(fin, Fraction(0)) + cm * cf
                if any(acc.values()):
                    raise ModelError("Jacobi identity failed")
    return st, tuple(norms)


def _normalize_q(k: int, l: int, m: int) -> Tuple[int, int, int]:
    t = sorted((abs(k), abs(l), abs(m)), reverse=True)
    if t == [0, 0, 0]:
        raise ModelError("(k,l,m) must not all vanish")
    g = math.gcd(math.gcd(t[0], t[1]), t[2])
    return (t[0] // g, t[1] // g, t[2] // g)


def _normalize_m(k: int, l: int) -> Tuple[int, int]:
    a, b = abs(k), abs(l)
    if (a, b) == (0, 0):
        raise ModelError("(k,l) must not both vanish")
    g = math.gcd(a, b)
    return (a // g, b // g)


@lru_cache(maxsize=None)
def q_model(k: int, l: int, m: int) -> CosetModel:
    """SU(2)^3 / U(1)^2 with embedding indices (k,l,m), normalized."""
    nk, nl, nm = _normalize_q(k, l, m)
    basis = _q_basis(nk, nl, nm)
    structure, norms = _build_structure(basis)
    model = CosetModel(
        kind="Q",
        indices=(nk, nl, nm),
        basis=basis,
        gen_names=tuple(f"e{i}" for i in range(1, 10)),
        q_norms=norms,
        structure=structure,
    )
    _check_isotropy_action(model)
    return model


@lru_cache(maxsize=None)
def m_model(k: int, l: int) -> CosetModel:
    """(SU(3) x SU(2)) / (SU(2) x U(1)) with embedding indices (k,l)."""
    nk, nl = _normalize_m(k, l)
    basis = _m_basis(nk, nl)
    structure, norms = _build_structure(basis)
    model = CosetModel(
        kind="M",
        indices=(nk, nl),
        basis=basis,
        gen_names=tuple(f"e{i}" for i in range(1, 12)),
        q_norms=norms,
        structure=structure,
    )
    _check_isotropy_action(model)
    return model


def get_model(kind: str, indices: Sequence[int]) -> CosetModel:
    kind = kind.upper()
    if kind == "Q":
        return q_model(*indices)
    if kind == "M":
        return m_model(*indices)
    raise ModelError(f"unknown model kind {kind!r}")


def _check_isotropy_action(model: CosetModel) -> None:
    """Isotropy ad-action must be q-skew and block-diagonal on the planes."""
    st = model.structure
    blocks = [set(p) for p in model.modules]
    for x in model.isotropy_indices:
        for i in range(model.TANGENT):
            for j in range(model.TANGENT):
                cij = st.c(x, i, j)
                cji = st.c(x, j, i)
                if model.q_norms[j] * cij != -model.q_norms[i] * cji:
                    raise ModelError("isotropy action is not q-skew")
                if cij:
                    if not any(i in b and j in b for b in blocks):
                        raise ModelError("isotropy action does not preserve the modules")
        for i in range(model.TANGENT):
            for k, c in st.bracket_coeffs(x, i).items():
                if c and k >= model.TANGENT:
                    raise ModelError("isotropy bracket leaves the tangent space")


# ---------------------------------------------------------------------------
# invariant exterior derivative and basic forms
# ---------------------------------------------------------------------------


def group_gens(model: CosetModel) -> Tuple[str, ...]:
    """Group coframe generator names with a trailing dt slot."""
    return model.gen_names + ("dt",)


def maurer_cartan(model: CosetModel, gens=None, dt_index=None, table=None) -> List[Multivector]:
    """de^i = -(1/2) c^i_{jk} e^j ^ e^k for every group generator."""
    gens = gens or group_gens(model)
    if dt_index is None:
        dt_index = len(gens) - 1 if gens[-1] == "dt" else None
    table = table or model.symbols
    st = model.structure
    out = []
    for i in range(model.n):
        terms: Dict[int, LaurentPoly] = {}
        for (j, k), coeffs in st.table.items():
            c = coeffs.get(i)
            if not c:
                continue
            mask = (1 << j) | (1 << k)
            prev = terms.get(mask, LaurentPoly.zero(table))
            terms[mask] = prev + LaurentPoly.const(table, -c)
        out.append(Multivector(gens, {m: c for m, c in terms.items() if not c.is_zero}, dt_index))
    return out


def invariant_d(form: Multivector, model: CosetModel) -> Multivector:
    """Exterior derivative of an invariant form with constant coefficients.

    Coefficients are treated as constants; any time dependence (chain rule
    in dt) is the flow module's business.
    """
    table = None
    for c in form.terms.values():
        if isinstance(c, LaurentPoly):
            table = c.table
        break
    des = maurer_cartan(model, form.gens, form.dt_index, table)
    n_group = model.n
    out = Multivector.zero(form.gens, form.dt_index)
    for mask, coeff in form.terms.items():
        idxs = list(form.indices_of(mask))
        for pos, b in enumerate(idxs):
            if b >= n_group:
                continue  # d(dt) = 0
            prefix = 0
            for q in idxs[:pos]:
                prefix |= 1 << q
            suffix = 0
            for q in idxs[pos + 1 :]:
                suffix |= 1 << q
            piece = Multivector(form.gens, {prefix: _const_like(coeff)}, form.dt_index)
            piece = piece.wedge(des[b])
            piece = piece.wedge(Multivector(form.gens, {suffix: _const_like(coeff)}, form.dt_index))
            if pos % 2:
                piece = -piece
            out = out + piece.scaled(coeff)
    return out


def _const_like(coeff):
    if isinstance(coeff, LaurentPoly):
        return LaurentPoly.const(coeff.table, 1)
    return 1.0


def is_basic(form: Multivector, model: CosetModel) -> bool:
    """True iff the form is horizontal and isotropy-invariant.

    Horizontality: no isotropy generator occurs in any stored subset.
    Invariance: the Cartan-formula Lie derivative along every isotropy
    generator vanishes.
    """
    iso_mask = 0
    for i in model.isotropy_indices:
        iso_mask |= 1 << i
    for mask in form.terms:
        if mask & iso_mask:
            return False
    d_form = invariant_d(form, model)
    for x in model.isotropy_indices:
        lie = d_form.contract(x) + invariant_d(form.contract(x), model)
        if not lie.is_zero:
            return False
    return True


# ---------------------------------------------------------------------------
# isotropy weights and the admissibility classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightMultiset:
    """Integer weight vectors of the isotropy Cartan on the tangent planes."""

    weights: Tuple[Tuple[int, ...], ...]
    trivial: int

    def canonical(self) -> Tuple[Tuple[int, ...], ...]:
        out = []
        for w in self.weights:
            lead = next((x for x in w if x != 0), 0)
            out.append(tuple(-x for x in w) if lead < 0 else tuple(w))
        return tuple(sorted(out))


def _kernel_basis_1x3(k: int, l: int, m: int) -> List[Tuple[int, int, int]]:
    """HNF basis of the integer solution lattice of k*x + l*y + m*z = 0."""
    row = [k, l, m]
    u = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]  # columns track the transformation
    # column reduction: gcd sweep
    while True:
        nz = [i for i in range(3) if row[i] != 0]
        if len(nz) <= 1:
            break
        piv = min(nz, key=lambda i: abs(row[i]))
        for i in nz:
            if i == piv:
                continue
            qt = row[i] // row[piv]
            row[i] -= qt * row[piv]
            for r in range(3):
                u[r][i] -= qt * u[r][piv]
    kernel = [tuple(u[r][i] for r in range(3)) for i in range(3) if row[i] == 0]
    return _hnf_rows(kernel)


def _hnf_rows(rows: List[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    """Row Hermite normal form of a full-rank integer row set (deterministic)."""
    mat = [list(r) for r in rows]
    ncols = len(mat[0])
    pivot_row = 0
    for col in range(ncols):
        cand = [r for r in range(pivot_row, len(mat)) if mat[r][col] != 0]
        if not cand:
            continue
        # gcd the candidate rows into one pivot row
        while len([r for r in range(pivot_row, len(mat)) if mat[r][col] != 0]) > 1:
            live = [r for r in range(pivot_row, len(mat)) if mat[r][col] != 0]
            live.sort(key=lambda r: abs(mat[r][col]))
            r0, r1 = live[0], live[1]
            qt = mat[r1][col] // mat[r0][col]
            for c in range(ncols):
                mat[r1][c] -= qt * mat[r0][c]
        r0 = next(r for r in range(pivot_row, len(mat)) if mat[r][col] != 0)
        mat[pivot_row], mat[r0] = mat[r0], mat[pivot_row]
        if mat[pivot_row][col] < 0:
            mat[pivot_row] = [-x for x in mat[pivot_row]]
        for r in range(pivot_row):
            qt = mat[r][col] // mat[pivot_row][col]
            for c in range(ncols):
                mat[r][c] -= qt * mat[pivot_row][c]
        pivot_row += 1
    return [tuple(r) for r in mat]


def _plane_speed(model: CosetModel, x: MatrixTuple, plane: Tuple[int, int]) -> Fraction:
    """Rotation speed of ad_x on one invariant 2-plane (must be skew there)."""
    i, j = plane
    bi = tuple_bracket(x, model.basis[i])
    bj = tuple_bracket(x, model.basis[j])
    cji = q_inner(bi, model.basis[j]) / model.q_norms[j]
    cij = q_inner(bj, model.basis[i]) / model.q_norms[i]
    if cij != -cji:
        raise ModelError("isotropy action is not skew on an invariant plane")
    # residual outside the plane would violate invariance
    for idx in range(model.TANGENT):
        if idx in plane:
            continue
        if q_inner(bi, model.basis[idx]) != 0 or q_inner(bj, model.basis[idx]) != 0:
            raise ModelError("isotropy action leaves an invariant plane")
    return cji


def _cartan_elements(model: CosetModel) -> List[MatrixTuple]:
    if model.kind == "Q":
        k, l, m = model.indices
        s3 = _sigma()[2]
        z2 = _zeros(2)
        out = []
        for x, y, z in _kernel_basis_1x3(k, l, m):
            out.append(
                (
                    _mscale(s3, Fraction(x)),
                    _mscale(s3, Fraction(y)),
                    _mscale(s3, Fraction(z)),
                )
            )
        return out
    # M model: Cartan of su(2) + u(1) spanned by e10, e11
    return [model.basis[9], model.basis[10]]


def isotropy_weights(model: CosetModel) -> WeightMultiset:
    """Weights of the isotropy Cartan on the invariant tangent 2-planes."""
    cartan = _cartan_elements(model)
    weights = []
    for plane in model.PLANES:
        vec = []
        for x in cartan:
            s = _plane_speed(model, x, plane)
            if s.denominator != 1:
                raise ModelError("non-integer weight on the chosen Cartan basis")
            vec.append(int(s))
        weights.append(tuple(vec))
    for idx in model.FIXED:
        for x in cartan:
            if not tuple_is_zero(tuple_bracket(x, model.basis[idx])):
                raise ModelError("expected fixed line is not fixed")
    return WeightMultiset(tuple(weights), trivial=len(model.FIXED))


def _su2_commutant_dim(model: CosetModel) -> int:
    """Dimension of the commutant of the isotropy su(2) acting on V1 (M model)."""
    mats = []
    for x_idx in (7, 8, 9):
        rows = []
        for i in range(4):
            br = tuple_bracket(model.basis[x_idx], model.basis[i])
            rows.append(
                [q_inner(br, model.basis[j]) / model.q_norms[j] for j in range(4)]
            )
        # column-action matrix: (ad x) e_i = sum_j rows[i][j] e_j
        mats.append([[rows[i][j] for i in range(4)] for j in range(4)])
    # solve [M, A] = 0 for all A: 16 unknowns
    rowsys: List[List[Fraction]] = []
    for a in mats:
        for p in range(4):
            for q in range(4):
                row = [Fraction(0)] * 16
                for r in range(4):
                    row[4 * r + q] += a[p][r]
                    row[4 * p + r] -= a[r][q]
                rowsys.append(row)
    return 16 - _rank_fraction_matrix(rowsys)


def _rank_fraction_matrix(rows: List[List[Fraction]]) -> int:
    mat = [r[:] for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(mat)):
            if mat[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pv = mat[rank][col]
        mat[rank] = [x / pv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def matches_g2_cartan_weights(model: CosetModel) -> bool:
    """Brute-force weight matcher against the rank-2 Cartan of G2.

    The G2 Cartan acts on three pairwise independent 2-planes with weight
    functionals u, v, u+v and fixes a line; a weight triple is equivalent
    to that pattern iff the weights are nonzero, pairwise independent and
    admit a vanishing +-1 combination.
    """
    if model.kind != "Q":
        raise ModelError("matches_g2_cartan_weights applies to the Q model")
    w = isotropy_weights(model).weights
    if any(all(x == 0 for x in v) for v in w):
        return False
    for i in range(3):
        for j in range(i + 1, 3):
            if w[i][0] * w[j][1] - w[i][1] * w[j][0] == 0:
                return False
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                if all(
                    s1 * w[0][t] + s2 * w[1][t] + s3 * w[2][t] == 0 for t in range(2)
                ):
                    return True
    return False


def matches_u2_weights(model: CosetModel) -> bool:
    """Weight matcher against the u(2) centralizer pattern inside G2.

    Requires: su(2) irreducible on V1 (quaternionic commutant), trivial on
    V2 + V3, and u(1) weight magnitudes in the ratio (mu, mu, 2 mu) with
    mu != 0 across (V1-plane, V1-plane, V2).
    """
    if model.kind != "M":
        raise ModelError("matches_u2_weights applies to the M model")
    st = model.structure
    for x in (7, 8, 9):
        for i in (4, 5, 6):
            if st.bracket_coeffs(x, i):
                return False
    if _su2_commutant_dim(model) != 4:
        return False
    u1 = model.basis[10]
    s1 = abs(_plane_speed(model, u1, (0, 1)))
    s2 = abs(_plane_speed(model, u1, (2, 3)))
    s3 = abs(_plane_speed(model, u1, (4, 5)))
    return s1 == s2 and s1 != 0 and s3 == 2 * s1


def classify_invariant_g2(model: CosetModel) -> bool:
    """Whether the coset admits an invariant G2-structure.

    Computed from the isotropy weights, not from the closed-form index
    criterion; the two are compared in the property suite.
    """
    if model.kind == "Q":
        return matches_g2_cartan_weights(model)
    return matches_u2_weights(model)


def structure_constants(model: CosetModel) -> StructureTensor:
    return model.structure
