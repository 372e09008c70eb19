"""Exact sparse exterior algebra over Laurent-polynomial coefficients.

Everything in this module is immutable and exact: coefficients are
arbitrary-precision rationals (:class:`fractions.Fraction`), exponents are
integers (negative exponents allowed on base symbols), and generator subsets
are canonical ascending bitmasks.  All operations return new objects; nothing
is mutated after construction, so values can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

#: Exact rational scalar type used everywhere in the package.  Always stored
#: in lowest terms with a positive denominator; arithmetic never rounds.
Rational = Fraction

ScalarLike = Union[int, Fraction]


class AlgebraError(ValueError):
    """Raised on malformed algebraic input (mismatched generators, etc.)."""


def _as_fraction(x: ScalarLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise AlgebraError(f"expected an exact rational scalar, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# symbol tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolTable:
    """Ordered base symbols plus their formal derivative symbols.

    A derivative symbol is spelled ``<base>'`` and is an ordinary commuting
    indeterminate; the chain rule is applied by callers, never here.  Base
    symbols may carry negative exponents (Laurent), derivative symbols only
    non-negative ones.
    """

    base: Tuple[str, ...]
    derivative: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.base)) != len(self.base):
            raise AlgebraError("duplicate base symbols")
        if len(set(self.derivative)) != len(self.derivative):
            raise AlgebraError("duplicate derivative symbols")
        if set(self.base) & set(self.derivative):
            raise AlgebraError("base and derivative symbols must be disjoint")
        for d in self.derivative:
            if not (d.endswith("'") and d[:-1] in self.base):
                raise AlgebraError(f"derivative symbol {d!r} has no matching base symbol")

    @property
    def names(self) -> Tuple[str, ...]:
        return self.base + self.derivative

    @property
    def nbase(self) -> int:
        return len(self.base)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AlgebraError(f"unknown symbol {name!r}") from None

    def with_derivatives(self) -> "SymbolTable":
        """Table with a derivative symbol for every base symbol."""
        return SymbolTable(self.base, tuple(b + "'" for b in self.base))

    def extended(self, extra_base: Sequence[str]) -> "SymbolTable":
        """Table with additional base symbols appended after the current ones."""
        return SymbolTable(self.base + tuple(extra_base), self.derivative)


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Sparse exact multivariate Laurent polynomial.

    Terms map exponent vectors (one integer slot per symbol of the table,
    base symbols first) to nonzero rationals.  Zero coefficients are pruned
    eagerly so that equality is plain dict equality.
    """

    __slots__ = ("table", "terms")

    def __init__(self, table: SymbolTable, terms: Mapping[Tuple[int, ...], Fraction]):
        self.table = table
        self.terms: Dict[Tuple[int, ...], Fraction] = dict(terms)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(table: SymbolTable) -> "LaurentPoly":
        return LaurentPoly(table, {})

    @staticmethod
    def const(table: SymbolTable, value: ScalarLike) -> "LaurentPoly":
        v = _as_fraction(value)
        if v == 0:
            return LaurentPoly.zero(table)
        return LaurentPoly(table, {(0,) * len(table.names): v})

    @staticmethod
    def monomial(
        table: SymbolTable, coeff: ScalarLike, exps: Mapping[str, int] | None = None
    ) -> "LaurentPoly":
        """``coeff * prod(sym**e)`` with exponents given by symbol name."""
        c = _as_fraction(coeff)
        if c == 0:
            return LaurentPoly.zero(table)
        vec = [0] * len(table.names)
        for name, e in (exps or {}).items():
            idx = table.index(name)
            if idx >= table.nbase and e < 0:
                raise AlgebraError(f"negative exponent on derivative symbol {name!r}")
            vec[idx] += int(e)
        return LaurentPoly(table, {tuple(vec): c})

    @staticmethod
    def variable(table: SymbolTable, name: str) -> "LaurentPoly":
        return LaurentPoly.monomial(table, 1, {name: 1})

    # -- bookkeeping ---------------------------------------------------------

    def _compat(self, other: "LaurentPoly") -> None:
        if self.table is not other.table and self.table != other.table:
            raise AlgebraError("LaurentPoly operands use different symbol tables")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> Iterable[Tuple[Tuple[int, ...], Fraction]]:
        return sorted(self.terms.items())

    @property
    def support_size(self) -> int:
        return len(self.terms)

    def constant_value(self) -> Fraction:
        """The rational value of a constant polynomial."""
        if not self.terms:
            return Fraction(0)
        ((vec, c),) = self.terms.items()
        if any(vec):
            raise AlgebraError("polynomial is not constant")
        return c

    def is_monomial(self) -> bool:
        return len(self.terms) <= 1

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(self.table, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._compat(other)
        out = dict(self.terms)
        for vec, c in other.terms.items():
            s = out.get(vec, Fraction(0)) + c
            if s:
                out[vec] = s
            else:
                out.pop(vec, None)
        return LaurentPoly(self.table, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.table, {v: -c for v, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(self.table, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = _as_fraction(other)
            if f == 0:
                return LaurentPoly.zero(self.table)
            return LaurentPoly(self.table, {v: c * f for v, c in self.terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._compat(other)
        out: Dict[Tuple[int, ...], Fraction] = {}
        for v1, c1 in self.terms.items():
            for v2, c2 in other.terms.items():
                vec = tuple(a + b for a, b in zip(v1, v2))
                s = out.get(vec, Fraction(0)) + c1 * c2
                if s:
                    out[vec] = s
                else:
                    out.pop(vec, None)
        return LaurentPoly(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if len(self.terms) != 1:
                raise AlgebraError("only monomials can be raised to negative powers")
            ((vec, c),) = self.terms.items()
            if any(vec[i] for i in range(self.table.nbase, len(vec))):
                raise AlgebraError("cannot invert a derivative-symbol monomial")
            if c.numerator == 0:
                raise ZeroDivisionError
            inv = LaurentPoly(self.table, {tuple(-e for e in vec): 1 / c})
            return inv ** (-n)
        out = LaurentPoly.const(self.table, 1)
        p = self
        while n:
            if n & 1:
                out = out * p
            p = p * p if n > 1 else p
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(self.table, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash((self.table, tuple(self.sorted_terms())))

    # -- calculus and substitution -------------------------------------------

    def diff(self, name: str) -> "LaurentPoly":
        """Formal partial derivative with respect to one base symbol."""
        idx = self.table.index(name)
        if idx >= self.table.nbase:
            raise AlgebraError("diff is defined on base symbols only")
        out: Dict[Tuple[int, ...], Fraction] = {}
        for vec, c in self.terms.items():
            e = vec[idx]
            if e == 0:
                continue
            nv = list(vec)
            nv[idx] = e - 1
            key = tuple(nv)
            s = out.get(key, Fraction(0)) + c * e
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return LaurentPoly(self.table, out)

    def subs_derivatives(self, rhs: Mapping[str, "LaurentPoly"]) -> "LaurentPoly":
        """Replace every derivative symbol by the given polynomial."""
        nb = self.table.nbase
        names = self.table.names
        out = LaurentPoly.zero(self.table)
        for vec, c in self.terms.items():
            piece = LaurentPoly(
                self.table, {vec[:nb] + (0,) * (len(vec) - nb): c}
            )
            for j in range(nb, len(vec)):
                e = vec[j]
                if e == 0:
                    continue
                name = names[j]
                if name not in rhs:
                    raise AlgebraError(f"no substitution supplied for {name!r}")
                piece = piece * rhs[name] ** e
            out = out + piece
        return out

    def compose_base(
        self, target: SymbolTable, images: Mapping[str, "LaurentPoly"]
    ) -> "LaurentPoly":
        """Substitute a monomial image for every base symbol.

        Monomial images keep negative exponents meaningful.  Derivative
        symbols must not occur in the source polynomial.
        """
        nb = self.table.nbase
        for vec in self.terms:
            if any(vec[nb:]):
                raise AlgebraError("compose_base is defined for derivative-free polynomials")
        mono: Dict[int, Tuple[Tuple[int, ...], Fraction]] = {}
        for i, name in enumerate(self.table.base):
            img = images[name]
            if img.table != target:
                raise AlgebraError("image polynomial on wrong symbol table")
            if len(img.terms) != 1:
                raise AlgebraError("base-symbol images must be monomials")
            ((ivec, ic),) = img.terms.items()
            mono[i] = (ivec, ic)
        width = len(target.names)
        out: Dict[Tuple[int, ...], Fraction] = {}
        for vec, c in self.terms.items():
            acc = [0] * width
            coeff = c
            for i in range(nb):
                e = vec[i]
                if e == 0:
                    continue
                ivec, ic = mono[i]
                coeff *= ic**e
                for k in range(width):
                    acc[k] += e * ivec[k]
            key = tuple(acc)
            s = out.get(key, Fraction(0)) + coeff
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return LaurentPoly(target, out)

    def scale_symbols(self, signs: Mapping[str, int]) -> "LaurentPoly":
        """Substitute ``sym -> sign*sym`` for the given symbols (sign = +-1)."""
        idx = {self.table.index(n): s for n, s in signs.items()}
        out: Dict[Tuple[int, ...], Fraction] = {}
        for vec, c in self.terms.items():
            f = c
            for i, s in idx.items():
                if s == -1 and vec[i] % 2:
                    f = -f
                elif s not in (1, -1):
                    raise AlgebraError("scale_symbols expects signs +-1")
            out[vec] = out.get(vec, Fraction(0)) + f
        return LaurentPoly(self.table, {v: c for v, c in out.items() if c})

    def reduce_circle(self, cos_name: str, sin_name: str) -> "LaurentPoly":
        """Normal form modulo ``cos**2 + sin**2 = 1`` (sin-degree <= 1)."""
        ci = self.table.index(cos_name)
        si = self.table.index(sin_name)
        out = LaurentPoly.zero(self.table)
        one_minus_c2 = LaurentPoly.const(self.table, 1) - LaurentPoly.monomial(
            self.table, 1, {cos_name: 2}
        )
        for vec, c in self.terms.items():
            e = vec[si]
            if e < 0:
                raise AlgebraError("negative sine exponent cannot be reduced")
            q, r = divmod(e, 2)
            nv = list(vec)
            nv[si] = r
            piece = LaurentPoly(self.table, {tuple(nv): c})
            if q:
                piece = piece * one_minus_c2**q
            out = out + piece
        return out

    def lift(self, target: SymbolTable) -> "LaurentPoly":
        """Re-express on a larger table containing all current symbols."""
        if target == self.table:
            return self
        pos = [target.index(n) for n in self.table.names]
        width = len(target.names)
        out: Dict[Tuple[int, ...], Fraction] = {}
        for vec, c in self.terms.items():
            nv = [0] * width
            for p, e in zip(pos, vec):
                nv[p] = e
            out[tuple(nv)] = c
        return LaurentPoly(target, out)

    def eval(self, assignment: Mapping[str, float]) -> float:
        """Evaluate in floating point; summation order is canonical."""
        vals = []
        for name in self.table.names:
            if name not in assignment:
                if any(vec[self.table.index(name)] for vec in self.terms):
                    raise AlgebraError(f"assignment missing symbol {name!r}")
                vals.append(1.0)
            else:
                vals.append(float(assignment[name]))
        total = 0.0
        for vec, c in self.sorted_terms():
            term = float(c)
            for x, e in zip(vals, vec):
                if e == 0:
                    continue
                if x == 0.0 and e < 0:
                    raise AlgebraError("zero assigned to a symbol with negative exponent")
                term *= x**e
            total += term
        return total

    # -- display ---------------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for vec, c in self.sorted_terms():
            factors = [str(c)]
            for name, e in zip(self.table.names, vec):
                if e == 1:
                    factors.append(name)
                elif e != 0:
                    factors.append(f"{name}^{e}")
            bits.append("*".join(factors))
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# multivectors
# ---------------------------------------------------------------------------


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(mask: int) -> Iterable[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _merge_sign(m1: int, m2: int) -> int:
    """Parity sign of merging two disjoint sorted index sets."""
    sign = 1
    for b in _bits(m2):
        if _popcount(m1 >> (b + 1)) % 2:
            sign = -sign
    return sign


class Multivector:
    """Sparse graded exterior form over a fixed generator coframe.

    Terms map ascending-index bitmasks to coefficients; a coefficient is a
    :class:`LaurentPoly` in symbolic mode or a ``float`` in numeric mode.
    The generator tagged ``dt`` (if any) is recorded by index.
    """

    __slots__ = ("gens", "dt_index", "terms")

    def __init__(
        self,
        gens: Sequence[str],
        terms: Mapping[int, object],
        dt_index: Optional[int] = None,
    ):
        if len(gens) > 12:
            raise AlgebraError("at most 12 generators are supported")
        self.gens = tuple(gens)
        self.dt_index = dt_index
        pruned = {}
        limit = 1 << len(self.gens)
        for mask, coeff in terms.items():
            if not 0 <= mask < limit:
                raise AlgebraError("subset mask out of range")
            if isinstance(coeff, LaurentPoly):
                if coeff.is_zero:
                    continue
            elif coeff == 0:
                continue
            pruned[mask] = coeff
        self.terms: Dict[int, object] = pruned

    # -- constructors -----------------------------------------------------------

    @staticmethod
    def zero(gens, dt_index=None) -> "Multivector":
        return Multivector(gens, {}, dt_index)

    @staticmethod
    def basis(gens, indices: Sequence[int], coeff, dt_index=None) -> "Multivector":
        """coeff * e^{i1} ^ ... ^ e^{ik}; index order contributes its parity."""
        if len(set(indices)) != len(indices):
            raise AlgebraError("basis indices must be distinct")
        mask = 0
        for i in indices:
            mask |= 1 << i
        sign = _perm_sign_sort(list(indices))
        if sign < 0:
            coeff = -coeff
        return Multivector(gens, {mask: coeff}, dt_index)

    # -- bookkeeping -------------------------------------------------------------

    def _compat(self, other: "Multivector") -> None:
        if self.gens != other.gens:
            raise AlgebraError("multivectors over different generator sets")
        if self.dt_index != other.dt_index:
            raise AlgebraError("multivectors disagree on the dt generator")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_numeric(self) -> bool:
        for c in self.terms.values():
            return not isinstance(c, LaurentPoly)
        return False

    def grades(self) -> Tuple[int, ...]:
        return tuple(sorted({_popcount(m) for m in self.terms}))

    def grade_part(self, k: int) -> "Multivector":
        return Multivector(
            self.gens,
            {m: c for m, c in self.terms.items() if _popcount(m) == k},
            self.dt_index,
        )

    def coefficient(self, indices: Sequence[int]):
        mask = 0
        for i in indices:
            mask |= 1 << i
        return self.terms.get(mask)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def indices_of(self, mask: int) -> Tuple[int, ...]:
        return tuple(_bits(mask))

    # -- linear structure -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        self._compat(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                out[m] = out[m] + c
            else:
                out[m] = c
        return Multivector(self.gens, out, self.dt_index)

    def __neg__(self):
        return Multivector(self.gens, {m: -c for m, c in self.terms.items()}, self.dt_index)

    def __sub__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self + (-other)

    def scaled(self, factor) -> "Multivector":
        return Multivector(
            self.gens, {m: c * factor for m, c in self.terms.items()}, self.dt_index
        )

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return (
            self.gens == other.gens
            and self.dt_index == other.dt_index
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.gens, self.dt_index, tuple(sorted(self.terms))))

    # -- products ---------------------------------------------------------------------

    def wedge(self, other: "Multivector") -> "Multivector":
        self._compat(other)
        out: Dict[int, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if m1 & m2:
                    continue
                sign = _merge_sign(m1, m2)
                coeff = c1 * c2
                if sign < 0:
                    coeff = -coeff
                key = m1 | m2
                if key in out:
                    out[key] = out[key] + coeff
                else:
                    out[key] = coeff
        return Multivector(self.gens, out, self.dt_index)

    def hodge_star(self, orientation: int = 1) -> "Multivector":
        """Hodge star in an orthonormal coframe over all ``n`` generators."""
        if orientation not in (1, -1):
            raise AlgebraError("orientation must be +-1")
        full = (1 << len(self.gens)) - 1
        out: Dict[int, object] = {}
        for m, c in self.terms.items():
            comp = full ^ m
            sign = orientation
            for b in _bits(comp):
                if _popcount(m >> (b + 1)) % 2:
                    sign = -sign
            out[comp] = -c if sign < 0 else c
        return Multivector(self.gens, out, self.dt_index)

    def rescale_coframe(self, scales: Sequence[Optional[LaurentPoly]]) -> "Multivector":
        """Multiply each e^I by the product of per-generator monomial scales."""
        if len(scales) != len(self.gens):
            raise AlgebraError("one scale per generator required")
        for s in scales:
            if s is None:
                continue
            if len(s.terms) != 1:
                raise AlgebraError("coframe scales must be monomials")
            ((vec, _),) = s.terms.items()
            if any(vec[s.table.nbase:]):
                raise AlgebraError("coframe scales cannot involve derivative symbols")
        out: Dict[int, object] = {}
        for m, c in self.terms.items():
            coeff = c
            for b in _bits(m):
                s = scales[b]
                if s is not None:
                    coeff = coeff * s
            out[m] = coeff
        return Multivector(self.gens, out, self.dt_index)

    def contract(self, gen_index: int) -> "Multivector":
        """Interior product against the vector dual to one coframe generator."""
        bit = 1 << gen_index
        out: Dict[int, object] = {}
        for m, c in self.terms.items():
            if not m & bit:
                continue
            pos = _popcount(m & (bit - 1))
            coeff = -c if pos % 2 else c
            key = m ^ bit
            if key in out:
                out[key] = out[key] + coeff
            else:
                out[key] = coeff
        return Multivector(self.gens, out, self.dt_index)

    # -- coframe substitutions -----------------------------------------------------------

    def pushforward(
        self,
        target_gens: Sequence[str],
        mapping: Mapping[int, Tuple[int, object]],
        target_dt: Optional[int] = None,
    ) -> "Multivector":
        """Substitute ``e^old = scale * e^new`` with an injective index map."""
        out: Dict[int, object] = {}
        for m, c in self.terms.items():
            coeff = c
            new_idx = []
            for b in _bits(m):
                if b not in mapping:
                    raise AlgebraError(f"no image for generator index {b}")
                tgt, scale = mapping[b]
                new_idx.append(tgt)
                if scale is not None and scale != 1:
                    coeff = coeff * scale
            if len(set(new_idx)) != len(new_idx):
                raise AlgebraError("pushforward index map is not injective on this term")
            sign = _perm_sign_sort(new_idx)
            if sign < 0:
                coeff = -coeff
            mask = 0
            for i in new_idx:
                mask |= 1 << i
            if mask in out:
                out[mask] = out[mask] + coeff
            else:
                out[mask] = coeff
        return Multivector(target_gens, out, target_dt)

    def substitute_generators(
        self, images: Mapping[int, Sequence[Tuple[int, object]]]
    ) -> "Multivector":
        """Replace ``e^i`` by a linear combination ``sum(coeff * e^j)``.

        Generators absent from ``images`` are kept.  Used for coframe
        rotations; coefficients multiply the existing ones.
        """
        out = Multivector.zero(self.gens, self.dt_index)
        for m, c in self.terms.items():
            pieces = [Multivector(self.gens, {0: c}, self.dt_index)]
            for b in _bits(m):
                if b in images:
                    one = Multivector(
                        self.gens,
                        {1 << j: w for j, w in images[b]},
                        self.dt_index,
                    )
                else:
                    one = Multivector(self.gens, {1 << b: _one_like(c)}, self.dt_index)
                pieces = [p.wedge(one) for p in pieces]
            out = out + pieces[0]
        return out

    # -- evaluation ----------------------------------------------------------------------

    def eval_numeric(self, assignment: Mapping[str, float]) -> "Multivector":
        out: Dict[int, object] = {}
        for m, c in self.sorted_terms():
            if isinstance(c, LaurentPoly):
                out[m] = c.eval(assignment)
            else:
                out[m] = float(c)
        return Multivector(self.gens, out, self.dt_index)

    def max_abs_coefficient(self) -> float:
        if not self.is_numeric:
            raise AlgebraError("max_abs_coefficient needs a numeric multivector")
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in self.sorted_terms():
            label = "^".join(self.gens[b] for b in _bits(m)) or "1"
            bits.append(f"({c!r}) {label}")
        return " + ".join(bits)


def _one_like(coeff):
    if isinstance(coeff, LaurentPoly):
        return LaurentPoly.const(coeff.table, 1)
    return 1.0


def _perm_sign_sort(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` ascending (counts inversions)."""
    inv = 0
    n = len(seq)
    for i in range(n):
        for j in range(i + 1, n):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


# ---------------------------------------------------------------------------
# module-level operation aliases (the spec-facing free functions)
# ---------------------------------------------------------------------------


def wedge(u: Multivector, v: Multivector) -> Multivector:
    return u.wedge(v)


def hodge_star(u: Multivector, orientation: int = 1) -> Multivector:
    return u.hodge_star(orientation)


def rescale_coframe(u: Multivector, scales: Sequence[Optional[LaurentPoly]]) -> Multivector:
    return u.rescale_coframe(scales)


def eval_numeric(x, assignment: Mapping[str, float]):
    if isinstance(x, LaurentPoly):
        return x.eval(assignment)
    if isinstance(x, Multivector):
        return x.eval_numeric(assignment)
    raise AlgebraError("eval_numeric expects a LaurentPoly or Multivector")
