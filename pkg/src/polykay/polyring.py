"""Exact sparse polynomial arithmetic in formal statistical symbols.

Monomials are built from four symbol kinds: the filter indeterminate ``y``,
power sums ``S`` indexed by a multi-index, moments ``m`` indexed likewise
(printed ``a[r]`` in one variable), and the sample size ``n``.  The sample
size never appears inside monomials; it lives in the coefficients, which are
rational functions of n whose denominators stay in factored falling-factorial
form ``scalar * n(n-1)...(n-m+1)``.  That is the shape every estimator
coefficient takes, it keeps reduction cheap, and it makes the emitted
formulas readable.

Everything here is exact: coefficients are big integers and fractions, never
floats.  Polynomials are treated as immutable values; all operations return
new objects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

from .errors import UsageError

__all__ = [
    "FILTER_Y",
    "POWER_SUM",
    "MOMENT",
    "SAMPLE_SIZE",
    "Symbol",
    "Monomial",
    "power_sum",
    "moment",
    "filter_y",
    "make_monomial",
    "RationalFunctionOfN",
    "rational_fn",
    "falling_factorial_poly",
    "Polynomial",
    "substitute_y_powers",
    "emit",
    "parse_json",
]

FILTER_Y = "y"
POWER_SUM = "S"
MOMENT = "m"
SAMPLE_SIZE = "n"

_INDEXED_KINDS = (POWER_SUM, MOMENT)
_ALL_KINDS = (FILTER_Y, POWER_SUM, MOMENT, SAMPLE_SIZE)


@dataclass(frozen=True)
class Symbol:
    """A formal symbol: kind plus, for power sums and moments, a multi-index."""

    kind: str
    index: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _ALL_KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind in _INDEXED_KINDS:
            if not self.index or any(r < 0 for r in self.index) or not any(self.index):
                raise ValueError(f"{self.kind} symbols need a non-zero multi-index")
        elif self.index is not None:
            raise ValueError(f"{self.kind} symbols carry no index")

    @cached_property
    def _key(self):
        return (self.kind, self.index or ())

    def key(self):
        return self._key

    def __str__(self) -> str:
        if self.kind == POWER_SUM:
            return "S[" + ",".join(map(str, self.index)) + "]"
        if self.kind == MOMENT:
            name = "a" if len(self.index) == 1 else "m"
            return name + "[" + ",".join(map(str, self.index)) + "]"
        return self.kind


@lru_cache(maxsize=None)
def _interned_symbol(kind: str, index: tuple[int, ...] | None) -> Symbol:
    return Symbol(kind, index)


def power_sum(index: Iterable[int]) -> Symbol:
    return _interned_symbol(POWER_SUM, tuple(index))


def moment(index: Iterable[int]) -> Symbol:
    return _interned_symbol(MOMENT, tuple(index))


def filter_y() -> Symbol:
    return _interned_symbol(FILTER_Y, None)


# A monomial maps symbols to positive exponents, stored sorted by symbol key.
Monomial = tuple


def make_monomial(pairs: Iterable[tuple[Symbol, int]]) -> Monomial:
    acc: dict[Symbol, int] = {}
    for sym, exp in pairs:
        if exp < 0:
            raise ValueError("monomial exponents must be non-negative")
        if exp:
            acc[sym] = acc.get(sym, 0) + exp
    return tuple(sorted(acc.items(), key=lambda se: se[0].key()))


# ---------------------------------------------------------------------------
# integer polynomials in n (dense little-endian tuples) and rational functions
# ---------------------------------------------------------------------------


def _poly_trim(coeffs: list[int]) -> tuple[int, ...]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _poly_add(a, b):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] += c
    return _poly_trim(out)


def _poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, z in enumerate(b):
                out[i + j] += x * z
    return _poly_trim(out)

def _poly_scale(a, c):
    if c == 0:
        return ()
    return tuple(x * c for x in a)


def _poly_eval(a, n: int) -> int:
    v = 0
    for c in reversed(a):
        v = v * n + c
    return v


def _poly_divide_root(a, root: int) -> tuple[int, ...]:
    """Exact synthetic division of a by (n - root); caller ensures a(root)=0."""
    out = []
    acc = 0
    for c in reversed(a):
        acc = c + acc * root
        out.append(acc)
    out.reverse()
    assert out[0] == 0, "not divisible by the given root"
    return _poly_trim(out[1:])


@lru_cache(maxsize=None)
def falling_factorial_poly(m: int) -> tuple[int, ...]:
    """Coefficients of n(n-1)...(n-m+1), constant term first; () never occurs
    since the empty product is 1."""
    poly: tuple[int, ...] = (1,)
    for j in range(m):
        poly = _poly_mul(poly, (-j, 1))
    return poly


@lru_cache(maxsize=None)
def _falling_tail(m_from: int, m_to: int) -> tuple[int, ...]:
    """Product (n - m_from)(n - m_from - 1)...(n - m_to + 1)."""
    poly: tuple[int, ...] = (1,)
    for j in range(m_from, m_to):
        poly = _poly_mul(poly, (-j, 1))
    return poly


@dataclass(frozen=True)
class RationalFunctionOfN:
    """An integer polynomial in n over ``den_scalar * (n)_{den_falling}``.

    Instances are kept canonical: numerator trimmed, integer content shared
    with the scalar divided out, and falling-factorial factors cancelled from
    the top whenever the numerator allows it.  Canonical form makes equality
    a plain field comparison.
    """

    num: tuple[int, ...]
    den_scalar: int = 1
    den_falling: int = 0

    # -- construction -------------------------------------------------------

    @staticmethod
    def _canonical(num, den_scalar, den_falling) -> "RationalFunctionOfN":
        if den_scalar == 0:
            raise ZeroDivisionError("zero denominator")
        num = _poly_trim(list(num))
        if not num:
            return RationalFunctionOfN((), 1, 0)
        if den_scalar < 0:
            num = tuple(-c for c in num)
            den_scalar = -den_scalar
        # cancel trailing falling-factorial factors dividing the numerator
        while den_falling > 0 and _poly_eval(num, den_falling - 1) == 0:
            num = _poly_divide_root(num, den_falling - 1)
            den_falling -= 1
        g = den_scalar
        for c in num:
            g = math.gcd(g, c)
            if g == 1:
                break
        if g > 1:
            num = tuple(c // g for c in num)
            den_scalar //= g
        return RationalFunctionOfN(tuple(num), den_scalar, den_falling)

    @classmethod
    def from_int(cls, value: int) -> "RationalFunctionOfN":
        return cls._canonical((value,), 1, 0)

    @classmethod
    def from_fraction(cls, value) -> "RationalFunctionOfN":
        f = Fraction(value)
        return cls._canonical((f.numerator,), f.denominator, 0)

    @classmethod
    def from_poly(cls, coeffs: Iterable[int]) -> "RationalFunctionOfN":
        return cls._canonical(tuple(coeffs), 1, 0)

    @classmethod
    def falling_inverse(cls, numerator: int, depth: int) -> "RationalFunctionOfN":
        """numerator / (n)_depth."""
        return cls._canonical((numerator,), 1, depth)

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == (1,) and self.den_scalar == 1 and self.den_falling == 0

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "RationalFunctionOfN":
        other = _coerce(other)
        if (
            self.den_falling == other.den_falling
            and self.den_scalar == other.den_scalar
        ):
            return self._canonical(
                _poly_add(self.num, other.num), self.den_scalar, self.den_falling
            )
        m = max(self.den_falling, other.den_falling)
        scalar = self.den_scalar * other.den_scalar // math.gcd(self.den_scalar, other.den_scalar)
        a = _poly_mul(
            _poly_scale(self.num, scalar // self.den_scalar),
            _falling_tail(self.den_falling, m),
        )
        b = _poly_mul(
            _poly_scale(other.num, scalar // other.den_scalar),
            _falling_tail(other.den_falling, m),
        )
        return self._canonical(_poly_add(a, b), scalar, m)

    def __neg__(self) -> "RationalFunctionOfN":
        return RationalFunctionOfN(tuple(-c for c in self.num), self.den_scalar, self.den_falling)

    def __sub__(self, other) -> "RationalFunctionOfN":
        return self + (-_coerce(other))

    def __mul__(self, other) -> "RationalFunctionOfN":
        other = _coerce(other)
        if self.den_falling and other.den_falling:
            # (n)_a * (n)_b has repeated roots, which a single falling factor
            # cannot represent; no generation or verification path needs it.
            raise ValueError(
                "product of two coefficients with falling-factorial denominators "
                "is not representable in factored form"
            )
        return self._canonical(
            _poly_mul(self.num, other.num),
            self.den_scalar * other.den_scalar,
            self.den_falling + other.den_falling,
        )

    __radd__ = __add__
    __rmul__ = __mul__

    def evaluate(self, n: int) -> Fraction:
        """Exact value at an integer sample size; the falling factorial must
        not vanish there."""
        den = self.den_scalar
        for j in range(self.den_falling):
            den *= n - j
        if den == 0:
            raise ZeroDivisionError(f"(n)_{self.den_falling} vanishes at n={n}")
        return Fraction(_poly_eval(self.num, n), den)

    def as_fraction(self) -> Fraction:
        """The constant value, if this coefficient does not involve n."""
        if self.den_falling or len(self.num) > 1:
            raise ValueError("coefficient depends on n")
        return Fraction(self.num[0] if self.num else 0, self.den_scalar)

    def to_json(self) -> dict:
        return {
            "num": list(self.num),
            "den_scalar": self.den_scalar,
            "den_falling": self.den_falling,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RationalFunctionOfN":
        return cls._canonical(
            tuple(int(c) for c in data["num"]),
            int(data["den_scalar"]),
            int(data["den_falling"]),
        )


def _coerce(value) -> RationalFunctionOfN:
    if isinstance(value, RationalFunctionOfN):
        return value
    if isinstance(value, int):
        return RationalFunctionOfN.from_int(value)
    if isinstance(value, Fraction):
        return RationalFunctionOfN.from_fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as a coefficient")


def rational_fn(num: Iterable[int], den_scalar: int = 1, den_falling: int = 0) -> RationalFunctionOfN:
    """Canonical constructor for num / (den_scalar * (n)_den_falling)."""
    return RationalFunctionOfN._canonical(tuple(num), den_scalar, den_falling)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Sparse polynomial: monomial -> coefficient, no zero coefficients stored.

    Term insertion order is preserved and is the emission order, so formulas
    come out in generation order and byte-stable across runs.  Equality
    ignores order.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Monomial, RationalFunctionOfN] | None = None):
        self.terms: dict[Monomial, RationalFunctionOfN] = terms or {}

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls({})

    @classmethod
    def constant(cls, value) -> "Polynomial":
        coeff = _coerce(value)
        if coeff.is_zero():
            return cls.zero()
        return cls({(): coeff})

    @classmethod
    def from_symbol(cls, sym: Symbol, exp: int = 1, coeff=1) -> "Polynomial":
        c = _coerce(coeff)
        if c.is_zero():
            return cls.zero()
        return cls({make_monomial([(sym, exp)]): c})

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[Monomial, RationalFunctionOfN]]) -> "Polynomial":
        out: dict[Monomial, RationalFunctionOfN] = {}
        for mono, coeff in pairs:
            acc = out.get(mono)
            coeff = coeff if acc is None else acc + coeff
            if coeff.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = coeff
        return cls(out)

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def dimension(self) -> int | None:
        """Multi-index length of the indexed symbols, None if there are none."""
        for mono in self.terms:
            for sym, _ in mono:
                if sym.kind in _INDEXED_KINDS:
                    return len(sym.index)
        return None

    def _check_compatible(self, other: "Polynomial") -> None:
        d1, d2 = self.dimension(), other.dimension()
        if d1 is not None and d2 is not None and d1 != d2:
            raise UsageError(f"operands mix variable dimensions {d1} and {d2}")

    def symbols(self) -> set[Symbol]:
        return {sym for mono in self.terms for sym, _ in mono}

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = out.get(mono)
            coeff = coeff if acc is None else acc + coeff
            if coeff.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = coeff
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        out: dict[Monomial, RationalFunctionOfN] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = make_monomial(tuple(m1) + tuple(m2))
                coeff = c1 * c2
                acc = out.get(mono)
                coeff = coeff if acc is None else acc + coeff
                if coeff.is_zero():
                    out.pop(mono, None)
                else:
                    out[mono] = coeff
        return Polynomial(out)

    def __pow__(self, exp: int) -> "Polynomial":
        if exp < 0:
            raise ValueError("negative polynomial powers are not defined")
        out = Polynomial.constant(1)
        for _ in range(exp):
            out = out * self
        return out

    def scale(self, value) -> "Polynomial":
        coeff = _coerce(value)
        if coeff.is_zero():
            return Polynomial.zero()
        return Polynomial({m: c * coeff for m, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Polynomial({emit_text_terms(list(self.terms.items()))!r})"


def substitute_y_powers(
    p: Polynomial, rule: Mapping[int, RationalFunctionOfN]
) -> Polynomial:
    """Replace every factor y^m by the coefficient rule[m].

    Terms without y pass through unchanged.  A y-degree present in ``p`` but
    missing from ``rule`` signals a generator bug and raises.
    """
    out: dict[Monomial, RationalFunctionOfN] = {}
    y = filter_y()
    for mono, coeff in p.terms.items():
        ydeg = 0
        rest = []
        for sym, exp in mono:
            if sym == y:
                ydeg = exp
            else:
                rest.append((sym, exp))
        if ydeg:
            if ydeg not in rule:
                raise ValueError(f"no substitution rule for y^{ydeg}")
            coeff = coeff * rule[ydeg]
        mono = tuple(rest)
        acc = out.get(mono)
        coeff = coeff if acc is None else acc + coeff
        if coeff.is_zero():
            out.pop(mono, None)
        else:
            out[mono] = coeff
    return Polynomial(out)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _npoly_text(coeffs: tuple[int, ...]) -> tuple[str, bool, bool]:
    """Render an integer polynomial in n.

    Returns (text of the absolute value or parenthesised sum, is_negative,
    is_unit); multi-term polynomials are parenthesised and never negative.
    """
    nonzero = [(d, c) for d, c in enumerate(coeffs) if c]
    if not nonzero:
        return "0", False, False
    if len(nonzero) == 1:
        d, c = nonzero[0]
        neg = c < 0
        c = abs(c)
        if d == 0:
            return str(c), neg, c == 1
        base = "n" if d == 1 else f"n^{d}"
        return (base if c == 1 else f"{c}*{base}"), neg, False
    parts = []
    for d, c in sorted(nonzero, reverse=True):
        mag = abs(c)
        if d == 0:
            body = str(mag)
        else:
            base = "n" if d == 1 else f"n^{d}"
            body = base if mag == 1 else f"{mag}*{base}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return "(" + " ".join(parts) + ")", False, False


def _monomial_text(mono: Monomial) -> str:
    factors = []
    for sym, exp in mono:
        factors.append(str(sym) + (f"^{exp}" if exp > 1 else ""))
    return "*".join(factors)


def emit_text_terms(terms: list[tuple[Monomial, RationalFunctionOfN]]) -> str:
    """Render terms over one common denominator, in the given term order."""
    if not terms:
        return "0"
    scalar = 1
    depth = 0
    for _, coeff in terms:
        scalar = scalar * coeff.den_scalar // math.gcd(scalar, coeff.den_scalar)
        depth = max(depth, coeff.den_falling)
    rendered = []
    for mono, coeff in terms:
        npoly = _poly_scale(coeff.num, scalar // coeff.den_scalar)
        npoly = _poly_mul(npoly, _falling_tail(coeff.den_falling, depth))
        ctext, neg, unit = _npoly_text(npoly)
        mtext = _monomial_text(mono)
        if not mtext:
            body = ctext
        elif unit:
            body = mtext
        else:
            body = f"{ctext}*{mtext}"
        if not rendered:
            rendered.append(("-" if neg else "") + body)
        else:
            rendered.append(("- " if neg else "+ ") + body)
    numerator = " ".join(rendered)
    if scalar == 1 and depth == 0:
        return numerator
    pieces = [] if scalar == 1 else [str(scalar)]
    pieces += ["n" if j == 0 else f"(n-{j})" for j in range(depth)]
    denominator = pieces[0] if len(pieces) == 1 else "(" + "*".join(pieces) + ")"
    if len(rendered) > 1:
        numerator = f"({numerator})"
    return f"{numerator} / {denominator}"


def _npoly_latex(coeffs: tuple[int, ...]) -> tuple[str, bool, bool]:
    nonzero = [(d, c) for d, c in enumerate(coeffs) if c]
    if not nonzero:
        return "0", False, False
    if len(nonzero) == 1:
        d, c = nonzero[0]
        neg = c < 0
        mag = abs(c)
        if d == 0:
            return str(mag), neg, mag == 1
        base = "n" if d == 1 else f"n^{{{d}}}"
        return (base if mag == 1 else f"{mag} {base}"), neg, False
    parts = []
    for d, c in sorted(nonzero, reverse=True):
        mag = abs(c)
        base = "" if d == 0 else ("n" if d == 1 else f"n^{{{d}}}")
        body = (str(mag) if (mag != 1 or d == 0) else "") + (" " if base and mag != 1 else "") + base
        parts.append(("- " if c < 0 else ("+ " if parts else "")) + body.strip())
    return r"\left(" + " ".join(parts) + r"\right)", False, False


def _symbol_latex(sym: Symbol) -> str:
    if sym.kind == POWER_SUM:
        return "S_{" + ",".join(map(str, sym.index)) + "}"
    if sym.kind == MOMENT:
        name = "a" if len(sym.index) == 1 else "m"
        return name + "_{" + ",".join(map(str, sym.index)) + "}"
    return sym.kind


def emit_latex_terms(terms: list[tuple[Monomial, RationalFunctionOfN]]) -> str:
    if not terms:
        return "0"
    scalar = 1
    depth = 0
    for _, coeff in terms:
        scalar = scalar * coeff.den_scalar // math.gcd(scalar, coeff.den_scalar)
        depth = max(depth, coeff.den_falling)
    rendered = []
    for mono, coeff in terms:
        npoly = _poly_scale(coeff.num, scalar // coeff.den_scalar)
        npoly = _poly_mul(npoly, _falling_tail(coeff.den_falling, depth))
        ctext, neg, unit = _npoly_latex(npoly)
        mtext = " ".join(
            _symbol_latex(sym) + (f"^{{{exp}}}" if exp > 1 else "") for sym, exp in mono
        )
        if not mtext:
            body = ctext
        elif unit:
            body = mtext
        else:
            body = f"{ctext} {mtext}"
        if not rendered:
            rendered.append(("-" if neg else "") + body)
        else:
            rendered.append(("- " if neg else "+ ") + body)
    numerator = " ".join(rendered)
    if scalar == 1 and depth == 0:
        return numerator
    pieces = [] if scalar == 1 else [str(scalar)]
    pieces += ["n" if j == 0 else f"(n-{j})" for j in range(depth)]
    return r"\frac{" + numerator + "}{" + " ".join(pieces) + "}"


def _estimator_indices(spec) -> list:
    groups = [list(g) for g in spec.groups]
    if spec.family in ("k", "pk"):
        return [g[0] for g in groups]
    return groups


def _estimator_json(expr) -> dict:
    terms = []
    for mono, coeff in expr.body.terms.items():
        terms.append(
            {
                "coeff": coeff.to_json(),
                "powersums": [
                    {"index": list(sym.index), "exp": exp} for sym, exp in mono
                ],
            }
        )
    return {
        "kind": "estimator",
        "indices": _estimator_indices(expr.spec),
        "variables": expr.spec.dimension,
        "terms": terms,
    }


def _polynomial_json(p: Polynomial) -> dict:
    terms = []
    for mono, coeff in p.terms.items():
        terms.append(
            {
                "coeff": coeff.to_json(),
                "symbols": [
                    {
                        "kind": sym.kind,
                        "index": list(sym.index) if sym.index else None,
                        "exp": exp,
                    }
                    for sym, exp in mono
                ],
            }
        )
    return {"kind": "polynomial", "variables": p.dimension(), "terms": terms}


def to_json_dict(obj) -> dict:
    if hasattr(obj, "body") and hasattr(obj, "spec"):
        return _estimator_json(obj)
    return _polynomial_json(obj)


def emit(obj, format: str = "text") -> str:
    """Serialize a Polynomial or an estimator expression.

    ``text`` and ``latex`` render over a common denominator in term insertion
    order; ``json`` is lossless and round-trips through :func:`parse_json`.
    """
    body = obj.body if hasattr(obj, "body") else obj
    if format == "text":
        return emit_text_terms(list(body.terms.items()))
    if format == "latex":
        return emit_latex_terms(list(body.terms.items()))
    if format == "json":
        return json.dumps(to_json_dict(obj))
    raise UsageError(f"unknown output format {format!r}")


def parse_json(data):
    """Inverse of ``emit(..., 'json')``.

    Returns an estimator expression for the estimator schema and a plain
    Polynomial for the generic polynomial schema.
    """
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("kind")
    if kind == "estimator":
        from .estimators import EstimatorExpr, EstimatorSpec

        indices = data["indices"]
        if all(isinstance(i, int) for i in indices):
            family = "k" if len(indices) == 1 else "pk"
            groups = tuple((int(i),) for i in indices)
        else:
            family = "mk" if len(indices) == 1 else "mpk"
            groups = tuple(tuple(int(t) for t in g) for g in indices)
        spec = EstimatorSpec(family, groups)
        terms = []
        for term in data["terms"]:
            mono = make_monomial(
                (power_sum(entry["index"]), int(entry["exp"])) for entry in term["powersums"]
            )
            terms.append((mono, RationalFunctionOfN.from_json(term["coeff"])))
        body = Polynomial.from_terms(terms)
        return EstimatorExpr(spec, body, elapsed_seconds=0.0)
    if kind == "polynomial":
        terms = []
        for term in data["terms"]:
            mono = make_monomial(
                (
                    Symbol(e["kind"], tuple(e["index"]) if e.get("index") else None),
                    int(e["exp"]),
                )
                for e in term["symbols"]
            )
            terms.append((mono, RationalFunctionOfN.from_json(term["coeff"])))
        return Polynomial.from_terms(terms)
    raise UsageError(f"unknown serialized kind {kind!r}")
