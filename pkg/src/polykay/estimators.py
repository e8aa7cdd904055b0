"""Generators for the four estimator families.

* ``k_statistic(i)``: the unique symmetric unbiased estimator of the i-th
  cumulant, as a polynomial in power sums.
* ``polykay(orders)``: unbiased estimator of a product of cumulants.
* ``multivariate_k_statistic(M)``: unbiased estimator of a joint cumulant.
* ``multivariate_polykay(groups)``: unbiased estimator of a product of joint
  cumulants.

The univariate generator loops over integer partitions, the multivariate one
over subdivisions with their multiplicities; both attach a compound-Poisson
filter polynomial in the indeterminate y to each index and then replace each
power y^m by the explicit constant (-1)^(m-1) (m-1)! / (n)_m.  The numerator
is the Moebius weight of collapsing m blocks into one; the denominator counts
ordered m-subsets of the sample.  Product estimators are assembled pairwise:
exact rational coefficients on merged indices, times the unbiased estimator
of the matching product of raw moments.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Sequence

from .combinatorics import (
    IntegerPartition,
    Multiset,
    Subdivision,
    d_coefficient,
    enumerate_partitions,
    enumerate_subdivisions,
    stirling2,
)
from .errors import CapacityError, UsageError
from .polyring import (
    POWER_SUM,
    Polynomial,
    RationalFunctionOfN,
    filter_y,
    make_monomial,
    power_sum,
)

__all__ = [
    "DEFAULT_UNIVARIATE_LIMIT",
    "DEFAULT_MULTIVARIATE_LIMIT",
    "EstimatorSpec",
    "EstimatorExpr",
    "p_polynomial",
    "y_substitution_constant",
    "k_statistic",
    "multivariate_k_statistic",
    "cumulant_product_coefficients",
    "augmented_estimator",
    "polykay",
    "multivariate_polykay",
]

DEFAULT_UNIVARIATE_LIMIT = 32
DEFAULT_MULTIVARIATE_LIMIT = 12

_FAMILIES = ("k", "pk", "mk", "mpk")


@dataclass(frozen=True)
class EstimatorSpec:
    """What to estimate: family plus one exponent vector per cumulant group.

    Univariate families store each order as a one-entry vector, so a spec
    always carries a well-defined variable dimension.
    """

    family: str
    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise UsageError(f"unknown estimator family {self.family!r}")
        if not self.groups:
            raise UsageError("estimator spec needs at least one group")
        width = len(self.groups[0])
        for g in self.groups:
            if len(g) != width:
                raise UsageError("all groups must share the same variable dimension")
            if not g or any(t < 0 for t in g) or sum(g) < 1:
                raise UsageError("each group needs non-negative exponents summing to >= 1")
        if self.family in ("k", "pk") and width != 1:
            raise UsageError("univariate specs take plain integer orders")
        if self.family == "k" and len(self.groups) != 1:
            raise UsageError("a k-statistic has a single order")

    # -- constructors --------------------------------------------------------

    @classmethod
    def k(cls, order: int) -> "EstimatorSpec":
        return cls("k", ((order,),))

    @classmethod
    def pk(cls, orders: Sequence[int]) -> "EstimatorSpec":
        return cls("pk", tuple((int(r),) for r in orders))

    @classmethod
    def mk(cls, exponents: Sequence[int]) -> "EstimatorSpec":
        return cls("mk", (tuple(int(t) for t in exponents),))

    @classmethod
    def mpk(cls, groups: Sequence[Sequence[int]]) -> "EstimatorSpec":
        return cls("mpk", tuple(tuple(int(t) for t in g) for g in groups))

    @classmethod
    def parse(cls, family: str, text: str) -> "EstimatorSpec":
        """Parse the CLI spec syntax, e.g. ('pk', '3 2') or ('mpk', '2 1 ; 1 1')."""
        family = family.strip()
        try:
            if family == "k":
                tokens = text.split()
                if len(tokens) != 1:
                    raise ValueError("k takes exactly one order")
                return cls.k(int(tokens[0]))
            if family == "pk":
                orders = [int(t) for t in text.split()]
                if not orders:
                    raise ValueError("pk needs at least one order")
                return cls.pk(orders)
            if family == "mk":
                vec = [int(t) for t in text.split()]
                if not vec:
                    raise ValueError("mk needs an exponent vector")
                return cls.mk(vec)
            if family == "mpk":
                groups = [[int(t) for t in part.split()] for part in text.split(";")]
                if not groups or any(not g for g in groups):
                    raise ValueError("mpk needs ';'-separated exponent vectors")
                return cls.mpk(groups)
        except ValueError as exc:
            raise UsageError(f"bad {family} spec {text!r}: {exc}") from None
        raise UsageError(f"unknown estimator family {family!r}")

    # -- views ---------------------------------------------------------------

    @property
    def dimension(self) -> int:
        return len(self.groups[0])

    @property
    def total_order(self) -> int:
        return sum(sum(g) for g in self.groups)

    def orders(self) -> tuple[int, ...]:
        """Univariate orders; only valid for the k and pk families."""
        return tuple(g[0] for g in self.groups)

    def label(self) -> str:
        if self.family == "k":
            return f"k[{self.groups[0][0]}]"
        if self.family == "pk":
            return "pk[" + ",".join(str(g[0]) for g in self.groups) + "]"
        body = "; ".join(" ".join(str(t) for t in g) for g in self.groups)
        return f"{self.family}[{body}]"

    def spec_string(self) -> str:
        """The CLI syntax that parses back to this spec."""
        if self.family in ("k", "pk"):
            return f"{self.family} " + " ".join(str(g[0]) for g in self.groups)
        body = " ; ".join(" ".join(str(t) for t in g) for g in self.groups)
        return f"{self.family} {body}"


class EstimatorExpr:
    """A generated estimator: spec plus its power-sum polynomial body."""

    __slots__ = ("spec", "body", "elapsed_seconds")

    def __init__(self, spec: EstimatorSpec, body: Polynomial, elapsed_seconds: float = 0.0):
        for sym in body.symbols():
            if sym.kind != POWER_SUM:
                raise ValueError(f"estimator bodies contain only power sums, found {sym}")
        self.spec = spec
        self.body = body
        self.elapsed_seconds = elapsed_seconds

    @property
    def term_count(self) -> int:
        return len(self.body.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EstimatorExpr)
            and self.spec == other.spec
            and self.body == other.body
        )

    def __repr__(self) -> str:
        return f"<EstimatorExpr {self.spec.label()} terms={self.term_count}>"


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def p_polynomial(j: int) -> Polynomial:
    """The degree-j filter polynomial sum_k (-1)^(k-1) (k-1)! S(j,k) y^k."""
    if j < 1:
        raise UsageError("p_polynomial is defined for j >= 1")
    y = filter_y()
    return Polynomial.from_terms(
        (
            make_monomial([(y, k)]),
            RationalFunctionOfN.from_int((-1) ** (k - 1) * factorial(k - 1) * stirling2(j, k)),
        )
        for k in range(1, j + 1)
    )


@lru_cache(maxsize=None)
def y_substitution_constant(m: int) -> RationalFunctionOfN:
    """The replacement for y^m: (-1)^(m-1) (m-1)! / (n)_m."""
    if m < 1:
        raise ValueError("substitution constants exist for m >= 1")
    return RationalFunctionOfN.falling_inverse((-1) ** (m - 1) * factorial(m - 1), m)


@lru_cache(maxsize=None)
def _p_coeffs(j: int) -> tuple[int, ...]:
    """Dense y-coefficients of p_polynomial(j), constant term first."""
    out = [0] * (j + 1)
    for k in range(1, j + 1):
        out[k] = (-1) ** (k - 1) * factorial(k - 1) * stirling2(j, k)
    return tuple(out)


def _coeff_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, z in enumerate(b):
                out[i + j] += x * z
    return tuple(out)


@lru_cache(maxsize=None)
def _profile_constant(profile: tuple[tuple[int, int], ...]) -> RationalFunctionOfN:
    """Fully substituted filter product for a block-size profile.

    Expands prod_j p_j(y)^{r_j} in y and replaces each y^m by its
    substitution constant; caching by profile lets every partition or
    subdivision with the same block sizes reuse the value.
    """
    coeffs: tuple[int, ...] = (1,)
    for j, r in profile:
        base = _p_coeffs(j)
        for _ in range(r):
            coeffs = _coeff_mul(coeffs, base)
    total = RationalFunctionOfN.from_int(0)
    for m, c in enumerate(coeffs):
        if c:
            total = total + y_substitution_constant(m) * c
    return total


def _sign_factor(block_count: int) -> int:
    """Moebius weight of collapsing ``block_count`` items: (-1)^(c-1) (c-1)!."""
    return (-1) ** (block_count - 1) * factorial(block_count - 1)


# ---------------------------------------------------------------------------
# k-statistics
# ---------------------------------------------------------------------------


def k_statistic(i: int, *, limit: int | None = None) -> "EstimatorExpr":
    """Unbiased estimator of the i-th cumulant in power sums S[1..i]."""
    limit = DEFAULT_UNIVARIATE_LIMIT if limit is None else limit
    if i < 1:
        raise UsageError(f"k-statistic order must be >= 1, got {i}")
    if i > limit:
        raise CapacityError(f"order {i} exceeds the univariate limit {limit}")
    start = time.perf_counter()
    terms = []
    for lam in enumerate_partitions(i):
        profile = tuple(sorted(lam.multiplicities().items()))
        mono = make_monomial((power_sum((j,)), r) for j, r in profile)
        terms.append((mono, _profile_constant(profile) * d_coefficient(lam)))
    body = Polynomial.from_terms(terms)
    return EstimatorExpr(EstimatorSpec.k(i), body, time.perf_counter() - start)


def _as_multiset(m, dimension: int | None) -> tuple[Multiset, int]:
    if isinstance(m, Multiset):
        idents = m.support
        if any(not isinstance(j, int) for j in idents):
            raise UsageError("multiset identifiers must be variable positions")
        if dimension is None:
            dimension = (max(idents) + 1) if idents else 1
        elif idents and max(idents) >= dimension:
            raise UsageError("multiset uses a variable beyond the requested dimension")
        return m, dimension
    vec = tuple(int(t) for t in m)
    if dimension is not None and dimension != len(vec):
        raise UsageError("exponent vector length does not match the requested dimension")
    return Multiset.from_exponents(vec), len(vec)


def multivariate_k_statistic(
    m, *, dimension: int | None = None, limit: int | None = None
) -> "EstimatorExpr":
    """Unbiased estimator of the joint cumulant indexed by a variable multiset.

    ``m`` is a Multiset over variable positions or a plain exponent vector;
    the sum runs over its subdivisions with their multiplicities, never over
    raw set partitions.
    """
    limit = DEFAULT_MULTIVARIATE_LIMIT if limit is None else limit
    mset, dim = _as_multiset(m, dimension)
    if mset.length < 1:
        raise UsageError("the variable multiset must be non-empty")
    if mset.length > limit:
        raise CapacityError(f"total order {mset.length} exceeds the multivariate limit {limit}")
    start = time.perf_counter()
    terms = []
    # coarsest subdivisions first, mirroring the reverse-lex partition order
    # of the univariate generator
    for sub in reversed(enumerate_subdivisions(mset)):
        profile = tuple(sorted(sub.size_profile().items()))
        mono = make_monomial(
            (power_sum(block.to_exponents(dim)), g) for block, g in sub.blocks
        )
        terms.append((mono, _profile_constant(profile) * sub.count))
    body = Polynomial.from_terms(terms)
    spec = EstimatorSpec.mk(mset.to_exponents(dim))
    return EstimatorExpr(spec, body, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# product estimators (polykays)
# ---------------------------------------------------------------------------


def cumulant_product_coefficients(spec: EstimatorSpec) -> dict:
    """Exact rational coefficients of the moment products behind a polykay.

    For univariate specs the keys are merged integer partitions; each pair
    (or tuple) of per-order partitions contributes the product of its Moebius
    weights and labelling counts.  For multivariate specs the keys are merged
    block multisets built from one subdivision per group, weighted by the
    subdivision multiplicities.  A single-group spec yields the coefficients
    of the plain (joint) cumulant expansion, i.e. the k-statistic path.
    """
    out: dict = {}
    if spec.family in ("k", "pk"):
        partition_lists = [enumerate_partitions(r) for r in spec.orders()]
        for combo in product(*partition_lists):
            merged = combo[0]
            for lam in combo[1:]:
                merged = merged.merge(lam)
            weight = 1
            for lam in combo:
                weight *= _sign_factor(lam.length) * d_coefficient(lam)
            out[merged] = out.get(merged, 0) + weight
    else:
        subdivision_lists = [
            enumerate_subdivisions(Multiset.from_exponents(g)) for g in spec.groups
        ]
        for combo in product(*subdivision_lists):
            merged: dict = {}
            weight = 1
            for sub in combo:
                weight *= sub.count * _sign_factor(sub.size)
                for block, g in sub.blocks:
                    merged[block] = merged.get(block, 0) + g
            key = Multiset.from_pairs(merged.items())
            out[key] = out.get(key, 0) + weight
    return {key: value for key, value in out.items() if value}


def _factor_multiset(x, dimension: int | None) -> tuple[Multiset, int]:
    """Normalize a partition / subdivision / block multiset to a multiset of
    power-sum index vectors."""
    if isinstance(x, IntegerPartition):
        dim = 1 if dimension is None else dimension
        if dim != 1:
            raise UsageError("integer partitions index univariate moments")
        return Multiset.from_pairs(((p,), r) for p, r in x.multiplicities().items()), 1
    if isinstance(x, Subdivision):
        x = x.block_multiset()
    if not isinstance(x, Multiset):
        raise UsageError(f"cannot interpret {type(x).__name__} as a moment index")
    idents = x.support
    if idents and all(isinstance(b, Multiset) for b in idents):
        if dimension is None:
            positions = [j for b in idents for j in b.support]
            dimension = max(positions) + 1 if positions else 1
        return (
            Multiset.from_pairs((b.to_exponents(dimension), c) for b, c in x.items),
            dimension,
        )
    if idents and all(isinstance(v, tuple) for v in idents):
        dim = len(idents[0]) if dimension is None else dimension
        return x, dim
    raise UsageError("factor multisets hold index vectors or block multisets")


def augmented_estimator(x, *, dimension: int | None = None) -> Polynomial:
    """Unbiased power-sum estimator of a product of raw moments.

    ``x`` names the product: an integer partition (univariate, one moment per
    part), a subdivision, or a multiset of moment index vectors.  The result
    sums, over subdivisions of those factors, a Moebius-weighted power-sum
    product divided by the falling factorial of the factor count; its
    expectation is exactly the requested moment product.
    """
    factors, dim = _factor_multiset(x, dimension)
    return _augmented_cached(factors, dim)


@lru_cache(maxsize=None)
def _augmented_cached(factors: Multiset, dim: int) -> Polynomial:
    if factors.is_empty():
        return Polynomial.constant(1)
    depth = factors.length
    terms = []
    for sub in enumerate_subdivisions(factors):
        weight = sub.count
        mono = []
        for block, g in sub.blocks:
            weight *= _sign_factor(block.length) ** g
            total = [0] * dim
            for vec, c in block.items:
                for j, r in enumerate(vec):
                    total[j] += r * c
            mono.append((power_sum(total), g))
        terms.append(
            (make_monomial(mono), RationalFunctionOfN.falling_inverse(weight, depth))
        )
    return Polynomial.from_terms(terms)


def polykay(orders: Sequence[int], *, limit: int | None = None) -> "EstimatorExpr":
    """Unbiased estimator of a product of cumulants of the given orders.

    A single order returns the plain k-statistic.  Contributing merged
    partitions never have a part above max(orders); the pairwise assembly
    enforces that automatically.
    """
    limit = DEFAULT_UNIVARIATE_LIMIT if limit is None else limit
    orders = [int(r) for r in orders]
    if not orders:
        raise UsageError("polykay needs at least one order")
    if any(r < 1 for r in orders):
        raise UsageError("polykay orders must be >= 1")
    if len(orders) == 1:
        return k_statistic(orders[0], limit=limit)
    total = sum(orders)
    if total > limit:
        raise CapacityError(f"total order {total} exceeds the univariate limit {limit}")
    start = time.perf_counter()
    spec = EstimatorSpec.pk(orders)
    terms = []
    for merged, coeff in cumulant_product_coefficients(spec).items():
        for mono, c in augmented_estimator(merged).terms.items():
            terms.append((mono, c * coeff))
    body = Polynomial.from_terms(terms)
    return EstimatorExpr(spec, body, time.perf_counter() - start)


def multivariate_polykay(
    groups: Sequence, *, dimension: int | None = None, limit: int | None = None
) -> "EstimatorExpr":
    """Unbiased estimator of a product of joint cumulants.

    ``groups`` is a sequence of exponent vectors (or Multisets) over one
    shared variable dimension.  Merged subdivisions that do not split into one
    subdivision per group simply never arise.  A single group delegates to the
    multivariate k-statistic.
    """
    limit = DEFAULT_MULTIVARIATE_LIMIT if limit is None else limit
    if not groups:
        raise UsageError("multivariate polykay needs at least one group")
    normalized = []
    dim = dimension
    for g in groups:
        mset, d = _as_multiset(g, dim)
        normalized.append(mset)
        dim = d
    if len(normalized) == 1:
        return multivariate_k_statistic(normalized[0], dimension=dim, limit=limit)
    total = sum(m.length for m in normalized)
    if total > limit:
        raise CapacityError(f"total order {total} exceeds the multivariate limit {limit}")
    start = time.perf_counter()
    spec = EstimatorSpec.mpk([m.to_exponents(dim) for m in normalized])
    terms = []
    for merged, coeff in cumulant_product_coefficients(spec).items():
        for mono, c in augmented_estimator(merged, dimension=dim).terms.items():
            terms.append((mono, c * coeff))
    body = Polynomial.from_terms(terms)
    return EstimatorExpr(spec, body, time.perf_counter() - start)


def generate(spec: EstimatorSpec, *, univariate_limit: int | None = None,
             multivariate_limit: int | None = None) -> "EstimatorExpr":
    """Dispatch a spec to its family generator."""
    if spec.family == "k":
        return k_statistic(spec.groups[0][0], limit=univariate_limit)
    if spec.family == "pk":
        return polykay(list(spec.orders()), limit=univariate_limit)
    if spec.family == "mk":
        return multivariate_k_statistic(
            spec.groups[0], dimension=spec.dimension, limit=multivariate_limit
        )
    return multivariate_polykay(
        list(spec.groups), dimension=spec.dimension, limit=multivariate_limit
    )
