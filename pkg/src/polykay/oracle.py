"""Independent verification of generated estimators.

The oracle computes exact symbolic expectations of power-sum polynomials over
n i.i.d. observations, expands cumulants (and their products) into raw
moments, and certifies that an estimator's expectation equals its target
exactly.  It deliberately runs the expectation *forward* (power sums to
moments) so that a bug in the generators' moment-product inversion cannot
cancel against itself; a second, purely enumerative expectation exists below
it for small sizes, resting on nothing but distributivity.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import factorial

from .combinatorics import (
    Multiset,
    d_coefficient,
    enumerate_partitions,
    enumerate_subdivisions,
)
from .errors import CapacityError, UsageError
from .estimators import EstimatorExpr
from .polyring import (
    POWER_SUM,
    Monomial,
    Polynomial,
    RationalFunctionOfN,
    falling_factorial_poly,
    make_monomial,
    moment,
    to_json_dict,
)

__all__ = [
    "MomentPolynomial",
    "expectation_power_sum_poly",
    "brute_force_expectation",
    "cumulant_in_moments",
    "check_unbiased",
    "CertificationRecord",
]

# A polynomial whose indexed symbols are all moments.
MomentPolynomial = Polynomial


def _sign_factor(c: int) -> int:
    return (-1) ** (c - 1) * factorial(c - 1)


@lru_cache(maxsize=None)
def _monomial_expectation(mono: Monomial) -> tuple[tuple[int, int, Monomial], ...]:
    """Expectation skeleton of one power-sum monomial.

    Returns (multiplicity, block count, moment monomial) triples: grouping the
    factors of the product by which sample index they hit turns the i.i.d.
    expectation into a sum over subdivisions of the factor multiset, each
    weighted by its multiplicity times the falling factorial counting
    injective index choices.
    """
    factors = Multiset.from_pairs((sym.index, exp) for sym, exp in mono)
    out = []
    for sub in enumerate_subdivisions(factors):
        dim = len(factors.support[0])
        moments = []
        for block, g in sub.blocks:
            total = [0] * dim
            for vec, c in block.items:
                for j, r in enumerate(vec):
                    total[j] += r * c
            moments.append((moment(total), g))
        out.append((sub.count, sub.size, make_monomial(moments)))
    return tuple(out)


def expectation_power_sum_poly(p: Polynomial, dimension: int | None = None) -> MomentPolynomial:
    """Exact expectation of a power-sum polynomial over n i.i.d. observations.

    The result is a polynomial in moment symbols with coefficients rational
    in n.  Filter or moment symbols in the input are rejected.
    """
    for sym in p.symbols():
        if sym.kind != POWER_SUM:
            raise UsageError(f"expectation input must hold only power sums, found {sym}")
    out = Polynomial.zero()
    for mono, coeff in p.terms.items():
        if not mono:
            out = out + Polynomial.constant(1).scale(coeff)
            continue
        pieces = []
        for mult, size, moment_mono in _monomial_expectation(mono):
            weight = coeff * RationalFunctionOfN.from_poly(falling_factorial_poly(size))
            pieces.append((moment_mono, weight * mult))
        out = out + Polynomial.from_terms(pieces)
    return out


def brute_force_expectation(
    p: Polynomial, n_value: int, dimension: int | None = None
) -> MomentPolynomial:
    """Expectation by explicit index enumeration at a small numeric n.

    Expands every power sum as a sum over sample indices 1..n_value and
    multiplies out, using only the i.i.d. product rule.  Must agree with
    :func:`expectation_power_sum_poly` specialized at n_value.
    """
    if n_value < 1 or n_value > 6:
        raise CapacityError("brute-force expectation supports 1 <= n <= 6")
    for sym in p.symbols():
        if sym.kind != POWER_SUM:
            raise UsageError(f"expectation input must hold only power sums, found {sym}")
    out = Polynomial.zero()
    for mono, coeff in p.terms.items():
        value = coeff.evaluate(n_value)
        if not mono:
            out = out + Polynomial.constant(value)
            continue
        factors = [sym.index for sym, exp in mono for _ in range(exp)]
        if n_value ** len(factors) > 2_000_000:
            raise CapacityError("brute-force expectation: too many index assignments")
        dim = len(factors[0])
        counts: dict[Monomial, int] = {}
        for assignment in product(range(n_value), repeat=len(factors)):
            per_index: dict[int, list[int]] = {}
            for vec, idx in zip(factors, assignment):
                acc = per_index.setdefault(idx, [0] * dim)
                for j, r in enumerate(vec):
                    acc[j] += r
            mm = make_monomial((moment(total), 1) for total in per_index.values())
            counts[mm] = counts.get(mm, 0) + 1
        out = out + Polynomial.from_terms(
            (mm, RationalFunctionOfN.from_fraction(value * c)) for mm, c in counts.items()
        )
    return out


def cumulant_in_moments(spec, dimension: int | None = None) -> MomentPolynomial:
    """A (joint) cumulant as an exact polynomial in raw moment symbols.

    An integer order uses the partition expansion with Moebius weights; a
    variable multiset (or exponent vector) uses subdivisions with their
    multiplicities.
    """
    if isinstance(spec, int):
        if spec < 1:
            raise UsageError("cumulant order must be >= 1")
        terms = []
        for lam in enumerate_partitions(spec):
            mono = make_monomial(
                (moment((j,)), r) for j, r in lam.multiplicities().items()
            )
            weight = _sign_factor(lam.length) * d_coefficient(lam)
            terms.append((mono, RationalFunctionOfN.from_int(weight)))
        return Polynomial.from_terms(terms)
    if isinstance(spec, Multiset):
        mset = spec
        dim = dimension
        if dim is None:
            idents = mset.support
            dim = (max(idents) + 1) if idents else 1
    else:
        vec = tuple(int(t) for t in spec)
        mset = Multiset.from_exponents(vec)
        dim = len(vec) if dimension is None else dimension
    if mset.length < 1:
        raise UsageError("the variable multiset must be non-empty")
    terms = []
    for sub in enumerate_subdivisions(mset):
        mono = []
        for block, g in sub.blocks:
            mono.append((moment(block.to_exponents(dim)), g))
        weight = sub.count * _sign_factor(sub.size)
        terms.append((make_monomial(mono), RationalFunctionOfN.from_int(weight)))
    return Polynomial.from_terms(terms)


@dataclass
class CertificationRecord:
    """Outcome of an unbiasedness check."""

    estimator: str
    passed: bool
    difference: Polynomial | None
    elapsed_ms: float

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "pass": self.passed,
            "difference": None if self.difference is None else to_json_dict(self.difference),
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def check_unbiased(e: EstimatorExpr) -> CertificationRecord:
    """Certify E[estimator] == its cumulant-product target, exactly.

    The difference polynomial is returned on failure for diagnosis.
    """
    start = time.perf_counter()
    spec = e.spec
    if spec.family in ("k", "pk"):
        target = Polynomial.constant(1)
        for r in spec.orders():
            target = target * cumulant_in_moments(r)
    else:
        target = Polynomial.constant(1)
        for g in spec.groups:
            target = target * cumulant_in_moments(g, dimension=spec.dimension)
    diff = expectation_power_sum_poly(e.body, spec.dimension) - target
    elapsed = (time.perf_counter() - start) * 1000.0
    if diff.is_zero():
        return CertificationRecord(spec.label(), True, None, elapsed)
    return CertificationRecord(spec.label(), False, diff, elapsed)
