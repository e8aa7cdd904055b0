"""Core operations shared by the HTTP endpoints and the CLI.

Everything here works on plain domain objects plus the pydantic models, so
the CLI can run requests in-process with exactly the semantics the service
exposes over HTTP.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor

from .. import estimators, evaluator, oracle, polyring
from ..errors import CapacityError, UsageError
from ..estimators import EstimatorSpec
from .models import (
    BenchRequest,
    BenchResponse,
    BenchRowModel,
    CertificationModel,
    EvaluateRequest,
    EvaluateResponse,
    GenerateRequest,
    GenerateResponse,
    SpecModel,
    VerifyRequest,
    VerifyResponse,
)

DEFAULT_SUITE = "k:1..12,pk2:total<=8,pk3:total<=6,mk:size<=6:d<=3,mpk:table2"

_TABLE2_POLYKAYS = (
    ((1, 1), (1, 1)),
    ((2, 1), (1, 1)),
    ((2, 2), (1, 1)),
    ((2, 2), (2, 1)),
    ((2, 2), (2, 2)),
    ((2, 1), (2, 1), (2, 1)),
    ((2, 2), (2, 2), (2, 2)),
)

DEFAULT_BENCH_GRID = (
    *(f"k {i}" for i in (5, 7, 9, 11, 14, 16, 18, 20, 22, 24, 26, 28)),
    "pk 3 2",
    "pk 4 4",
    "pk 5 3",
    "pk 7 5",
    "pk 7 7",
    "pk 9 9",
    "pk 10 8",
    "pk 4 4 4",
    "mk 3 2",
    "mk 4 4",
    "mk 5 5",
    "mk 6 5",
    "mk 6 6",
    "mk 7 6",
    "mk 7 7",
    "mk 8 6",
    "mk 8 7",
    "mk 3 3 3",
    "mk 4 3 3",
    "mk 4 4 3",
    "mk 4 4 4",
    "mpk 1 1 ; 1 1",
    "mpk 2 1 ; 1 1",
    "mpk 2 2 ; 1 1",
    "mpk 2 2 ; 2 1",
    "mpk 2 2 ; 2 2",
    "mpk 2 1 ; 2 1 ; 2 1",
    "mpk 2 2 ; 1 1 ; 1 1",
    "mpk 2 2 ; 2 1 ; 1 1",
    "mpk 2 2 ; 2 1 ; 2 1",
    "mpk 2 2 ; 2 2 ; 1 1",
    "mpk 2 2 ; 2 2 ; 2 1",
    "mpk 2 2 ; 2 2 ; 2 2",
)


def parse_spec_string(text: str) -> EstimatorSpec:
    """Parse 'k 5', 'pk 3 2', 'mk 2 1' or 'mpk 2 1 ; 1 1'."""
    tokens = text.strip().split(None, 1)
    if not tokens:
        raise UsageError("empty estimator spec")
    family = tokens[0]
    rest = tokens[1] if len(tokens) > 1 else ""
    return EstimatorSpec.parse(family, rest)


# ---------------------------------------------------------------------------
# suite expansion
# ---------------------------------------------------------------------------


def _suite_k(arg: str) -> list[EstimatorSpec]:
    if ".." in arg:
        lo, hi = arg.split("..", 1)
        return [EstimatorSpec.k(i) for i in range(int(lo), int(hi) + 1)]
    return [EstimatorSpec.k(int(arg))]


def _suite_pk(arg: str, group_count: int | None) -> list[EstimatorSpec]:
    if not arg.startswith("total<="):
        raise UsageError(f"bad pk suite clause {arg!r}; expected total<=N")
    bound = int(arg[len("total<=") :])
    out = []
    for total in range(2, bound + 1):
        for lam in estimators.enumerate_partitions(total):
            if lam.length < 2:
                continue
            if group_count is not None and lam.length != group_count:
                continue
            out.append(EstimatorSpec.pk(lam.parts))
    return out


def _suite_mk(parts: list[str]) -> list[EstimatorSpec]:
    size = None
    dmax = 3
    for p in parts:
        if p.startswith("size<="):
            size = int(p[len("size<=") :])
        elif p.startswith("d<="):
            dmax = int(p[len("d<=") :])
        else:
            raise UsageError(f"bad mk suite clause part {p!r}")
    if size is None:
        raise UsageError("mk suite clause needs size<=N")

    def vectors(d: int, budget: int):
        if d == 1:
            for t in range(1, budget + 1):
                yield (t,)
            return
        for t in range(1, budget - d + 2):
            for rest in vectors(d - 1, budget - t):
                yield (t,) + rest

    out = []
    for d in range(1, dmax + 1):
        if d > size:
            break
        for vec in sorted(vectors(d, size)):
            out.append(EstimatorSpec.mk(vec))
    return out


def parse_suite(text: str) -> list[EstimatorSpec]:
    """Expand a comma-separated suite description into estimator specs.

    Clauses: ``k:A..B`` or ``k:I``; ``pk:total<=N`` (any group count >= 2),
    ``pk2:total<=N`` / ``pk3:total<=N`` (fixed group count); ``mk:size<=N``
    with optional ``:d<=D`` (default 3); ``mpk:table2`` for the standard
    two-variable product grid.
    """
    specs: list[EstimatorSpec] = []
    for clause in text.split(","):
        clause = clause.strip()
        if not clause:
            continue
        head, _, arg = clause.partition(":")
        if head == "k":
            specs.extend(_suite_k(arg))
        elif head == "pk":
            specs.extend(_suite_pk(arg, None))
        elif head.startswith("pk") and head[2:].isdigit():
            specs.extend(_suite_pk(arg, int(head[2:])))
        elif head == "mk":
            specs.extend(_suite_mk(arg.split(":")))
        elif head == "mpk":
            if arg != "table2":
                raise UsageError(f"unknown mpk suite {arg!r}; only table2 is defined")
            specs.extend(EstimatorSpec.mpk(groups) for groups in _TABLE2_POLYKAYS)
        else:
            raise UsageError(f"unknown suite clause {clause!r}")
    if not specs:
        raise UsageError("suite expanded to no estimators")
    return specs


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def generate_op(req: GenerateRequest) -> GenerateResponse:
    spec = req.spec.to_spec()
    expr = estimators.generate(
        spec,
        univariate_limit=req.univariate_limit,
        multivariate_limit=req.multivariate_limit,
    )
    if req.format == "json":
        expression: str | dict = polyring.to_json_dict(expr)
    else:
        expression = polyring.emit(expr, req.format)
    return GenerateResponse(
        label=spec.label(),
        spec=SpecModel.from_spec(spec),
        variables=spec.dimension,
        term_count=expr.term_count,
        elapsed_seconds=expr.elapsed_seconds,
        format=req.format,
        expression=expression,
    )


def evaluate_op(req: EvaluateRequest) -> EvaluateResponse:
    spec = req.spec.to_spec()
    ds = evaluator.ingest_text(req.csv_text, req.has_header)
    expr = estimators.generate(
        spec,
        univariate_limit=req.univariate_limit,
        multivariate_limit=req.multivariate_limit,
    )
    value = evaluator.evaluate(expr, ds, req.mode)
    if req.mode == "exact":
        text = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    else:
        text = repr(value)
    return EvaluateResponse(label=spec.label(), value=text, n=ds.n, d=ds.d, mode=req.mode)


def _certify_spec(spec: EstimatorSpec, univariate_limit, multivariate_limit) -> CertificationModel:
    expr = estimators.generate(
        spec, univariate_limit=univariate_limit, multivariate_limit=multivariate_limit
    )
    record = oracle.check_unbiased(expr)
    return CertificationModel(**record.to_dict())


def _verify_worker(args) -> dict:
    family, groups, ulimit, mlimit = args
    spec = EstimatorSpec(family, groups)
    return _certify_spec(spec, ulimit, mlimit).model_dump(by_alias=True)


def verify_op(req: VerifyRequest) -> VerifyResponse:
    reports: list[CertificationModel] = []
    if req.expression is not None:
        expr = polyring.parse_json(req.expression)
        record = oracle.check_unbiased(expr)
        reports.append(CertificationModel(**record.to_dict()))
    else:
        if req.specs is not None:
            specs = [s.to_spec() for s in req.specs]
        else:
            specs = parse_suite(req.suite or DEFAULT_SUITE)
        if req.parallel and len(specs) > 1:
            jobs = [
                (s.family, s.groups, req.univariate_limit, req.multivariate_limit)
                for s in specs
            ]
            with ProcessPoolExecutor() as pool:
                for result in pool.map(_verify_worker, jobs):
                    reports.append(CertificationModel.model_validate(result))
        else:
            for spec in specs:
                reports.append(
                    _certify_spec(spec, req.univariate_limit, req.multivariate_limit)
                )
    return VerifyResponse(reports=reports, all_pass=all(r.passed for r in reports))


def bench_op(req: BenchRequest) -> BenchResponse:
    grid = req.grid if req.grid else list(DEFAULT_BENCH_GRID)
    rows: list[BenchRowModel] = []
    for entry in grid:
        spec = parse_spec_string(entry)
        try:
            start = time.perf_counter()
            expr = estimators.generate(
                spec,
                univariate_limit=req.univariate_limit,
                multivariate_limit=req.multivariate_limit,
            )
            elapsed = time.perf_counter() - start
            rows.append(
                BenchRowModel(spec=entry.strip(), seconds=elapsed, terms=expr.term_count)
            )
        except CapacityError as exc:
            rows.append(BenchRowModel(spec=entry.strip(), note=str(exc)))
    lines = ["spec\tseconds\tterms"]
    for row in rows:
        if row.seconds is None:
            lines.append(f"{row.spec}\tcapacity\t-")
        else:
            lines.append(f"{row.spec}\t{row.seconds:.3f}\t{row.terms}")
    return BenchResponse(rows=rows, tsv="\n".join(lines) + "\n")
