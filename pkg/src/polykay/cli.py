"""Command-line client for the estimator engine.

The CLI parses arguments, builds the same request models the HTTP service
accepts, and runs them in-process by default; ``--server URL`` sends them to
a running service instead.  Exit codes: 0 success, 1 verification failure,
2 usage, 3 capacity, 4 dimension mismatch, 5 insufficient sample size.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import PolykayError, UsageError
from .estimators import EstimatorSpec
from .service import operations
from .service.models import (
    BenchRequest,
    BenchResponse,
    EvaluateRequest,
    EvaluateResponse,
    GenerateRequest,
    GenerateResponse,
    SpecModel,
    VerifyRequest,
    VerifyResponse,
)

_EXIT_BY_CODE = {
    "usage": 2,
    "parse": 2,
    "capacity": 3,
    "dimension": 4,
    "sample_size": 5,
}


class _Remote:
    """Minimal HTTP transport mirroring the in-process operations."""

    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def post(self, path: str, request, response_cls):
        import httpx

        reply = httpx.post(
            f"{self.base_url}{path}", json=request.model_dump(), timeout=None
        )
        if reply.status_code != 200:
            detail = {}
            try:
                detail = reply.json().get("detail", {})
            except ValueError:
                pass
            code = detail.get("code", "error") if isinstance(detail, dict) else "error"
            message = (
                detail.get("message", reply.text) if isinstance(detail, dict) else str(detail)
            )
            raise _RemoteError(code, message)
        return response_cls.model_validate(reply.json())


class _RemoteError(PolykayError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.exit_code = _EXIT_BY_CODE.get(code, 1)


def _dispatch(args, path: str, request, response_cls, local):
    if args.server:
        return _Remote(args.server).post(path, request, response_cls)
    return local(request)


def _spec_from_args(args) -> SpecModel:
    text = " ".join(args.spec)
    return SpecModel.from_spec(EstimatorSpec.parse(args.family, text))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--server", metavar="URL", help="send the request to a running service")
    parser.add_argument(
        "--univariate-limit", type=int, default=None, help="override the univariate order cap"
    )
    parser.add_argument(
        "--multivariate-limit", type=int, default=None, help="override the multivariate order cap"
    )


def _add_spec_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("family", choices=("k", "pk", "mk", "mpk"))
    parser.add_argument("spec", nargs="+", help="orders or exponent vectors, e.g. 5 / 3 2 / '2 1 ; 1 1'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polykay",
        description="Generate, evaluate, verify, and benchmark unbiased cumulant estimators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an estimator formula")
    _add_spec_args(gen)
    gen.add_argument("--format", choices=("text", "json", "latex"), default="text")
    _add_common(gen)

    ev = sub.add_parser("eval", help="evaluate an estimator on CSV data")
    _add_spec_args(ev)
    ev.add_argument("--data", required=True, help="CSV file of sample rows")
    ev.add_argument("--mode", choices=("exact", "float"), default="exact")
    ev.add_argument("--header", action="store_true", help="first CSV row is a header")
    _add_common(ev)

    ver = sub.add_parser("verify", help="certify unbiasedness symbolically")
    ver.add_argument("family", nargs="?", choices=("k", "pk", "mk", "mpk"))
    ver.add_argument("spec", nargs="*", help="single estimator spec to verify")
    ver.add_argument("--suite", help="suite description, e.g. 'k:1..10,pk:total<=8'")
    ver.add_argument("--expr-json", metavar="PATH", help="verify a serialized estimator file")
    ver.add_argument("--format", choices=("text", "json"), default="text")
    ver.add_argument("--parallel", action="store_true", help="certify estimators in parallel")
    _add_common(ver)

    bench = sub.add_parser("bench", help="time formula generation over a grid")
    bench.add_argument("--grid", help="comma-separated specs, e.g. 'k 2, pk 3 2'")
    bench.add_argument("--out", help="write the TSV here instead of stdout")
    _add_common(bench)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_gen(args) -> int:
    request = GenerateRequest(
        spec=_spec_from_args(args),
        format=args.format,
        univariate_limit=args.univariate_limit,
        multivariate_limit=args.multivariate_limit,
    )
    response = _dispatch(args, "/v1/generate", request, GenerateResponse, operations.generate_op)
    if args.format == "json":
        print(json.dumps(response.expression))
    else:
        print(response.expression)
    return 0


def _cmd_eval(args) -> int:
    try:
        with open(args.data, newline="") as fh:
            csv_text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read data file: {exc}") from None
    request = EvaluateRequest(
        spec=_spec_from_args(args),
        csv_text=csv_text,
        has_header=args.header,
        mode=args.mode,
        univariate_limit=args.univariate_limit,
        multivariate_limit=args.multivariate_limit,
    )
    response = _dispatch(args, "/v1/evaluate", request, EvaluateResponse, operations.evaluate_op)
    print(response.value)
    return 0


def _cmd_verify(args) -> int:
    specs = None
    expression = None
    if args.expr_json:
        try:
            with open(args.expr_json) as fh:
                expression = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read estimator JSON: {exc}") from None
    elif args.family:
        spec = EstimatorSpec.parse(args.family, " ".join(args.spec))
        specs = [SpecModel.from_spec(spec)]
    elif args.spec:
        raise UsageError("estimator spec given without a family")
    request = VerifyRequest(
        specs=specs,
        suite=args.suite,
        expression=expression,
        parallel=args.parallel,
        univariate_limit=args.univariate_limit,
        multivariate_limit=args.multivariate_limit,
    )
    response = _dispatch(args, "/v1/verify", request, VerifyResponse, operations.verify_op)
    if args.format == "json":
        print(json.dumps(response.model_dump(by_alias=True)))
    else:
        from .polyring import emit, parse_json

        for report in response.reports:
            status = "PASS" if report.passed else "FAIL"
            print(f"{report.estimator}: {status}")
            if not report.passed and report.difference is not None:
                print(f"  difference: {emit(parse_json(report.difference), 'text')}")
    return 0 if response.all_pass else 1


def _cmd_bench(args) -> int:
    grid = None
    if args.grid:
        grid = [entry.strip() for entry in args.grid.split(",") if entry.strip()]
    request = BenchRequest(
        grid=grid,
        univariate_limit=args.univariate_limit,
        multivariate_limit=args.multivariate_limit,
    )
    response = _dispatch(args, "/v1/bench", request, BenchResponse, operations.bench_op)
    for row in response.rows:
        if row.note:
            print(f"note: {row.spec}: {row.note}", file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(response.tsv)
    else:
        sys.stdout.write(response.tsv)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("polykay.service.app:app", host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "eval": _cmd_eval,
        "verify": _cmd_verify,
        "bench": _cmd_bench,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except PolykayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
