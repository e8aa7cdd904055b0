"""FastAPI application wrapping the estimator engine."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import PolykayError
from . import operations
from .models import (
    BenchRequest,
    BenchResponse,
    EvaluateRequest,
    EvaluateResponse,
    GenerateRequest,
    GenerateResponse,
    VerifyRequest,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="polykay",
        description="Exact unbiased estimators of cumulants and cumulant products",
        version="0.1.0",
    )

    @app.exception_handler(PolykayError)
    async def domain_error(request: Request, exc: PolykayError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"detail": {"code": exc.code, "message": str(exc)}},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/v1/generate", response_model=GenerateResponse)
    def generate(req: GenerateRequest) -> GenerateResponse:
        return operations.generate_op(req)

    @app.post("/v1/evaluate", response_model=EvaluateResponse)
    def evaluate(req: EvaluateRequest) -> EvaluateResponse:
        return operations.evaluate_op(req)

    @app.post("/v1/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        return operations.verify_op(req)

    @app.post("/v1/bench", response_model=BenchResponse)
    def bench(req: BenchRequest) -> BenchResponse:
        return operations.bench_op(req)

    return app


app = create_app()
