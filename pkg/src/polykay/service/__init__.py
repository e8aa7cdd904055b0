"""HTTP service wrapping the estimator engine; the CLI is a thin client."""

from .models import (
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

__all__ = [
    "BenchRequest",
    "BenchResponse",
    "EvaluateRequest",
    "EvaluateResponse",
    "GenerateRequest",
    "GenerateResponse",
    "SpecModel",
    "VerifyRequest",
    "VerifyResponse",
]
