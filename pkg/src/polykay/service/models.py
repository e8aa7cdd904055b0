"""Request/response models for the HTTP service and the CLI client."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..estimators import EstimatorSpec


class SpecModel(BaseModel):
    family: Literal["k", "pk", "mk", "mpk"]
    groups: list[list[int]]

    @classmethod
    def from_spec(cls, spec: EstimatorSpec) -> "SpecModel":
        return cls(family=spec.family, groups=[list(g) for g in spec.groups])

    def to_spec(self) -> EstimatorSpec:
        return EstimatorSpec(self.family, tuple(tuple(int(t) for t in g) for g in self.groups))


class LimitsMixin(BaseModel):
    univariate_limit: Optional[int] = None
    multivariate_limit: Optional[int] = None


class GenerateRequest(LimitsMixin):
    spec: SpecModel
    format: Literal["text", "json", "latex"] = "text"


class GenerateResponse(BaseModel):
    label: str
    spec: SpecModel
    variables: int
    term_count: int
    elapsed_seconds: float
    format: str
    expression: Union[str, dict]


class EvaluateRequest(LimitsMixin):
    spec: SpecModel
    csv_text: str
    has_header: bool = False
    mode: Literal["exact", "float"] = "exact"


class EvaluateResponse(BaseModel):
    label: str
    value: str
    n: int
    d: int
    mode: str


class VerifyRequest(LimitsMixin):
    specs: Optional[list[SpecModel]] = None
    suite: Optional[str] = None
    expression: Optional[dict] = None
    parallel: bool = False


class CertificationModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    estimator: str
    passed: bool = Field(alias="pass")
    difference: Optional[dict] = None
    elapsed_ms: float


class VerifyResponse(BaseModel):
    reports: list[CertificationModel]
    all_pass: bool


class BenchRequest(LimitsMixin):
    grid: Optional[list[str]] = None


class BenchRowModel(BaseModel):
    spec: str
    seconds: Optional[float] = None
    terms: Optional[int] = None
    note: Optional[str] = None


class BenchResponse(BaseModel):
    rows: list[BenchRowModel]
    tsv: str


class ErrorDetail(BaseModel):
    code: str
    message: str
