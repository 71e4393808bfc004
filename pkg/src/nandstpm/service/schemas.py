"""Request/response models of the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class GeometrySchema(BaseModel):
    blocks: int = Field(default=64, ge=1)
    dsl: int = Field(default=3, ge=1)
    wl: int = Field(default=32, ge=1)
    bl: int = Field(default=13824, ge=1)


class PatternEntry(BaseModel):
    id: int
    symbols: list[str]


class PatternDocument(BaseModel):
    height: int = Field(ge=1)
    width: int = Field(ge=1)
    steps: int = Field(ge=1)
    patterns: list[PatternEntry]


class GenerateRequest(BaseModel):
    n: int = Field(default=500, ge=1)
    shapes: list[str] = ["cross", "plus"]
    seed: int = 42
    grid: int = Field(default=8, ge=1)
    steps: int = Field(default=10, ge=1)
    p_jitter: float = Field(default=0.1, ge=0.0, le=1.0)
    p_flip: float = Field(default=0.02, ge=0.0, le=1.0)
    queries: int = Field(default=0, ge=0)
    query_p_jitter: float = Field(default=0.05, ge=0.0, le=1.0)
    query_p_flip: float = Field(default=0.01, ge=0.0, le=1.0)


class GenerateResponse(BaseModel):
    references: PatternDocument
    queries: PatternDocument


class ProgramRequest(BaseModel):
    geometry: GeometrySchema = GeometrySchema()
    references: PatternDocument


class ArrayInfo(BaseModel):
    array_id: str
    stored_count: int
    geometry: GeometrySchema
    height: int
    width: int
    steps: int
    capacity_steps: int
    capacity_patterns: int


class ArrayDump(BaseModel):
    geometry: GeometrySchema
    height: int
    width: int
    steps: int
    patterns: list[PatternEntry]


class QueryRequest(BaseModel):
    pattern: PatternDocument
    device_params_text: str | None = None
    delta_t: float = Field(default=1e-7, gt=0)
    compact_rounds: bool = True
    include_block_hits: bool = False


class QueryResponse(BaseModel):
    matches: list[int]
    sense_rounds: int
    per_block_hits: dict[int, list[tuple[int, int]]] | None = None


class PerfEstimateRequest(BaseModel):
    geometry: GeometrySchema = GeometrySchema()
    active_blocks: int = Field(ge=1)
    active_bls_per_block: int = Field(ge=0)
    rounds: int = Field(ge=1)
    steps: int = Field(ge=1)
    perf_params_text: str | None = None


class PerfReportSchema(BaseModel):
    latency_s: float
    energy_j: float
    breakdown: dict[str, float]
    active_blocks: int
    active_bls: int
    rounds: int
    formula: str


class BenchRequest(BaseModel):
    n: int = Field(default=500, ge=1)
    grid: int = Field(default=8, ge=1)
    steps: int = Field(default=10, ge=1)
    seed: int = 42
    p_jitter: float = 0.1
    p_flip: float = 0.02
    queries: int = Field(default=1, ge=1)
    query_p_jitter: float = 0.05
    query_p_flip: float = 0.01
    geometry: GeometrySchema = GeometrySchema()
    matchers: list[str] = ["nand", "brute", "lsh"]
    repeats: int = Field(default=5, ge=1)
    warmup: int = Field(default=1, ge=0)
    delta_t: float = Field(default=1e-7, gt=0)
    compact_rounds: bool = True
    device_params_text: str | None = None
    perf_params_text: str | None = None
    lsh_k: int = Field(default=128, ge=1)
    lsh_bands: int = Field(default=32, ge=1)
    lsh_rows: int = Field(default=4, ge=1)


class BenchResponse(BaseModel):
    report: dict
    csv: str
    agreement_ok: bool


class SweepRequest(BenchRequest):
    counts: list[int] = [50, 100, 200, 500]


class SweepResponse(BaseModel):
    report: dict
    csv: str
    agreement_ok: bool
    checks: dict


class HealthResponse(BaseModel):
    status: str
    version: str
