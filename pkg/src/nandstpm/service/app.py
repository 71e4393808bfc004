"""FastAPI front end wrapping the simulator.

Arrays are programmed once into an in-memory store and queried many times;
everything else (dataset generation, cost estimates, benchmark runs) is
stateless.  Domain errors map to structured 4xx payloads whose ``code``
field the CLI translates into exit codes.
"""

from __future__ import annotations

import itertools
import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..array import (
    ArrayGeometry,
    ArrayState,
    capacity,
    document_to_state,
    program_array,
    query as array_query,
    state_to_document,
)
from ..bench import BenchConfig, run_benchmark, run_sweep
from ..config import device_params_from_text, perf_params_from_text
from ..datagen import generate_dataset
from ..device import DeviceParams
from ..errors import CapacityError, ConfigError, DimensionError, MissingBlockError, StpmError
from ..patterns import document_to_patterns, patterns_to_document
from ..perf import PerfParams, estimate_query
from . import schemas


class ArrayStore:
    """Thread-safe id -> programmed array map."""

    def __init__(self):
        self._lock = threading.Lock()
        self._arrays: dict[str, ArrayState] = {}
        self._ids = itertools.count(1)

    def add(self, state: ArrayState) -> str:
        with self._lock:
            array_id = f"arr-{next(self._ids)}"
            self._arrays[array_id] = state
            return array_id

    def get(self, array_id: str) -> ArrayState:
        with self._lock:
            if array_id not in self._arrays:
                raise LookupError(array_id)
            return self._arrays[array_id]

    def remove(self, array_id: str) -> None:
        with self._lock:
            if array_id not in self._arrays:
                raise LookupError(array_id)
            del self._arrays[array_id]

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._arrays)


_ERROR_CODES = {
    CapacityError: "capacity",
    DimensionError: "dimension",
    MissingBlockError: "missing_block",
    ConfigError: "config",
}


def _geometry(schema: schemas.GeometrySchema) -> ArrayGeometry:
    return ArrayGeometry(blocks=schema.blocks, dsl=schema.dsl, wl=schema.wl, bl=schema.bl)


def _device_params(text: str | None) -> DeviceParams:
    return device_params_from_text(text) if text else DeviceParams()


def _perf_params(text: str | None) -> PerfParams:
    return perf_params_from_text(text) if text else PerfParams()


def _array_info(array_id: str, state: ArrayState) -> schemas.ArrayInfo:
    g = state.geometry
    max_steps, max_patterns = capacity(g)
    return schemas.ArrayInfo(
        array_id=array_id,
        stored_count=state.stored_count,
        geometry=schemas.GeometrySchema(blocks=g.blocks, dsl=g.dsl, wl=g.wl, bl=g.bl),
        height=state.height,
        width=state.width,
        steps=state.steps,
        capacity_steps=max_steps,
        capacity_patterns=max_patterns,
    )


def _bench_config(req: schemas.BenchRequest) -> BenchConfig:
    return BenchConfig(
        n=req.n,
        grid=req.grid,
        steps=req.steps,
        seed=req.seed,
        p_jitter=req.p_jitter,
        p_flip=req.p_flip,
        queries=req.queries,
        query_p_jitter=req.query_p_jitter,
        query_p_flip=req.query_p_flip,
        geometry=_geometry(req.geometry),
        device=_device_params(req.device_params_text),
        perf=_perf_params(req.perf_params_text),
        delta_t=req.delta_t,
        matchers=tuple(req.matchers),
        repeats=req.repeats,
        warmup=req.warmup,
        compact_rounds=req.compact_rounds,
        lsh_k=req.lsh_k,
        lsh_bands=req.lsh_bands,
        lsh_rows=req.lsh_rows,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="nandstpm", version=__version__)
    store = ArrayStore()

    @app.exception_handler(StpmError)
    async def stpm_error_handler(request: Request, exc: StpmError):
        code = _ERROR_CODES.get(type(exc), "error")
        detail = {"code": code, "message": str(exc)}
        if isinstance(exc, CapacityError) and exc.dimension:
            detail["dimension"] = exc.dimension
        return JSONResponse(status_code=422, content={"detail": detail})

    @app.exception_handler(LookupError)
    async def lookup_error_handler(request: Request, exc: LookupError):
        return JSONResponse(
            status_code=404,
            content={"detail": {"code": "not_found", "message": f"unknown array {exc}"}},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/datasets/generate", response_model=schemas.GenerateResponse)
    def generate(req: schemas.GenerateRequest):
        refs, queries = generate_dataset(
            req.n,
            shapes=tuple(req.shapes),
            seed=req.seed,
            grid=req.grid,
            steps=req.steps,
            p_jitter=req.p_jitter,
            p_flip=req.p_flip,
            n_queries=req.queries,
            query_p_jitter=req.query_p_jitter,
            query_p_flip=req.query_p_flip,
        )
        return schemas.GenerateResponse(
            references=patterns_to_document(refs),
            queries=patterns_to_document(
                queries, height=req.grid, width=req.grid, steps=req.steps
            ),
        )

    @app.post("/arrays", response_model=schemas.ArrayInfo)
    def program(req: schemas.ProgramRequest):
        refs = document_to_patterns(req.references.model_dump())
        state = program_array(refs, _geometry(req.geometry))
        array_id = store.add(state)
        return _array_info(array_id, state)

    @app.get("/arrays")
    def list_arrays():
        return {"arrays": store.ids()}

    @app.get("/arrays/{array_id}", response_model=schemas.ArrayInfo)
    def array_info(array_id: str):
        return _array_info(array_id, store.get(array_id))

    @app.get("/arrays/{array_id}/dump")
    def array_dump(array_id: str):
        return state_to_document(store.get(array_id))

    @app.post("/arrays/load", response_model=schemas.ArrayInfo)
    def array_load(doc: dict):
        state = document_to_state(doc)
        array_id = store.add(state)
        return _array_info(array_id, state)

    @app.delete("/arrays/{array_id}")
    def array_delete(array_id: str):
        store.remove(array_id)
        return {"deleted": array_id}

    @app.post("/arrays/{array_id}/query", response_model=schemas.QueryResponse)
    def array_query_endpoint(array_id: str, req: schemas.QueryRequest):
        state = store.get(array_id)
        patterns = document_to_patterns(req.pattern.model_dump(), query=True)
        if len(patterns) != 1:
            raise DimensionError("query document must hold exactly one pattern")
        result = array_query(
            state,
            patterns[0],
            _device_params(req.device_params_text),
            req.delta_t,
            compact_rounds=req.compact_rounds,
        )
        hits = None
        if req.include_block_hits:
            hits = {
                block: sorted(slots) for block, slots in result.per_block_hits.items()
            }
        return schemas.QueryResponse(
            matches=sorted(result.matches),
            sense_rounds=result.sense_rounds,
            per_block_hits=hits,
        )

    @app.post("/perf/estimate", response_model=schemas.PerfReportSchema)
    def perf_estimate(req: schemas.PerfEstimateRequest):
        report = estimate_query(
            _geometry(req.geometry),
            active_blocks=req.active_blocks,
            active_bls_per_block=req.active_bls_per_block,
            rounds=req.rounds,
            steps=req.steps,
            pp=_perf_params(req.perf_params_text),
        )
        return schemas.PerfReportSchema(
            latency_s=report.latency_s,
            energy_j=report.energy_j,
            breakdown=report.breakdown,
            active_blocks=report.active_blocks,
            active_bls=report.active_bls,
            rounds=report.rounds,
            formula=report.formula,
        )

    @app.post("/bench/run", response_model=schemas.BenchResponse)
    def bench_run(req: schemas.BenchRequest):
        report = run_benchmark(_bench_config(req))
        return schemas.BenchResponse(
            report=report.to_dict(), csv=report.csv_text(), agreement_ok=report.agreement_ok
        )

    @app.post("/bench/sweep", response_model=schemas.SweepResponse)
    def bench_sweep(req: schemas.SweepRequest):
        report = run_sweep(_bench_config(req), req.counts)
        return schemas.SweepResponse(
            report=report.to_dict(),
            csv=report.csv_text(),
            agreement_ok=report.agreement_ok,
            checks=report.checks,
        )

    return app


app = create_app()
