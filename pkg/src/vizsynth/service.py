"""HTTP facade over the synthesis pipeline.

Endpoints:
  POST /api/synthesize  – table + example elements -> ranked candidates
                          (NDJSON streaming with {"stream": true})
  POST /api/transform   – table + serialized program -> transformed table
  GET  /api/health      – liveness and version

The request table may be either the JSON table form {"columns":[...],
"rows":[...]} or a CSV string. Search configuration comes from the request's
"config" object, falling back to SYNTH_* environment variables, then to
built-in defaults.
"""

from __future__ import annotations

import json
import os
import queue
import threading

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.requests import Request
from fastapi.responses import JSONResponse, StreamingResponse

from . import __version__
from .errors import (
    EmptyTable,
    EvalError,
    ExampleError,
    MalformedCsv,
    ProgramParseError,
    VizSynthError,
)
from .grammar import elements_from_json
from .pipeline import synthesize
from .synthesizer import SearchConfig
from .table import Table, load_csv
from .transforms import eval_program, parse


def _env_defaults() -> dict:
    out = {}
    if os.environ.get("SYNTH_MAX_DEPTH"):
        out["max_depth"] = int(os.environ["SYNTH_MAX_DEPTH"])
    if os.environ.get("SYNTH_MAX_CANDIDATES"):
        out["max_candidates"] = int(os.environ["SYNTH_MAX_CANDIDATES"])
    if os.environ.get("SYNTH_BUDGETS_MS"):
        out["budgets_ms"] = [
            int(p) for p in os.environ["SYNTH_BUDGETS_MS"].split(",") if p.strip()
        ]
    return out


def make_config(overrides: dict | None) -> SearchConfig:
    merged = _env_defaults()
    merged.update(overrides or {})
    kwargs = {}
    if "max_depth" in merged:
        kwargs["max_depth"] = int(merged["max_depth"])
    if "max_candidates" in merged:
        kwargs["max_candidates"] = int(merged["max_candidates"])
    if merged.get("seedless"):
        kwargs["worker_budgets"] = (None,)
    elif "budgets_ms" in merged:
        kwargs["worker_budgets"] = tuple(
            None if ms is None else ms / 1000.0 for ms in merged["budgets_ms"]
        )
    if "rel_tol" in merged:
        kwargs["rel_tol"] = float(merged["rel_tol"])
    if "memoize" in merged:
        kwargs["memoize"] = bool(merged["memoize"])
    return SearchConfig(**kwargs)


def _parse_table(raw) -> Table:
    if isinstance(raw, str):
        return load_csv(raw.encode("utf-8"))
    if isinstance(raw, dict):
        return Table.from_json(raw)
    raise MalformedCsv("table must be a CSV string or a JSON table object")


def _bad_request(message: str, field: str | None = None) -> JSONResponse:
    body = {"error": message}
    if field:
        body["field"] = field
    return JSONResponse(body, status_code=400)


def create_app(max_concurrency: int = 2) -> FastAPI:
    app = FastAPI(title="vizsynth", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    # cap concurrent syntheses so per-request worker budgets stay honest
    gate = threading.Semaphore(max_concurrency)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/synthesize")
    async def synthesize_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request("request body is not valid JSON")
        if not isinstance(body, dict):
            return _bad_request("request body must be a JSON object")
        try:
            table = _parse_table(body.get("table"))
        except (MalformedCsv, EmptyTable, VizSynthError, ValueError) as exc:
            return _bad_request(f"bad table: {exc}", field="table")
        try:
            elements = elements_from_json(body.get("elements"))
        except ExampleError as exc:
            return _bad_request(str(exc), field=exc.field)
        try:
            cfg = make_config(body.get("config"))
        except (TypeError, ValueError) as exc:
            return _bad_request(f"bad config: {exc}", field="config")

        if body.get("stream"):
            return _stream_synthesis(gate, table, elements, cfg)

        with gate:
            try:
                outcome = synthesize(table, elements, cfg)
            except VizSynthError as exc:
                return JSONResponse({"error": str(exc)}, status_code=422)
        return {
            "candidates": [c.to_json() for c in outcome.candidates],
            "stats": outcome.stats,
            "truncated": outcome.truncated,
            "reason": outcome.reason,
        }

    @app.post("/api/transform")
    async def transform_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request("request body is not valid JSON")
        if not isinstance(body, dict):
            return _bad_request("request body must be a JSON object")
        try:
            table = _parse_table(body.get("table"))
        except (MalformedCsv, EmptyTable, VizSynthError, ValueError) as exc:
            return _bad_request(f"bad table: {exc}", field="table")
        program_text = body.get("program")
        if not isinstance(program_text, str):
            return _bad_request("program must be a string", field="program")
        try:
            program = parse(program_text)
        except ProgramParseError as exc:
            return _bad_request(str(exc), field="program")
        try:
            result = eval_program(program, table)
        except EvalError as exc:
            return JSONResponse(
                {"error": str(exc), "op_index": exc.op_index}, status_code=422
            )
        return {"table": result.to_json()}

    return app


def _stream_synthesis(gate, table, elements, cfg) -> StreamingResponse:
    events: "queue.Queue" = queue.Queue()

    def emit(candidate):
        events.put({"type": "candidate", "candidate": candidate.to_json()})

    def run():
        with gate:
            try:
                outcome = synthesize(table, elements, cfg, on_candidate=emit)
            except VizSynthError as exc:
                events.put({"type": "error", "error": str(exc), "status": 422})
            else:
                events.put(
                    {
                        "type": "done",
                        "candidates": [c.to_json() for c in outcome.candidates],
                        "stats": outcome.stats,
                        "truncated": outcome.truncated,
                        "reason": outcome.reason,
                    }
                )
            events.put(None)

    threading.Thread(target=run, daemon=True).start()

    def lines():
        while True:
            event = events.get()
            if event is None:
                break
            yield json.dumps(event, sort_keys=True) + "\n"

    return StreamingResponse(lines(), media_type="application/x-ndjson")


app = create_app()
