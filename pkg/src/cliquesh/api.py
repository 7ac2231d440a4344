"""HTTP service around the analyzer.

All heavy lifting stays in the core modules; this layer only validates
requests, maps domain errors onto 4xx responses, and serializes the
report dicts.  The command-line client talks to this app, either
in-process or over a socket.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .bench import POLICIES, corpus_names, corpus_source, render_markdown, run_bench
from .domains import DOMAIN_NAMES
from .engine import AnalysisError, EngineOptions, analyze
from .normalize import NORMALIZE_SITES, NormalizePolicy
from .parser import ParseError, parse_program
from .report import build_report
from .terms import ContractError
from .verify import run_verify


class AnalyzeRequest(BaseModel):
    """Either source text or the name of a bundled corpus program."""

    source: Optional[str] = None
    program: Optional[str] = Field(None, description="bundled corpus program name")
    name: Optional[str] = Field(None, description="label used in the report")
    domain: str = "sharing"
    normalize_at: Optional[list[str]] = Field(
        None, description=f"subset of {', '.join(NORMALIZE_SITES)}"
    )
    widening_threshold: Optional[float] = None
    clsh_limit: int = 24
    free_head_call2entry: bool = False
    on_unknown: str = "top"
    max_variants: Optional[int] = None
    verify: bool = False


class VerifyCheckModel(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class VerifyModel(BaseModel):
    domain: str
    twin: str
    passed: bool
    checks: list[VerifyCheckModel]


class AnalyzeResponse(BaseModel):
    report: dict[str, Any]
    verify: Optional[VerifyModel] = None


class BenchRequest(BaseModel):
    programs: Optional[list[str]] = None
    domains: Optional[list[str]] = None
    policies: Optional[list[str]] = Field(
        None, description=f"subset of {', '.join(POLICIES)}"
    )
    repeats: int = Field(3, ge=1, le=25)
    sources: Optional[dict[str, str]] = Field(
        None, description="program name to text; replaces the bundled corpus"
    )


class BenchResponse(BaseModel):
    report: dict[str, Any]
    markdown: str


app = FastAPI(
    title="cliquesh",
    version=__version__,
    description="Set-sharing analysis for logic programs, with clique "
    "compression and freeness tracking.",
)


def _bad_request(exc: Exception) -> HTTPException:
    detail: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        detail["line"] = exc.line
        detail["col"] = exc.col
    return HTTPException(status_code=422, detail=detail)


def _engine_options(req: AnalyzeRequest) -> EngineOptions:
    if req.domain not in DOMAIN_NAMES:
        raise ContractError(
            f"unknown domain {req.domain!r}; available: {', '.join(DOMAIN_NAMES)}"
        )
    policy = NormalizePolicy.from_flags(
        req.normalize_at, req.widening_threshold, req.clsh_limit
    )
    return EngineOptions(
        domain=req.domain,
        policy=policy,
        free_head_call2entry=req.free_head_call2entry,
        on_unknown=req.on_unknown,
        max_variants=req.max_variants,
    )


@app.get("/health")
def health() -> dict[str, Any]:
    return {"status": "ok", "version": __version__, "domains": list(DOMAIN_NAMES)}


@app.get("/corpus")
def corpus_index() -> dict[str, Any]:
    return {"programs": corpus_names()}


@app.get("/corpus/{name}")
def corpus_program(name: str) -> dict[str, str]:
    try:
        return {"name": name, "source": corpus_source(name)}
    except ContractError as exc:
        raise HTTPException(status_code=404, detail={"message": str(exc)}) from exc


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze_endpoint(req: AnalyzeRequest) -> AnalyzeResponse:
    if (req.source is None) == (req.program is None):
        raise HTTPException(
            status_code=422,
            detail={"message": "provide exactly one of 'source' or 'program'"},
        )
    try:
        if req.program is not None:
            source = corpus_source(req.program)
            label = req.name or req.program
        else:
            source = req.source or ""
            label = req.name or "<string>"
        options = _engine_options(req)
        program = parse_program(source)
        result = analyze(program, options)
        report = build_report(result, label)
        verify = None
        if req.verify:
            verify = VerifyModel(**run_verify(program, options).to_dict())
        return AnalyzeResponse(report=report, verify=verify)
    except (ParseError, AnalysisError, ContractError) as exc:
        raise _bad_request(exc) from exc


@app.post("/bench", response_model=BenchResponse)
def bench_endpoint(req: BenchRequest) -> BenchResponse:
    try:
        report = run_bench(
            programs=req.programs,
            domains=req.domains,
            policies=req.policies,
            repeats=req.repeats,
            sources=req.sources,
        )
    except (ParseError, ContractError) as exc:
        raise _bad_request(exc) from exc
    return BenchResponse(report=report, markdown=render_markdown(report))
