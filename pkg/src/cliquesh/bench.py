"""Benchmark runner over the bundled corpus.

Times every program under every domain and policy, and records the peak
abstract-state sizes so the clique domains' compression over the plain
ones is visible in one table.
"""

from __future__ import annotations

import statistics
import time
from importlib import resources
from typing import Any, Iterable, Mapping, Optional, Sequence

from .domains import DOMAIN_NAMES
from .engine import EngineOptions, analyze
from .normalize import NormalizePolicy
from .parser import parse_program
from .report import build_report
from .terms import ContractError

POLICIES: dict[str, NormalizePolicy] = {
    "default": NormalizePolicy(),
    "minimal": NormalizePolicy.from_flags(["extend", "compare"]),
    "widen-0.75": NormalizePolicy.from_flags(None, widening_threshold=0.75),
}


def corpus_names() -> list[str]:
    root = resources.files("cliquesh") / "corpus"
    return sorted(p.name[:-3] for p in root.iterdir() if p.name.endswith(".pl"))


def corpus_source(name: str) -> str:
    if "/" in name or "\\" in name or name.startswith("."):
        raise ContractError(f"not a corpus program name: {name!r}")
    path = resources.files("cliquesh") / "corpus" / f"{name}.pl"
    if not path.is_file():
        raise ContractError(
            f"unknown corpus program {name!r}; available: {', '.join(corpus_names())}"
        )
    return path.read_text()


def _policy_for(label: str) -> NormalizePolicy:
    try:
        return POLICIES[label]
    except KeyError:
        raise ContractError(
            f"unknown policy {label!r}; available: {', '.join(POLICIES)}"
        ) from None


def _timed_run(program, options: EngineOptions, repeats: int, name: str) -> dict[str, Any]:
    times = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = analyze(program, options)
        times.append((time.perf_counter() - t0) * 1000.0)
    if len(times) >= 3:
        times = sorted(times)[1:-1]  # drop best and worst
    assert result is not None
    totals = build_report(result, name)["totals"]
    return {
        "time_ms": round(statistics.mean(times), 3),
        "iterations": result.stats.iterations,
        "updates": result.stats.updates,
        "peak_size": result.stats.peak_size,
        "points": totals["points"],
        "groups": totals["groups"],
        "worst_case": totals["worst_case"],
        "cliques": totals["cliques"],
        "bottom_points": totals["bottom_points"],
        "variants": totals["variants"],
        "warnings": len(result.diagnostics),
    }


def run_bench(
    programs: Optional[Sequence[str]] = None,
    domains: Optional[Sequence[str]] = None,
    policies: Optional[Sequence[str]] = None,
    repeats: int = 3,
    sources: Optional[Mapping[str, str]] = None,
) -> dict[str, Any]:
    """Run the benchmark matrix and return a JSON-friendly report.

    sources maps program names to program text and replaces the bundled
    corpus when given; programs selects a subset by name either way.
    """
    if repeats < 1:
        raise ContractError("repeats must be positive")
    if sources is not None:
        names = list(programs) if programs else sorted(sources)
        missing = [n for n in names if n not in sources]
        if missing:
            raise ContractError(f"programs not in the supplied sources: {', '.join(missing)}")
        texts = {name: sources[name] for name in names}
    else:
        names = list(programs) if programs else corpus_names()
        texts = {name: corpus_source(name) for name in names}
    doms = list(domains) if domains else list(DOMAIN_NAMES)
    for d in doms:
        if d not in DOMAIN_NAMES:
            raise ContractError(f"unknown domain {d!r}; available: {', '.join(DOMAIN_NAMES)}")
    pols = list(policies) if policies else ["default", "minimal"]
    parsed = {name: parse_program(texts[name]) for name in names}

    cells: list[dict[str, Any]] = []
    for label in pols:
        policy = _policy_for(label)
        for name in names:
            for dom in doms:
                cell: dict[str, Any] = {"program": name, "domain": dom, "policy": label}
                try:
                    cell.update(
                        _timed_run(
                            parsed[name], EngineOptions(domain=dom, policy=policy), repeats, name
                        )
                    )
                    cell["error"] = None
                except Exception as exc:  # keep benching the rest
                    cell["error"] = f"{type(exc).__name__}: {exc}"
                cells.append(cell)

    report = {
        "repeats": repeats,
        "programs": names,
        "domains": doms,
        "policies": pols,
        "cells": cells,
        "peak_ratios": _peak_ratios(cells),
    }
    report["notes"] = _notes(report)
    return report


def _peak_ratios(cells: Iterable[dict[str, Any]]) -> list[dict[str, Any]]:
    """Plain-sharing peak size over clique-sharing peak size, per program."""
    peaks: dict[tuple[str, str, str], int] = {
        (c["program"], c["domain"], c["policy"]): c["peak_size"]
        for c in cells
        if c.get("error") is None
    }
    out = []
    for (name, dom, label), plain in sorted(peaks.items()):
        if dom != "sharing":
            continue
        clique = peaks.get((name, "clique-sharing", label))
        if clique is None:
            continue
        out.append(
            {
                "program": name,
                "policy": label,
                "plain_peak": plain,
                "clique_peak": clique,
                "ratio": round(plain / max(clique, 1), 2),
            }
        )
    return out


def _notes(report: dict[str, Any]) -> list[str]:
    notes = []
    best = max(report["peak_ratios"], key=lambda r: r["ratio"], default=None)
    if best is not None:
        notes.append(
            f"largest peak-size compression: {best['program']} under the {best['policy']} "
            f"policy, {best['plain_peak']} plain groups vs {best['clique_peak']} with "
            f"cliques (ratio {best['ratio']})"
        )
    failures = [c for c in report["cells"] if c.get("error")]
    if failures:
        notes.append(f"{len(failures)} cell(s) failed; see their error fields")
    return notes


def render_markdown(report: dict[str, Any]) -> str:
    """Render the benchmark report as Markdown tables."""
    lines = ["# Corpus benchmark", ""]
    lines.append(
        f"{len(report['programs'])} programs, {len(report['domains'])} domains, "
        f"{report['repeats']} repeats per cell (best and worst dropped when possible)."
    )
    by_key = {(c["program"], c["domain"], c["policy"]): c for c in report["cells"]}
    for label in report["policies"]:
        lines += ["", f"## Policy: {label}", ""]
        header = "| program | " + " | ".join(report["domains"]) + " |"
        lines.append(header)
        lines.append("|---" * (len(report["domains"]) + 1) + "|")
        for name in report["programs"]:
            row = [name]
            for dom in report["domains"]:
                cell = by_key.get((name, dom, label))
                if cell is None:
                    row.append("-")
                elif cell["error"]:
                    row.append("error")
                else:
                    row.append(
                        f"{cell['time_ms']:.1f} ms, {cell['groups']} ({cell['worst_case']}), "
                        f"#C {cell['cliques']}, peak {cell['peak_size']}"
                    )
            lines.append("| " + " | ".join(row) + " |")
    if report["peak_ratios"]:
        lines += ["", "## Peak abstract-state size, plain vs cliques", ""]
        lines.append("| program | policy | plain peak | clique peak | ratio |")
        lines.append("|---|---|---|---|---|")
        for r in report["peak_ratios"]:
            lines.append(
                f"| {r['program']} | {r['policy']} | {r['plain_peak']} "
                f"| {r['clique_peak']} | {r['ratio']} |"
            )
    for note in report.get("notes", ()):
        lines += ["", f"_{note}_"]
    return "\n".join(lines) + "\n"
