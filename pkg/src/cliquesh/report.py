"""Metrics extraction and report rendering.

A report is built once as a JSON-serializable dict; the text table is
rendered from that same dict, so the two formats cannot drift apart.
Per point the precision columns follow the groups (worst-case) and #C
convention: sharing-group count, the 2^n - 1 bound for the point's n
variables, and the clique count.
"""

from __future__ import annotations

from typing import Any

from .domains import is_bottom
from .engine import AnalysisResult
from .terms import render_term


def _policy_dict(result: AnalysisResult) -> dict[str, Any]:
    policy = result.options.policy
    return {
        "normalize_at": sorted(policy.sites),
        "widening_threshold": policy.widening_threshold,
        "clsh_limit": policy.clsh_limit,
    }


def build_report(result: AnalysisResult, program_name: str = "<string>") -> dict[str, Any]:
    """Collect per-point metrics and totals into one plain dict."""
    dom = result.domain
    points: list[dict[str, Any]] = []
    totals = {
        "points": 0,
        "groups": 0,
        "worst_case": 0,
        "cliques": 0,
        "bottom_points": 0,
        "variants": sum(len(v) for v in result.variant_order.values()),
    }
    for rec in result.points:
        clause = result.program.clauses[rec.clause_index]
        if is_bottom(rec.state):
            var_count = groups = worst = cliques = 0
            rendered = "bottom"
            totals["bottom_points"] += 1
        else:
            var_count = len(dom.var_domain(rec.state))
            groups = dom.group_count(rec.state)
            cliques = dom.clique_count(rec.state)
            worst = (1 << var_count) - 1
            rendered = dom.render(rec.state)
        free = None
        if not is_bottom(rec.state):
            fv = dom.free_vars(rec.state)
            if fv is not None:
                free = sorted(v.name for v in fv)
        points.append(
            {
                "clause": rec.clause_index,
                "clause_head": render_term(clause.head),
                "variant": rec.variant,
                "point": rec.point,
                "vars": var_count,
                "groups": groups,
                "worst_case": worst,
                "cliques": cliques,
                "free": free,
                "state": rendered,
            }
        )
        totals["points"] += 1
        totals["groups"] += groups
        totals["worst_case"] += worst
        totals["cliques"] += cliques

    entries = []
    for entry, key, success in result.entry_results:
        entries.append(
            {
                "goal": render_term(entry.goal),
                "ground": [v.name for v in entry.ground],
                "free": [v.name for v in entry.free],
                "success": "bottom" if is_bottom(success) else dom.render(success),
                "bottom": is_bottom(success),
            }
        )

    return {
        "program": program_name,
        "domain": result.domain_name,
        "policy": _policy_dict(result),
        "options": {
            "free_head_call2entry": result.options.free_head_call2entry,
            "on_unknown": result.options.on_unknown,
            "max_variants": result.options.max_variants,
        },
        "time_ms": round(result.stats.time_ms, 3),
        "iterations": result.stats.iterations,
        "updates": result.stats.updates,
        "peak_size": result.stats.peak_size,
        "variants": {ind: len(keys) for ind, keys in sorted(result.variant_order.items())},
        "entries": entries,
        "points": points,
        "totals": totals,
        "diagnostics": list(result.diagnostics),
    }


def _format_row(cells: list[str], widths: list[int]) -> str:
    return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()


def render_table(report: dict[str, Any]) -> str:
    """Text rendering of a report dict (same fields as the JSON form)."""
    lines: list[str] = []
    lines.append(f"program: {report['program']}")
    lines.append(
        f"domain: {report['domain']}   time: {report['time_ms']} ms   "
        f"iterations: {report['iterations']}   peak: {report['peak_size']}"
    )
    policy = report["policy"]
    widening = policy["widening_threshold"]
    lines.append(
        "normalize at: "
        + ", ".join(policy["normalize_at"])
        + (f"   widening: {widening}" if widening is not None else "")
    )
    lines.append("")

    for entry in report["entries"]:
        annotations = [f"ground({v})" for v in entry["ground"]] + [
            f"free({v})" for v in entry["free"]
        ]
        suffix = " : " + ", ".join(annotations) if annotations else ""
        lines.append(f"entry {entry['goal']}{suffix}")
        lines.append(f"  success: {entry['success']}")
    lines.append("")

    header = ["clause", "variant", "point", "vars", "precision", "#C", "state"]
    rows = [header]
    for p in report["points"]:
        rows.append(
            [
                f"{p['clause']}: {p['clause_head']}",
                str(p["variant"]),
                str(p["point"]),
                str(p["vars"]),
                f"{p['groups']} ({p['worst_case']})",
                str(p["cliques"]),
                p["state"],
            ]
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines.append(_format_row(rows[0], widths))
    lines.append(_format_row(["-" * w for w in widths], widths))
    for row in rows[1:]:
        lines.append(_format_row(row, widths))
    lines.append("")

    t = report["totals"]
    lines.append(
        f"totals: points {t['points']}  groups {t['groups']} "
        f"(worst-case {t['worst_case']})  #C {t['cliques']}  "
        f"variants {t['variants']}  bottom points {t['bottom_points']}"
    )
    for diag in report["diagnostics"]:
        lines.append(f"warning: {diag}")
    return "\n".join(lines) + "\n"


def analyze_to_report(
    program, options, program_name: str = "<string>"
) -> dict[str, Any]:
    """Convenience: run the engine and build the report dict."""
    from .engine import analyze

    return build_report(analyze(program, options), program_name)
