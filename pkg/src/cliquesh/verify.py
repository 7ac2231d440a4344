"""Executable soundness checks for whole analysis runs.

Each public domain has a cheaper or more trustworthy twin to compare
against:

  sharing                   re-run on the brute-force reference ops,
                            demand exact table and point equality
  sharing-freeness          plain sharing twin; the freeness-enhanced
                            sharing must be contained in it pointwise
  clique-sharing            plain sharing twin; expanding every clique
                            must cover the plain groups pointwise
  clique-sharing-freeness   sharing-freeness twin; expansion covers the
                            plain groups and freeness shrinks

Cross-domain comparisons aggregate per program point by union over the
variants recorded there: every variant of one run is covered by some
variant of the other (both runs traverse the same call sites), so the
unions are comparable even when the variant keys differ.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from .domains import is_bottom
from .engine import AnalysisResult, EngineOptions, analyze
from .oracle import expand
from .sharing import SharingSet
from .terms import Program, Var


@dataclass(frozen=True)
class VerifyCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerifyReport:
    domain: str
    twin: str
    passed: bool
    checks: tuple[VerifyCheck, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "domain": self.domain,
            "twin": self.twin,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


def _comparable_sharing(s: SharingSet) -> tuple:
    return (tuple(v.id for v in s.domain), frozenset(s.groups))


def _point_map(result: AnalysisResult) -> dict[tuple[int, int], list]:
    """All recorded states per (clause, point), across variants."""
    out: dict[tuple[int, int], list] = {}
    for rec in result.points:
        out.setdefault((rec.clause_index, rec.point), []).append(rec.state)
    return out


def _union_groups(result: AnalysisResult, states, expanded: bool) -> frozenset[frozenset[Var]]:
    dom = result.domain
    total: set[frozenset[Var]] = set()
    for state in states:
        if is_bottom(state):
            continue
        if expanded and dom.has_cliques:
            if dom.has_freeness:
                total |= expand(state.pair).groups_as_varsets()
            else:
                total |= expand(state).groups_as_varsets()
        else:
            total |= dom.sharing_sets(state)
    return frozenset(total)


def _union_free(result: AnalysisResult, states) -> frozenset[Var]:
    dom = result.domain
    total: set[Var] = set()
    for state in states:
        if is_bottom(state):
            continue
        fv = dom.free_vars(state)
        if fv:
            total |= fv
    return frozenset(total)


def _names(groups: frozenset[frozenset[Var]]) -> str:
    return "{" + ", ".join(sorted("".join(sorted(v.name for v in g)) for g in groups)) + "}"


def _check_oracle_twin(base: AnalysisResult, twin: AnalysisResult) -> list[VerifyCheck]:
    def plain_key(key):
        sub = key.sub
        return (
            key.functor,
            key.arity,
            key.merged,
            None if sub is None else _comparable_sharing(sub),
        )

    base_table = {
        plain_key(k): None if is_bottom(v) else _comparable_sharing(v)
        for k, v in base.table.items()
    }
    twin_table = {
        plain_key(k): None if is_bottom(v) else _comparable_sharing(v)
        for k, v in twin.table.items()
    }
    checks = [
        VerifyCheck(
            "table equality against reference operations",
            base_table == twin_table,
            f"{len(base_table)} call patterns",
        )
    ]

    base_points = {
        (r.clause_index, r.variant, r.point): (
            None if is_bottom(r.state) else _comparable_sharing(r.state)
        )
        for r in base.points
    }
    twin_points = {
        (r.clause_index, r.variant, r.point): (
            None if is_bottom(r.state) else _comparable_sharing(r.state)
        )
        for r in twin.points
    }
    checks.append(
        VerifyCheck(
            "program-point equality against reference operations",
            base_points == twin_points,
            f"{len(base_points)} points",
        )
    )
    return checks


def _check_containment(
    base: AnalysisResult,
    twin: AnalysisResult,
    *,
    expand_base: bool,
    check_freeness: bool,
) -> list[VerifyCheck]:
    """base's (possibly expanded) sharing must cover twin's; base freeness
    must be contained in twin's."""
    base_pts = _point_map(base)
    twin_pts = _point_map(twin)
    bad_sharing: list[str] = []
    bad_free: list[str] = []
    for where in sorted(set(base_pts) | set(twin_pts)):
        big = _union_groups(base, base_pts.get(where, ()), expanded=expand_base)
        small = _union_groups(twin, twin_pts.get(where, ()), expanded=False)
        if not small <= big:
            missing = _names(small - big)
            bad_sharing.append(f"clause {where[0]} point {where[1]}: missing {missing}")
        if check_freeness:
            f_base = _union_free(base, base_pts.get(where, ()))
            f_twin = _union_free(twin, twin_pts.get(where, ()))
            if not f_base <= f_twin:
                extra = ", ".join(sorted(v.name for v in f_base - f_twin))
                bad_free.append(f"clause {where[0]} point {where[1]}: extra free {extra}")

    label = "expansion covers" if expand_base else "sharing contained in"
    checks = [
        VerifyCheck(
            f"{label} the {twin.domain_name} twin at every point",
            not bad_sharing,
            "; ".join(bad_sharing[:5]) or f"{len(set(base_pts) | set(twin_pts))} points",
        )
    ]
    if check_freeness:
        checks.append(
            VerifyCheck(
                "freeness contained in the twin's at every point",
                not bad_free,
                "; ".join(bad_free[:5]) or "",
            )
        )
    return checks


_TWINS = {
    "sharing": "sharing-oracle",
    "sharing-freeness": "sharing",
    "clique-sharing": "sharing",
    "clique-sharing-freeness": "sharing-freeness",
}


def run_verify(program: Program, options: EngineOptions) -> VerifyReport:
    """Analyze twice and cross-check the runs per the twin table."""
    base = analyze(program, options)
    twin_name = _TWINS[options.domain]
    twin = analyze(program, replace(options, domain=twin_name))

    if options.domain == "sharing":
        checks = _check_oracle_twin(base, twin)
    elif options.domain == "sharing-freeness":
        # the freeness-enhanced amgu may only shrink sharing
        checks = _check_containment(
            twin, base, expand_base=False, check_freeness=False
        )
        checks = [
            replace(
                c,
                name="freeness-enhanced sharing contained in the plain sharing twin",
            )
            for c in checks
        ]
        checks += _hygiene_checks(base)
    elif options.domain == "clique-sharing":
        checks = _check_containment(base, twin, expand_base=True, check_freeness=False)
    else:
        checks = _check_containment(base, twin, expand_base=True, check_freeness=True)

    passed = all(c.passed for c in checks)
    return VerifyReport(options.domain, twin_name, passed, tuple(checks))


def _hygiene_checks(result: AnalysisResult) -> list[VerifyCheck]:
    dom = result.domain
    bad = []
    for rec in result.points:
        if is_bottom(rec.state):
            continue
        fv = dom.free_vars(rec.state)
        if fv is None:
            continue
        occurring = {v for g in dom.sharing_sets(rec.state) for v in g}
        occurring |= {v for c in dom.clique_sets(rec.state) for v in c}
        if not fv <= occurring:
            bad.append(f"clause {rec.clause_index} point {rec.point}")
    return [
        VerifyCheck(
            "free variables always occur in some group",
            not bad,
            "; ".join(bad[:5]) or "",
        )
    ]
