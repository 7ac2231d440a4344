"""Top-down, goal-dependent fixpoint analyzer.

The analysis is multivariant: the memo table is keyed by call patterns,
a predicate indicator plus the call description renamed onto canonical
argument variables, so one predicate can hold several analyzed variants.
Each pattern's success description starts at Bottom and climbs the
lattice through least-fixpoint iteration; a worklist driven by recorded
caller/callee dependencies schedules recomputation.

Per clause variant the equations are the classic goal-dependent set:

    Entry = augment(Fresh, call2entry(Call, Goal, Head))
    Exit  = entry2exit(Body, Entry)
    Prime = lub over clauses of exit2succ(project(Exit, Head), Goal, Head)
    Succ  = extend(Call, Goal, Prime)

with call2entry(C, G, H) = unify(C, H, G) and exit2succ(E, G, H) =
unify(E, G, H).  Builtins short-circuit through their own transfers, and
unknown predicates degrade to a worst-case success (with a diagnostic)
unless configured to be errors.

Once the table is stable a recording pass replays every variant to store
the abstract substitution at each program point (clause entry and after
each body atom), renamed back onto the source clause's variables.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

from .domains import BOTTOM, AbstractDomain, get_domain, is_bottom
from .normalize import NormalizePolicy
from .terms import (
    Clause,
    ContractError,
    EntryDecl,
    Program,
    Struct,
    Var,
    VarFactory,
    substitute,
    tuple_term,
    var_set,
    vars_of,
)

BUILTIN_INDICATORS = frozenset(
    {
        ("=", 2),
        ("is", 2),
        ("<", 2),
        (">", 2),
        ("=<", 2),
        (">=", 2),
        ("=:=", 2),
        ("=\\=", 2),
        ("true", 0),
        ("fail", 0),
        ("false", 0),
    }
)

_GROUNDING_BUILTINS = frozenset(
    {("is", 2), ("<", 2), (">", 2), ("=<", 2), (">=", 2), ("=:=", 2), ("=\\=", 2)}
)

# Generous tripwire; the lattices are finite and iteration is monotone,
# so hitting this means a bug, not a hard program.
MAX_FIXPOINT_STEPS = 100_000


class AnalysisError(Exception):
    """The analysis could not produce a result for this input."""


_canon_pool: list[Var] = []


def canon_vars(n: int) -> tuple[Var, ...]:
    """Interned canonical argument variables A1..An (negative ids keep
    them apart from every parser- or renamer-produced variable)."""
    while len(_canon_pool) < n:
        i = len(_canon_pool)
        _canon_pool.append(Var(-(i + 1), f"A{i + 1}"))
    return tuple(_canon_pool[:n])


def canon_atom(functor: str, arity: int) -> Struct:
    return Struct(functor, canon_vars(arity))


@dataclass(frozen=True)
class CallPattern:
    """A memo key: predicate indicator plus the canonicalized call.

    sub is the call description over the canonical argument variables;
    the overflow variant produced by a variant cap carries None instead
    (its growing call description lives beside the table).
    """

    functor: str
    arity: int
    sub: object = None
    merged: bool = False

    @property
    def indicator(self) -> str:
        return f"{self.functor}/{self.arity}"


@dataclass(frozen=True)
class EngineOptions:
    domain: str = "sharing"
    policy: NormalizePolicy = NormalizePolicy()
    free_head_call2entry: bool = False
    on_unknown: str = "top"  # "top" (warn) or "error"
    max_variants: Optional[int] = None

    def __post_init__(self) -> None:
        if self.on_unknown not in ("top", "error"):
            raise ContractError("on_unknown must be 'top' or 'error'")
        if self.max_variants is not None and self.max_variants < 1:
            raise ContractError("max_variants must be positive")


@dataclass(frozen=True)
class PointRecord:
    """One program point of one analyzed clause variant.

    point 0 is the clause entry; point i > 0 is the state after the i-th
    body atom.  The state is over the source clause's own variables (or
    Bottom when the point is unreachable under this variant).
    """

    clause_index: int
    variant: int
    point: int
    state: object


@dataclass
class EngineStats:
    iterations: int = 0
    updates: int = 0
    peak_size: int = 0
    time_ms: float = 0.0


@dataclass
class AnalysisResult:
    domain_name: str
    program: Program
    options: EngineOptions
    table: dict[CallPattern, object]
    entry_results: list[tuple[EntryDecl, CallPattern, object]]
    points: list[PointRecord]
    variant_order: dict[str, list[CallPattern]]
    diagnostics: list[str]
    stats: EngineStats

    @property
    def domain(self) -> AbstractDomain:
        return get_domain(self.domain_name)

    def variant_index(self, key: CallPattern) -> int:
        return self.variant_order[key.indicator].index(key)

    def points_for(self, clause_index: int) -> list[PointRecord]:
        return [p for p in self.points if p.clause_index == clause_index]


class _Analyzer:
    def __init__(self, program: Program, options: EngineOptions):
        self.program = program
        self.opt = options
        self.dom = get_domain(options.domain)
        self.policy = options.policy
        self.table: dict[CallPattern, object] = {}
        self.deps: dict[CallPattern, dict[CallPattern, None]] = {}
        self.queue: deque[CallPattern] = deque()
        self.queued: set[CallPattern] = set()
        self.variant_order: dict[str, list[CallPattern]] = {}
        self.merged_calls: dict[tuple[str, int], object] = {}
        self.diagnostics: list[str] = []
        self.warned: set[tuple[str, int]] = set()
        self.factory = VarFactory(program.max_var_id)
        self.stats = EngineStats()
        self.current: Optional[CallPattern] = None
        self.recording = False

    # ---- small helpers ----

    def _note_size(self, state: object) -> None:
        if is_bottom(state):
            return
        size = self.dom.size(state)
        if size > self.stats.peak_size:
            self.stats.peak_size = size

    def _apply(self, state: object, site: str) -> object:
        if is_bottom(state):
            return state
        return self.dom.apply_policy(state, site, self.policy)

    def _sweep(self, state: object) -> object:
        if is_bottom(state):
            return state
        out = self.dom.sweep(state)
        self._note_size(out)
        return out

    def _join(self, a: object, b: object) -> object:
        if is_bottom(a):
            return b
        if is_bottom(b):
            return a
        return self.dom.lub(a, b)

    def _enqueue(self, key: CallPattern) -> None:
        if key not in self.queued:
            self.queued.add(key)
            self.queue.append(key)

    # ---- call patterns ----

    def canonicalize(self, proj: object, goal: Struct) -> CallPattern:
        """Rename a projected call description onto the canonical argument
        variables by unifying the goal with the flat canonical atom."""
        catom = canon_atom(goal.functor, goal.arity)
        sub = self.dom.unify(proj, catom, goal)
        assert not is_bottom(sub), "a flat atom of fresh variables always unifies"
        sub = self._sweep(sub)
        sub = self._apply(sub, "compare")
        return CallPattern(goal.functor, goal.arity, sub)

    def intern_key(self, proj: object, goal: Struct) -> CallPattern:
        key = self.canonicalize(proj, goal)
        cap = self.opt.max_variants
        if cap is None or key in self.table:
            return key
        if len(self.variant_order.get(key.indicator, ())) < cap:
            return key
        return self._merge_into_overflow(key)

    def _merge_into_overflow(self, key: CallPattern) -> CallPattern:
        mkey = CallPattern(key.functor, key.arity, None, merged=True)
        pred = (key.functor, key.arity)
        old = self.merged_calls.get(pred)
        if old is None:
            new = key.sub
        else:
            new = self._apply(self._sweep(self._join(old, key.sub)), "compare")
        if self.recording:
            return mkey
        if old is None or not self.dom.leq(new, old):
            self.merged_calls[pred] = new
            if mkey in self.table:
                self._enqueue(mkey)
        return mkey

    def call_sub_of(self, key: CallPattern) -> object:
        if key.merged:
            return self.merged_calls[(key.functor, key.arity)]
        return key.sub

    def lookup(self, key: CallPattern) -> object:
        if self.recording:
            return self.table.get(key, BOTTOM)
        if self.current is not None:
            self.deps.setdefault(key, {}).setdefault(self.current, None)
        if key not in self.table:
            self.table[key] = BOTTOM
            self.variant_order.setdefault(key.indicator, []).append(key)
            self._enqueue(key)
        return self.table[key]

    # ---- the equations ----

    def compute_prime(
        self,
        key: CallPattern,
        recorder: Optional[Callable[[int, int, object], None]] = None,
    ) -> object:
        call_sub = self.call_sub_of(key)
        catom = canon_atom(key.functor, key.arity)
        ind = (key.functor, key.arity)
        if not self.program.defines(*ind) and ind in BUILTIN_INDICATORS:
            # an entry declaration aimed straight at a builtin
            return self.transfer_atom(call_sub, catom)
        prime = BOTTOM
        for clause_index, clause in self.program.clauses_for(key.functor, key.arity):
            contribution = self.analyze_clause(
                clause_index, clause, call_sub, catom, recorder
            )
            prime = self._join(prime, contribution)
        return self._apply(prime, "lub")

    def analyze_clause(
        self,
        clause_index: int,
        clause: Clause,
        call_sub: object,
        catom: Struct,
        recorder: Optional[Callable[[int, int, object], None]],
    ) -> object:
        renamed, back = self._rename_clause(clause)

        def record(point: int, state: object) -> None:
            if recorder is None:
                return
            if is_bottom(state):
                recorder(clause_index, point, state)
            else:
                recorder(clause_index, point, self.dom.rename(state, back))

        if self.opt.free_head_call2entry and hasattr(self.dom, "unify_free_heads"):
            entry = self.dom.unify_free_heads(call_sub, renamed.head, catom)
        else:
            entry = self.dom.unify(call_sub, renamed.head, catom)
        if not is_bottom(entry):
            entry = self._apply(self._sweep(entry), "call2entry")
            body_only = [
                v for v in renamed.all_vars() if v not in var_set(renamed.head)
            ]
            if body_only:
                entry = self.dom.augment(entry, tuple_term(body_only))
            entry = self._sweep(entry)
        record(0, entry)

        state = entry
        for i, atom in enumerate(renamed.body, start=1):
            if not is_bottom(state):
                state = self.transfer_atom(state, atom)
            record(i, state)
        if is_bottom(state):
            return BOTTOM

        exitp = self._sweep(self.dom.project(state, renamed.head))
        succ = self.dom.unify(exitp, catom, renamed.head)
        return self._sweep(succ)

    def transfer_atom(self, state: object, atom: Struct) -> object:
        ind = (atom.functor, atom.arity)
        if ind == ("=", 2):
            out = self.dom.eq_transfer(state, atom.args[0], atom.args[1])
            return self._sweep(out)
        if ind in _GROUNDING_BUILTINS:
            return self._sweep(self.dom.ground_transfer(state, atom))
        if ind == ("true", 0):
            return state
        if ind in (("fail", 0), ("false", 0)):
            return BOTTOM

        proj = self.dom.project(state, atom)
        if self.program.defines(*ind):
            key = self.intern_key(proj, atom)
            prime_canon = self.lookup(key)
            if is_bottom(prime_canon):
                return BOTTOM
            prime = self.dom.unify(prime_canon, atom, canon_atom(*ind))
            if is_bottom(prime):
                return BOTTOM
        else:
            self._warn_unknown(atom)
            prime = self.dom.top(vars_of(atom))
        prime = self._apply(self._sweep(prime), "extend")
        succ = self.dom.extend(state, atom, prime, self.policy.clsh_limit)
        return self._sweep(succ)

    def _warn_unknown(self, atom: Struct) -> None:
        ind = (atom.functor, atom.arity)
        if self.opt.on_unknown == "error":
            raise AnalysisError(f"call to unknown predicate {atom.indicator}")
        if ind not in self.warned:
            self.warned.add(ind)
            self.diagnostics.append(
                f"unknown predicate {atom.indicator} treated as worst case"
            )

    def _rename_clause(self, clause: Clause) -> tuple[Clause, dict[Var, Var]]:
        mapping = {v: self.factory.fresh(v.name) for v in clause.all_vars()}
        head = substitute(clause.head, mapping)
        body = tuple(substitute(a, mapping) for a in clause.body)
        assert isinstance(head, Struct)
        back = {w: v for v, w in mapping.items()}
        return Clause(head, tuple(b for b in body if isinstance(b, Struct)), clause.line), back

    # ---- driver ----

    def run(self) -> AnalysisResult:
        started = time.perf_counter()
        entry_keys: list[tuple[EntryDecl, CallPattern]] = []
        for entry in self.program.entries:
            init = self.dom.top(vars_of(entry.goal), entry.ground, entry.free)
            init = self._sweep(init)
            key = self.intern_key(init, entry.goal)
            self.lookup(key)
            entry_keys.append((entry, key))

        while self.queue:
            key = self.queue.popleft()
            self.queued.discard(key)
            self.stats.iterations += 1
            if self.stats.iterations > MAX_FIXPOINT_STEPS:
                raise AnalysisError("fixpoint iteration failed to stabilize")
            self.current = key
            try:
                new = self.compute_prime(key)
            finally:
                self.current = None
            old = self.table[key]
            cand = self._apply(self._join(old, new), "compare")
            if is_bottom(old):
                changed = not is_bottom(cand)
            else:
                changed = not self.dom.leq(cand, old)
            if changed:
                self.table[key] = cand
                self.stats.updates += 1
                self._note_size(cand)
                for dependent in self.deps.get(key, {}):
                    self._enqueue(dependent)

        points = self._record_points()
        entry_results = []
        for entry, key in entry_keys:
            prime = self.table.get(key, BOTTOM)
            if is_bottom(prime):
                success: object = BOTTOM
            else:
                success = self.dom.unify(
                    prime, entry.goal, canon_atom(key.functor, key.arity)
                )
                success = self._sweep(success)
            entry_results.append((entry, key, success))

        self.stats.time_ms = (time.perf_counter() - started) * 1000.0
        return AnalysisResult(
            domain_name=self.dom.name,
            program=self.program,
            options=self.opt,
            table=self.table,
            entry_results=entry_results,
            points=points,
            variant_order=self.variant_order,
            diagnostics=self.diagnostics,
            stats=self.stats,
        )

    def _record_points(self) -> list[PointRecord]:
        self.recording = True
        points: list[PointRecord] = []
        for indicator, keys in self.variant_order.items():
            for variant, key in enumerate(keys):
                def recorder(clause_index: int, point: int, state: object) -> None:
                    points.append(PointRecord(clause_index, variant, point, state))

                self.compute_prime(key, recorder)
        self.recording = False
        return points


def analyze(program: Program, options: EngineOptions) -> AnalysisResult:
    """Run the fixpoint analysis for every entry declaration."""
    if not program.entries:
        raise AnalysisError("program has no entry declarations")
    return _Analyzer(program, options).run()
