"""Terms of the analyzed language and syntactic unification.

Predicate atoms and data terms share one representation: a term is either
a variable or a structure (functor plus argument tuple); atoms are
zero-arity structures.  Unification produces a solved-form equation set
(each left-hand variable occurs exactly once, and never inside any
right-hand side), which the abstract domains consume one binding at a
time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union


class ContractError(ValueError):
    """An operation was called outside its stated precondition."""


@dataclass(frozen=True)
class Var:
    """A program variable.  Identity is the id; the name is for display."""

    id: int
    name: str

    def __repr__(self) -> str:
        return f"Var({self.id}, {self.name!r})"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Struct:
    functor: str
    args: tuple["Term", ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> str:
        return f"{self.functor}/{self.arity}"

    def __str__(self) -> str:
        return render_term(self)


Term = Union[Var, Struct]

NIL = Struct("[]")
CONS = "."


def cons(head: Term, tail: Term) -> Struct:
    return Struct(CONS, (head, tail))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = cons(item, out)
    return out


def render_term(t: Term) -> str:
    """Canonical text for a term, with list sugar restored."""
    if isinstance(t, Var):
        return t.name
    if t.functor == CONS and t.arity == 2:
        items = []
        cur: Term = t
        while isinstance(cur, Struct) and cur.functor == CONS and cur.arity == 2:
            items.append(render_term(cur.args[0]))
            cur = cur.args[1]
        if isinstance(cur, Struct) and cur == NIL:
            return "[" + ", ".join(items) + "]"
        return "[" + ", ".join(items) + "|" + render_term(cur) + "]"
    if not t.args:
        return t.functor
    return t.functor + "(" + ", ".join(render_term(a) for a in t.args) + ")"


def vars_of(t: Term) -> tuple[Var, ...]:
    """Variables of a term, deduplicated, in first-occurrence order."""
    seen: dict[Var, None] = {}
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var):
            seen.setdefault(cur, None)
        else:
            stack.extend(reversed(cur.args))
    return tuple(seen)


def var_set(t: Term) -> frozenset[Var]:
    return frozenset(vars_of(t))


def is_linear(t: Term) -> bool:
    """True when no variable occurs twice in t."""
    seen: set[Var] = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var):
            if cur in seen:
                return False
            seen.add(cur)
        else:
            stack.extend(cur.args)
    return True


def substitute(t: Term, binding: dict[Var, Term]) -> Term:
    """Apply a variable binding to a term, one pass (no rebinding chase)."""
    if isinstance(t, Var):
        got = binding.get(t)
        return t if got is None else got
    if not t.args:
        return t
    return Struct(t.functor, tuple(substitute(a, binding) for a in t.args))


def occurs_in(v: Var, t: Term) -> bool:
    if isinstance(t, Var):
        return t == v
    return any(occurs_in(v, a) for a in t.args)


# An equation set in solved form: bindings x_i = t_i where the x_i are
# pairwise distinct and no x_i occurs in any t_j.
EquationSet = tuple[tuple[Var, Term], ...]


def solve(t1: Term, t2: Term) -> Optional[EquationSet]:
    """Most general unifier of t1 and t2 in solved form, or None on failure.

    Runs with the occur check on, so cyclic bindings fail rather than
    building infinite terms.  The substitution map is kept idempotent
    throughout, which makes it a solved form when the loop finishes.
    """
    subst: dict[Var, Term] = {}

    def walk(t: Term) -> Term:
        while isinstance(t, Var) and t in subst:
            t = subst[t]
        return t

    def bind(v: Var, t: Term) -> bool:
        resolved = substitute(t, subst)
        if occurs_in(v, resolved):
            return False
        one = {v: resolved}
        for key in list(subst):
            subst[key] = substitute(subst[key], one)
        subst[v] = resolved
        return True

    work = [(t1, t2)]
    while work:
        a, b = work.pop()
        a, b = walk(a), walk(b)
        if isinstance(a, Var):
            if isinstance(b, Var) and a == b:
                continue
            if not bind(a, b):
                return None
        elif isinstance(b, Var):
            if not bind(b, a):
                return None
        else:
            if a.functor != b.functor or a.arity != b.arity:
                return None
            work.extend(zip(a.args, b.args))
    return tuple(sorted(subst.items(), key=lambda kv: kv[0].id))


@dataclass(frozen=True)
class Clause:
    head: Struct
    body: tuple[Struct, ...]
    line: int = 0

    @property
    def indicator(self) -> str:
        return self.head.indicator

    def all_vars(self) -> tuple[Var, ...]:
        seen: dict[Var, None] = {}
        for v in vars_of(self.head):
            seen.setdefault(v, None)
        for atom in self.body:
            for v in vars_of(atom):
                seen.setdefault(v, None)
        return tuple(seen)

    def __str__(self) -> str:
        if not self.body:
            return f"{render_term(self.head)}."
        return f"{render_term(self.head)} :- " + ", ".join(
            render_term(a) for a in self.body
        ) + "."


@dataclass(frozen=True)
class EntryDecl:
    """An entry directive: the goal to analyze plus mode annotations."""

    goal: Struct
    ground: tuple[Var, ...] = ()
    free: tuple[Var, ...] = ()
    line: int = 0

    def __str__(self) -> str:
        anns = [f"ground({v})" for v in self.ground] + [f"free({v})" for v in self.free]
        if anns:
            return f":- entry {render_term(self.goal)} : " + ", ".join(anns) + "."
        return f":- entry {render_term(self.goal)}."


@dataclass
class Program:
    clauses: list[Clause]
    entries: list[EntryDecl]
    max_var_id: int = 0

    def clauses_for(self, functor: str, arity: int) -> list[tuple[int, Clause]]:
        return [
            (i, c)
            for i, c in enumerate(self.clauses)
            if c.head.functor == functor and c.head.arity == arity
        ]

    def defines(self, functor: str, arity: int) -> bool:
        return any(
            c.head.functor == functor and c.head.arity == arity for c in self.clauses
        )

    def predicates(self) -> list[tuple[str, int]]:
        seen: dict[tuple[str, int], None] = {}
        for c in self.clauses:
            seen.setdefault((c.head.functor, c.head.arity), None)
        return list(seen)


class VarFactory:
    """Produces globally fresh variables for renaming clauses apart."""

    def __init__(self, start: int = 0):
        self._next = start

    def fresh(self, name: str) -> Var:
        vid = self._next
        self._next += 1
        return Var(vid, f"{name}_{vid}")

    def rename_apart(self, clause: Clause) -> Clause:
        mapping: dict[Var, Term] = {
            v: self.fresh(v.name.split("_")[0] or v.name) for v in clause.all_vars()
        }
        head = substitute(clause.head, mapping)
        body = tuple(substitute(a, mapping) for a in clause.body)
        assert isinstance(head, Struct)
        return Clause(head, tuple(b for b in body if isinstance(b, Struct)), clause.line)


def tuple_term(vs: Iterable[Var]) -> Struct:
    """A scaffold term whose variables are exactly vs (used to widen the
    domain of an abstract substitution to a clause's local variables)."""
    return Struct("$vars", tuple(vs))


def iter_subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, Struct):
            stack.extend(cur.args)
