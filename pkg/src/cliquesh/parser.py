"""Reader for the analyzed Prolog subset.

Supported surface syntax: lowercase atoms, uppercase/underscore variables,
integers, compound terms in canonical notation, list sugar, ':-' clauses
with ','-separated bodies, '%' line comments, and ':- entry' directives
with ground/free argument annotations.  The only infix operators are '=',
'is' and the arithmetic comparisons; everything else is written in
canonical functor(args) form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    Clause,
    EntryDecl,
    Program,
    Struct,
    Term,
    Var,
    make_list,
    vars_of,
)

INFIX_OPS = ("=:=", "=\\=", "=<", ">=", "=", "<", ">", "is")
SYMBOL_ATOMS = "+-*/"


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # atom, var, int, op, punct, eof
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "%":
            while i < n and src[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == ":" and src[i : i + 2] == ":-":
            toks.append(Token("op", ":-", start_line, start_col))
            i, col = i + 2, col + 2
            continue
        matched = None
        for op in ("=:=", "=\\=", "=<", ">="):
            if src.startswith(op, i):
                matched = op
                break
        if matched:
            toks.append(Token("op", matched, start_line, start_col))
            i, col = i + len(matched), col + len(matched)
            continue
        if ch in "=<>:":
            toks.append(Token("op", ch, start_line, start_col))
            i, col = i + 1, col + 1
            continue
        if ch in "()[],|.":
            toks.append(Token("punct", ch, start_line, start_col))
            i, col = i + 1, col + 1
            continue
        if ch in SYMBOL_ATOMS:
            toks.append(Token("atom", ch, start_line, start_col))
            i, col = i + 1, col + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("int", src[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            kind = "var" if (ch.isupper() or ch == "_") else "atom"
            toks.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.var_counter = 0
        self.scope: dict[str, Var] = {}

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {tok.text!r}", tok.line, tok.col)
        return self.next()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # ---- terms ----

    def fresh_scope(self) -> None:
        self.scope = {}

    def mkvar(self, name: str) -> Var:
        if name == "_":
            self.var_counter += 1
            return Var(self.var_counter, f"_G{self.var_counter}")
        got = self.scope.get(name)
        if got is None:
            self.var_counter += 1
            got = Var(self.var_counter, name)
            self.scope[name] = got
        return got

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "var":
            self.next()
            return self.mkvar(tok.text)
        if tok.kind == "int":
            self.next()
            return Struct(tok.text)
        if tok.kind == "atom":
            self.next()
            if self.peek().kind == "punct" and self.peek().text == "(":
                self.next()
                args = [self.parse_term()]
                while self.peek().text == ",":
                    self.next()
                    args.append(self.parse_term())
                self.expect("punct", ")")
                return Struct(tok.text, tuple(args))
            return Struct(tok.text)
        if tok.kind == "punct" and tok.text == "[":
            return self.parse_list()
        raise self.error(f"expected a term, found {tok.text!r}")

    def parse_list(self) -> Term:
        self.expect("punct", "[")
        if self.peek().text == "]":
            self.next()
            return Struct("[]")
        items = [self.parse_term()]
        while self.peek().text == ",":
            self.next()
            items.append(self.parse_term())
        tail: Term = Struct("[]")
        if self.peek().text == "|":
            self.next()
            tail = self.parse_term()
        self.expect("punct", "]")
        return make_list(items, tail)

    def parse_goal(self) -> Struct:
        tok = self.peek()
        left = self.parse_term()
        nxt = self.peek()
        if (nxt.kind == "op" and nxt.text in INFIX_OPS) or (
            nxt.kind == "atom" and nxt.text == "is"
        ):
            self.next()
            right = self.parse_term()
            return Struct(nxt.text, (left, right))
        if isinstance(left, Var):
            raise ParseError("variable cannot be used as a goal", tok.line, tok.col)
        return left

    # ---- clauses and directives ----

    def parse_program(self) -> Program:
        clauses: list[Clause] = []
        entries: list[EntryDecl] = []
        while self.peek().kind != "eof":
            self.fresh_scope()
            tok = self.peek()
            if tok.kind == "op" and tok.text == ":-":
                self.next()
                entries.append(self.parse_entry())
                continue
            head = self.parse_term()
            if isinstance(head, Var) or not isinstance(head, Struct):
                raise ParseError("clause head must be an atom", tok.line, tok.col)
            body: tuple[Struct, ...] = ()
            if self.peek().kind == "op" and self.peek().text == ":-":
                self.next()
                goals = [self.parse_goal()]
                while self.peek().text == ",":
                    self.next()
                    goals.append(self.parse_goal())
                body = tuple(goals)
            self.expect("punct", ".")
            clauses.append(Clause(head, body, tok.line))
        return Program(clauses, entries, max_var_id=self.var_counter)

    def parse_entry(self) -> EntryDecl:
        tok = self.expect("atom")
        if tok.text != "entry":
            raise ParseError(f"unknown directive {tok.text!r}", tok.line, tok.col)
        goal = self.parse_term()
        if not isinstance(goal, Struct):
            raise ParseError("entry goal must be an atom", tok.line, tok.col)
        ground: list[Var] = []
        free: list[Var] = []
        if self.peek().kind == "op" and self.peek().text == ":":
            self.next()
            while True:
                ann_tok = self.peek()
                ann = self.parse_term()
                if (
                    not isinstance(ann, Struct)
                    or ann.functor not in ("ground", "free")
                    or ann.arity != 1
                    or not isinstance(ann.args[0], Var)
                ):
                    raise ParseError(
                        "entry annotation must be ground(Var) or free(Var)",
                        ann_tok.line,
                        ann_tok.col,
                    )
                v = ann.args[0]
                if v not in vars_of(goal):
                    raise ParseError(
                        f"annotated variable {v.name} does not occur in the entry goal",
                        ann_tok.line,
                        ann_tok.col,
                    )
                (ground if ann.functor == "ground" else free).append(v)
                if self.peek().text != ",":
                    break
                self.next()
        self.expect("punct", ".")
        both = set(ground) & set(free)
        if both:
            names = ", ".join(sorted(v.name for v in both))
            raise ParseError(f"variable cannot be both ground and free: {names}", tok.line, tok.col)
        return EntryDecl(goal, tuple(dict.fromkeys(ground)), tuple(dict.fromkeys(free)), tok.line)


def parse_program(src: str, *, builtins: frozenset[tuple[str, int]] | None = None) -> Program:
    """Parse a program and check entry declarations.

    Every entry must reference a defined predicate or a builtin, and a
    predicate may carry at most one entry declaration.
    """
    program = _Parser(tokenize(src)).parse_program()
    if builtins is None:
        from .engine import BUILTIN_INDICATORS

        builtins = BUILTIN_INDICATORS
    seen: set[tuple[str, int]] = set()
    for entry in program.entries:
        key = (entry.goal.functor, entry.goal.arity)
        if key in seen:
            raise ParseError(
                f"duplicate entry declaration for {entry.goal.indicator}", entry.line, 1
            )
        seen.add(key)
        if not program.defines(*key) and key not in builtins:
            raise ParseError(
                f"entry references unknown predicate {entry.goal.indicator}", entry.line, 1
            )
    for clause in program.clauses:
        key = (clause.head.functor, clause.head.arity)
        if key in builtins:
            raise ParseError(
                f"clause redefines builtin {clause.head.indicator}", clause.line, 1
            )
    return program


def parse_file(path: str) -> Program:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_program(fh.read())
