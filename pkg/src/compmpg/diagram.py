"""The string-diagram language: lexer, parser, printer, arity checking and sharing.

Grammar (``;`` binds tighter than ``(+)``, both left-associative)::

    term  := "let" IDENT "=" term "in" term | sum
    sum   := seq { "(+)" seq }
    seq   := atom { ";" atom }
    atom  := "(" term ")" | "tr" "[" NAT "]" "(" term ")" | const ["^" NAT] | IDENT | leaf
    leaf  := "game" "(" NAT "," NAT ")" "->" "(" NAT "," NAT ")" "{" { posdecl | edgedecl } "}"
    posdecl  := "pos" IDENT ":" ("E"|"A") RATIONAL ";"
    edgedecl := "edge" port "->" port ";"

Ports are ``lhs.rK``, ``lhs.lK``, ``rhs.rK``, ``rhs.lK`` (1-based) or a position name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import (
    ArityMismatch,
    CompMPGError,
    DiagramSyntaxError,
    TraceOnBidirectionalTerm,
    UnboundVariable,
)
from .game import Arity, Entrance, Exit, OpenGame, RawGame, Role, validate_game
from .tvalue import format_weight

CONSTANTS = ("id_r", "id_l", "swap_rr", "swap_rl", "swap_lr", "swap_ll", "cup", "cap")
KEYWORDS = frozenset({"let", "in", "tr", "game", "pos", "edge"}) | frozenset(CONSTANTS)

Loc = tuple  # (line, column), both 1-based


# ------------------------------------------------------------------------ AST

@dataclass(frozen=True)
class Leaf:
    game: OpenGame
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    left: "Term"
    right: "Term"
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Trace:
    loops: int
    body: "Term"
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    kind: str
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Let:
    name: str
    bound: "Term"
    body: "Term"
    loc: Loc | None = field(default=None, compare=False, repr=False)


Term = Leaf | Seq | Sum | Trace | Const | Var | Let


@dataclass(frozen=True)
class InferredArity:
    left: Arity
    right: Arity

    @property
    def is_rightward(self) -> bool:
        return self.left.left == 0 and self.right.left == 0

    def __str__(self) -> str:
        return f"{self.left}->{self.right}"


CONST_ARITY = {
    "id_r": InferredArity(Arity(1, 0), Arity(1, 0)),
    "id_l": InferredArity(Arity(0, 1), Arity(0, 1)),
    "swap_rr": InferredArity(Arity(2, 0), Arity(2, 0)),
    "swap_rl": InferredArity(Arity(1, 1), Arity(1, 1)),
    "swap_lr": InferredArity(Arity(1, 1), Arity(1, 1)),
    "swap_ll": InferredArity(Arity(0, 2), Arity(0, 2)),
    "cup": InferredArity(Arity(0, 0), Arity(1, 1)),
    "cap": InferredArity(Arity(1, 1), Arity(0, 0)),
}


# ---------------------------------------------------------------------- lexer

@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<port>(?:lhs|rhs)\.[rl]\d+\b)
  | (?P<arrow>->)
  | (?P<oplus>\(\+\))
  | (?P<number>-?\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()\[\]{};,:=^])
""", re.VERBOSE)


def tokenize(src: str) -> list[Token]:
    toks = []
    pos, line, line_start = 0, 1, 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise DiagramSyntaxError(f"unexpected character {src[pos]!r}", line=line, column=col)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rindex("\n") + 1
        else:
            if kind == "ident" and text in KEYWORDS:
                kind = text
            elif kind in ("punct", "arrow", "oplus"):
                kind = text
            toks.append(Token(kind, text, line, col))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


# --------------------------------------------------------------------- parser

def _describe(kind: str) -> str:
    return {"ident": "identifier", "number": "number", "port": "port", "eof": "end of input"}.get(kind, repr(kind))


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, expected) -> DiagramSyntaxError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        exp = sorted(set(expected))
        msg = f"expected {' or '.join(_describe(e) for e in exp)}, found {found}"
        return DiagramSyntaxError(msg, expected=exp, line=t.line, column=t.col)

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, kind: str) -> Token:
        t = self.accept(kind)
        if t is None:
            raise self.error([kind])
        return t

    def nat(self) -> int:
        t = self.expect("number")
        if not t.text.isdigit():
            raise DiagramSyntaxError(f"expected a natural number, found {t.text!r}",
                                     expected=["natural number"], line=t.line, column=t.col)
        return int(t.text)

    def parse(self) -> Term:
        if self.tok.kind == "eof":
            raise self.error(["term"])
        t = self.term()
        if self.tok.kind != "eof":
            raise self.error(["eof", ";", "(+)"])
        return t

    def term(self) -> Term:
        t = self.accept("let")
        if t is not None:
            name = self.expect("ident").text
            self.expect("=")
            bound = self.term()
            self.expect("in")
            body = self.term()
            return Let(name, bound, body, loc=(t.line, t.col))
        return self.sum()

    def sum(self) -> Term:
        left = self.seq()
        while (t := self.accept("(+)")) is not None:
            left = Sum(left, self.seq(), loc=(t.line, t.col))
        return left

    def seq(self) -> Term:
        left = self.atom()
        while (t := self.accept(";")) is not None:
            left = Seq(left, self.atom(), loc=(t.line, t.col))
        return left

    def atom(self) -> Term:
        t = self.tok
        if self.accept("("):
            inner = self.term()
            self.expect(")")
            return inner
        if self.accept("tr"):
            self.expect("[")
            loops = self.nat()
            self.expect("]")
            self.expect("(")
            body = self.term()
            self.expect(")")
            return Trace(loops, body, loc=(t.line, t.col))
        if t.kind in CONSTANTS:
            self.i += 1
            c = Const(t.kind, loc=(t.line, t.col))
            if self.accept("^"):
                n = self.nat()
                if n == 0:
                    raise DiagramSyntaxError("constant power must be at least 1",
                                             line=t.line, column=t.col)
                out = c
                for _ in range(n - 1):
                    out = Sum(out, Const(t.kind, loc=(t.line, t.col)), loc=(t.line, t.col))
                return out
            return c
        if t.kind == "ident":
            self.i += 1
            return Var(t.text, loc=(t.line, t.col))
        if t.kind == "game":
            return self.leaf()
        raise self.error(["(", "tr", "game", "ident", *CONSTANTS])

    def arity(self) -> Arity:
        self.expect("(")
        r = self.nat()
        self.expect(",")
        l = self.nat()
        self.expect(")")
        return Arity(r, l)

    def port(self, left: Arity, right: Arity, as_source: bool):
        t = self.tok
        if self.accept("ident"):
            return t.text
        self.expect("port")
        m = re.fullmatch(r"(lhs|rhs)\.([rl])(\d+)", t.text)
        side, direction, k = m.group(1), m.group(2), int(m.group(3))
        # (side, direction) -> (is entrance, base index, count)
        table = {
            ("lhs", "r"): (True, 0, left.right),
            ("rhs", "l"): (True, left.right, right.left),
            ("rhs", "r"): (False, 0, right.right),
            ("lhs", "l"): (False, right.right, left.left),
        }
        is_entrance, base, count = table[(side, direction)]
        if not 1 <= k <= count:
            raise DiagramSyntaxError(f"port {t.text} out of range (arity allows {count})",
                                     line=t.line, column=t.col)
        if is_entrance != as_source:
            role = "source" if as_source else "target"
            raise DiagramSyntaxError(f"port {t.text} cannot be an edge {role}",
                                     line=t.line, column=t.col)
        return Entrance(base + k - 1) if is_entrance else Exit(base + k - 1)

    def leaf(self) -> Leaf:
        start = self.expect("game")
        left = self.arity()
        self.expect("->")
        right = self.arity()
        self.expect("{")
        positions, roles, weights, edges = [], {}, {}, []
        while not self.accept("}"):
            t = self.tok
            if self.accept("pos"):
                name_tok = self.expect("ident")
                self.expect(":")
                r = self.expect("ident")
                if r.text not in ("E", "A"):
                    raise DiagramSyntaxError(f"expected role E or A, found {r.text!r}",
                                             expected=["E", "A"], line=r.line, column=r.col)
                w = self.expect("number")
                self.expect(";")
                name = name_tok.text
                if name in roles:
                    raise DiagramSyntaxError(f"position {name} declared twice",
                                             line=name_tok.line, column=name_tok.col)
                positions.append(name)
                roles[name] = Role(r.text)
                try:
                    weights[name] = Fraction(w.text)
                except (ValueError, ZeroDivisionError):
                    raise DiagramSyntaxError(f"malformed weight {w.text!r}", expected=["RATIONAL"],
                                             line=w.line, column=w.col) from None
            elif self.accept("edge"):
                src = self.port(left, right, True)
                self.expect("->")
                dst = self.port(left, right, False)
                self.expect(";")
                edges.append((src, dst))
            else:
                raise self.error(["pos", "edge", "}"])
        try:
            game = validate_game(RawGame(left, right, positions, roles, weights, edges))
        except CompMPGError as e:
            raise e.located(start.line, start.col)
        return Leaf(game, loc=(start.line, start.col))


def parse(source: str, check_bound: bool = True) -> Term:
    """Parse diagram source text; errors carry line and column."""
    term = _Parser(source).parse()
    if check_bound:
        _check_bound(term, frozenset())
    return term


def _check_bound(t: Term, env: frozenset) -> None:
    stack = [(t, env)]
    while stack:
        t, env = stack.pop()
        if isinstance(t, Var):
            if t.name not in env:
                line, col = t.loc or (None, None)
                raise UnboundVariable(f"unbound variable {t.name}", line=line, column=col)
        elif isinstance(t, Let):
            stack.append((t.bound, env))
            stack.append((t.body, env | {t.name}))
        elif isinstance(t, (Seq, Sum)):
            stack.append((t.left, env))
            stack.append((t.right, env))
        elif isinstance(t, Trace):
            stack.append((t.body, env))


# -------------------------------------------------------------------- printer

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _port_name(x, left: Arity, right: Arity, names: Mapping) -> str:
    if isinstance(x, Entrance):
        i = x.index
        return f"lhs.r{i + 1}" if i < left.right else f"rhs.l{i - left.right + 1}"
    if isinstance(x, Exit):
        j = x.index
        return f"rhs.r{j + 1}" if j < right.right else f"lhs.l{j - right.right + 1}"
    return names[x]


def position_names(game: OpenGame) -> dict:
    """Printable names: keep valid identifiers, otherwise number them."""
    names = {}
    plain = all(isinstance(p, str) and _IDENT_RE.fullmatch(p) and p not in KEYWORDS
                for p in game.role)
    for k, p in enumerate(game.role):
        name = p if plain else f"q{k}"
        names[p] = name
    return names


def game_to_source(game: OpenGame, indent: str = "") -> str:
    """The leaf syntax ``game (..)->(..) { ... }`` for ``game``."""
    names = position_names(game)
    L, R = game.left, game.right
    lines = [f"game ({L.right},{L.left})->({R.right},{R.left}) {{"]
    for p, r in game.role.items():
        lines.append(f"{indent}  pos {names[p]} : {r.value} {format_weight(game.weight[p])};")
    for s, ts in game.succ.items():
        for t in ts:
            lines.append(f"{indent}  edge {_port_name(s, L, R, names)} -> {_port_name(t, L, R, names)};")
    lines.append(f"{indent}}}")
    return "\n".join(lines)


def print_term(t: Term) -> str:
    """Canonical source for ``t``; ``parse(print_term(t)) == t``."""
    return _print(t, "term")


def _print(t: Term, ctx: str) -> str:
    # ctx: "term" allows let/sum/seq, "sum" allows sum/seq, "seq" allows seq, "atom" only atoms
    if isinstance(t, Let):
        s = f"let {t.name} = {_print(t.bound, 'term')} in\n{_print(t.body, 'term')}"
        return s if ctx == "term" else f"({s})"
    if isinstance(t, Sum):
        s = f"{_print(t.left, 'sum')} (+) {_print(t.right, 'seq')}"
        return s if ctx in ("term", "sum") else f"({s})"
    if isinstance(t, Seq):
        s = f"{_print(t.left, 'seq')} ; {_print(t.right, 'atom')}"
        return s if ctx != "atom" else f"({s})"
    if isinstance(t, Trace):
        return f"tr[{t.loops}]({_print(t.body, 'term')})"
    if isinstance(t, Const):
        return t.kind
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Leaf):
        return game_to_source(t.game)
    raise TypeError(f"not a diagram term: {t!r}")


# ------------------------------------------------------------ arity inference

def _loc_kw(t) -> dict:
    if t.loc is None:
        return {}
    return {"line": t.loc[0], "column": t.loc[1]}


def infer_arity(t: Term, env: Mapping[str, InferredArity] | None = None) -> InferredArity:
    """Arity of ``t`` under the arities of its free variables in ``env``."""
    memo: dict[int, InferredArity] = {}
    return _infer(t, dict(env or {}), memo)


def _infer(t: Term, env: dict, memo: dict) -> InferredArity:
    if isinstance(t, Leaf):
        return InferredArity(t.game.left, t.game.right)
    if isinstance(t, Const):
        return CONST_ARITY[t.kind]
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(f"unbound variable {t.name}", **_loc_kw(t))
        return env[t.name]
    if isinstance(t, Let):
        a = _infer(t.bound, env, memo)
        inner = dict(env)
        inner[t.name] = a
        return _infer(t.body, inner, memo)
    if isinstance(t, Seq):
        a = _infer(t.left, env, memo)
        b = _infer(t.right, env, memo)
        if a.right != b.left:
            raise ArityMismatch(str(a.right), str(b.left),
                                f"sequential composition: left side ends in {a.right}, "
                                f"right side starts at {b.left}", **_loc_kw(t))
        return InferredArity(a.left, b.right)
    if isinstance(t, Sum):
        a = _infer(t.left, env, memo)
        b = _infer(t.right, env, memo)
        return sum_arity(a, b)
    if isinstance(t, Trace):
        a = _infer(t.body, env, memo)
        if not a.is_rightward:
            raise TraceOnBidirectionalTerm(f"trace applied to bidirectional term of arity {a}",
                                           **_loc_kw(t))
        if a.left.right < t.loops or a.right.right < t.loops:
            raise ArityMismatch(f">= {t.loops} wires on both sides", str(a),
                                f"cannot trace {t.loops} wires of a term of arity {a}", **_loc_kw(t))
        return InferredArity(Arity(a.left.right - t.loops), Arity(a.right.right - t.loops))
    raise TypeError(f"not a diagram term: {t!r}")


def sum_arity(a: InferredArity, b: InferredArity) -> InferredArity:
    return InferredArity(
        Arity(a.left.right + b.left.right, b.left.left + a.left.left),
        Arity(a.right.right + b.right.right, b.right.left + a.right.left),
    )


# ----------------------------------------------------------------- sharing

@dataclass(frozen=True)
class DagNode:
    kind: str  # "leaf" | "const" | "seq" | "sum" | "trace"
    arity: InferredArity
    children: tuple = ()
    game: OpenGame | None = None
    const: str | None = None
    loops: int = 0


@dataclass
class SharedDag:
    """Arity-annotated term graph; children always precede their parents."""

    nodes: list
    root: int

    @property
    def arity(self) -> InferredArity:
        return self.nodes[self.root].arity

    def reachable(self) -> list[int]:
        seen = set()
        stack = [self.root]
        while stack:
            k = stack.pop()
            if k in seen:
                continue
            seen.add(k)
            stack.extend(self.nodes[k].children)
        return sorted(seen)

    def node_count(self) -> int:
        return len(self.reachable())

    def leaf_count(self) -> int:
        return sum(1 for k in self.reachable() if self.nodes[k].kind == "leaf")

    def flat_size(self) -> tuple[int, int]:
        """(positions, edges) summed over leaf instances, computed without flattening.

        Positions match the flattened game exactly. Edges count every leaf
        edge, including the ones at open ends that flattening fuses.
        """
        memo: dict[int, tuple[int, int]] = {}
        for k in self.reachable():
            nd = self.nodes[k]
            if nd.kind == "leaf":
                memo[k] = (len(nd.game.role), nd.game.n_edges())
            elif nd.kind == "const":
                memo[k] = (0, 0)
            else:
                memo[k] = tuple(map(sum, zip(*(memo[c] for c in nd.children))))
        return memo[self.root]


def resolve_sharing(t: Term, hashcons: bool = True) -> SharedDag:
    """Turn ``t`` into a DAG; each ``let``-bound term becomes one node.

    With ``hashcons`` equal combinator nodes over the same children are also
    merged. Arity errors are raised with the location of the offending node.
    """
    nodes: list[DagNode] = []
    index: dict = {}

    def add(node: DagNode) -> int:
        if hashcons and node.kind != "leaf":
            key = (node.kind, node.children, node.const, node.loops)
            k = index.get(key)
            if k is not None:
                return k
            index[key] = len(nodes)
        nodes.append(node)
        return len(nodes) - 1

    def go(t: Term, env: dict) -> int:
        if isinstance(t, Leaf):
            return add(DagNode("leaf", InferredArity(t.game.left, t.game.right), game=t.game))
        if isinstance(t, Const):
            return add(DagNode("const", CONST_ARITY[t.kind], const=t.kind))
        if isinstance(t, Var):
            if t.name not in env:
                raise UnboundVariable(f"unbound variable {t.name}", **_loc_kw(t))
            return env[t.name]
        if isinstance(t, Let):
            k = go(t.bound, env)
            inner = dict(env)
            inner[t.name] = k
            return go(t.body, inner)
        if isinstance(t, Seq):
            a, b = go(t.left, env), go(t.right, env)
            aa, ba = nodes[a].arity, nodes[b].arity
            if aa.right != ba.left:
                raise ArityMismatch(str(aa.right), str(ba.left),
                                    f"sequential composition: left side ends in {aa.right}, "
                                    f"right side starts at {ba.left}", **_loc_kw(t))
            return add(DagNode("seq", InferredArity(aa.left, ba.right), (a, b)))
        if isinstance(t, Sum):
            a, b = go(t.left, env), go(t.right, env)
            return add(DagNode("sum", sum_arity(nodes[a].arity, nodes[b].arity), (a, b)))
        if isinstance(t, Trace):
            k = go(t.body, env)
            a = nodes[k].arity
            if not a.is_rightward:
                raise TraceOnBidirectionalTerm(f"trace applied to bidirectional term of arity {a}",
                                               **_loc_kw(t))
            if a.left.right < t.loops or a.right.right < t.loops:
                raise ArityMismatch(f">= {t.loops} wires on both sides", str(a),
                                    f"cannot trace {t.loops} wires of a term of arity {a}",
                                    **_loc_kw(t))
            ar = InferredArity(Arity(a.left.right - t.loops), Arity(a.right.right - t.loops))
            return add(DagNode("trace", ar, (k,), loops=t.loops))
        raise TypeError(f"not a diagram term: {t!r}")

    root = go(t, {})
    return SharedDag(nodes, root)


def unfold(t: Term, env: Mapping | None = None) -> Term:
    """Substitute every ``let`` binding, producing a let-free term."""
    env = dict(env or {})
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Let):
        inner = dict(env)
        inner[t.name] = unfold(t.bound, env)
        return unfold(t.body, inner)
    if isinstance(t, Seq):
        return Seq(unfold(t.left, env), unfold(t.right, env), loc=t.loc)
    if isinstance(t, Sum):
        return Sum(unfold(t.left, env), unfold(t.right, env), loc=t.loc)
    if isinstance(t, Trace):
        return Trace(t.loops, unfold(t.body, env), loc=t.loc)
    return t


def load(source: str) -> SharedDag:
    """Parse, arity-check and share in one step."""
    return resolve_sharing(parse(source))


def iter_leaves(t: Term) -> Iterator[Leaf]:
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            yield t
        elif isinstance(t, (Seq, Sum)):
            stack.extend((t.right, t.left))
        elif isinstance(t, Let):
            stack.extend((t.body, t.bound))
        elif isinstance(t, Trace):
            stack.append(t.body)
