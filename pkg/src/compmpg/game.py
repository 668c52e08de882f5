"""Open mean payoff games: graphs, validation, strategies and single plays.

Open ends are numbered the way the Int construction flattens a bidirectional
game into a rightward one:

* entrances: left rightward wires ``0..m_r-1``, then right leftward wires
  ``m_r..m_r+n_l-1``
* exits: right rightward wires ``0..n_r-1``, then left leftward wires
  ``n_r..n_r+m_l-1``

Indices are 0-based in code and 1-based in every external format.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Hashable, Iterator, Mapping, Sequence

from .errors import (
    DanglingEdgeEndpoint,
    EntranceWithMultipleSuccessors,
    EntranceWithoutSuccessor,
    ExitWithMultiplePredecessors,
    GameValidationError,
    MissingRoleOrWeight,
    StrategyGameMismatch,
)
from .tvalue import WIN_A, WIN_E, TValue, Weight, Weighted, as_weight


class Role(str, Enum):
    EXISTS = "E"
    FORALL = "A"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Arity:
    right: int
    left: int = 0

    def __post_init__(self):
        if self.right < 0 or self.left < 0:
            raise ValueError(f"negative arity ({self.right},{self.left})")

    def __str__(self) -> str:
        return f"({self.right},{self.left})"


@dataclass(frozen=True, slots=True)
class Entrance:
    index: int


@dataclass(frozen=True, slots=True)
class Exit:
    index: int


Position = Hashable
Source = Hashable  # Entrance | Position
Target = Hashable  # Exit | Position


def arity(x) -> Arity:
    """Coerce ``x`` to an Arity; a bare integer ``n`` means ``(n, 0)``."""
    if isinstance(x, Arity):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Arity(x, 0)
    r, l = x
    return Arity(int(r), int(l))


class OpenGame:
    """A validated open MPG.

    ``succ`` maps every entrance and every position to the tuple of its
    successors (empty for stuck positions). Instances are treated as
    immutable. Use :func:`validate_game` to build one from untrusted data.
    """

    __slots__ = ("left", "right", "role", "weight", "succ")

    def __init__(self, left: Arity, right: Arity, role: Mapping, weight: Mapping, succ: Mapping):
        self.left = left
        self.right = right
        self.role = role
        self.weight = weight
        self.succ = succ

    @property
    def n_entrances(self) -> int:
        return self.left.right + self.right.left

    @property
    def n_exits(self) -> int:
        return self.right.right + self.left.left

    @property
    def positions(self) -> tuple:
        return tuple(self.role)

    @property
    def is_rightward(self) -> bool:
        return self.left.left == 0 and self.right.left == 0

    def edges(self) -> Iterator[tuple[Source, Target]]:
        for s, ts in self.succ.items():
            for t in ts:
                yield s, t

    def n_edges(self) -> int:
        return sum(len(ts) for ts in self.succ.values())

    def as_rightward(self) -> "OpenGame":
        """The underlying rightward game of the Int construction (same graph)."""
        if self.is_rightward:
            return self
        return OpenGame(Arity(self.n_entrances), Arity(self.n_exits), self.role, self.weight, self.succ)

    def _key(self):
        return (self.left, self.right, dict(self.role), dict(self.weight), frozenset(self.edges()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpenGame):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash((self.left, self.right, len(self.role)))

    def __repr__(self) -> str:
        return (f"OpenGame({self.left}->{self.right}, {len(self.role)} positions, "
                f"{self.n_edges()} edges)")


RoPG = OpenGame  # a rightward OpenGame whose successor tuples have length <= 1


@dataclass
class RawGame:
    """Unvalidated game description, as produced by parsers and generators."""

    left: Arity
    right: Arity
    positions: Sequence[Position]
    role: Mapping[Position, object]
    weight: Mapping[Position, object]
    edges: Sequence[tuple[Source, Target]]


def _raw_from_game(g: OpenGame) -> RawGame:
    return RawGame(g.left, g.right, list(g.role), dict(g.role), dict(g.weight), list(g.edges()))


def validate_game(raw: RawGame | OpenGame) -> OpenGame:
    """Check that each entrance has one successor, each exit at most one predecessor,
    and every position has a role and a weight.

    Raises the subclass of :class:`GameValidationError` naming the first
    violated condition.
    """
    if isinstance(raw, OpenGame):
        raw = _raw_from_game(raw)
    try:
        left, right = arity(raw.left), arity(raw.right)
    except (ValueError, TypeError) as e:
        raise GameValidationError(str(e)) from None
    n_ent = left.right + right.left
    n_exit = right.right + left.left

    positions = list(dict.fromkeys(raw.positions))
    pos_set = set(positions)
    for p in positions:
        if isinstance(p, (Entrance, Exit)):
            raise GameValidationError(f"open end {p} declared as a position")
        if p not in raw.role or p not in raw.weight:
            raise MissingRoleOrWeight(f"position {p!r} lacks a role or a weight")
    for p in itertools.chain(raw.role, raw.weight):
        if p not in pos_set:
            raise MissingRoleOrWeight(f"role/weight given for non-position {p!r}")
    role = {}
    weight = {}
    for p in positions:
        r = raw.role[p]
        try:
            role[p] = r if isinstance(r, Role) else Role(str(r))
        except ValueError:
            raise MissingRoleOrWeight(f"position {p!r} has invalid role {r!r}") from None
        try:
            weight[p] = as_weight(raw.weight[p])
        except (TypeError, ValueError, ZeroDivisionError):
            raise MissingRoleOrWeight(f"position {p!r} has invalid weight {raw.weight[p]!r}") from None

    succ: dict = {Entrance(i): [] for i in range(n_ent)}
    for p in positions:
        succ[p] = []
    preds: dict[int, list] = {}
    seen = set()
    for s, t in raw.edges:
        if isinstance(s, Entrance):
            if not 0 <= s.index < n_ent:
                raise DanglingEdgeEndpoint(f"edge source entrance {s.index + 1} out of range")
        elif s not in pos_set:
            raise DanglingEdgeEndpoint(f"edge source {s!r} is neither an entrance nor a position")
        if isinstance(t, Exit):
            if not 0 <= t.index < n_exit:
                raise DanglingEdgeEndpoint(f"edge target exit {t.index + 1} out of range")
        elif t not in pos_set:
            raise DanglingEdgeEndpoint(f"edge target {t!r} is neither an exit nor a position")
        if (s, t) in seen:
            continue
        seen.add((s, t))
        succ[s].append(t)
        if isinstance(t, Exit):
            preds.setdefault(t.index, []).append(s)

    for i in range(n_ent):
        ts = succ[Entrance(i)]
        if not ts:
            raise EntranceWithoutSuccessor(f"entrance {i + 1} has no successor")
        if len(ts) > 1:
            raise EntranceWithMultipleSuccessors(f"entrance {i + 1} has {len(ts)} successors")
    for j in sorted(preds):
        if len(preds[j]) > 1:
            raise ExitWithMultiplePredecessors(f"exit {j + 1} has {len(preds[j])} predecessors")

    return OpenGame(left, right, role, weight, {s: tuple(ts) for s, ts in succ.items()})


def make_game(left, right, positions: Mapping[Position, tuple], edges) -> OpenGame:
    """Convenience builder: ``positions`` maps a name to ``(role, weight)``."""
    return validate_game(RawGame(
        arity(left), arity(right), list(positions),
        {p: rw[0] for p, rw in positions.items()},
        {p: rw[1] for p, rw in positions.items()},
        list(edges),
    ))


# ---------------------------------------------------------------- strategies

@dataclass(frozen=True)
class Strategy:
    owner: Role
    choice: Mapping[Position, Target] = field(default_factory=dict)


def _choice_points(game: OpenGame, owner: Role) -> list:
    return [p for p, r in game.role.items() if r == owner and game.succ[p]]


def count_strategies(game: OpenGame, owner: Role) -> int:
    n = 1
    for p in _choice_points(game, owner):
        n *= len(game.succ[p])
    return n


def enumerate_strategies(game: OpenGame, owner: Role) -> Iterator[Strategy]:
    """Yield every memoryless strategy of ``owner`` exactly once."""
    owner = Role(owner)
    points = _choice_points(game, owner)
    for picks in itertools.product(*(game.succ[p] for p in points)):
        yield Strategy(owner, dict(zip(points, picks)))


def _check_strategy(game: OpenGame, s: Strategy, owner: Role) -> None:
    if s.owner != owner:
        raise StrategyGameMismatch(f"expected a {owner.name} strategy, got {s.owner.name}")
    points = _choice_points(game, owner)
    if set(s.choice) != set(points):
        raise StrategyGameMismatch("strategy domain differs from the owner's choice points")
    for p, t in s.choice.items():
        if t not in game.succ[p]:
            raise StrategyGameMismatch(f"strategy picks non-edge {p!r} -> {t!r}")


def induced_ropg(game: OpenGame, s_exists: Strategy, s_forall: Strategy) -> RoPG:
    """The deterministic play graph left after both players fix their choices.

    Bidirectional games are read through their underlying rightward game.
    """
    _check_strategy(game, s_exists, Role.EXISTS)
    _check_strategy(game, s_forall, Role.FORALL)
    g = game.as_rightward()
    succ = {}
    for src, ts in g.succ.items():
        if isinstance(src, Entrance):
            succ[src] = ts
        elif src in s_exists.choice:
            succ[src] = (s_exists.choice[src],)
        elif src in s_forall.choice:
            succ[src] = (s_forall.choice[src],)
        else:
            succ[src] = ()
    return OpenGame(g.left, g.right, g.role, g.weight, succ)


def is_ropg(game: OpenGame) -> bool:
    return game.is_rightward and all(len(ts) <= 1 for ts in game.succ.values())


# --------------------------------------------------------------------- plays

@dataclass(frozen=True)
class Play:
    """A maximal play ``prefix + cycle^ω`` (``cycle`` is None for finite plays).

    ``prefix[0]`` is the starting entrance. For infinite plays the cycle is
    the least one, found at the first repeated position.
    """

    prefix: tuple
    cycle: tuple | None = None

    @property
    def is_infinite(self) -> bool:
        return self.cycle is not None

    def unroll(self, n: int) -> list:
        out = list(self.prefix[:n])
        if self.cycle:
            while len(out) < n:
                out.extend(self.cycle)
        return out[:n]


def walk(succ: Mapping, start: Entrance) -> Play:
    """Deterministic walk from ``start`` along single-successor edges."""
    seq = [start]
    nxt = succ.get(start, ())
    assert len(nxt) == 1, "every entrance has exactly one successor"
    node = nxt[0]
    seen: dict = {}
    while True:
        if isinstance(node, Exit):
            seq.append(node)
            return Play(tuple(seq))
        k = seen.get(node)
        if k is not None:
            return Play(tuple(seq[:k]), tuple(seq[k:]))
        seen[node] = len(seq)
        seq.append(node)
        nxt = succ.get(node, ())
        if not nxt:
            return Play(tuple(seq))
        if len(nxt) > 1:
            raise ValueError(f"position {node!r} has {len(nxt)} successors; not a play graph")
        node = nxt[0]


def unique_play(pg: RoPG, i: int) -> Play:
    return walk(pg.succ, Entrance(i))


def mp_check_liminf(prefix: Sequence[Weight], cycle: Sequence[Weight]) -> bool:
    """Mean payoff condition of ``prefix + cycle^ω``: the cycle sum is >= 0."""
    if not cycle:
        raise ValueError("cycle must be non-empty")
    return sum(cycle) >= 0


def running_average(prefix: Sequence[Weight], cycle: Sequence[Weight], n: int) -> Fraction:
    """Exact average of the first ``n`` weights of ``prefix + cycle^ω``."""
    if n <= 0:
        raise ValueError("n must be positive")
    if n <= len(prefix):
        return Fraction(sum(prefix[:n]), n)
    rest = n - len(prefix)
    full, part = divmod(rest, len(cycle))
    total = sum(prefix) + full * sum(cycle) + sum(cycle[:part])
    return Fraction(total, n)


def denote_play(game: OpenGame, play: Play) -> TValue:
    if play.cycle is not None:
        s = sum(game.weight[q] for q in play.cycle)
        return WIN_E if s >= 0 else WIN_A
    seq = play.prefix
    assert len(seq) >= 2, "a play cannot stop at its entrance"
    last = seq[-1]
    if isinstance(last, Exit):
        if len(seq) == 2:
            return last.index
        return Weighted(sum(game.weight[q] for q in seq[1:-1]), last.index)
    # stuck at a position: whoever owns it cannot move and loses
    return WIN_E if game.role[last] == Role.FORALL else WIN_A


def play_denotation(pg: RoPG, i: int) -> TValue:
    return denote_play(pg, unique_play(pg, i))
