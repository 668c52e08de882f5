"""Outcomes of a single deterministic play, and the play monad on them.

A TValue over ``n`` exits is encoded compactly:

* ``int j``            -- the play went straight to exit ``j`` (0-based)
* ``Weighted(r, j)``   -- the play reached exit ``j`` after collecting weight ``r``
* ``WIN_E`` / ``WIN_A`` -- the winner is already decided inside the component

Weights are exact: ``int`` when integral, ``fractions.Fraction`` otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, NamedTuple, Union

WIN_E = "winE"
WIN_A = "winA"

Weight = Union[int, Fraction]


class Weighted(NamedTuple):
    weight: Weight
    exit: object  # an exit index, or a nested TValue inside T(T(X))

    def __repr__(self) -> str:
        return f"Weighted({format_weight(self.weight)}, {self.exit!r})"


TValue = Union[int, Weighted, str]


def as_weight(x) -> Weight:
    """Convert ``x`` to an exact weight.

    Decimal literals are read as the fractions they spell (``"3.1"`` is 31/10,
    not the nearest binary float). Integral values come back as ``int``.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not weights")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        x = Fraction(repr(x))
    elif isinstance(x, str):
        x = Fraction(x.strip())
    elif not isinstance(x, Fraction):
        x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def format_weight(w: Weight) -> str:
    if isinstance(w, int):
        return str(w)
    w = as_weight(w)
    return str(w) if isinstance(w, int) else f"{w.numerator}/{w.denominator}"


def is_winner(v) -> bool:
    return v == WIN_E or v == WIN_A


def exit_of(v) -> int | None:
    if isinstance(v, Weighted):
        return v.exit
    if isinstance(v, int):
        return v
    return None


def bind(v: TValue, k: Callable[[int], TValue]) -> TValue:
    """Kleisli extension: continue the outcome ``v`` through ``k`` at its exit.

    Winners absorb, a plain exit defers wholly to ``k``, and weights collected
    before a weighted continuation add up. A weight collected before a winner
    is dropped (prefix independence).
    """
    if isinstance(v, Weighted):
        u = k(v.exit)
        if isinstance(u, Weighted):
            return Weighted(v.weight + u.weight, u.exit)
        if isinstance(u, int):
            return Weighted(v.weight, u)
        return u
    if isinstance(v, int):
        return k(v)
    return v


def eta(x):
    return x


def fmap(f: Callable, z):
    """The functor action of T on compactly encoded values."""
    if isinstance(z, Weighted):
        return Weighted(z.weight, f(z.exit))
    if is_winner(z):
        return z
    return f(z)


def monad_mult(z):
    """Flatten ``T(T(X))`` to ``T(X)``: nested weights add, winners absorb weights."""
    if isinstance(z, Weighted):
        inner = z.exit
        if isinstance(inner, Weighted):
            return Weighted(z.weight + inner.weight, inner.exit)
        if is_winner(inner):
            return inner
        return z
    return z


def sort_key(v: TValue):
    if isinstance(v, Weighted):
        return (1, v.exit, v.weight)
    if isinstance(v, int):
        return (0, v, 0)
    return (2 if v == WIN_E else 3, 0, 0)


def tvalue_to_json(v: TValue):
    """Normative JSON form; exit indices are 1-based on the wire."""
    if isinstance(v, Weighted):
        w = Fraction(v.weight)
        return {"wexit": [w.numerator, w.denominator, v.exit + 1]}
    if isinstance(v, int):
        return {"exit": v + 1}
    return v


def tvalue_from_json(obj) -> TValue:
    if obj == WIN_E or obj == WIN_A:
        return obj
    if isinstance(obj, dict) and "exit" in obj:
        return int(obj["exit"]) - 1
    if isinstance(obj, dict) and "wexit" in obj:
        num, den, j = obj["wexit"]
        return Weighted(as_weight(Fraction(num, den)), int(j) - 1)
    raise ValueError(f"not a TValue: {obj!r}")


def format_tvalue(v: TValue) -> str:
    if isinstance(v, Weighted):
        return f"({format_weight(v.weight)}, {v.exit + 1})"
    if isinstance(v, int):
        return str(v + 1)
    return "W∃" if v == WIN_E else "W∀"
