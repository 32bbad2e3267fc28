"""Built-in shape categories used by specs, diagrams, and tests."""

from __future__ import annotations

from .core import CatPresentation, FinCategory, compile_presentation


def discrete(n: int) -> FinCategory:
    objs = tuple(f"d{i}" for i in range(n))
    return compile_presentation(CatPresentation(objects=objs))


def walking_arrow() -> FinCategory:
    return compile_presentation(
        CatPresentation(objects=("a", "b"), edges=(("f", "a", "b"),))
    )


def parallel_pair() -> FinCategory:
    return compile_presentation(
        CatPresentation(objects=("a", "b"), edges=(("f", "a", "b"), ("g", "a", "b")))
    )


def span() -> FinCategory:
    """x <- s -> y."""
    return compile_presentation(
        CatPresentation(objects=("s", "x", "y"), edges=(("p", "s", "x"), ("q", "s", "y")))
    )


def cospan() -> FinCategory:
    """x -> s <- y."""
    return compile_presentation(
        CatPresentation(objects=("x", "y", "s"), edges=(("i", "x", "s"), ("j", "y", "s")))
    )


def square() -> FinCategory:
    """Commutative square: top;right = left;bottom."""
    return compile_presentation(
        CatPresentation(
            objects=("nw", "ne", "sw", "se"),
            edges=(
                ("top", "nw", "ne"),
                ("left", "nw", "sw"),
                ("right", "ne", "se"),
                ("bottom", "sw", "se"),
            ),
            relations=((("top", "right"), ("left", "bottom")),),
        )
    )


def one() -> FinCategory:
    return discrete(1)


def pair() -> FinCategory:
    return discrete(2)


def codiscrete2() -> FinCategory:
    """Two objects with exactly one arrow in each direction (both isos)."""
    objs = ("a", "b")
    arrows = ("id_a", "id_b", "u", "v")
    src = {"id_a": "a", "id_b": "b", "u": "a", "v": "b"}
    tgt = {"id_a": "a", "id_b": "b", "u": "b", "v": "a"}
    identity = {"a": "id_a", "b": "id_b"}
    compose = {}
    for f in arrows:
        for g in arrows:
            if tgt[f] != src[g]:
                continue
            s, t = src[f], tgt[g]
            if s == t:
                compose[(f, g)] = identity[s]
            else:
                compose[(f, g)] = "u" if s == "a" else "v"
    return FinCategory(objs, arrows, src, tgt, identity, compose)


def diamond_poset() -> FinCategory:
    """The poset bot < a, b < top (a, b incomparable)."""
    return compile_presentation(
        CatPresentation(
            objects=("bot", "a", "b", "top"),
            edges=(
                ("ba", "bot", "a"),
                ("bb", "bot", "b"),
                ("at", "a", "top"),
                ("bt", "b", "top"),
            ),
            relations=((("ba", "at"), ("bb", "bt")),),
        )
    )


BUILTIN_SHAPES = {
    "discrete0": discrete(0),
    "discrete1": discrete(1),
    "discrete2": discrete(2),
    "discrete3": discrete(3),
    "one": one(),
    "pair": pair(),
    "walking_arrow": walking_arrow(),
    "parallel_pair": parallel_pair(),
    "span": span(),
    "cospan": cospan(),
    "square": square(),
    "codiscrete2": codiscrete2(),
    "diamond": diamond_poset(),
}
