"""Independent brute-force oracles and random generators used by the tests.

Everything here recomputes results from first principles with plain loops so
the library under test is never consulted for expected values.
"""

from __future__ import annotations

import itertools
import random

from sketchlab.classifier import Presheaf
from sketchlab.core import FinCategory
from sketchlab.finset import FinSetDiagram, FinSetMap, FinSetObj

ORACLE_SHAPES = (
    "discrete0",
    "discrete1",
    "discrete2",
    "discrete3",
    "parallel_pair",
    "span",
    "cospan",
    "square",
)


# ---------------------------------------------------------------------------
# FinSet (co)limits by exhaustive search


def brute_limit_families(d: FinSetDiagram) -> list[dict[str, int]]:
    """All matching families of the diagram, found by filtering all tuples."""
    objs = list(d.shape.objects)
    out = []
    for combo in itertools.product(*(range(d.on_objects[x].size) for x in objs)):
        assign = dict(zip(objs, combo))
        if all(
            d.on_arrows[a](assign[d.shape.src[a]]) == assign[d.shape.tgt[a]]
            for a in d.shape.arrows
        ):
            out.append(assign)
    return out


def brute_colimit_partition(d: FinSetDiagram) -> set[frozenset]:
    """Partition of the disjoint union under the zig-zag relation, computed
    by naive transitive closure instead of union-find."""
    points = [(x, i) for x in d.shape.objects for i in range(d.on_objects[x].size)]
    adj = {p: {p} for p in points}
    for a in d.shape.arrows:
        sx, tx = d.shape.src[a], d.shape.tgt[a]
        for i in range(d.on_objects[sx].size):
            p, q = (sx, i), (tx, d.on_arrows[a](i))
            adj[p].add(q)
            adj[q].add(p)
    changed = True
    while changed:
        changed = False
        for p in points:
            grown = set(adj[p])
            for q in adj[p]:
                grown |= adj[q]
            if grown != adj[p]:
                adj[p] = grown
                changed = True
    return {frozenset(adj[p]) for p in points}


def random_finset_diagram(rng: random.Random, shape: FinCategory, max_fiber: int = 3) -> FinSetDiagram:
    sizes = {x: rng.randrange(max_fiber + 1) for x in shape.objects}
    on_objects = {x: FinSetObj(sizes[x]) for x in shape.objects}
    on_arrows = {}
    for a in shape.arrows:
        if shape.is_identity(a) or ";" in a:
            continue
        sx, tx = shape.src[a], shape.tgt[a]
        if sizes[sx] > 0 and sizes[tx] == 0:
            return None  # no map exists; caller retries
        on_arrows[a] = FinSetMap(
            on_objects[sx],
            on_objects[tx],
            tuple(rng.randrange(sizes[tx]) for _ in range(sizes[sx])),
        )
    for x in shape.objects:
        on_arrows[shape.identity[x]] = FinSetMap(
            on_objects[x], on_objects[x], tuple(range(sizes[x]))
        )
    for a in shape.arrows:
        if a not in on_arrows:  # composite arrow: fill functorially
            segs = a.split(";")
            m = on_arrows[segs[0]]
            for seg in segs[1:]:
                m = m.then(on_arrows[seg])
            on_arrows[a] = m
    try:
        return FinSetDiagram(shape, on_objects, on_arrows)
    except ValueError:
        return None  # generators broke a relation; caller retries


# ---------------------------------------------------------------------------
# Presheaves on a finite category


def all_presheaves(c: FinCategory, fiber_bound: int) -> list[Presheaf]:
    """Every presheaf with fibers of size <= fiber_bound, by rejection."""
    out = []
    gens = [a for a in c.arrows if not c.is_identity(a)]
    for combo in itertools.product(*(range(fiber_bound + 1) for _ in c.objects)):
        fibers = {x: FinSetObj(n) for x, n in zip(c.objects, combo)}
        choices = []
        for a in gens:
            dom, cod = fibers[c.tgt[a]], fibers[c.src[a]]
            tables = list(itertools.product(range(cod.size), repeat=dom.size))
            if not tables:
                choices = None
                break
            choices.append(tables)
        if choices is None:
            continue
        for tabs in itertools.product(*choices):
            restriction = {a: FinSetMap(fibers[c.tgt[a]], fibers[c.src[a]], t) for a, t in zip(gens, tabs)}
            for x in c.objects:
                restriction[c.identity[x]] = FinSetMap(
                    fibers[x], fibers[x], tuple(range(fibers[x].size))
                )
            try:
                out.append(Presheaf(c, fibers, restriction))
            except ValueError:
                continue
    return out


def random_presheaf(rng: random.Random, c: FinCategory, fiber_bound: int = 2) -> Presheaf:
    while True:
        combo = [rng.randrange(fiber_bound + 1) for _ in c.objects]
        fibers = {x: FinSetObj(n) for x, n in zip(c.objects, combo)}
        restriction = {}
        ok = True
        for a in c.arrows:
            dom, cod = fibers[c.tgt[a]], fibers[c.src[a]]
            if c.is_identity(a):
                restriction[a] = FinSetMap(dom, cod, tuple(range(dom.size)))
                continue
            if dom.size > 0 and cod.size == 0:
                ok = False
                break
            restriction[a] = FinSetMap(
                dom, cod, tuple(rng.randrange(cod.size) for _ in range(dom.size))
            )
        if not ok:
            continue
        try:
            return Presheaf(c, fibers, restriction)
        except ValueError:
            continue


def orthogonal_oracle(p: Presheaf, cocones) -> bool:
    """Orthogonality stated directly: for each specified cocone, evaluation
    at its tip is in bijection with matching families of the restricted
    diagram, via restriction along the legs."""
    for delta in cocones:
        objs = list(delta.shape.objects)
        fams = []
        for combo in itertools.product(*(range(p.fibers[delta.diagram.obj_map[x]].size) for x in objs)):
            assign = dict(zip(objs, combo))
            # contravariant: a shape arrow a: x -> y restricts p(d y) -> p(d x)
            if all(
                p.restriction[delta.diagram.arr_map[a]](assign[delta.shape.tgt[a]])
                == assign[delta.shape.src[a]]
                for a in delta.shape.arrows
            ):
                fams.append(tuple(assign[x] for x in objs))
        images = [
            tuple(p.restriction[delta.legs[x]](e) for x in objs)
            for e in range(p.fibers[delta.tip].size)
        ]
        if len(images) != len(fams) or set(images) != set(fams) or len(set(images)) != len(images):
            return False
    return True
