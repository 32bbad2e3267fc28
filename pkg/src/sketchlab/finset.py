"""Skeletal finite sets: limits, colimits, Kan extensions, coend evaluation.

Objects are the skeleta {0, ..., n-1}; everything is computed with canonical
orderings (lexicographic tuples for limits, least-representative union-find
classes for colimits) so results are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional

from .core import FinCategory, FunctorData
from .errors import NotACone, SizeBudgetExceeded

DEFAULT_ELEMENT_BUDGET = 1_000_000


@dataclass(frozen=True)
class FinSetObj:
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("negative size")


@dataclass(frozen=True)
class FinSetMap:
    dom: FinSetObj
    cod: FinSetObj
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.dom.size:
            raise ValueError("table length != dom size")
        if any(not (0 <= v < self.cod.size) for v in self.table):
            raise ValueError("table entry out of range")

    def __call__(self, i: int) -> int:
        return self.table[i]

    def then(self, other: "FinSetMap") -> "FinSetMap":
        """other after self."""
        if self.cod != other.dom:
            raise ValueError("maps not composable")
        return FinSetMap(self.dom, other.cod, tuple(other.table[v] for v in self.table))

    def is_bijection(self) -> bool:
        return self.dom.size == self.cod.size and len(set(self.table)) == self.dom.size


def identity_map(x: FinSetObj) -> FinSetMap:
    return FinSetMap(x, x, tuple(range(x.size)))


class UnionFind:
    def __init__(self, n: int = 0):
        self.parent = list(range(n))

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        # least representative wins: keeps class reps canonical
        self.parent[max(ri, rj)] = min(ri, rj)
        return True


@dataclass(frozen=True, eq=False)
class FinSetDiagram:
    shape: FinCategory
    on_objects: Mapping[str, FinSetObj]
    on_arrows: Mapping[str, FinSetMap]

    def __post_init__(self):
        for a in self.shape.arrows:
            m = self.on_arrows[a]
            if m.dom != self.on_objects[self.shape.src[a]]:
                raise ValueError(f"diagram arrow {a!r} has wrong domain")
            if m.cod != self.on_objects[self.shape.tgt[a]]:
                raise ValueError(f"diagram arrow {a!r} has wrong codomain")
        for x in self.shape.objects:
            if self.on_arrows[self.shape.identity[x]].table != tuple(
                range(self.on_objects[x].size)
            ):
                raise ValueError(f"identity at {x!r} not the identity map")
        for (f, g), h in self.shape.compose.items():
            if self.on_arrows[f].then(self.on_arrows[g]) != self.on_arrows[h]:
                raise ValueError(f"diagram not functorial at ({f!r}, {g!r})")


# ---------------------------------------------------------------------------
# Limits


@dataclass(frozen=True, eq=False)
class LimitResult:
    apex: FinSetObj
    projections: Mapping[str, FinSetMap]
    tuples: tuple[tuple[int, ...], ...]  # canonical order; coordinates per shape object

    def index_of(self, family: tuple[int, ...]) -> Optional[int]:
        try:
            return self.tuples.index(family)
        except ValueError:
            return None


def limit_finset(d: FinSetDiagram, budget: int = DEFAULT_ELEMENT_BUDGET) -> LimitResult:
    """Apex = families in the product satisfying all arrow equations."""
    objs = d.shape.objects
    total = 1
    for x in objs:
        total *= max(d.on_objects[x].size, 1)
    if total > budget:
        raise SizeBudgetExceeded("limit candidate space over budget")
    ranges = [range(d.on_objects[x].size) for x in objs]
    pos = {x: k for k, x in enumerate(objs)}
    good: list[tuple[int, ...]] = []
    for tup in itertools.product(*ranges):
        ok = True
        for a in d.shape.arrows:
            if d.on_arrows[a](tup[pos[d.shape.src[a]]]) != tup[pos[d.shape.tgt[a]]]:
                ok = False
                break
        if ok:
            good.append(tup)
    apex = FinSetObj(len(good))
    projections = {
        x: FinSetMap(apex, d.on_objects[x], tuple(t[pos[x]] for t in good)) for x in objs
    }
    return LimitResult(apex, projections, tuple(good))


@dataclass(frozen=True, eq=False)
class ColimitResult:
    apex: FinSetObj
    injections: Mapping[str, FinSetMap]

    def class_of(self, obj: str, elem: int) -> int:
        return self.injections[obj](elem)


def colimit_finset(d: FinSetDiagram) -> ColimitResult:
    """Disjoint union quotiented by the zig-zag closure of arrow identifications."""
    objs = d.shape.objects
    offset: dict[str, int] = {}
    n = 0
    for x in objs:
        offset[x] = n
        n += d.on_objects[x].size
    uf = UnionFind(n)
    for a in d.shape.arrows:
        x, y = d.shape.src[a], d.shape.tgt[a]
        m = d.on_arrows[a]
        for i in range(m.dom.size):
            uf.union(offset[x] + i, offset[y] + m(i))
    reps = sorted({uf.find(i) for i in range(n)})
    rep_index = {r: k for k, r in enumerate(reps)}
    apex = FinSetObj(len(reps))
    injections = {
        x: FinSetMap(
            d.on_objects[x],
            apex,
            tuple(rep_index[uf.find(offset[x] + i)] for i in range(d.on_objects[x].size)),
        )
        for x in objs
    }
    return ColimitResult(apex, injections)


def is_limit_cone(
    d: FinSetDiagram, apex: FinSetObj, legs: Mapping[str, FinSetMap]
) -> bool:
    """True iff the canonical comparison into the computed limit is a bijection."""
    for x in d.shape.objects:
        leg = legs[x]
        if leg.dom != apex or leg.cod != d.on_objects[x]:
            raise NotACone(f"leg at {x!r} has wrong endpoints")
    for a in d.shape.arrows:
        x, y = d.shape.src[a], d.shape.tgt[a]
        if legs[x].then(d.on_arrows[a]) != legs[y]:
            raise NotACone(f"legs do not commute over arrow {a!r}")
    lim = limit_finset(d)
    objs = d.shape.objects
    images = [tuple(legs[x](i) for x in objs) for i in range(apex.size)]
    indices = [lim.index_of(fam) for fam in images]
    return len(set(indices)) == apex.size == lim.apex.size


def is_colimit_cocone(
    d: FinSetDiagram, apex: FinSetObj, legs: Mapping[str, FinSetMap]
) -> bool:
    """Dual of is_limit_cone (comparison out of the computed colimit)."""
    for x in d.shape.objects:
        leg = legs[x]
        if leg.dom != d.on_objects[x] or leg.cod != apex:
            raise NotACone(f"leg at {x!r} has wrong endpoints")
    for a in d.shape.arrows:
        x, y = d.shape.src[a], d.shape.tgt[a]
        if d.on_arrows[a].then(legs[y]) != legs[x]:
            raise NotACone(f"legs do not commute over arrow {a!r}")
    colim = colimit_finset(d)
    # comparison: class of (x, i) -> legs[x](i); well-defined by commutation
    table: dict[int, int] = {}
    for x in d.shape.objects:
        for i in range(d.on_objects[x].size):
            c = colim.class_of(x, i)
            v = legs[x](i)
            if c in table and table[c] != v:
                return False
            table[c] = v
    if len(table) != colim.apex.size:  # apex classes not all hit (empty diagram case)
        return apex.size == colim.apex.size == 0
    values = [table[c] for c in range(colim.apex.size)]
    return len(set(values)) == colim.apex.size == apex.size


# ---------------------------------------------------------------------------
# Left Kan extension along a functor between finite shapes


def lan_finset(
    f: FunctorData, m: FinSetDiagram, budget: int = DEFAULT_ELEMENT_BUDGET
) -> tuple[FinSetDiagram, Mapping[str, Mapping[tuple[str, str, int], int]]]:
    """Pointwise left Kan extension of m along f, by comma-category colimits.

    Returns the extended diagram over cod(f) and, per object c of cod(f), the
    class table sending (comma object d, arrow a: f d -> c, element of m d)
    to its colimit class index.
    """
    dom, cod = f.dom, f.cod
    values: dict[str, FinSetObj] = {}
    classes: dict[str, dict[tuple[str, str, int], int]] = {}
    for c in cod.objects:
        # comma category f down-to c: objects (d, a: f d -> c)
        comma_objs = [
            (d, a) for d in dom.objects for a in cod.hom(f.obj_map[d], c)
        ]
        offset: dict[tuple[str, str], int] = {}
        n = 0
        for key in comma_objs:
            offset[key] = n
            n += m.on_objects[key[0]].size
        if n > budget:
            raise SizeBudgetExceeded("kan extension fiber over budget")
        uf = UnionFind(n)
        for u in dom.arrows:
            d1, d2 = dom.src[u], dom.tgt[u]
            mu = m.on_arrows[u]
            for a2 in cod.hom(f.obj_map[d2], c):
                a1 = cod.then(f.arr_map[u], a2)
                for i in range(mu.dom.size):
                    uf.union(offset[(d1, a1)] + i, offset[(d2, a2)] + mu(i))
        reps = sorted({uf.find(i) for i in range(n)})
        rep_index = {r: k for k, r in enumerate(reps)}
        values[c] = FinSetObj(len(reps))
        classes[c] = {
            (d, a, i): rep_index[uf.find(offset[(d, a)] + i)]
            for (d, a) in comma_objs
            for i in range(m.on_objects[d].size)
        }
    on_arrows: dict[str, FinSetMap] = {}
    for g in cod.arrows:
        c1, c2 = cod.src[g], cod.tgt[g]
        table = [0] * values[c1].size
        for (d, a, i), k in classes[c1].items():
            table[k] = classes[c2][(d, cod.then(a, g), i)]
        on_arrows[g] = FinSetMap(values[c1], values[c2], tuple(table))
    return FinSetDiagram(cod, values, on_arrows), classes


# ---------------------------------------------------------------------------
# Coend evaluation (colimit of a covariant action weighted by a presheaf)


@dataclass(frozen=True, eq=False)
class CovariantAction:
    """A covariant finite-set-valued functor on a carrier (a model restriction)."""

    base: FinCategory
    on_objects: Mapping[str, FinSetObj]
    on_arrows: Mapping[str, FinSetMap]


@dataclass(frozen=True, eq=False)
class ExtensionResult:
    value: FinSetObj
    # (object, presheaf element, action element) -> class index
    index: Mapping[tuple[str, int, int], int]


def evaluate_extension_data(p, m: CovariantAction) -> ExtensionResult:
    """Colimit of m over the category of elements of the presheaf p.

    ``p`` must expose ``base``, ``fibers`` (obj -> FinSetObj) and
    ``restriction`` (arrow -> FinSetMap, contravariant).  An element of the
    result is the class of a triple (c, e in p(c), v in m(c)) under the
    relation (c, p(a)(e'), v) ~ (c', e', m(a)(v)) for a: c -> c'.
    """
    base = m.base
    offset: dict[tuple[str, int], int] = {}
    n = 0
    for c in base.objects:
        for e in range(p.fibers[c].size):
            offset[(c, e)] = n
            n += m.on_objects[c].size
    uf = UnionFind(n)
    for a in base.arrows:
        c1, c2 = base.src[a], base.tgt[a]
        ra = p.restriction[a]  # p(c2) -> p(c1)
        ma = m.on_arrows[a]  # m(c1) -> m(c2)
        for e2 in range(p.fibers[c2].size):
            e1 = ra(e2)
            for v in range(ma.dom.size):
                uf.union(offset[(c1, e1)] + v, offset[(c2, e2)] + ma(v))
    reps = sorted({uf.find(i) for i in range(n)})
    rep_index = {r: k for k, r in enumerate(reps)}
    index = {
        (c, e, v): rep_index[uf.find(offset[(c, e)] + v)]
        for (c, e) in offset
        for v in range(m.on_objects[c].size)
    }
    return ExtensionResult(FinSetObj(len(reps)), index)


def evaluate_extension(p, m: CovariantAction) -> FinSetObj:
    return evaluate_extension_data(p, m).value


# ---------------------------------------------------------------------------
# The skeletal category of finite sets up to a size bound


def _arrow_name(a: int, b: int, table: tuple[int, ...]) -> str:
    return f"m{a}>{b}[{','.join(map(str, table))}]"


def fin_set_category(bound: int, budget: int = DEFAULT_ELEMENT_BUDGET) -> FinCategory:
    """All maps between the sets {0..n-1} for n <= bound, as explicit tables."""
    objects = tuple(str(n) for n in range(bound + 1))
    sizes = {str(n): n for n in range(bound + 1)}
    arrows: list[str] = []
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    tables: dict[str, tuple[int, ...]] = {}
    identity: dict[str, str] = {}
    count = 0
    for a in range(bound + 1):
        for b in range(bound + 1):
            if a > 0 and b == 0:
                continue
            count += max(b, 1) ** a
            if count > budget:
                raise SizeBudgetExceeded("finite-set category over budget")
            for table in itertools.product(range(b), repeat=a):
                name = _arrow_name(a, b, table)
                arrows.append(name)
                src[name] = str(a)
                tgt[name] = str(b)
                tables[name] = table
                if a == b and table == tuple(range(a)):
                    identity[str(a)] = name
    compose = {}
    for f in arrows:
        for g in arrows:
            if tgt[f] != src[g]:
                continue
            tf, tg = tables[f], tables[g]
            compose[(f, g)] = _arrow_name(
                int(src[f]), int(tgt[g]), tuple(tg[v] for v in tf)
            )
    return FinCategory(
        objects=tuple(objects),
        arrows=tuple(arrows),
        src=src,
        tgt=tgt,
        identity=identity,
        compose=compose,
        finset_sizes=sizes,
    )


def arrow_as_map(cat: FinCategory, arrow: str) -> FinSetMap:
    """Decode an arrow of fin_set_category back into a FinSetMap."""
    if cat.finset_sizes is None:
        raise ValueError("not a finite-set category")
    a = cat.finset_sizes[cat.src[arrow]]
    b = cat.finset_sizes[cat.tgt[arrow]]
    body = arrow[arrow.index("[") + 1 : -1]
    table = tuple(int(t) for t in body.split(",")) if body else ()
    return FinSetMap(FinSetObj(a), FinSetObj(b), table)


def map_as_arrow(m: FinSetMap) -> str:
    return _arrow_name(m.dom.size, m.cod.size, m.table)
