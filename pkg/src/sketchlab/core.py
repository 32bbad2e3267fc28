"""Finite categories, functors, natural transformations, and the search kernels.

Everything here is strict finite data: objects and arrows are string ids,
composition is a total table over composable pairs, and every law (identity,
associativity, functoriality, naturality) is checked exhaustively.  All
enumerations are returned in a deterministic canonical order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import (
    CyclicPresentation,
    DomainMismatch,
    FrameMismatch,
    InconsistentTables,
    RelationTypeMismatch,
    SizeBudgetExceeded,
)

DEFAULT_ARROW_BUDGET = 20_000


@dataclass(frozen=True, eq=False)
class FinCategory:
    """A finite category as explicit object/arrow/composition tables.

    ``compose[(f, g)]`` is the composite "g after f" (diagrammatic order),
    defined exactly when ``tgt[f] == src[g]``.  Laws are validated eagerly at
    construction; downstream code may assume validity.
    """

    objects: tuple[str, ...]
    arrows: tuple[str, ...]
    src: Mapping[str, str]
    tgt: Mapping[str, str]
    identity: Mapping[str, str]
    compose: Mapping[tuple[str, str], str]
    # set when the category is the skeletal FinSet<=n category; enables
    # delegation of (co)limit-cone checks to the finset module
    finset_sizes: Optional[Mapping[str, int]] = None

    def __post_init__(self):
        self._validate()

    def _validate(self):
        objs = set(self.objects)
        if len(objs) != len(self.objects):
            raise InconsistentTables("duplicate object ids")
        arrs = set(self.arrows)
        if len(arrs) != len(self.arrows):
            raise InconsistentTables("duplicate arrow ids")
        for a in self.arrows:
            if self.src[a] not in objs or self.tgt[a] not in objs:
                raise InconsistentTables(f"arrow {a!r} has dangling endpoint")
        for x in self.objects:
            i = self.identity[x]
            if i not in arrs or self.src[i] != x or self.tgt[i] != x:
                raise InconsistentTables(f"identity of {x!r} is not an endo-arrow")
        # compose defined exactly on composable pairs, endpoints agree
        for f in self.arrows:
            for g in self.arrows:
                comp = (f, g) in self.compose
                if (self.tgt[f] == self.src[g]) != comp:
                    raise InconsistentTables(
                        f"compose defined on wrong pairs at ({f!r}, {g!r})"
                    )
                if comp:
                    h = self.compose[(f, g)]
                    if self.src[h] != self.src[f] or self.tgt[h] != self.tgt[g]:
                        raise InconsistentTables(
                            f"composite of ({f!r}, {g!r}) has wrong endpoints"
                        )
        # identity neutrality
        for f in self.arrows:
            if self.compose[(self.identity[self.src[f]], f)] != f:
                raise InconsistentTables(f"left identity fails at {f!r}")
            if self.compose[(f, self.identity[self.tgt[f]])] != f:
                raise InconsistentTables(f"right identity fails at {f!r}")
        # associativity, exhaustively
        for f in self.arrows:
            for g in self.arrows:
                if self.tgt[f] != self.src[g]:
                    continue
                fg = self.compose[(f, g)]
                for h in self.arrows:
                    if self.tgt[g] != self.src[h]:
                        continue
                    if self.compose[(fg, h)] != self.compose[(f, self.compose[(g, h)])]:
                        raise InconsistentTables(
                            f"associativity fails at ({f!r}, {g!r}, {h!r})"
                        )

    # -- basic queries -----------------------------------------------------

    def then(self, f: str, g: str) -> str:
        """Composite 'g after f'."""
        return self.compose[(f, g)]

    def hom(self, a: str, b: str) -> list[str]:
        return [f for f in self.arrows if self.src[f] == a and self.tgt[f] == b]

    def is_identity(self, f: str) -> bool:
        return self.identity[self.src[f]] == f

    def inverse(self, f: str) -> Optional[str]:
        """The two-sided inverse of f, or None."""
        for g in self.hom(self.tgt[f], self.src[f]):
            if (
                self.then(f, g) == self.identity[self.src[f]]
                and self.then(g, f) == self.identity[self.tgt[f]]
            ):
                return g
        return None

    def is_iso(self, f: str) -> bool:
        return self.inverse(f) is not None

    def isos(self, a: str, b: str) -> list[str]:
        return [f for f in self.hom(a, b) if self.is_iso(f)]

    def iso_objects(self, a: str, b: str) -> bool:
        return bool(self.isos(a, b))


def same_tables(a: FinCategory, b: FinCategory) -> bool:
    """Strict table equality (ids, sources, targets, identities, composites)."""
    return (
        a.objects == b.objects
        and a.arrows == b.arrows
        and dict(a.src) == dict(b.src)
        and dict(a.tgt) == dict(b.tgt)
        and dict(a.identity) == dict(b.identity)
        and dict(a.compose) == dict(b.compose)
    )


# ---------------------------------------------------------------------------
# Presentations


@dataclass(frozen=True)
class CatPresentation:
    """Input encoding of a finite category.

    Either generator-graph mode (``objects``, ``edges``, ``relations``; graph
    must be acyclic) or explicit-table mode (``tables`` is a full table tuple
    ``(arrows, src, tgt, identity, compose)``).
    """

    objects: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...] = ()  # (name, src, tgt)
    relations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()
    tables: Optional[tuple] = None


def _path_endpoints(p: tuple[str, ...], obj_of_empty: Optional[str], edge_src, edge_tgt):
    if not p:
        return obj_of_empty, obj_of_empty
    return edge_src[p[0]], edge_tgt[p[-1]]


def compile_presentation(p: CatPresentation) -> FinCategory:
    """Build the finite category presented by ``p``.

    Generator-graph mode enumerates all paths of the (acyclic) graph and
    quotients them by the congruence closure of the relations; explicit-table
    mode validates the given tables.
    """
    if p.tables is not None:
        arrows, src, tgt, identity, compose = p.tables
        return FinCategory(
            objects=tuple(p.objects),
            arrows=tuple(arrows),
            src=dict(src),
            tgt=dict(tgt),
            identity=dict(identity),
            compose=dict(compose),
        )

    edge_src = {e[0]: e[1] for e in p.edges}
    edge_tgt = {e[0]: e[2] for e in p.edges}
    for name, s, t in p.edges:
        if s not in p.objects or t not in p.objects:
            raise InconsistentTables(f"edge {name!r} has dangling endpoint")

    # acyclicity via DFS over the generator graph
    adj: dict[str, list[str]] = {o: [] for o in p.objects}
    for name, s, t in p.edges:
        adj[s].append(t)
    state: dict[str, int] = {}

    def visit(v: str):
        state[v] = 1
        for w in adj[v]:
            if state.get(w) == 1:
                raise CyclicPresentation(f"cycle through object {w!r}")
            if state.get(w, 0) == 0:
                visit(w)
        state[v] = 2

    for o in p.objects:
        if state.get(o, 0) == 0:
            visit(o)

    # all paths: composable edge sequences, per (start, end)
    paths: list[tuple[str, tuple[str, ...]]] = []  # (start object, edge seq)
    for o in p.objects:
        paths.append((o, ()))
    frontier = [(o, ()) for o in p.objects]
    while frontier:
        nxt = []
        for start, seq in frontier:
            end = edge_tgt[seq[-1]] if seq else start
            for name, s, t in p.edges:
                if s == end:
                    q = (start, seq + (name,))
                    nxt.append(q)
                    paths.append(q)
        frontier = nxt

    key_of = {pp: i for i, pp in enumerate(paths)}

    # congruence closure over paths: relations, closed under pre/post composition
    parent = list(range(len(paths)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> bool:
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        parent[max(ri, rj)] = min(ri, rj)
        return True

    pending: list[tuple[int, int]] = []
    for lhs, rhs in p.relations:
        for e in lhs + rhs:
            if e not in edge_src:
                raise RelationTypeMismatch(f"unknown generator {e!r} in relation")
        ls, le = _path_endpoints(lhs, None, edge_src, edge_tgt)
        rs, re = _path_endpoints(rhs, None, edge_src, edge_tgt)
        if not lhs or not rhs:
            raise RelationTypeMismatch("relations must equate nonempty paths")
        if (ls, le) != (rs, re):
            raise RelationTypeMismatch(f"relation endpoints differ: {lhs} = {rhs}")
        pending.append((key_of[(ls, lhs)], key_of[(rs, rhs)]))

    changed = True
    for i, j in pending:
        union(i, j)
    while changed:
        changed = False
        # close under composition: whenever u ~ v, e.u ~ e.v and u.e ~ v.e
        classes: dict[int, list[int]] = {}
        for i in range(len(paths)):
            classes.setdefault(find(i), []).append(i)
        for members in classes.values():
            if len(members) < 2:
                continue
            base = members[0]
            for other in members[1:]:
                (s1, q1), (s2, q2) = paths[base], paths[other]
                e1 = edge_tgt[q1[-1]] if q1 else s1
                for name, es, et in p.edges:
                    if es == e1:
                        a = key_of[(s1, q1 + (name,))]
                        b = key_of[(s2, q2 + (name,))]
                        if union(a, b):
                            changed = True
                    if et == s1:
                        a = key_of[(edge_src[name], (name,) + q1)]
                        b = key_of[(edge_src[name], (name,) + q2)]
                        if union(a, b):
                            changed = True

    # canonical representative per class: shortest, then lexicographic
    classes2: dict[int, list[tuple[str, tuple[str, ...]]]] = {}
    for i, pp in enumerate(paths):
        classes2.setdefault(find(i), []).append(pp)
    reps: dict[int, tuple[str, tuple[str, ...]]] = {
        r: min(ms, key=lambda q: (len(q[1]), q[1], q[0])) for r, ms in classes2.items()
    }

    def name_of(pp: tuple[str, tuple[str, ...]]) -> str:
        start, seq = reps[find(key_of[pp])]
        if not seq:
            return f"id_{start}"
        return ";".join(seq)

    arrow_ids: list[str] = []
    src_t: dict[str, str] = {}
    tgt_t: dict[str, str] = {}
    seen: set[str] = set()
    ordered_reps = sorted(reps.values(), key=lambda q: (len(q[1]), q[1], q[0]))
    for start, seq in ordered_reps:
        nm = name_of((start, seq))
        if nm in seen:
            continue
        seen.add(nm)
        s, e = _path_endpoints(seq, start, edge_src, edge_tgt)
        arrow_ids.append(nm)
        src_t[nm] = s
        tgt_t[nm] = e
    identity = {o: name_of((o, ())) for o in p.objects}
    compose: dict[tuple[str, str], str] = {}
    for start, seq in ordered_reps:
        f = name_of((start, seq))
        fe = edge_tgt[seq[-1]] if seq else start
        for start2, seq2 in ordered_reps:
            g = name_of((start2, seq2))
            if (edge_src[seq2[0]] if seq2 else start2) != fe:
                continue
            compose[(f, g)] = name_of((start, seq + seq2))
    return FinCategory(
        objects=tuple(p.objects),
        arrows=tuple(arrow_ids),
        src=src_t,
        tgt=tgt_t,
        identity=identity,
        compose=compose,
    )


def to_presentation(c: FinCategory) -> CatPresentation:
    """Serialize a category to an explicit-table presentation."""
    return CatPresentation(
        objects=c.objects,
        tables=(c.arrows, dict(c.src), dict(c.tgt), dict(c.identity), dict(c.compose)),
    )


# ---------------------------------------------------------------------------
# Constructions on categories


def opposite_category(c: FinCategory) -> FinCategory:
    return FinCategory(
        objects=c.objects,
        arrows=c.arrows,
        src=dict(c.tgt),
        tgt=dict(c.src),
        identity=dict(c.identity),
        compose={(g, f): h for (f, g), h in c.compose.items()},
        finset_sizes=None,
    )


def pair_id(a: str, b: str) -> str:
    return f"({a},{b})"


def product_category(a: FinCategory, b: FinCategory) -> FinCategory:
    objects = tuple(pair_id(x, y) for x in a.objects for y in b.objects)
    arrows = tuple(pair_id(f, g) for f in a.arrows for g in b.arrows)
    src = {
        pair_id(f, g): pair_id(a.src[f], b.src[g]) for f in a.arrows for g in b.arrows
    }
    tgt = {
        pair_id(f, g): pair_id(a.tgt[f], b.tgt[g]) for f in a.arrows for g in b.arrows
    }
    identity = {
        pair_id(x, y): pair_id(a.identity[x], b.identity[y])
        for x in a.objects
        for y in b.objects
    }
    compose = {}
    for (f1, g1), h1 in a.compose.items():
        for (f2, g2), h2 in b.compose.items():
            compose[(pair_id(f1, f2), pair_id(g1, g2))] = pair_id(h1, h2)
    return FinCategory(objects, arrows, src, tgt, identity, compose)


def empty_category() -> FinCategory:
    return FinCategory((), (), {}, {}, {}, {})


# ---------------------------------------------------------------------------
# Functors and natural transformations


@dataclass(frozen=True, eq=False)
class FunctorData:
    dom: FinCategory
    cod: FinCategory
    obj_map: Mapping[str, str]
    arr_map: Mapping[str, str]

    def on_obj(self, x: str) -> str:
        return self.obj_map[x]

    def on_arr(self, f: str) -> str:
        return self.arr_map[f]

    def key(self) -> tuple:
        """Canonical hashable key (ignores category identity)."""
        return (
            tuple(self.obj_map[x] for x in self.dom.objects),
            tuple(self.arr_map[f] for f in self.dom.arrows),
        )


@dataclass(frozen=True, eq=False)
class NatTransData:
    src: FunctorData
    tgt: FunctorData
    components: Mapping[str, str]  # object of dom -> arrow of cod

    def key(self) -> tuple:
        return (
            self.src.key(),
            self.tgt.key(),
            tuple(self.components[x] for x in self.src.dom.objects),
        )


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


def identity_functor(c: FinCategory) -> FunctorData:
    return FunctorData(c, c, {o: o for o in c.objects}, {f: f for f in c.arrows})


def check_functor(f: FunctorData) -> ValidityReport:
    """Report every violated preservation equation; valid iff empty."""
    bad: list[str] = []
    for x in f.dom.objects:
        if f.obj_map[x] not in f.cod.objects:
            bad.append(f"object image of {x!r} not in codomain")
    for a in f.dom.arrows:
        fa = f.arr_map.get(a)
        if fa is None or fa not in f.cod.arrows:
            bad.append(f"arrow image of {a!r} not in codomain")
            continue
        if f.cod.src[fa] != f.obj_map[f.dom.src[a]]:
            bad.append(f"source mismatch at arrow {a!r}")
        if f.cod.tgt[fa] != f.obj_map[f.dom.tgt[a]]:
            bad.append(f"target mismatch at arrow {a!r}")
    if bad:
        return ValidityReport(tuple(bad))
    for x in f.dom.objects:
        if f.arr_map[f.dom.identity[x]] != f.cod.identity[f.obj_map[x]]:
            bad.append(f"identity of {x!r} not preserved")
    for (a, b), c in f.dom.compose.items():
        if f.cod.then(f.arr_map[a], f.arr_map[b]) != f.arr_map[c]:
            bad.append(f"composition not preserved at ({a!r}, {b!r})")
    return ValidityReport(tuple(bad))


def compose_functors(g: FunctorData, f: FunctorData) -> FunctorData:
    """g after f."""
    if g.dom is not f.cod and not same_tables(g.dom, f.cod):
        raise DomainMismatch("cod(f) != dom(g)")
    return FunctorData(
        f.dom,
        g.cod,
        {x: g.obj_map[f.obj_map[x]] for x in f.dom.objects},
        {a: g.arr_map[f.arr_map[a]] for a in f.dom.arrows},
    )


def check_natural(n: NatTransData) -> ValidityReport:
    if n.src.dom is not n.tgt.dom or n.src.cod is not n.tgt.cod:
        if not (
            same_tables(n.src.dom, n.tgt.dom) and same_tables(n.src.cod, n.tgt.cod)
        ):
            raise FrameMismatch("src/tgt functors do not share frames")
    cod = n.src.cod
    bad: list[str] = []
    for x in n.src.dom.objects:
        c = n.components.get(x)
        if c is None or c not in cod.arrows:
            bad.append(f"missing or foreign component at {x!r}")
            continue
        if cod.src[c] != n.src.obj_map[x] or cod.tgt[c] != n.tgt.obj_map[x]:
            bad.append(f"component at {x!r} has wrong endpoints")
    if bad:
        return ValidityReport(tuple(bad))
    for a in n.src.dom.arrows:
        x, y = n.src.dom.src[a], n.src.dom.tgt[a]
        lhs = cod.then(n.src.arr_map[a], n.components[y])
        rhs = cod.then(n.components[x], n.tgt.arr_map[a])
        if lhs != rhs:
            bad.append(f"naturality square fails at arrow {a!r}")
    return ValidityReport(tuple(bad))


def compose_naturals(m: NatTransData, n: NatTransData) -> NatTransData:
    """Vertical composite m after n (n: F=>G, m: G=>H)."""
    cod = n.src.cod
    return NatTransData(
        n.src,
        m.tgt,
        {x: cod.then(n.components[x], m.components[x]) for x in n.src.dom.objects},
    )


def nat_is_iso(n: NatTransData) -> bool:
    return all(n.src.cod.is_iso(n.components[x]) for x in n.src.dom.objects)


def whisker_left(f: FunctorData, n: NatTransData) -> NatTransData:
    """n * f: precompose a transformation with a functor into its frame."""
    return NatTransData(
        compose_functors(n.src, f),
        compose_functors(n.tgt, f),
        {x: n.components[f.obj_map[x]] for x in f.dom.objects},
    )


def whisker_right(n: NatTransData, g: FunctorData) -> NatTransData:
    """g * n: postcompose a transformation with a functor out of its frame."""
    return NatTransData(
        compose_functors(g, n.src),
        compose_functors(g, n.tgt),
        {x: g.arr_map[n.components[x]] for x in n.src.dom.objects},
    )


# ---------------------------------------------------------------------------
# Enumeration kernels


def enumerate_functors(
    dom: FinCategory, cod: FinCategory, budget: int = DEFAULT_ARROW_BUDGET
) -> list[FunctorData]:
    """All functors dom -> cod, lexicographic on obj_map then arr_map.

    Backtracking assigns objects first, then arrows in order, pruning on
    source/target/identity constraints before exploring deeper.
    """
    out: list[FunctorData] = []
    for combo in itertools.product(cod.objects, repeat=len(dom.objects)):
        obj_map = dict(zip(dom.objects, combo))
        out.extend(functors_with_objects(dom, cod, obj_map, budget - len(out)))
        if len(out) > budget:
            raise SizeBudgetExceeded("functor enumeration over budget")
    return out


def functors_with_objects(
    dom: FinCategory,
    cod: FinCategory,
    obj_assignment: Mapping[str, str],
    budget: int = DEFAULT_ARROW_BUDGET,
) -> list[FunctorData]:
    """All functors extending a fixed object assignment, lexicographic order."""
    out: list[FunctorData] = []
    nongen = [a for a in dom.arrows if not dom.is_identity(a)]

    def assign_arrows(obj_map: dict[str, str], i: int, arr_map: dict[str, str]):
        if i == len(nongen):
            full = dict(arr_map)
            for x in dom.objects:
                full[dom.identity[x]] = cod.identity[obj_map[x]]
            cand = FunctorData(dom, cod, dict(obj_map), full)
            # composition closure check
            for (a, b), c in dom.compose.items():
                if cod.then(full[a], full[b]) != full[c]:
                    return
            out.append(cand)
            if len(out) > budget:
                raise SizeBudgetExceeded("functor enumeration over budget")
            return
        a = nongen[i]
        want_s, want_t = obj_map[dom.src[a]], obj_map[dom.tgt[a]]
        for fa in cod.arrows:
            if cod.src[fa] != want_s or cod.tgt[fa] != want_t:
                continue
            arr_map[a] = fa
            # eager pruning: any fully-assigned composition equation must hold
            ok = True
            for (p, q), r in dom.compose.items():
                pm = arr_map.get(p) or (
                    cod.identity[obj_map[dom.src[p]]] if dom.is_identity(p) else None
                )
                qm = arr_map.get(q) or (
                    cod.identity[obj_map[dom.src[q]]] if dom.is_identity(q) else None
                )
                rm = arr_map.get(r) or (
                    cod.identity[obj_map[dom.src[r]]] if dom.is_identity(r) else None
                )
                if pm and qm and rm and cod.then(pm, qm) != rm:
                    ok = False
                    break
            if ok:
                assign_arrows(obj_map, i + 1, arr_map)
            del arr_map[a]

    assign_arrows(dict(obj_assignment), 0, {})
    return out


def enumerate_naturals(f: FunctorData, g: FunctorData) -> list[NatTransData]:
    """All natural transformations f => g, deterministic component order."""
    if f.dom is not g.dom or f.cod is not g.cod:
        if not (same_tables(f.dom, g.dom) and same_tables(f.cod, g.cod)):
            raise FrameMismatch("functors do not share frames")
    cod = f.cod
    objs = f.dom.objects
    candidates = [cod.hom(f.obj_map[x], g.obj_map[x]) for x in objs]
    out: list[NatTransData] = []
    for combo in itertools.product(*candidates):
        comps = dict(zip(objs, combo))
        ok = True
        for a in f.dom.arrows:
            x, y = f.dom.src[a], f.dom.tgt[a]
            if cod.then(f.arr_map[a], comps[y]) != cod.then(comps[x], g.arr_map[a]):
                ok = False
                break
        if ok:
            out.append(NatTransData(f, g, comps))
    return out


# ---------------------------------------------------------------------------
# Functor categories


@dataclass(frozen=True, eq=False)
class FunctorCatData:
    """functor_category output plus lookups from ids to the underlying data."""

    cat: FinCategory
    functors: Mapping[str, FunctorData]  # object id -> functor
    naturals: Mapping[str, NatTransData]  # arrow id -> transformation


def functor_category_rich(
    shape: FinCategory, target: FinCategory, budget: int = DEFAULT_ARROW_BUDGET
) -> FunctorCatData:
    fs = enumerate_functors(shape, target, budget=budget)
    return category_of_functors(fs, shape, target, budget=budget)


def category_of_functors(
    fs: list[FunctorData],
    shape: FinCategory,
    target: FinCategory,
    budget: int = DEFAULT_ARROW_BUDGET,
) -> FunctorCatData:
    """Full subcategory of the functor category on a given list of functors."""
    obj_ids = [f"F{i}" for i in range(len(fs))]
    functors = dict(zip(obj_ids, fs))
    arrows: list[str] = []
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    naturals: dict[str, NatTransData] = {}
    nat_key_to_id: dict[tuple, str] = {}
    for i, fi in enumerate(fs):
        for j, fj in enumerate(fs):
            nats = enumerate_naturals(fi, fj)
            for k, n in enumerate(nats):
                aid = f"t{i}.{j}.{k}"
                arrows.append(aid)
                src[aid] = obj_ids[i]
                tgt[aid] = obj_ids[j]
                naturals[aid] = n
                nat_key_to_id[n.key()] = aid
                if len(arrows) > budget:
                    raise SizeBudgetExceeded("functor category over arrow budget")
    identity = {}
    for oid, f in functors.items():
        idn = NatTransData(f, f, {x: target.identity[f.obj_map[x]] for x in shape.objects})
        identity[oid] = nat_key_to_id[idn.key()]
    compose: dict[tuple[str, str], str] = {}
    for a1 in arrows:
        for a2 in arrows:
            if tgt[a1] != src[a2]:
                continue
            comp = compose_naturals(naturals[a2], naturals[a1])
            compose[(a1, a2)] = nat_key_to_id[comp.key()]
    cat = FinCategory(tuple(obj_ids), tuple(arrows), src, tgt, identity, compose)
    return FunctorCatData(cat, functors, naturals)


def functor_category(
    shape: FinCategory, target: FinCategory, budget: int = DEFAULT_ARROW_BUDGET
) -> FinCategory:
    return functor_category_rich(shape, target, budget=budget).cat


# ---------------------------------------------------------------------------
# Equivalence checking


@dataclass(frozen=True)
class EquivalenceReport:
    fully_faithful: bool
    essentially_surjective: bool
    witness: Optional[str] = None

    @property
    def equivalence(self) -> bool:
        return self.fully_faithful and self.essentially_surjective


def check_equivalence(f: FunctorData) -> EquivalenceReport:
    """Decide whether a (valid) functor is an equivalence of finite categories."""
    for a in f.dom.objects:
        for b in f.dom.objects:
            dom_hom = f.dom.hom(a, b)
            images = [f.arr_map[h] for h in dom_hom]
            cod_hom = f.cod.hom(f.obj_map[a], f.obj_map[b])
            if len(set(images)) != len(images):
                return EquivalenceReport(
                    False, _ess_surj(f)[0], f"not faithful on hom({a!r},{b!r})"
                )
            if set(images) != set(cod_hom):
                return EquivalenceReport(
                    False, _ess_surj(f)[0], f"not full on hom({a!r},{b!r})"
                )
    es, witness = _ess_surj(f)
    if not es:
        return EquivalenceReport(True, False, witness)
    return EquivalenceReport(True, True, None)


def _ess_surj(f: FunctorData) -> tuple[bool, Optional[str]]:
    for c in f.cod.objects:
        if not any(f.cod.iso_objects(f.obj_map[a], c) for a in f.dom.objects):
            return False, c
    return True, None
