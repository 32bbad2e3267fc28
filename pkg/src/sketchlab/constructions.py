"""Construction calculus on sketches.

Generated structures, products and pseudo-pullbacks, powers, coproducts,
idempotent splitting, the tensor and its right adjoint exponential, a
closedness verifier, and the lex-site constructor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    DEFAULT_ARROW_BUDGET,
    FinCategory,
    FunctorData,
    FunctorCatData,
    NatTransData,
    category_of_functors,
    compose_functors,
    functor_category_rich,
    identity_functor,
    pair_id,
    product_category,
)
from .errors import (
    IsoFailure,
    NotEquivalence,
    NotIdempotent,
    NotLex,
    SizeBudgetExceeded,
)
from .sketch import (
    ConeSpec,
    CoconeSpec,
    Extensional,
    MaxGenerated,
    Sketch,
    SketchMorphism,
    apply_functor_spec,
    check_sketch_morphism,
    cone_isomorphic,
    enumerate_family,
    enumerate_sketch_morphisms,
    universality_check,
)


# ---------------------------------------------------------------------------
# Generated structures


def _dedup_specs(specs: Sequence) -> tuple:
    """Dedup up to cone isomorphism, keeping the least key in each class."""
    chosen: list = []
    for spec in sorted(specs, key=lambda sp: sp.key()):
        if not any(cone_isomorphic(spec, seen) for seen in chosen):
            chosen.append(spec)
    return tuple(chosen)


def min_structure(carrier: FinCategory, sources: Sequence) -> Sketch:
    cones: list = []
    cocones: list = []
    for source, functor in sources:
        for spec in enumerate_family(source.L, True):
            cones.append(apply_functor_spec(functor, spec))
        for spec in enumerate_family(source.C, False):
            cocones.append(apply_functor_spec(functor, spec))
    return Sketch(carrier, Extensional(_dedup_specs(cones)), Extensional(_dedup_specs(cocones)))


def max_structure(carrier: FinCategory, targets: Sequence) -> Sketch:
    targets = tuple(targets)
    return Sketch(carrier, MaxGenerated(targets), MaxGenerated(targets))


# ---------------------------------------------------------------------------
# Products and pseudo-pullbacks


def projection_functors(a: FinCategory, b: FinCategory) -> tuple[FunctorData, FunctorData]:
    prod = product_category(a, b)
    p1 = FunctorData(
        prod,
        a,
        {pair_id(x, y): x for x in a.objects for y in b.objects},
        {pair_id(f, g): f for f in a.arrows for g in b.arrows},
    )
    p2 = FunctorData(
        prod,
        b,
        {pair_id(x, y): y for x in a.objects for y in b.objects},
        {pair_id(f, g): g for f in a.arrows for g in b.arrows},
    )
    return p1, p2


def product_sketch(a: Sketch, b: Sketch) -> Sketch:
    p1, p2 = projection_functors(a.carrier, b.carrier)
    return max_structure(p1.dom, [(p1, a), (p2, b)])


def product_sketch_n(sketches: Sequence[Sketch]) -> Sketch:
    """Iterated binary product (nested-pair carrier); ONE-fold for empty input."""
    if not sketches:
        from .core import FinCategory as FC

        one = FC(("*",), ("id_*",), {"id_*": "*"}, {"id_*": "*"}, {"*": "id_*"}, {})
        return Sketch(one)
    out = sketches[0]
    for s in sketches[1:]:
        out = product_sketch(out, s)
    return out


def triple_id(a: str, b: str, h: str) -> str:
    return f"({a},{b},{h})"


@dataclass(frozen=True, eq=False)
class PullbackResult:
    sketch: Sketch
    proj1: SketchMorphism
    proj2: SketchMorphism


def pseudo_pullback_sketch(
    f: SketchMorphism, g: SketchMorphism, budget: int = DEFAULT_ARROW_BUDGET
) -> PullbackResult:
    """Iso-comma carrier: objects (a, b, iso f a -> g b), maximal structure."""
    A, B = f.dom.carrier, g.dom.carrier
    T = f.cod.carrier
    objects: list[str] = []
    data: dict[str, tuple[str, str, str]] = {}
    for a in A.objects:
        for b in B.objects:
            for h in T.isos(f.functor.obj_map[a], g.functor.obj_map[b]):
                oid = triple_id(a, b, h)
                objects.append(oid)
                data[oid] = (a, b, h)
    arrows: list[str] = []
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    parts: dict[str, tuple[str, str]] = {}
    for o1 in objects:
        a1, b1, h1 = data[o1]
        for o2 in objects:
            a2, b2, h2 = data[o2]
            for u in A.hom(a1, a2):
                for v in B.hom(b1, b2):
                    if T.then(h1, g.functor.arr_map[v]) == T.then(f.functor.arr_map[u], h2):
                        aid = f"{pair_id(u, v)}@{o1}>{o2}"
                        arrows.append(aid)
                        src[aid] = o1
                        tgt[aid] = o2
                        parts[aid] = (u, v)
                        if len(arrows) > budget:
                            raise SizeBudgetExceeded("iso-comma carrier over budget")
    identity = {
        o: f"{pair_id(A.identity[data[o][0]], B.identity[data[o][1]])}@{o}>{o}"
        for o in objects
    }
    compose = {}
    for x in arrows:
        for y in arrows:
            if tgt[x] != src[y]:
                continue
            u = A.then(parts[x][0], parts[y][0])
            v = B.then(parts[x][1], parts[y][1])
            compose[(x, y)] = f"{pair_id(u, v)}@{src[x]}>{tgt[y]}"
    carrier = FinCategory(tuple(objects), tuple(arrows), src, tgt, identity, compose)
    q1 = FunctorData(
        carrier, A, {o: data[o][0] for o in objects}, {x: parts[x][0] for x in arrows}
    )
    q2 = FunctorData(
        carrier, B, {o: data[o][1] for o in objects}, {x: parts[x][1] for x in arrows}
    )
    sk = max_structure(carrier, [(q1, f.dom), (q2, g.dom)])
    return PullbackResult(sk, SketchMorphism(sk, f.dom, q1), SketchMorphism(sk, g.dom, q2))


# ---------------------------------------------------------------------------
# Powers


def evaluation_functor(cat_data: FunctorCatData, x: str, target: FinCategory) -> FunctorData:
    return FunctorData(
        cat_data.cat,
        target,
        {oid: fn.obj_map[x] for oid, fn in cat_data.functors.items()},
        {aid: n.components[x] for aid, n in cat_data.naturals.items()},
    )


def power_sketch(s: Sketch, i: FinCategory, budget: int = DEFAULT_ARROW_BUDGET) -> Sketch:
    rich = functor_category_rich(i, s.carrier, budget=budget)
    targets = [(evaluation_functor(rich, x, s.carrier), s) for x in i.objects]
    return max_structure(rich.cat, targets)


# ---------------------------------------------------------------------------
# Coproducts


def tag(prefix: str, name: str) -> str:
    return f"{prefix}:{name}"


def disjoint_union_category(a: FinCategory, b: FinCategory) -> tuple[FinCategory, FunctorData, FunctorData]:
    objects = tuple(tag("l", x) for x in a.objects) + tuple(tag("r", x) for x in b.objects)
    arrows = tuple(tag("l", f) for f in a.arrows) + tuple(tag("r", f) for f in b.arrows)
    src = {tag("l", f): tag("l", a.src[f]) for f in a.arrows}
    src.update({tag("r", f): tag("r", b.src[f]) for f in b.arrows})
    tgt = {tag("l", f): tag("l", a.tgt[f]) for f in a.arrows}
    tgt.update({tag("r", f): tag("r", b.tgt[f]) for f in b.arrows})
    identity = {tag("l", x): tag("l", a.identity[x]) for x in a.objects}
    identity.update({tag("r", x): tag("r", b.identity[x]) for x in b.objects})
    compose = {
        (tag("l", f), tag("l", g)): tag("l", h) for (f, g), h in a.compose.items()
    }
    compose.update(
        {(tag("r", f), tag("r", g)): tag("r", h) for (f, g), h in b.compose.items()}
    )
    cat = FinCategory(objects, arrows, src, tgt, identity, compose)
    inl = FunctorData(a, cat, {x: tag("l", x) for x in a.objects}, {f: tag("l", f) for f in a.arrows})
    inr = FunctorData(b, cat, {x: tag("r", x) for x in b.objects}, {f: tag("r", f) for f in b.arrows})
    return cat, inl, inr


def coproduct_sketch(a: Sketch, b: Sketch) -> Sketch:
    cat, inl, inr = disjoint_union_category(a.carrier, b.carrier)
    return min_structure(cat, [(a, inl), (b, inr)])


# ---------------------------------------------------------------------------
# Idempotent splitting


@dataclass(frozen=True, eq=False)
class SplitResult:
    sketch: Sketch
    retraction: SketchMorphism
    section: SketchMorphism


def full_subcategory(c: FinCategory, objs: Sequence[str]) -> FinCategory:
    keep_objs = tuple(x for x in c.objects if x in set(objs))
    keep_arrs = tuple(
        f for f in c.arrows if c.src[f] in set(objs) and c.tgt[f] in set(objs)
    )
    return FinCategory(
        keep_objs,
        keep_arrs,
        {f: c.src[f] for f in keep_arrs},
        {f: c.tgt[f] for f in keep_arrs},
        {x: c.identity[x] for x in keep_objs},
        {
            (f, g): h
            for (f, g), h in c.compose.items()
            if f in set(keep_arrs) and g in set(keep_arrs)
        },
        finset_sizes=None,
    )


def split_idempotent(e: SketchMorphism, theta: NatTransData) -> SplitResult:
    """Split an idempotent equivalence through its full image."""
    s = e.dom
    carrier = s.carrier
    E = e.functor
    if e.cod is not s and e.cod != s:
        raise NotIdempotent("not an endomorphism")
    if compose_functors(E, E).key() != E.key():
        raise NotIdempotent("functor does not square to itself")
    if theta.src.key() != E.key() or theta.tgt.key() != identity_functor(carrier).key():
        raise NotEquivalence("transformation must go from the endofunctor to the identity")
    from .core import check_natural, nat_is_iso

    if not check_natural(theta).valid or not nat_is_iso(theta):
        raise NotEquivalence("transformation is not an invertible natural map")
    for x in carrier.objects:
        ex = E.obj_map[x]
        if theta.components[ex] != carrier.identity[ex]:
            raise NotEquivalence("whiskering with the endofunctor on the right is not trivial")
        if E.arr_map[theta.components[x]] != carrier.identity[ex]:
            raise NotEquivalence("whiskering with the endofunctor on the left is not trivial")
    image_objs = sorted({E.obj_map[x] for x in carrier.objects}, key=carrier.objects.index)
    image = full_subcategory(carrier, image_objs)
    retraction_fn = FunctorData(
        carrier, image, {x: E.obj_map[x] for x in carrier.objects}, {f: E.arr_map[f] for f in carrier.arrows}
    )
    section_fn = FunctorData(
        image, carrier, {x: x for x in image.objects}, {f: f for f in image.arrows}
    )
    split = min_structure(image, [(s, retraction_fn)])
    retraction = SketchMorphism(s, split, retraction_fn)
    section = SketchMorphism(split, s, section_fn)
    report = check_sketch_morphism(section)
    if not report.valid:
        raise NotEquivalence(f"section fails to be a morphism: {report.violations}")
    return SplitResult(split, retraction, section)


# ---------------------------------------------------------------------------
# Tensor


def slice_inclusions(d: Sketch, s: Sketch) -> list[tuple[Sketch, FunctorData]]:
    prod = product_category(d.carrier, s.carrier)
    out: list[tuple[Sketch, FunctorData]] = []
    for y in s.carrier.objects:
        idy = s.carrier.identity[y]
        fx = FunctorData(
            d.carrier,
            prod,
            {a: pair_id(a, y) for a in d.carrier.objects},
            {f: pair_id(f, idy) for f in d.carrier.arrows},
        )
        out.append((d, fx))
    for a in d.carrier.objects:
        ida = d.carrier.identity[a]
        fy = FunctorData(
            s.carrier,
            prod,
            {y: pair_id(a, y) for y in s.carrier.objects},
            {g: pair_id(ida, g) for g in s.carrier.arrows},
        )
        out.append((s, fy))
    return out


def tensor_sketch(d: Sketch, s: Sketch) -> Sketch:
    prod = product_category(d.carrier, s.carrier)
    return min_structure(prod, slice_inclusions(d, s))


# ---------------------------------------------------------------------------
# Exponentials


@dataclass(frozen=True, eq=False)
class ExponentialResult:
    sketch: Sketch
    cat_data: FunctorCatData  # objects are the sketch morphisms d -> t


def exponential_sketch_rich(
    d: Sketch, t: Sketch, budget: int = DEFAULT_ARROW_BUDGET
) -> ExponentialResult:
    morphisms = enumerate_sketch_morphisms(d, t, budget=budget)
    rich = category_of_functors(
        [m.functor for m in morphisms], d.carrier, t.carrier, budget=budget
    )
    targets = [(evaluation_functor(rich, x, t.carrier), t) for x in d.carrier.objects]
    return ExponentialResult(max_structure(rich.cat, targets), rich)


def exponential_sketch(d: Sketch, t: Sketch, budget: int = DEFAULT_ARROW_BUDGET) -> Sketch:
    return exponential_sketch_rich(d, t, budget=budget).sketch


# ---------------------------------------------------------------------------
# Closedness


@dataclass(frozen=True, eq=False)
class IsoWitness:
    lhs: FunctorCatData  # morphisms (d tensor s) -> t
    rhs: FunctorCatData  # morphisms s -> t^d
    obj_table: Mapping[str, str]
    arr_table: Mapping[str, str]


def _hom_category(dom: Sketch, cod: Sketch, budget: int) -> FunctorCatData:
    morphisms = enumerate_sketch_morphisms(dom, cod, budget=budget)
    return category_of_functors(
        [m.functor for m in morphisms], dom.carrier, cod.carrier, budget=budget
    )


def verify_closedness(
    d: Sketch, s: Sketch, t: Sketch, budget: int = DEFAULT_ARROW_BUDGET
) -> IsoWitness:
    """Check that currying is an isomorphism between the two hom-categories."""
    ds = tensor_sketch(d, s)
    exp = exponential_sketch_rich(d, t, budget=budget)
    lhs = _hom_category(ds, t, budget)
    rhs = _hom_category(s, exp.sketch, budget)
    exp_obj_by_key = {fn.key(): oid for oid, fn in exp.cat_data.functors.items()}
    exp_arr_by_key = {n.key(): aid for aid, n in exp.cat_data.naturals.items()}

    def curry_functor(m: FunctorData) -> FunctorData:
        obj_map: dict[str, str] = {}
        for y in s.carrier.objects:
            slice_fn = FunctorData(
                d.carrier,
                t.carrier,
                {a: m.obj_map[pair_id(a, y)] for a in d.carrier.objects},
                {f: m.arr_map[pair_id(f, s.carrier.identity[y])] for f in d.carrier.arrows},
            )
            key = slice_fn.key()
            if key not in exp_obj_by_key:
                raise IsoFailure(f"curried slice at {y!r} is not a morphism object")
            obj_map[y] = exp_obj_by_key[key]
        arr_map: dict[str, str] = {}
        for g in s.carrier.arrows:
            y1, y2 = s.carrier.src[g], s.carrier.tgt[g]
            n = NatTransData(
                exp.cat_data.functors[obj_map[y1]],
                exp.cat_data.functors[obj_map[y2]],
                {
                    a: m.arr_map[pair_id(d.carrier.identity[a], g)]
                    for a in d.carrier.objects
                },
            )
            key = n.key()
            if key not in exp_arr_by_key:
                raise IsoFailure(f"curried transformation at {g!r} missing")
            arr_map[g] = exp_arr_by_key[key]
        return FunctorData(s.carrier, exp.cat_data.cat, obj_map, arr_map)

    rhs_obj_by_key = {fn.key(): oid for oid, fn in rhs.functors.items()}
    rhs_arr_by_key = {n.key(): aid for aid, n in rhs.naturals.items()}
    obj_table: dict[str, str] = {}
    for oid, m in lhs.functors.items():
        cm = curry_functor(m)
        key = cm.key()
        if key not in rhs_obj_by_key:
            raise IsoFailure(f"curried morphism {oid} not found on the right")
        obj_table[oid] = rhs_obj_by_key[key]
    if len(set(obj_table.values())) != len(obj_table) or len(obj_table) != len(rhs.functors):
        raise IsoFailure("object map is not a bijection")
    arr_table: dict[str, str] = {}
    for aid, n in lhs.naturals.items():
        src_id = obj_table[lhs.cat.src[aid]]
        tgt_id = obj_table[lhs.cat.tgt[aid]]
        curried = NatTransData(
            rhs.functors[src_id],
            rhs.functors[tgt_id],
            {
                y: exp_arr_by_key[
                    NatTransData(
                        exp.cat_data.functors[rhs.functors[src_id].obj_map[y]],
                        exp.cat_data.functors[rhs.functors[tgt_id].obj_map[y]],
                        {a: n.components[pair_id(a, y)] for a in d.carrier.objects},
                    ).key()
                ]
                for y in s.carrier.objects
            },
        )
        key = curried.key()
        if key not in rhs_arr_by_key:
            raise IsoFailure(f"curried transformation {aid} not found on the right")
        arr_table[aid] = rhs_arr_by_key[key]
    if len(set(arr_table.values())) != len(arr_table) or len(arr_table) != len(rhs.naturals):
        raise IsoFailure("arrow map is not a bijection")
    for (x, y), z in lhs.cat.compose.items():
        if rhs.cat.then(arr_table[x], arr_table[y]) != arr_table[z]:
            raise IsoFailure("currying does not respect composition")
    return IsoWitness(lhs, rhs, obj_table, arr_table)


# ---------------------------------------------------------------------------
# Lex sites


def sieve_closure(c: FinCategory, u: str, sink: Sequence[str]) -> list[str]:
    """All arrows into u factoring through a member of the generating sink."""
    out = []
    for f in c.arrows:
        if c.tgt[f] != u:
            continue
        for h in sink:
            if any(c.then(g, h) == f for g in c.hom(c.src[f], c.src[h])):
                out.append(f)
                break
    return out


def _sieve_cocone(c: FinCategory, u: str, sieve: Sequence[str]) -> CoconeSpec:
    objs = tuple(sieve)
    arrows: list[str] = []
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    under: dict[str, str] = {}
    for f1 in objs:
        for f2 in objs:
            for g in c.hom(c.src[f1], c.src[f2]):
                if c.then(g, f2) == f1:
                    aid = f"[{g}]{f1}>{f2}"
                    arrows.append(aid)
                    src[aid] = f1
                    tgt[aid] = f2
                    under[aid] = g
    identity = {f: f"[{c.identity[c.src[f]]}]{f}>{f}" for f in objs}
    compose = {}
    for a1 in arrows:
        for a2 in arrows:
            if tgt[a1] != src[a2]:
                continue
            g = c.then(under[a1], under[a2])
            compose[(a1, a2)] = f"[{g}]{src[a1]}>{tgt[a2]}"
    shape = FinCategory(objs, tuple(arrows), src, tgt, identity, compose)
    diagram = FunctorData(shape, c, {f: c.src[f] for f in objs}, {a: under[a] for a in arrows})
    return CoconeSpec(shape, diagram, u, {f: f for f in objs})


def site_to_sketch(
    c: FinCategory,
    lex_cones: Sequence[ConeSpec],
    coverage: Mapping[str, Sequence[Sequence[str]]],
) -> Sketch:
    for k, cone in enumerate(lex_cones):
        if not universality_check(c, cone):
            raise NotLex(f"supplied cone #{k} (tip {cone.tip!r}) is not a limit cone")
    cocones: list[CoconeSpec] = []
    for u in c.objects:
        for sink in coverage.get(u, ()):
            for h in sink:
                if c.tgt[h] != u:
                    raise ValueError(f"covering arrow {h!r} does not target {u!r}")
            cocones.append(_sieve_cocone(c, u, sieve_closure(c, u, sink)))
    return Sketch(c, Extensional(tuple(lex_cones)), Extensional(_dedup_specs(cocones)))
