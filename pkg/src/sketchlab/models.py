"""Bounded model theory in skeletal finite sets.

A model of a sketch is a sketch morphism into the finite-set test world at a
size bound; model categories collect them with all natural transformations.
The Morita probe compares model categories along a sketch morphism, with the
usual caveat: equivalence at a bound is evidence, a full-faithfulness failure
is a genuine counterexample.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional

from .core import (
    DEFAULT_ARROW_BUDGET,
    FinCategory,
    FunctorData,
    NatTransData,
    ValidityReport,
    category_of_functors,
    compose_functors,
    enumerate_naturals,
    functors_with_objects,
)
from .errors import SizeBudgetExceeded
from .sketch import (
    Sketch,
    SketchMorphism,
    check_sketch_morphism,
    enumerate_family,
    family_enumerable,
    test_sketch,
)

_TEST_CACHE: dict[int, Sketch] = {}


def bounded_test_sketch(bound: int) -> Sketch:
    if bound not in _TEST_CACHE:
        _TEST_CACHE[bound] = test_sketch(bound)
    return _TEST_CACHE[bound]


@dataclass(frozen=True, eq=False)
class Model:
    sketch: Sketch
    bound: int
    assignment: FunctorData  # carrier -> FinSet<=bound

    def size_of(self, obj: str) -> int:
        return self.assignment.cod.finset_sizes[self.assignment.obj_map[obj]]


@dataclass(frozen=True, eq=False)
class ModelCategory:
    sketch: Sketch
    bound: int
    cat: FinCategory
    models: Mapping[str, Model]  # object id -> model
    naturals: Mapping[str, NatTransData]  # arrow id -> transformation


def check_model(s: Sketch, f: FunctorData, bound: int) -> ValidityReport:
    return check_sketch_morphism(SketchMorphism(s, bounded_test_sketch(bound), f))


def _discrete_constraints(s: Sketch) -> list[tuple[str, str, tuple[str, ...]]]:
    """(kind, tip, diagram objects) for specs over discrete shapes; object-level prune."""
    out = []
    for kind, cone_side in (("cone", True), ("cocone", False)):
        fam = s.L if cone_side else s.C
        if not family_enumerable(fam, cone_side):
            continue
        for spec in enumerate_family(fam, cone_side):
            if all(spec.shape.is_identity(a) for a in spec.shape.arrows):
                out.append(
                    (kind, spec.tip, tuple(spec.diagram.obj_map[x] for x in spec.shape.objects))
                )
    return out


def _sizes_admissible(sizes: Mapping[str, int], constraints) -> bool:
    for kind, tip, objs in constraints:
        if kind == "cone":
            want = 1
            for o in objs:
                want *= sizes[o]
        else:
            want = sum(sizes[o] for o in objs)
        if sizes[tip] != want:
            return False
    return True


def _models_for_sizes(args) -> list[FunctorData]:
    s, bound, sizes = args
    fs = bounded_test_sketch(bound).carrier
    obj_map = {x: str(n) for x, n in sizes.items()}
    out = []
    for f in functors_with_objects(s.carrier, fs, obj_map):
        if check_model(s, f, bound).valid:
            out.append(f)
    return out


def enumerate_models(
    s: Sketch, bound: int, workers: int = 1, budget: int = DEFAULT_ARROW_BUDGET
) -> ModelCategory:
    constraints = _discrete_constraints(s)
    objs = s.carrier.objects
    tasks = []
    for combo in itertools.product(range(bound + 1), repeat=len(objs)):
        sizes = dict(zip(objs, combo))
        if _sizes_admissible(sizes, constraints):
            tasks.append((s, bound, sizes))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_models_for_sizes, tasks))
    else:
        chunks = [_models_for_sizes(t) for t in tasks]
    functors: list[FunctorData] = [f for chunk in chunks for f in chunk]
    if len(functors) > budget:
        raise SizeBudgetExceeded("model enumeration over budget")
    fs = bounded_test_sketch(bound).carrier
    rich = category_of_functors(functors, s.carrier, fs, budget=budget)
    models = {oid: Model(s, bound, fn) for oid, fn in rich.functors.items()}
    return ModelCategory(s, bound, rich.cat, models, rich.naturals)


def restrict_model(f: SketchMorphism, n: Model) -> Model:
    return Model(f.dom, n.bound, compose_functors(n.assignment, f.functor))


def induced_between(
    f: SketchMorphism, mc_cod: ModelCategory, mc_dom: ModelCategory
) -> FunctorData:
    """Precomposition functor from models of the codomain to models of the domain."""
    dom_by_key = {m.assignment.key(): oid for oid, m in mc_dom.models.items()}
    nat_by_key = {n.key(): aid for aid, n in mc_dom.naturals.items()}
    obj_map = {}
    for oid, m in mc_cod.models.items():
        obj_map[oid] = dom_by_key[restrict_model(f, m).assignment.key()]
    arr_map = {}
    for aid, n in mc_cod.naturals.items():
        whiskered = NatTransData(
            mc_dom.models[obj_map[mc_cod.cat.src[aid]]].assignment,
            mc_dom.models[obj_map[mc_cod.cat.tgt[aid]]].assignment,
            {x: n.components[f.functor.obj_map[x]] for x in f.dom.carrier.objects},
        )
        arr_map[aid] = nat_by_key[whiskered.key()]
    return FunctorData(mc_cod.cat, mc_dom.cat, obj_map, arr_map)


def induced_functor(f: SketchMorphism, bound: int) -> FunctorData:
    mc_cod = enumerate_models(f.cod, bound)
    mc_dom = enumerate_models(f.dom, bound)
    return induced_between(f, mc_cod, mc_dom)


@dataclass(frozen=True)
class MoritaReport:
    verdict: str  # "EquivalentUpToBounds" | "RefutedWithWitness"
    fully_faithful: bool
    essentially_surjective: bool
    witness: Optional[str] = None


def _models_isomorphic(a: FunctorData, b: FunctorData) -> bool:
    fs = a.cod
    for n in enumerate_naturals(a, b):
        if all(fs.is_iso(c) for c in n.components.values()):
            return True
    return False


def morita_probe(f: SketchMorphism, src_bound: int, tgt_bound: int) -> MoritaReport:
    mc_cod = enumerate_models(f.cod, tgt_bound)
    mc_dom = enumerate_models(f.dom, tgt_bound)
    fstar = induced_between(f, mc_cod, mc_dom)
    # full faithfulness of the restriction functor, exact at tgt_bound
    for o1, m1 in mc_cod.models.items():
        for o2, m2 in mc_cod.models.items():
            upstairs = [
                aid
                for aid in mc_cod.cat.arrows
                if mc_cod.cat.src[aid] == o1 and mc_cod.cat.tgt[aid] == o2
            ]
            images = [fstar.arr_map[a] for a in upstairs]
            downstairs = mc_dom.cat.hom(fstar.obj_map[o1], fstar.obj_map[o2])
            if len(set(images)) != len(images):
                return MoritaReport(
                    "RefutedWithWitness",
                    False,
                    True,
                    f"restriction not faithful between models {o1} and {o2}",
                )
            if set(images) != set(downstairs):
                return MoritaReport(
                    "RefutedWithWitness",
                    False,
                    True,
                    f"restriction not full between models {o1} and {o2}",
                )
    # bounded essential surjectivity: small domain models must arise by restriction
    mc_dom_small = enumerate_models(f.dom, src_bound)
    restricted = [restrict_model(f, m).assignment for m in mc_cod.models.values()]
    for oid, m in mc_dom_small.models.items():
        grown = _embed_model(m, tgt_bound)
        if not any(_models_isomorphic(grown, r) for r in restricted):
            return MoritaReport(
                "RefutedWithWitness",
                True,
                False,
                f"domain model {oid} at bound {src_bound} is not a restriction up to iso",
            )
    return MoritaReport("EquivalentUpToBounds", True, True, None)


def _embed_model(m: Model, bound: int) -> FunctorData:
    """The same model viewed inside a larger finite-set category."""
    fs = bounded_test_sketch(bound).carrier
    return FunctorData(
        m.assignment.dom, fs, dict(m.assignment.obj_map), dict(m.assignment.arr_map)
    )
