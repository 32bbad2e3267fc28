"""Sketches: carriers with chosen cone/cocone families, morphisms, predicates.

A sketch is a finite category together with a family of cones (the limit
specifications) and a family of cocones (the colimit specifications).  Families
are either listed outright or generated, minimally from a set of source
sketches or maximally against a set of target sketches; the test world's
"all (co)limit" classes are intensional too, decided by universality checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .core import (
    FinCategory,
    FunctorData,
    ValidityReport,
    compose_functors,
    enumerate_functors,
    enumerate_naturals,
    opposite_category,
    same_tables,
)
from .errors import NonEnumerableDomain, NonEnumerableSource
from . import finset


# ---------------------------------------------------------------------------
# Specs


@dataclass(frozen=True, eq=False)
class ConeSpec:
    shape: FinCategory
    diagram: FunctorData  # shape -> carrier
    tip: str
    legs: Mapping[str, str]  # shape object -> carrier arrow tip -> d(x)

    def __post_init__(self):
        carrier = self.diagram.cod
        for x in self.shape.objects:
            leg = self.legs[x]
            if carrier.src[leg] != self.tip or carrier.tgt[leg] != self.diagram.obj_map[x]:
                raise ValueError(f"cone leg at {x!r} has wrong endpoints")
        for a in self.shape.arrows:
            x, y = self.shape.src[a], self.shape.tgt[a]
            if carrier.then(self.legs[x], self.diagram.arr_map[a]) != self.legs[y]:
                raise ValueError(f"cone legs do not commute over {a!r}")

    @property
    def carrier(self) -> FinCategory:
        return self.diagram.cod

    def key(self) -> tuple:
        return (
            self.shape.objects,
            self.shape.arrows,
            self.diagram.key(),
            self.tip,
            tuple(self.legs[x] for x in self.shape.objects),
        )


@dataclass(frozen=True, eq=False)
class CoconeSpec:
    shape: FinCategory
    diagram: FunctorData
    tip: str
    legs: Mapping[str, str]  # shape object -> carrier arrow d(x) -> tip

    def __post_init__(self):
        carrier = self.diagram.cod
        for x in self.shape.objects:
            leg = self.legs[x]
            if carrier.src[leg] != self.diagram.obj_map[x] or carrier.tgt[leg] != self.tip:
                raise ValueError(f"cocone leg at {x!r} has wrong endpoints")
        for a in self.shape.arrows:
            x, y = self.shape.src[a], self.shape.tgt[a]
            if carrier.then(self.diagram.arr_map[a], self.legs[y]) != self.legs[x]:
                raise ValueError(f"cocone legs do not commute over {a!r}")

    @property
    def carrier(self) -> FinCategory:
        return self.diagram.cod

    def key(self) -> tuple:
        return (
            self.shape.objects,
            self.shape.arrows,
            self.diagram.key(),
            self.tip,
            tuple(self.legs[x] for x in self.shape.objects),
        )


Spec = Union[ConeSpec, CoconeSpec]


# ---------------------------------------------------------------------------
# Spec families


@dataclass(frozen=True, eq=False)
class Extensional:
    specs: tuple


@dataclass(frozen=True, eq=False)
class MinGenerated:
    # each source: (sketch, functor from its carrier into ours)
    sources: tuple


@dataclass(frozen=True, eq=False)
class MaxGenerated:
    # each target: (functor out of our carrier, sketch it lands in)
    targets: tuple


@dataclass(frozen=True, eq=False)
class AllLimitCones:
    pass


@dataclass(frozen=True, eq=False)
class AllColimitCocones:
    pass


SpecFamily = Union[Extensional, MinGenerated, MaxGenerated, AllLimitCones, AllColimitCocones]

EMPTY_FAMILY = Extensional(())


@dataclass(frozen=True, eq=False)
class Sketch:
    carrier: FinCategory
    L: SpecFamily = EMPTY_FAMILY
    C: SpecFamily = EMPTY_FAMILY


@dataclass(frozen=True, eq=False)
class SketchMorphism:
    dom: Sketch
    cod: Sketch
    functor: FunctorData


# ---------------------------------------------------------------------------
# Applying functors to specs


def apply_functor_cone(f: FunctorData, spec: ConeSpec) -> ConeSpec:
    return ConeSpec(
        shape=spec.shape,
        diagram=compose_functors(f, spec.diagram),
        tip=f.obj_map[spec.tip],
        legs={x: f.arr_map[spec.legs[x]] for x in spec.shape.objects},
    )


def apply_functor_cocone(f: FunctorData, spec: CoconeSpec) -> CoconeSpec:
    return CoconeSpec(
        shape=spec.shape,
        diagram=compose_functors(f, spec.diagram),
        tip=f.obj_map[spec.tip],
        legs={x: f.arr_map[spec.legs[x]] for x in spec.shape.objects},
    )


def apply_functor_spec(f: FunctorData, spec: Spec) -> Spec:
    if isinstance(spec, ConeSpec):
        return apply_functor_cone(f, spec)
    return apply_functor_cocone(f, spec)


def enumerate_family(fam: SpecFamily, cone_side: bool) -> list:
    """List the specs of an enumerable family, applying generating functors.

    Raises NonEnumerableSource for intensionally generated families.
    """
    if isinstance(fam, Extensional):
        return list(fam.specs)
    if isinstance(fam, MinGenerated):
        out = []
        for source, functor in fam.sources:
            inner = source.L if cone_side else source.C
            for spec in enumerate_family(inner, cone_side):
                out.append(apply_functor_spec(functor, spec))
        return out
    raise NonEnumerableSource(f"cannot enumerate {type(fam).__name__} family")


def family_enumerable(fam: SpecFamily, cone_side: bool) -> bool:
    if isinstance(fam, Extensional):
        return True
    if isinstance(fam, MinGenerated):
        return all(
            family_enumerable(s.L if cone_side else s.C, cone_side)
            for s, _ in fam.sources
        )
    return False


# ---------------------------------------------------------------------------
# Isomorphism of cones


def _tip_iso_candidates(carrier: FinCategory, a: str, b: str) -> list[str]:
    return carrier.isos(a, b)


def cone_isomorphic(a: Spec, b: Spec) -> bool:
    """Same shape on the nose, invertible diagram map, compatible tip iso."""
    if type(a) is not type(b):
        return False
    if not same_tables(a.shape, b.shape):
        return False
    carrier = a.carrier
    isos = _tip_iso_candidates(carrier, a.tip, b.tip)
    if not isos:
        return False
    for theta in enumerate_naturals(a.diagram, b.diagram):
        if not all(carrier.is_iso(theta.components[x]) for x in a.shape.objects):
            continue
        for h in isos:
            if isinstance(a, ConeSpec):
                ok = all(
                    carrier.then(h, b.legs[x]) == carrier.then(a.legs[x], theta.components[x])
                    for x in a.shape.objects
                )
            else:
                ok = all(
                    carrier.then(a.legs[x], h) == carrier.then(theta.components[x], b.legs[x])
                    for x in a.shape.objects
                )
            if ok:
                return True
    return False


# ---------------------------------------------------------------------------
# Universality (is this spec of (co)limit form inside its own carrier?)


def _finset_diagram_of(spec: Spec) -> finset.FinSetDiagram:
    carrier = spec.carrier
    on_objects = {
        x: finset.FinSetObj(carrier.finset_sizes[spec.diagram.obj_map[x]])
        for x in spec.shape.objects
    }
    on_arrows = {
        a: finset.arrow_as_map(carrier, spec.diagram.arr_map[a])
        for a in spec.shape.arrows
    }
    return finset.FinSetDiagram(spec.shape, on_objects, on_arrows)


def universality_check(carrier: FinCategory, spec: Spec) -> bool:
    if carrier.finset_sizes is not None:
        d = _finset_diagram_of(spec)
        tip = finset.FinSetObj(carrier.finset_sizes[spec.tip])
        legs = {x: finset.arrow_as_map(carrier, spec.legs[x]) for x in spec.shape.objects}
        if isinstance(spec, ConeSpec):
            return finset.is_limit_cone(d, tip, legs)
        return finset.is_colimit_cocone(d, tip, legs)
    if isinstance(spec, ConeSpec):
        return _universal_cone(carrier, spec)
    return _universal_cocone(carrier, spec)


def _cones_with_apex(carrier: FinCategory, spec: ConeSpec, c: str) -> list[tuple]:
    objs = spec.shape.objects
    candidates = [carrier.hom(c, spec.diagram.obj_map[x]) for x in objs]
    pos = {x: k for k, x in enumerate(objs)}
    out = []
    import itertools

    for tup in itertools.product(*candidates):
        if all(
            carrier.then(tup[pos[spec.shape.src[a]]], spec.diagram.arr_map[a])
            == tup[pos[spec.shape.tgt[a]]]
            for a in spec.shape.arrows
        ):
            out.append(tup)
    return out


def _universal_cone(carrier: FinCategory, spec: ConeSpec) -> bool:
    objs = spec.shape.objects
    for c in carrier.objects:
        cones = _cones_with_apex(carrier, spec, c)
        images = [
            tuple(carrier.then(g, spec.legs[x]) for x in objs)
            for g in carrier.hom(c, spec.tip)
        ]
        if len(set(images)) != len(images) or set(images) != set(cones):
            return False
    return True


def _cocones_with_apex(carrier: FinCategory, spec: CoconeSpec, c: str) -> list[tuple]:
    objs = spec.shape.objects
    candidates = [carrier.hom(spec.diagram.obj_map[x], c) for x in objs]
    pos = {x: k for k, x in enumerate(objs)}
    out = []
    import itertools

    for tup in itertools.product(*candidates):
        if all(
            carrier.then(spec.diagram.arr_map[a], tup[pos[spec.shape.tgt[a]]])
            == tup[pos[spec.shape.src[a]]]
            for a in spec.shape.arrows
        ):
            out.append(tup)
    return out


def _universal_cocone(carrier: FinCategory, spec: CoconeSpec) -> bool:
    objs = spec.shape.objects
    for c in carrier.objects:
        cocones = _cocones_with_apex(carrier, spec, c)
        images = [
            tuple(carrier.then(spec.legs[x], g) for x in objs)
            for g in carrier.hom(spec.tip, c)
        ]
        if len(set(images)) != len(images) or set(images) != set(cocones):
            return False
    return True


# ---------------------------------------------------------------------------
# Membership


def member_cone(s: Sketch, candidate: ConeSpec) -> bool:
    return _member(s.carrier, s.L, candidate, cone_side=True)


def member_cocone(s: Sketch, candidate: CoconeSpec) -> bool:
    return _member(s.carrier, s.C, candidate, cone_side=False)


def _member(carrier: FinCategory, fam: SpecFamily, candidate: Spec, cone_side: bool) -> bool:
    if isinstance(fam, (Extensional, MinGenerated)):
        return any(
            cone_isomorphic(candidate, spec)
            for spec in enumerate_family(fam, cone_side)
        )
    if isinstance(fam, MaxGenerated):
        for functor, target in fam.targets:
            image = apply_functor_spec(functor, candidate)
            inner = target.L if cone_side else target.C
            if not _member(target.carrier, inner, image, cone_side):
                return False
        return True
    if isinstance(fam, AllLimitCones):
        return isinstance(candidate, ConeSpec) and universality_check(carrier, candidate)
    if isinstance(fam, AllColimitCocones):
        return isinstance(candidate, CoconeSpec) and universality_check(carrier, candidate)
    raise TypeError(f"unknown family {fam!r}")


# ---------------------------------------------------------------------------
# Morphism checking


def _check_family_map(
    functor: FunctorData,
    dom_fam: SpecFamily,
    cod: Sketch,
    cone_side: bool,
    label: str,
) -> list[str]:
    cod_fam = cod.L if cone_side else cod.C
    if isinstance(cod_fam, MaxGenerated):
        # a map into a maximal structure is a morphism iff every generating
        # post-composite is
        out = []
        for g, target in cod_fam.targets:
            composite = compose_functors(g, functor)
            out.extend(
                _check_family_map(composite, dom_fam, target, cone_side, label)
            )
        return out
    if isinstance(dom_fam, MaxGenerated):
        # recognize a generating functor of the maximal structure itself
        for g, target in dom_fam.targets:
            inner = target.L if cone_side else target.C
            if g.key() == functor.key() and inner is cod_fam:
                return []
        raise NonEnumerableDomain(
            f"{label}: maximal domain family with no structural shortcut"
        )
    if isinstance(dom_fam, (AllLimitCones, AllColimitCocones)):
        raise NonEnumerableDomain(f"{label}: test-world family is not enumerable")
    violations = []
    for k, spec in enumerate(enumerate_family(dom_fam, cone_side)):
        image = apply_functor_spec(functor, spec)
        if not _member(cod.carrier, cod_fam, image, cone_side):
            kind = "cone" if cone_side else "cocone"
            violations.append(f"{label}: image of {kind} #{k} (tip {spec.tip!r}) not in target family")
    return violations


def check_sketch_morphism(f: SketchMorphism) -> ValidityReport:
    violations = []
    violations.extend(
        _check_family_map(f.functor, f.dom.L, f.cod, cone_side=True, label="L")
    )
    violations.extend(
        _check_family_map(f.functor, f.dom.C, f.cod, cone_side=False, label="C")
    )
    return ValidityReport(tuple(violations))


def enumerate_sketch_morphisms(dom: Sketch, cod: Sketch, budget: int = 20_000) -> list[SketchMorphism]:
    out = []
    for functor in enumerate_functors(dom.carrier, cod.carrier, budget):
        m = SketchMorphism(dom, cod, functor)
        if check_sketch_morphism(m).valid:
            out.append(m)
    return out


# ---------------------------------------------------------------------------
# Predicates


@dataclass(frozen=True)
class SketchFlags:
    normal: bool
    left_normal: bool
    right_normal: bool
    limit_sketch: bool
    colimit_sketch: bool
    small: bool


def _family_empty(fam: SpecFamily, cone_side: bool) -> bool:
    if family_enumerable(fam, cone_side):
        return not enumerate_family(fam, cone_side)
    return False


def classify_sketch(s: Sketch) -> SketchFlags:
    if isinstance(s.L, AllLimitCones):
        right = True
    elif family_enumerable(s.L, True):
        right = all(
            universality_check(s.carrier, spec) for spec in enumerate_family(s.L, True)
        )
    else:
        raise NonEnumerableDomain("cone family not enumerable")
    if isinstance(s.C, AllColimitCocones):
        left = True
    elif family_enumerable(s.C, False):
        left = all(
            universality_check(s.carrier, spec) for spec in enumerate_family(s.C, False)
        )
    else:
        raise NonEnumerableDomain("cocone family not enumerable")
    return SketchFlags(
        normal=left and right,
        left_normal=left,
        right_normal=right,
        limit_sketch=_family_empty(s.C, False),
        colimit_sketch=_family_empty(s.L, True),
        small=True,
    )


# ---------------------------------------------------------------------------
# Duality and forgetting


def _dual_functor(f: FunctorData) -> FunctorData:
    return FunctorData(
        opposite_category(f.dom), opposite_category(f.cod), f.obj_map, f.arr_map
    )


def _dual_spec(spec: Spec) -> Spec:
    cls = CoconeSpec if isinstance(spec, ConeSpec) else ConeSpec
    return cls(
        shape=opposite_category(spec.shape),
        diagram=_dual_functor(spec.diagram),
        tip=spec.tip,
        legs=dict(spec.legs),
    )


def _dual_family(fam: SpecFamily) -> SpecFamily:
    if isinstance(fam, Extensional):
        return Extensional(tuple(_dual_spec(sp) for sp in fam.specs))
    if isinstance(fam, MinGenerated):
        return MinGenerated(
            tuple((dual_sketch(sk), _dual_functor(fn)) for sk, fn in fam.sources)
        )
    if isinstance(fam, MaxGenerated):
        return MaxGenerated(
            tuple((_dual_functor(fn), dual_sketch(sk)) for fn, sk in fam.targets)
        )
    if isinstance(fam, AllLimitCones):
        return AllColimitCocones()
    return AllLimitCones()


def dual_sketch(s: Sketch) -> Sketch:
    return Sketch(
        carrier=opposite_category(s.carrier),
        L=_dual_family(s.C),
        C=_dual_family(s.L),
    )


def forget_part(which: str, s: Sketch) -> Sketch:
    if which == "limit":
        return Sketch(s.carrier, L=s.L, C=EMPTY_FAMILY)
    if which == "colimit":
        return Sketch(s.carrier, L=EMPTY_FAMILY, C=s.C)
    raise ValueError("which must be 'limit' or 'colimit'")


def test_sketch(bound: int) -> Sketch:
    """The finite-set test world with everything of (co)limit form specified."""
    return Sketch(finset.fin_set_category(bound), AllLimitCones(), AllColimitCocones())
