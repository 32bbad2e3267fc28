from __future__ import annotations

import pytest

from sketchlab.corpus import corpus_sketch
from sketchlab.core import FunctorData
from sketchlab.errors import NonEnumerableDomain
from sketchlab.models import bounded_test_sketch, check_model
from sketchlab.shapes import BUILTIN_SHAPES
from sketchlab.sketch import (
    ConeSpec,
    SketchMorphism,
    check_sketch_morphism,
    classify_sketch,
    cone_isomorphic,
    enumerate_sketch_morphisms,
    member_cone,
    test_sketch as make_test_world,
    universality_check,
)


def test_classify_cospan_coprod():
    flags = classify_sketch(corpus_sketch("COSPAN_COPROD"))
    assert flags.left_normal and flags.colimit_sketch and flags.small
    assert not flags.limit_sketch


def test_classify_bogus_not_normal():
    flags = classify_sketch(corpus_sketch("COSPAN_COPROD_BOGUS"))
    assert flags.left_normal and not flags.right_normal and not flags.normal


def test_endomorphisms_of_cospan_coprod():
    s = corpus_sketch("COSPAN_COPROD")
    assert len(enumerate_sketch_morphisms(s, s)) == 1


def test_bad_model_refuted():
    s = corpus_sketch("COSPAN_COPROD")
    world = bounded_test_sketch(2).carrier
    f = FunctorData(
        s.carrier,
        world,
        {"x": "1", "y": "1", "s": "1"},
        {a: world.identity["1"] if not s.carrier.is_identity(a) else world.identity["1"] for a in s.carrier.arrows},
    )
    report = check_model(s, f, 2)
    assert not report.valid
    assert any("cocone" in v for v in report.violations)


def test_cone_isomorphic_reflexive_and_shape_strict():
    s = corpus_sketch("SITE_TRIV")
    meet = s.L.specs[1]
    assert cone_isomorphic(meet, meet)
    term = s.L.specs[0]
    assert not cone_isomorphic(meet, term)


def test_universality_against_carrier():
    s = corpus_sketch("SITE_TRIV")
    for sp in s.L.specs:
        assert universality_check(s.carrier, sp)
    bogus = corpus_sketch("COSPAN_COPROD_BOGUS").L.specs[0]
    assert not universality_check(bogus.carrier, bogus)


def test_member_in_test_world():
    world = make_test_world(2)
    shape = BUILTIN_SHAPES["discrete0"]
    spec = ConeSpec(shape, FunctorData(shape, world.carrier, {}, {}), "1", {})
    assert member_cone(world, spec)
    not_terminal = ConeSpec(shape, FunctorData(shape, world.carrier, {}, {}), "2", {})
    assert not member_cone(world, not_terminal)


def test_test_world_domain_not_enumerable():
    from sketchlab.sketch import Extensional, Sketch

    world = make_test_world(1)
    bare = Sketch(world.carrier, Extensional(()), Extensional(()))
    f = FunctorData(
        world.carrier,
        world.carrier,
        {x: x for x in world.carrier.objects},
        {a: a for a in world.carrier.arrows},
    )
    with pytest.raises(NonEnumerableDomain):
        check_sketch_morphism(SketchMorphism(world, bare, f))
