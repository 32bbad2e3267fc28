from __future__ import annotations

import pytest

from sketchlab.constructions import (
    coproduct_sketch,
    exponential_sketch,
    power_sketch,
    product_sketch,
    site_to_sketch,
    split_idempotent,
    tensor_sketch,
    verify_closedness,
)
from sketchlab.core import FunctorData, NatTransData
from sketchlab.corpus import corpus_sketch
from sketchlab.errors import NotIdempotent, NotLex
from sketchlab.shapes import BUILTIN_SHAPES
from sketchlab.sketch import (
    ConeSpec,
    Extensional,
    Sketch,
    SketchMorphism,
    check_sketch_morphism,
)


def test_product_pair_pair():
    p = product_sketch(corpus_sketch("PAIR"), corpus_sketch("PAIR"))
    assert len(p.carrier.objects) == 4
    assert len(p.carrier.arrows) == 4  # discrete


def test_power_and_exponential_sizes():
    pair = corpus_sketch("PAIR")
    assert len(power_sketch(pair, BUILTIN_SHAPES["walking_arrow"]).carrier.objects) == 2
    assert len(exponential_sketch(pair, pair).carrier.objects) == 4


def test_closedness_pair_cube():
    pair = corpus_sketch("PAIR")
    w = verify_closedness(pair, pair, pair)
    assert len(w.lhs.cat.objects) == 16
    assert set(w.obj_table.keys()) == set(w.lhs.cat.objects)


def test_tensor_and_coproduct():
    one, pair = corpus_sketch("ONE"), corpus_sketch("PAIR")
    t = tensor_sketch(one, pair)
    assert len(t.carrier.objects) == 2
    c = coproduct_sketch(one, pair)
    assert sorted(c.carrier.objects) == ["l:pt", "r:u", "r:v"]


def test_split_idempotent_collapse():
    cod = BUILTIN_SHAPES["codiscrete2"]
    s = Sketch(cod, Extensional(()), Extensional(()))
    u = cod.hom("a", "b")[0]
    v = cod.hom("b", "a")[0]
    e = SketchMorphism(
        s,
        s,
        FunctorData(
            cod,
            cod,
            {"a": "a", "b": "a"},
            {"id_a": "id_a", "id_b": "id_a", u: "id_a", v: "id_a"},
        ),
    )
    from sketchlab.core import identity_functor

    theta = NatTransData(e.functor, identity_functor(cod), {"a": "id_a", "b": u})
    res = split_idempotent(e, theta)
    assert res.sketch.carrier.objects == ("a",)
    assert check_sketch_morphism(res.retraction).valid
    assert check_sketch_morphism(res.section).valid


def test_split_rejects_non_idempotent():
    cod = BUILTIN_SHAPES["codiscrete2"]
    s = Sketch(cod, Extensional(()), Extensional(()))
    u = cod.hom("a", "b")[0]
    v = cod.hom("b", "a")[0]
    swap = SketchMorphism(
        s,
        s,
        FunctorData(cod, cod, {"a": "b", "b": "a"}, {"id_a": "id_b", "id_b": "id_a", u: v, v: u}),
    )
    theta = NatTransData(swap.functor, swap.functor, {"a": u, "b": v})
    with pytest.raises(NotIdempotent):
        split_idempotent(swap, theta)


def test_site_to_sketch_trivial_topology():
    diamond = BUILTIN_SHAPES["diamond"]
    coverage = {
        "top": [["at", "bt", "ba;at", "id_top"]],
        "a": [["ba", "id_a"]],
        "b": [["bb", "id_b"]],
        "bot": [["id_bot"]],
    }
    tip = ConeSpec(
        BUILTIN_SHAPES["discrete0"],
        FunctorData(BUILTIN_SHAPES["discrete0"], diamond, {}, {}),
        "top",
        {},
    )
    s = site_to_sketch(diamond, [tip], coverage)
    assert len(s.C.specs) == 4
    assert sorted(len(sp.shape.objects) for sp in s.C.specs) == [1, 2, 2, 4]


def test_site_to_sketch_rejects_non_lex():
    diamond = BUILTIN_SHAPES["diamond"]
    bad = ConeSpec(
        BUILTIN_SHAPES["discrete0"],
        FunctorData(BUILTIN_SHAPES["discrete0"], diamond, {}, {}),
        "a",
        {},
    )
    with pytest.raises(NotLex):
        site_to_sketch(diamond, [bad], {})
