from __future__ import annotations

from sketchlab.classifier import (
    Presheaf,
    chase_reflect,
    density_check,
    enumerate_classifier,
    extend_along_unit,
    hat_on_morphism,
    is_orthogonal,
    left_normalize,
    reflect_representable,
    representable,
    rho_system,
    roundedness_check,
)
from sketchlab.core import FunctorData, check_equivalence, identity_functor
from sketchlab.corpus import corpus_sketch
from sketchlab.finset import FinSetMap, FinSetObj
from sketchlab.sketch import SketchMorphism


def _presheaf(s, sizes, tables):
    c = s.carrier
    fibers = {x: FinSetObj(sizes[x]) for x in c.objects}
    restriction = {}
    for a in c.arrows:
        if c.is_identity(a):
            restriction[a] = FinSetMap(
                fibers[c.src[a]], fibers[c.src[a]], tuple(range(fibers[c.src[a]].size))
            )
        else:
            restriction[a] = FinSetMap(fibers[c.tgt[a]], fibers[c.src[a]], tables[a])
    return Presheaf(c, fibers, restriction)


def test_representable_fibers():
    s = corpus_sketch("COSPAN_COPROD")
    p = representable(s, "x")
    assert {o: p.fibers[o].size for o in s.carrier.objects} == {"x": 1, "y": 0, "s": 0}
    assert is_orthogonal(rho_system(s), p)


def test_chase_pushout_growth():
    s = corpus_sketch("COSPAN_COPROD")
    p = _presheaf(s, {"x": 1, "y": 1, "s": 0}, {"i": (), "j": ()})
    r = chase_reflect(rho_system(s), p, 50)
    assert r.status == "Saturated"
    assert r.pushout_steps == 1 and r.merge_steps == 0
    assert r.presheaf.fibers["s"].size == 1
    assert not r.unit_is_iso()


def test_chase_merge_collapse():
    s = corpus_sketch("COSPAN_COPROD")
    p = _presheaf(s, {"x": 1, "y": 1, "s": 2}, {"i": (0, 0), "j": (0, 0)})
    r = chase_reflect(rho_system(s), p, 50)
    assert r.status == "Saturated"
    assert r.merge_steps == 1
    assert r.presheaf.fibers["s"].size == 1


def test_chase_budget_semantics():
    s = corpus_sketch("COSPAN_COPROD")
    p = _presheaf(s, {"x": 1, "y": 1, "s": 0}, {"i": (), "j": ()})
    assert chase_reflect(rho_system(s), p, 0).status == "BudgetExceeded"
    orth = representable(s, "x")
    r = chase_reflect(rho_system(s), orth, 0)
    assert r.status == "Saturated" and r.steps == 0 and r.unit_is_iso()


def test_extend_along_unit_functorial():
    s = corpus_sketch("COSPAN_COPROD")
    sys_ = rho_system(s)
    p = _presheaf(s, {"x": 1, "y": 1, "s": 0}, {"i": (), "j": ()})
    r = chase_reflect(sys_, p, 50)
    target = r.presheaf
    psi = {x: r.unit[x] for x in s.carrier.objects}
    comp = extend_along_unit(r, psi, target)
    for x in s.carrier.objects:
        assert comp[x].table == tuple(range(target.fibers[x].size))


def test_enumerate_classifier_counts():
    s = corpus_sketch("COSPAN_COPROD")
    assert len(enumerate_classifier(s, 1)) == 4


def test_left_normalize_equivalence():
    s = corpus_sketch("COSPAN_COPROD")
    v = left_normalize(s, 200)
    assert v.status == "Verified"
    normalized, morphism = v.payload
    assert check_equivalence(morphism.functor).equivalence


def test_roundedness_verdicts():
    assert roundedness_check(corpus_sketch("SITE_TRIV"), 200).status == "Verified"
    v = roundedness_check(corpus_sketch("COSPAN_COPROD_BOGUS"), 200)
    assert v.status == "Refuted"
    assert v.witness["tip_size"] != v.witness["limit_size"]


def test_density_identity_and_refutation():
    s = corpus_sketch("COSPAN_COPROD")
    assert density_check(identity_functor(s.carrier)).status == "Verified"
    one, pair = corpus_sketch("ONE"), corpus_sketch("PAIR")
    point = FunctorData(one.carrier, pair.carrier, {"pt": "u"}, {"id_pt": "id_u"})
    v = density_check(point)
    assert v.status == "Refuted" and v.witness


def test_hat_on_identity_morphism():
    s = corpus_sketch("COSPAN_COPROD")
    ident = SketchMorphism(
        s,
        s,
        FunctorData(
            s.carrier,
            s.carrier,
            {x: x for x in s.carrier.objects},
            {a: a for a in s.carrier.arrows},
        ),
    )
    p = representable(s, "x")
    r = hat_on_morphism(ident, p, 100)
    assert r.status == "Saturated"
    assert r.presheaf.key() == p.key()


def test_reflect_representables_of_left_normal():
    s = corpus_sketch("SITE_TRIV")
    for x in s.carrier.objects:
        r = reflect_representable(s, x, 100)
        assert r.status == "Saturated" and r.unit_is_iso()
