"""Acceptance gate: one test per criterion, each printing one status line."""

from __future__ import annotations

import io
import contextlib
import itertools
import random

import oracles
from sketchlab.classifier import (
    chase_reflect,
    diaconescu_probe,
    enumerate_classifier,
    is_orthogonal,
    left_normalize,
    reflect_representable,
    rho_system,
)
from sketchlab.cli import run_command
from sketchlab.constructions import (
    _hom_category,
    coproduct_sketch,
    product_sketch,
    projection_functors,
    pseudo_pullback_sketch,
    power_sketch,
    tag,
    verify_closedness,
)
from sketchlab.core import (
    FunctorData,
    check_equivalence,
    compose_functors,
    enumerate_functors,
    enumerate_naturals,
    nat_is_iso,
)
from sketchlab.corpus import corpus_names, corpus_sketch
from sketchlab.finset import colimit_finset, limit_finset
from sketchlab.models import morita_probe
from sketchlab.shapes import BUILTIN_SHAPES
from sketchlab.sketch import (
    ConeSpec,
    CoconeSpec,
    Extensional,
    Sketch,
    SketchMorphism,
    check_sketch_morphism,
    dual_sketch,
    enumerate_sketch_morphisms,
    forget_part,
)


def _status(line: str) -> None:
    print(line)


def _corpus() -> dict[str, Sketch]:
    return {n: corpus_sketch(n) for n in corpus_names()}


# ---------------------------------------------------------------------------
# 1. FinSet oracle equivalence


def test_01_finset_oracle_equivalence():
    rng = random.Random(11)
    cases = 0
    for shape_name in oracles.ORACLE_SHAPES:
        shape = BUILTIN_SHAPES[shape_name]
        while True:
            d = oracles.random_finset_diagram(rng, shape, max_fiber=3)
            if d is None:
                continue
            objs = list(shape.objects)
            fams = {
                tuple(a[x] for x in objs) for a in oracles.brute_limit_families(d)
            }
            lim = limit_finset(d)
            assert set(lim.tuples) == fams
            assert lim.apex.size == len(fams)
            for k, t in enumerate(lim.tuples):
                for j, x in enumerate(objs):
                    assert lim.projections[x](k) == t[j]
            col = colimit_finset(d)
            classes: dict[int, set] = {}
            for x in objs:
                for i in range(d.on_objects[x].size):
                    classes.setdefault(col.class_of(x, i), set()).add((x, i))
            assert set(map(frozenset, classes.values())) == oracles.brute_colimit_partition(d)
            assert col.apex.size == len(classes)
            cases += 1
            if cases % 70 == 0:
                break
    assert cases >= 500
    _status(f"criterion 1 (finset oracle equivalence, {cases} cases): PASS")


# ---------------------------------------------------------------------------
# 2. Min/Max characterization


_CARRIER_POOL = ("walking_arrow", "span", "cospan", "parallel_pair", "codiscrete2", "diamond")


def _random_spec(rng: random.Random, carrier, kind: str):
    shape = BUILTIN_SHAPES[rng.choice(("discrete0", "discrete1", "discrete2"))]
    for _ in range(30):
        obj_map = {x: rng.choice(carrier.objects) for x in shape.objects}
        arr_map = {shape.identity[x]: carrier.identity[obj_map[x]] for x in shape.objects}
        diagram = FunctorData(shape, carrier, obj_map, arr_map)
        tip = rng.choice(carrier.objects)
        legs = {}
        ok = True
        for x in shape.objects:
            cands = (
                carrier.hom(tip, obj_map[x]) if kind == "cone" else carrier.hom(obj_map[x], tip)
            )
            if not cands:
                ok = False
                break
            legs[x] = rng.choice(cands)
        if ok:
            cls = ConeSpec if kind == "cone" else CoconeSpec
            return cls(shape, diagram, tip, legs)
    return None


def _random_sketch(rng: random.Random, carrier) -> Sketch:
    cones = [sp for sp in (_random_spec(rng, carrier, "cone") for _ in range(rng.randrange(3))) if sp]
    cocones = [sp for sp in (_random_spec(rng, carrier, "cocone") for _ in range(rng.randrange(3))) if sp]
    return Sketch(carrier, Extensional(tuple(cones)), Extensional(tuple(cocones)))


def test_02_min_max_characterization():
    from sketchlab.constructions import max_structure, min_structure

    checked = 0
    for seed in range(100):
        rng = random.Random(1000 + seed)
        a = BUILTIN_SHAPES[rng.choice(_CARRIER_POOL)]
        c = BUILTIN_SHAPES[rng.choice(_CARRIER_POOL)]
        b = BUILTIN_SHAPES[rng.choice(_CARRIER_POOL)]
        s1 = _random_sketch(rng, a)
        t = _random_sketch(rng, b)

        gs = enumerate_functors(a, c)
        g = rng.choice(gs)
        mins = min_structure(c, [(s1, g)])
        fs = enumerate_functors(c, b)
        for f in rng.sample(fs, min(4, len(fs))):
            left = check_sketch_morphism(SketchMorphism(mins, t, f)).valid
            right = check_sketch_morphism(SketchMorphism(s1, t, compose_functors(f, g))).valid
            assert left == right
            checked += 1

        g2s = enumerate_functors(c, a)
        g2 = rng.choice(g2s)
        maxs = max_structure(c, [(g2, s1)])
        hs = enumerate_functors(b, c)
        for h in rng.sample(hs, min(4, len(hs))):
            left = check_sketch_morphism(SketchMorphism(t, maxs, h)).valid
            right = check_sketch_morphism(SketchMorphism(t, s1, compose_functors(g2, h))).valid
            assert left == right
            checked += 1
    _status(f"criterion 2 (min/max characterization, 100 instances, {checked} checks): PASS")


# ---------------------------------------------------------------------------
# 3. Pseudo-(co)limit universal properties


_PROBES = ("ONE", "PAIR", "TERM")


def _morphism_keys(dom: Sketch, cod: Sketch) -> list[tuple]:
    return [m.functor.key() for m in enumerate_sketch_morphisms(dom, cod)]


def test_03_pseudo_limit_universal_properties():
    sketches = _corpus()
    probes = {n: sketches[n] for n in _PROBES}
    pairs = list(itertools.combinations_with_replacement(sorted(sketches), 2))

    for an, bn in pairs:
        a, b = sketches[an], sketches[bn]
        prod = product_sketch(a, b)
        p1, p2 = projection_functors(a.carrier, b.carrier)
        cop = coproduct_sketch(a, b)
        inl = FunctorData(
            a.carrier,
            cop.carrier,
            {x: tag("l", x) for x in a.carrier.objects},
            {f: tag("l", f) for f in a.carrier.arrows},
        )
        inr = FunctorData(
            b.carrier,
            cop.carrier,
            {x: tag("r", x) for x in b.carrier.objects},
            {f: tag("r", f) for f in b.carrier.arrows},
        )
        for x in probes.values():
            # Hom(X, A x B) ~ Hom(X, A) x Hom(X, B) via the projections
            into = enumerate_sketch_morphisms(x, prod)
            paired = {
                (compose_functors(p1, m.functor).key(), compose_functors(p2, m.functor).key())
                for m in into
            }
            assert len(paired) == len(into)
            expect = set(
                itertools.product(_morphism_keys(x, a), _morphism_keys(x, b))
            )
            assert paired == expect
            # Hom(A + B, X) ~ Hom(A, X) x Hom(B, X) via the injections
            outof = enumerate_sketch_morphisms(cop, x)
            copaired = {
                (compose_functors(m.functor, inl).key(), compose_functors(m.functor, inr).key())
                for m in outof
            }
            assert len(copaired) == len(outof)
            expect = set(
                itertools.product(_morphism_keys(a, x), _morphism_keys(b, x))
            )
            assert copaired == expect

    # powers: Hom(X, S^I) ~ functors I -> Hom-category(X, S)
    for sn in ("ONE", "TERM", "PAIR", "GRAPH", "COSPAN_COPROD"):
        s = sketches[sn]
        for shape_name in ("discrete2", "walking_arrow"):
            power = power_sketch(s, BUILTIN_SHAPES[shape_name])
            for x in probes.values():
                lhs = len(enumerate_sketch_morphisms(x, power))
                hom = _hom_category(x, s, 20_000)
                rhs = len(enumerate_functors(BUILTIN_SHAPES[shape_name], hom.cat))
                assert lhs == rhs

    # pseudo-pullbacks: Hom(X, P) ~ triples (u, v, iso h: f u => g v)
    one, pair = sketches["ONE"], sketches["PAIR"]
    to_u = SketchMorphism(one, pair, FunctorData(one.carrier, pair.carrier, {"pt": "u"}, {"id_pt": "id_u"}))
    to_v = SketchMorphism(one, pair, FunctorData(one.carrier, pair.carrier, {"pt": "v"}, {"id_pt": "id_v"}))
    for f, g in ((to_u, to_u), (to_u, to_v)):
        pb = pseudo_pullback_sketch(f, g).sketch
        for x in probes.values():
            lhs = len(enumerate_sketch_morphisms(x, pb))
            triples = 0
            for u in enumerate_sketch_morphisms(x, one):
                fu = compose_functors(f.functor, u.functor)
                for v in enumerate_sketch_morphisms(x, one):
                    gv = compose_functors(g.functor, v.functor)
                    triples += sum(1 for n in enumerate_naturals(fu, gv) if nat_is_iso(n))
            assert lhs == triples
    _status("criterion 3 (product/pullback/power/coproduct hom bijections): PASS")


# ---------------------------------------------------------------------------
# 4. Closedness


def test_04_closedness():
    s = _corpus()
    triples = [
        ("ONE", "ONE", "ONE"),
        ("ONE", "PAIR", "PAIR"),
        ("ONE", "TERM", "COSPAN_COPROD"),
        ("PAIR", "PAIR", "PAIR"),
        ("PAIR", "ONE", "COSPAN_COPROD"),
        ("ONE", "PAIR", "COSPAN_COPROD"),
    ]
    for dn, sn, tn in triples:
        w = verify_closedness(s[dn], s[sn], s[tn])
        assert set(w.obj_table) == set(w.lhs.cat.objects)
    _status(f"criterion 4 (closedness on {len(triples)} triples): PASS")


# ---------------------------------------------------------------------------
# 5. Duality


def _sketch_key(s: Sketch) -> tuple:
    return (
        s.carrier.objects,
        s.carrier.arrows,
        tuple(sorted(s.carrier.compose.items())),
        tuple(sp.key() for sp in s.L.specs),
        tuple(sp.key() for sp in s.C.specs),
    )


def test_05_duality():
    for name, s in _corpus().items():
        assert _sketch_key(dual_sketch(dual_sketch(s))) == _sketch_key(s), name
        assert _sketch_key(dual_sketch(forget_part("limit", s))) == _sketch_key(
            forget_part("colimit", dual_sketch(s))
        )
        assert _sketch_key(dual_sketch(forget_part("colimit", s))) == _sketch_key(
            forget_part("limit", dual_sketch(s))
        )
    _status("criterion 5 (dual involution and forgetful equations): PASS")


# ---------------------------------------------------------------------------
# 6. Chase soundness


def test_06_chase_soundness():
    sketches = _corpus()
    hosts = ("COSPAN_COPROD", "COSPAN_COPROD_BOGUS", "SITE_TRIV", "GRAPH")
    runs = 0
    saturated = 0
    for seed in range(200):
        rng = random.Random(5000 + seed)
        s = sketches[hosts[seed % len(hosts)]]
        sys_ = rho_system(s)
        p = oracles.random_presheaf(rng, s.carrier, fiber_bound=2)
        r = chase_reflect(sys_, p, 2000)
        runs += 1
        if r.status != "Saturated":
            continue
        saturated += 1
        assert is_orthogonal(sys_, r.presheaf)
        assert oracles.orthogonal_oracle(r.presheaf, s.C.specs)
        input_orth = oracles.orthogonal_oracle(p, s.C.specs)
        assert r.unit_is_iso() == input_orth
        assert is_orthogonal(sys_, p) == input_orth
        # monotone in budget: saturation is stable and the exact budget works
        again = chase_reflect(sys_, p, r.steps)
        assert again.status == "Saturated"
        assert again.presheaf.key() == r.presheaf.key()
        if r.steps > 0:
            assert chase_reflect(sys_, p, r.steps - 1).status == "BudgetExceeded"
    assert runs >= 200 and saturated >= 100
    _status(f"criterion 6 (chase soundness, {runs} presheaves, {saturated} saturated): PASS")


# ---------------------------------------------------------------------------
# 7. Classifier enumeration


def test_07_classifier_enumeration():
    sketches = _corpus()
    cc = sketches["COSPAN_COPROD"]
    assert len(enumerate_classifier(cc, 1)) == 4
    for name, s in sketches.items():
        got = {p.key() for p in enumerate_classifier(s, 2)}
        want = {
            p.key()
            for p in oracles.all_presheaves(s.carrier, 2)
            if oracles.orthogonal_oracle(p, s.C.specs)
        }
        assert got == want, name
    _status("criterion 7 (classifier enumeration vs filter oracle): PASS")


# ---------------------------------------------------------------------------
# 8. Left-normal stability


def test_08_left_normal_stability():
    for name, s in _corpus().items():
        sys_ = rho_system(s)
        for x in s.carrier.objects:
            r = reflect_representable(s, x, budget=500, sys=sys_)
            assert r.status == "Saturated" and r.unit_is_iso(), (name, x)
        v = left_normalize(s, budget=500)
        assert v.status == "Verified", name
        normalized, morphism = v.payload
        assert check_sketch_morphism(morphism).valid
        assert check_equivalence(morphism.functor).equivalence, name
    _status("criterion 8 (left-normal corpus: units iso, normalization equivalence): PASS")


# ---------------------------------------------------------------------------
# 9. Roundedness


def test_09_roundedness():
    from sketchlab.classifier import roundedness_check

    s = _corpus()
    assert roundedness_check(s["SITE_TRIV"], budget=200).status == "Verified"

    v = roundedness_check(s["COSPAN_COPROD_BOGUS"], budget=200)
    assert v.status == "Refuted"
    w = v.witness
    assert w["tip_size"] != w["limit_size"]
    assert w["tip"] in s["COSPAN_COPROD_BOGUS"].carrier.objects

    # nonempty L and C whose representables are not orthogonal: u claimed
    # initial, v claimed terminal, in the discrete two-object carrier
    two = s["PAIR"].carrier
    empty = BUILTIN_SHAPES["discrete0"]
    stuck = Sketch(
        two,
        Extensional((ConeSpec(empty, FunctorData(empty, two, {}, {}), "v", {}),)),
        Extensional((CoconeSpec(empty, FunctorData(empty, two, {}, {}), "u", {}),)),
    )
    from sketchlab.classifier import representable

    assert not is_orthogonal(rho_system(stuck), representable(stuck, "v"))
    assert roundedness_check(stuck, budget=0).status == "Unknown"
    _status("criterion 9 (roundedness verdicts Verified/Refuted/Unknown): PASS")


# ---------------------------------------------------------------------------
# 10. Diaconescu probe


def test_10_diaconescu_probe():
    for name, s in _corpus().items():
        v = diaconescu_probe(s, model_bound=2, fiber_bound=4, budget=300)
        assert v.status == "Verified", (name, v.status, v.reason)
    _status("criterion 10 (diaconescu probe at model bound 2): PASS")


# ---------------------------------------------------------------------------
# 11. Morita probe


def test_11_morita_probe():
    s = _corpus()
    cc = s["COSPAN_COPROD"]
    ident = SketchMorphism(
        cc,
        cc,
        FunctorData(
            cc.carrier,
            cc.carrier,
            {x: x for x in cc.carrier.objects},
            {a: a for a in cc.carrier.arrows},
        ),
    )
    assert morita_probe(ident, 2, 2).verdict == "EquivalentUpToBounds"

    pair = s["PAIR"]
    inc = SketchMorphism(
        pair,
        cc,
        FunctorData(pair.carrier, cc.carrier, {"u": "x", "v": "y"}, {"id_u": "id_x", "id_v": "id_y"}),
    )
    assert morita_probe(inc, 1, 2).verdict == "EquivalentUpToBounds"

    one = s["ONE"]
    point = SketchMorphism(
        one,
        pair,
        FunctorData(one.carrier, pair.carrier, {"pt": "u"}, {"id_pt": "id_u"}),
    )
    rep = morita_probe(point, 2, 2)
    assert rep.verdict == "RefutedWithWitness" and rep.witness
    _status("criterion 11 (morita probe verdicts): PASS")


# ---------------------------------------------------------------------------
# 12. CLI determinism


_GOLDEN_ARGS = [
    ["corpus", "list"],
    ["validate", "corpus:SITE_TRIV"],
    ["models", "corpus:TERM", "--bound", "2"],
    ["models", "corpus:COSPAN_COPROD", "--bound", "2"],
    ["rounded", "corpus:SITE_TRIV", "--budget", "100"],
    ["normalize", "corpus:GRAPH", "--budget", "0"],
    ["chase", "corpus:COSPAN_COPROD", "--presheaf", "representable:x", "--budget", "50"],
    ["dual", "corpus:COSPAN_COPROD"],
    ["limit", "corpus:SITE_TRIV", "--spec", "meet"],
]


def _run_cli(args: list[str]) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run_command(args)
    return code, buf.getvalue()


def test_12_cli_determinism():
    for args in _GOLDEN_ARGS:
        code1, out1 = _run_cli(args)
        code2, out2 = _run_cli(args)
        assert (code1, out1) == (code2, out2), args
    base_code, base_out = _run_cli(["models", "corpus:COSPAN_COPROD", "--bound", "2", "--workers", "1"])
    for workers in ("2", "4"):
        code, out = _run_cli(["models", "corpus:COSPAN_COPROD", "--bound", "2", "--workers", workers])
        assert (code, out) == (base_code, base_out)
    _status("criterion 12 (CLI byte determinism incl. workers 1/2/4): PASS")
