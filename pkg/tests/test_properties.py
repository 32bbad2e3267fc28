"""Randomized invariants driven by hypothesis."""

from __future__ import annotations

import random

from hypothesis import given, settings, strategies as st

import oracles
from sketchlab.classifier import chase_reflect, is_orthogonal, rho_system
from sketchlab.corpus import corpus_sketch
from sketchlab.finset import colimit_finset, is_colimit_cocone, is_limit_cone, limit_finset
from sketchlab.shapes import BUILTIN_SHAPES

_SETTINGS = settings(max_examples=60, deadline=None, database=None)


@given(st.integers(0, 10**9), st.sampled_from(oracles.ORACLE_SHAPES))
@_SETTINGS
def test_limit_colimit_are_universal(seed, shape_name):
    rng = random.Random(seed)
    d = oracles.random_finset_diagram(rng, BUILTIN_SHAPES[shape_name])
    if d is None:
        return
    lim = limit_finset(d)
    assert is_limit_cone(d, lim.apex, lim.projections)
    col = colimit_finset(d)
    assert is_colimit_cocone(d, col.apex, col.injections)


@given(st.integers(0, 10**9), st.sampled_from(oracles.ORACLE_SHAPES))
@_SETTINGS
def test_limit_matches_brute_force(seed, shape_name):
    rng = random.Random(seed)
    d = oracles.random_finset_diagram(rng, BUILTIN_SHAPES[shape_name])
    if d is None:
        return
    objs = list(d.shape.objects)
    fams = {tuple(a[x] for x in objs) for a in oracles.brute_limit_families(d)}
    assert set(limit_finset(d).tuples) == fams
    assert colimit_finset(d).apex.size == len(oracles.brute_colimit_partition(d))


@given(st.integers(0, 10**9), st.sampled_from(("COSPAN_COPROD", "SITE_TRIV", "COSPAN_COPROD_BOGUS")))
@_SETTINGS
def test_chase_idempotent_and_sound(seed, name):
    s = corpus_sketch(name)
    sys_ = rho_system(s)
    p = oracles.random_presheaf(random.Random(seed), s.carrier, fiber_bound=2)
    r = chase_reflect(sys_, p, 1000)
    if r.status != "Saturated":
        return
    assert is_orthogonal(sys_, r.presheaf)
    again = chase_reflect(sys_, r.presheaf, 1000)
    assert again.status == "Saturated" and again.steps == 0
    assert again.presheaf.key() == r.presheaf.key()


@given(st.integers(0, 10**9))
@_SETTINGS
def test_orthogonality_agrees_with_oracle(seed):
    s = corpus_sketch("COSPAN_COPROD")
    sys_ = rho_system(s)
    p = oracles.random_presheaf(random.Random(seed), s.carrier, fiber_bound=2)
    assert is_orthogonal(sys_, p) == oracles.orthogonal_oracle(p, s.C.specs)
