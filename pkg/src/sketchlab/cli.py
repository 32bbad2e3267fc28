"""Command-line driver.

Sketches and morphisms are referenced as ``corpus:NAME``, ``PATH`` (a file
holding exactly one sketch/morphism), or ``PATH:NAME``.  Every subcommand
prints one canonical JSON report on standard output; diagnostics go to
standard error.  Exit codes: 0 verified/success, 1 refuted/invalid,
2 unknown/budget exhausted, 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import corpus as corpus_mod
from .classifier import (
    ChaseResult,
    Presheaf,
    Verdict3,
    chase_reflect,
    density_check,
    diaconescu_probe,
    left_normalize,
    representable,
    rho_system,
    roundedness_check,
)
from .constructions import (
    coproduct_sketch,
    exponential_sketch,
    power_sketch,
    product_sketch,
    pseudo_pullback_sketch,
    split_idempotent,
    tensor_sketch,
    verify_closedness,
)
from .core import NatTransData, ValidityReport
from .dsl import DocumentEnv, FORMAT_VERSION, parse_sketch_file
from .errors import (
    IsoFailure,
    NotEquivalence,
    NotIdempotent,
    ParseError,
    ResolutionError,
    SketchlabError,
)
from .finset import FinSetMap, FinSetObj
from .models import MoritaReport, enumerate_models, morita_probe
from .shapes import BUILTIN_SHAPES
from .sketch import (
    Sketch,
    SketchMorphism,
    check_sketch_morphism,
    classify_sketch,
    dual_sketch,
    universality_check,
)

DEFAULT_BUDGET = 200


class UsageError(Exception):
    pass


def _default_budget() -> int:
    raw = os.environ.get("SKETCHLAB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"SKETCHLAB_BUDGET is not an integer: {raw!r}") from exc


# ---------------------------------------------------------------------------
# Reference resolution


@dataclass
class Ref:
    env: DocumentEnv
    name: str  # "" means "the only one"


def _split_ref(ref: str) -> Ref:
    if ref.startswith("corpus:"):
        name = ref[len("corpus:") :]
        return Ref(corpus_mod.corpus_env(name), name)
    if ":" in ref and not os.path.exists(ref):
        path, _, name = ref.rpartition(":")
    else:
        path, name = ref, ""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path!r}: {exc}") from exc
    return Ref(DocumentEnv(parse_sketch_file(text)), name)


def _sketch_ref(ref: str) -> tuple[DocumentEnv, str, Sketch]:
    r = _split_ref(ref)
    name = r.name
    if not name:
        names = r.env.sketch_names()
        if len(names) != 1:
            raise UsageError(f"{ref!r} does not name a unique sketch (found {names})")
        name = names[0]
    return r.env, name, r.env.sketch(name)


def _morphism_ref(ref: str) -> SketchMorphism:
    r = _split_ref(ref)
    name = r.name
    if not name:
        names = r.env.morphism_names()
        if len(names) != 1:
            raise UsageError(f"{ref!r} does not name a unique morphism (found {names})")
        name = names[0]
    return r.env.morphism(name)


def _presheaf_arg(s: Sketch, raw: str) -> Presheaf:
    if raw.startswith("representable:"):
        obj = raw[len("representable:") :]
        if obj not in s.carrier.objects:
            raise UsageError(f"unknown object {obj!r}")
        return representable(s, obj)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--presheaf is neither representable:OBJ nor JSON: {exc}") from exc
    c = s.carrier
    try:
        fibers = {x: FinSetObj(int(data[x])) for x in c.objects}
        restriction = {}
        for a in c.arrows:
            if c.is_identity(a):
                restriction[a] = FinSetMap(
                    fibers[c.src[a]], fibers[c.src[a]], tuple(range(fibers[c.src[a]].size))
                )
            else:
                restriction[a] = FinSetMap(
                    fibers[c.tgt[a]], fibers[c.src[a]], tuple(data["arrows"][a])
                )
        return Presheaf(c, fibers, restriction)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad presheaf data: {exc}") from exc


# ---------------------------------------------------------------------------
# Serialization


def _emit(payload: dict, code: int) -> int:
    payload = {"format_version": FORMAT_VERSION, **payload}
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return code


def _sketch_json(s: Sketch) -> dict:
    c = s.carrier

    def spec_json(sp):
        return {
            "shape_objects": list(sp.shape.objects),
            "shape_arrows": list(sp.shape.arrows),
            "diagram_objects": {x: sp.diagram.obj_map[x] for x in sp.shape.objects},
            "diagram_arrows": {a: sp.diagram.arr_map[a] for a in sp.shape.arrows},
            "tip": sp.tip,
            "legs": {x: sp.legs[x] for x in sp.shape.objects},
        }

    return {
        "objects": list(c.objects),
        "arrows": list(c.arrows),
        "src": dict(c.src),
        "tgt": dict(c.tgt),
        "compose": sorted([f, g, h] for (f, g), h in c.compose.items()),
        "cones": [spec_json(sp) for sp in s.L.specs] if hasattr(s.L, "specs") else "implicit",
        "cocones": [spec_json(sp) for sp in s.C.specs] if hasattr(s.C, "specs") else "implicit",
    }


def _validity_json(r: ValidityReport) -> dict:
    return {"valid": r.valid, "violations": list(r.violations)}


def _chase_json(r: ChaseResult) -> dict:
    return {
        "status": r.status,
        "steps": r.steps,
        "pushout_steps": r.pushout_steps,
        "merge_steps": r.merge_steps,
        "fibers": {x: r.presheaf.fibers[x].size for x in r.presheaf.base.objects},
        "restriction": {a: list(r.presheaf.restriction[a].table) for a in r.presheaf.base.arrows},
        "unit_iso": r.unit_is_iso() if r.status == "Saturated" else None,
    }


def _jsonable_witness(w) -> object:
    if w is None or isinstance(w, (str, int, float, bool)):
        return w
    if isinstance(w, dict):
        return {str(k): _jsonable_witness(v) for k, v in w.items()}
    if isinstance(w, (list, tuple)):
        return [_jsonable_witness(v) for v in w]
    return repr(w)


def _verdict_json(v: Verdict3, extra: dict | None = None) -> dict:
    out = {"status": v.status, "reason": v.reason, "witness": _jsonable_witness(v.witness)}
    if extra:
        out.update(extra)
    return out


def _verdict_code(status: str) -> int:
    return {"Verified": 0, "Refuted": 1, "Unknown": 2}[status]


def _morita_json(r: MoritaReport) -> dict:
    return {
        "verdict": r.verdict,
        "fully_faithful": r.fully_faithful,
        "essentially_surjective": r.essentially_surjective,
        "witness": r.witness,
    }


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_validate(args) -> int:
    r = _split_ref(args.ref)
    sketches = {}
    morphisms = {}
    ok = True
    for name in r.env.sketch_names():
        s = r.env.sketch(name)
        flags = classify_sketch(s)
        sketches[name] = {
            "normal": flags.normal,
            "left_normal": flags.left_normal,
            "right_normal": flags.right_normal,
            "limit_sketch": flags.limit_sketch,
            "colimit_sketch": flags.colimit_sketch,
            "small": flags.small,
        }
    for name in r.env.morphism_names():
        rep = check_sketch_morphism(r.env.morphism(name))
        morphisms[name] = _validity_json(rep)
        ok = ok and rep.valid
    return _emit({"sketches": sketches, "morphisms": morphisms, "valid": ok}, 0 if ok else 1)


def _cmd_models(args) -> int:
    _, _, s = _sketch_ref(args.ref)
    mc = enumerate_models(s, args.bound, workers=args.workers)
    models = [
        {
            "id": mid,
            "sizes": {x: m.size_of(x) for x in s.carrier.objects},
            "arrows": {a: m.assignment.arr_map[a] for a in s.carrier.arrows},
        }
        for mid, m in mc.models.items()
    ]
    return _emit({"count": len(models), "models": models}, 0)


def _cmd_check_map(args) -> int:
    rep = check_sketch_morphism(_morphism_ref(args.ref))
    return _emit(_validity_json(rep), 0 if rep.valid else 1)


def _cmd_universality(args, kind: str) -> int:
    env, name, s = _sketch_ref(args.ref)
    got_kind, spec = env.named_spec(name, args.spec)
    if got_kind != kind:
        raise UsageError(f"spec {args.spec!r} is a {got_kind}, not a {kind}")
    ok = universality_check(s.carrier, spec)
    return _emit({"spec": args.spec, "kind": kind, "universal": ok}, 0 if ok else 1)


def _cmd_binary(args, op) -> int:
    _, _, a = _sketch_ref(args.left)
    _, _, b = _sketch_ref(args.right)
    return _emit({"sketch": _sketch_json(op(a, b))}, 0)


def _cmd_pullback(args) -> int:
    f = _morphism_ref(args.left)
    g = _morphism_ref(args.right)
    res = pseudo_pullback_sketch(f, g)
    return _emit({"sketch": _sketch_json(res.sketch)}, 0)


def _cmd_power(args) -> int:
    _, _, s = _sketch_ref(args.ref)
    if args.shape not in BUILTIN_SHAPES:
        raise UsageError(f"unknown shape {args.shape!r}")
    return _emit({"sketch": _sketch_json(power_sketch(s, BUILTIN_SHAPES[args.shape]))}, 0)


def _cmd_dual(args) -> int:
    _, _, s = _sketch_ref(args.ref)
    return _emit({"sketch": _sketch_json(dual_sketch(s))}, 0)


def _cmd_closedness(args) -> int:
    _, _, d = _sketch_ref(args.d)
    _, _, s = _sketch_ref(args.s)
    _, _, t = _sketch_ref(args.t)
    try:
        w = verify_closedness(d, s, t)
    except IsoFailure as exc:
        return _emit({"status": "Refuted", "reason": str(exc)}, 1)
    return _emit(
        {
            "status": "Verified",
            "hom_objects": len(w.lhs.cat.objects),
            "obj_table": dict(w.obj_table),
        },
        0,
    )


def _cmd_split(args) -> int:
    e = _morphism_ref(args.ref)
    components = {}
    for part in args.theta.split(","):
        if "=" not in part:
            raise UsageError(f"--theta entry {part!r} is not of the form obj=arrow")
        k, _, v = part.partition("=")
        components[k.strip()] = v.strip()
    theta = NatTransData(e.functor, e.functor, components)
    try:
        res = split_idempotent(e, theta)
    except (NotIdempotent, NotEquivalence) as exc:
        return _emit({"status": "Refuted", "reason": str(exc)}, 1)
    return _emit({"status": "Verified", "sketch": _sketch_json(res.sketch)}, 0)


def _cmd_morita(args) -> int:
    f = _morphism_ref(args.ref)
    rep = morita_probe(f, args.src_bound, args.tgt_bound)
    return _emit(_morita_json(rep), 0 if rep.verdict == "EquivalentUpToBounds" else 1)


def _cmd_chase(args) -> int:
    _, _, s = _sketch_ref(args.ref)
    p = _presheaf_arg(s, args.presheaf)
    res = chase_reflect(rho_system(s), p, args.budget)
    return _emit(_chase_json(res), 0 if res.status == "Saturated" else 2)


def _cmd_normalize(args) -> int:
    _, _, s = _sketch_ref(args.ref)
    v = left_normalize(s, args.budget)
    extra = {}
    if v.status == "Verified":
        normalized, morphism = v.payload
        extra = {
            "objects": list(normalized.carrier.objects),
            "arrow_count": len(normalized.carrier.arrows),
            "on_objects": dict(morphism.functor.obj_map),
        }
    return _emit(_verdict_json(Verdict3(v.status, v.witness, v.reason), extra), _verdict_code(v.status))


def _cmd_rounded(args) -> int:
    _, _, s = _sketch_ref(args.ref)
    v = roundedness_check(s, args.budget)
    return _emit(_verdict_json(v), _verdict_code(v.status))


def _cmd_dense(args) -> int:
    f = _morphism_ref(args.ref)
    v = density_check(f.functor)
    return _emit(_verdict_json(v), _verdict_code(v.status))


def _cmd_diaconescu(args) -> int:
    _, _, s = _sketch_ref(args.ref)
    v = diaconescu_probe(s, args.model_bound, args.fiber_bound, args.budget)
    return _emit(_verdict_json(v), _verdict_code(v.status))


def _cmd_corpus(args) -> int:
    if args.action != "list":
        raise UsageError(f"unknown corpus action {args.action!r}")
    return _emit({"corpus": corpus_mod.corpus_names()}, 0)


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser(budget: int) -> _Parser:
    p = _Parser(prog="sketchlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate", _cmd_validate, help="resolve and classify a sketch document")
    sp.add_argument("ref")

    sp = add("models", _cmd_models, help="enumerate finite-set models")
    sp.add_argument("ref")
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--workers", type=int, default=1)

    sp = add("check-map", _cmd_check_map, help="validate a sketch morphism")
    sp.add_argument("ref")

    for kind in ("limit", "colimit"):
        sp = add(
            kind,
            (lambda a, k="cone" if kind == "limit" else "cocone": _cmd_universality(a, k)),
            help=f"check that a named {'cone' if kind == 'limit' else 'cocone'} is universal",
        )
        sp.add_argument("ref")
        sp.add_argument("--spec", required=True)

    for name, op in (
        ("product", product_sketch),
        ("coproduct", coproduct_sketch),
        ("tensor", tensor_sketch),
        ("exp", exponential_sketch),
    ):
        sp = add(name, (lambda a, o=op: _cmd_binary(a, o)), help=f"{name} of two sketches")
        sp.add_argument("left")
        sp.add_argument("right")

    sp = add("pullback", _cmd_pullback, help="pseudo-pullback of two sketch morphisms")
    sp.add_argument("left")
    sp.add_argument("right")

    sp = add("power", _cmd_power, help="power of a sketch by a shape category")
    sp.add_argument("ref")
    sp.add_argument("shape")

    sp = add("dual", _cmd_dual, help="dual sketch")
    sp.add_argument("ref")

    sp = add("closedness", _cmd_closedness, help="verify the exponential law on a triple")
    sp.add_argument("d")
    sp.add_argument("s")
    sp.add_argument("t")

    sp = add("split-idempotent", _cmd_split, help="split an idempotent sketch endomorphism")
    sp.add_argument("ref")
    sp.add_argument("--theta", required=True, help="comma-separated obj=arrow components")

    sp = add("morita", _cmd_morita, help="probe a morphism for Morita equivalence")
    sp.add_argument("ref")
    sp.add_argument("--src-bound", type=int, required=True)
    sp.add_argument("--tgt-bound", type=int, required=True)

    sp = add("chase", _cmd_chase, help="reflect a presheaf into the orthogonality class")
    sp.add_argument("ref")
    sp.add_argument("--presheaf", required=True, help="representable:OBJ or fiber/restriction JSON")
    sp.add_argument("--budget", type=int, default=budget)

    for name, fn in (("normalize", _cmd_normalize), ("rounded", _cmd_rounded)):
        sp = add(name, fn)
        sp.add_argument("ref")
        sp.add_argument("--budget", type=int, default=budget)

    sp = add("dense", _cmd_dense, help="check density of a morphism's underlying functor")
    sp.add_argument("ref")

    sp = add("diaconescu", _cmd_diaconescu, help="probe the reflection against all models")
    sp.add_argument("ref")
    sp.add_argument("--model-bound", type=int, required=True)
    sp.add_argument("--fiber-bound", type=int, required=True)
    sp.add_argument("--budget", type=int, default=budget)

    sp = add("corpus", _cmd_corpus, help="corpus utilities")
    sp.add_argument("action")

    return p


def run_command(argv: list[str]) -> int:
    try:
        parser = _build_parser(_default_budget())
        args = parser.parse_args(argv)
        return args.fn(args)
    except (UsageError, ParseError, ResolutionError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SketchlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
