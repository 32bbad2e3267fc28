"""Textual sketch format and its JSON mirror.

Grammar (``#`` starts a line comment, names are identifiers):

    category NAME { objects: a, b; arrows: f: a -> b; relations: p = q; }
    sketch NAME on CAT {
      cone NAME { shape: SHAPE; diagram: d0 -> a; tip: t; legs: d0 -> f; }
      cocone NAME { ... }
    }
    morphism NAME : S -> T { objects: a -> b; arrows: f -> g; }

``SHAPE`` is a built-in shape name or a category declared in the same
document.  Arrow values may be composite paths with the explicit ``;``
separator.  Parsing is recursive descent with line/column diagnostics.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from .core import CatPresentation, FinCategory, FunctorData, compile_presentation
from .errors import ParseError, ResolutionError
from .shapes import BUILTIN_SHAPES
from .sketch import ConeSpec, CoconeSpec, Extensional, Sketch, SketchMorphism

FORMAT_VERSION = 1

KEYWORDS = {"category", "sketch", "morphism", "cone", "cocone", "on"}
CLAUSES = {"objects", "arrows", "relations", "shape", "diagram", "tip", "legs"}


# ---------------------------------------------------------------------------
# Document model


@dataclass(frozen=True)
class CategoryBlock:
    name: str
    objects: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...] = ()  # (name, src, tgt)
    relations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()


@dataclass(frozen=True)
class SpecBlock:
    kind: str  # "cone" | "cocone"
    name: str
    shape: str
    diagram: tuple[tuple[str, tuple[str, ...]], ...]
    tip: str
    legs: tuple[tuple[str, tuple[str, ...]], ...]


@dataclass(frozen=True)
class SketchBlock:
    name: str
    carrier: str
    specs: tuple[SpecBlock, ...] = ()


@dataclass(frozen=True)
class MorphismBlock:
    name: str
    dom: str
    cod: str
    objects: tuple[tuple[str, str], ...] = ()
    arrows: tuple[tuple[str, tuple[str, ...]], ...] = ()


@dataclass(frozen=True)
class SketchDocument:
    categories: tuple[CategoryBlock, ...] = ()
    sketches: tuple[SketchBlock, ...] = ()
    morphisms: tuple[MorphismBlock, ...] = ()


# ---------------------------------------------------------------------------
# Tokenizer


_TOKEN_RE = re.compile(r"->|[{}:;,=]|[A-Za-z_][A-Za-z0-9_]*|\S")


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for m in _TOKEN_RE.finditer(body):
            t = m.group(0)
            if not (t == "->" or t in "{}:;,=" or t[0].isalpha() or t[0] == "_"):
                raise ParseError(f"unexpected character {t!r}", lineno, m.start() + 1)
            out.append(Token(t, lineno, m.start() + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> Optional[Token]:
        k = self.pos + ahead
        return self.tokens[k] if k < len(self.tokens) else None

    def _fail(self, expected: str):
        t = self.peek()
        if t is None:
            last = self.tokens[-1] if self.tokens else Token("", 1, 1)
            raise ParseError(f"unexpected end of input, expected {expected}", last.line, last.column)
        raise ParseError(f"expected {expected}, found {t.text!r}", t.line, t.column)

    def take(self, text: Optional[str] = None) -> Token:
        t = self.peek()
        if t is None or (text is not None and t.text != text):
            self._fail(repr(text) if text else "a token")
        self.pos += 1
        return t

    def name(self, what: str = "a name") -> str:
        t = self.peek()
        if t is None or not (t.text[0].isalpha() or t.text[0] == "_") or t.text in KEYWORDS:
            self._fail(what)
        self.pos += 1
        return t.text

    def path(self) -> tuple[str, ...]:
        parts = [self.name("an arrow name")]
        while True:
            t, n = self.peek(), self.peek(1)
            if t is None or t.text != ";" or n is None:
                break
            nt = n.text
            if not (nt[0].isalpha() or nt[0] == "_") or nt in KEYWORDS:
                break
            after = self.peek(2)
            if nt in CLAUSES and after is not None and after.text == ":":
                break  # the ';' terminated the clause; a new clause starts
            self.take(";")
            parts.append(self.name("an arrow name"))
        return tuple(parts)

    # clause bodies -------------------------------------------------------

    def name_list(self) -> tuple[str, ...]:
        if self.peek() and self.peek().text == ";":
            self.take(";")
            return ()
        out = [self.name()]
        while self.peek() and self.peek().text == ",":
            self.take(",")
            out.append(self.name())
        self.take(";")
        return tuple(out)

    def arrow_decls(self) -> tuple[tuple[str, str, str], ...]:
        if self.peek() and self.peek().text == ";":
            self.take(";")
            return ()
        out = []
        while True:
            n = self.name("an arrow name")
            self.take(":")
            s = self.name("a source object")
            self.take("->")
            t = self.name("a target object")
            out.append((n, s, t))
            if self.peek() and self.peek().text == ",":
                self.take(",")
                continue
            break
        self.take(";")
        return tuple(out)

    def relation_list(self):
        if self.peek() and self.peek().text == ";":
            self.take(";")
            return ()
        out = []
        while True:
            lhs = self.path()
            self.take("=")
            rhs = self.path()
            out.append((lhs, rhs))
            if self.peek() and self.peek().text == ",":
                self.take(",")
                continue
            break
        self.take(";")
        return tuple(out)

    def mapping_list(self):
        """Entries ``name -> path`` separated by commas."""
        if self.peek() and self.peek().text == ";":
            self.take(";")
            return ()
        out = []
        while True:
            k = self.name()
            self.take("->")
            out.append((k, self.path()))
            if self.peek() and self.peek().text == ",":
                self.take(",")
                continue
            break
        self.take(";")
        return tuple(out)

    # blocks --------------------------------------------------------------

    def category_block(self) -> CategoryBlock:
        name = self.name("a category name")
        self.take("{")
        objects: tuple[str, ...] = ()
        arrows: tuple = ()
        relations: tuple = ()
        while self.peek() and self.peek().text != "}":
            clause = self.name("a clause (objects/arrows/relations)")
            self.take(":")
            if clause == "objects":
                objects = self.name_list()
            elif clause == "arrows":
                arrows = self.arrow_decls()
            elif clause == "relations":
                relations = self.relation_list()
            else:
                t = self.tokens[self.pos - 2]
                raise ParseError(f"unknown clause {clause!r} in category", t.line, t.column)
        self.take("}")
        return CategoryBlock(name, objects, arrows, relations)

    def spec_block(self, kind: str) -> SpecBlock:
        name = self.name(f"a {kind} name")
        self.take("{")
        shape = tip = None
        diagram: tuple = ()
        legs: tuple = ()
        while self.peek() and self.peek().text != "}":
            clause = self.name("a clause (shape/diagram/tip/legs)")
            self.take(":")
            if clause == "shape":
                shape = self.name("a shape name")
                self.take(";")
            elif clause == "diagram":
                diagram = self.mapping_list()
            elif clause == "tip":
                tip = self.name("a tip object")
                self.take(";")
            elif clause == "legs":
                legs = self.mapping_list()
            else:
                t = self.tokens[self.pos - 2]
                raise ParseError(f"unknown clause {clause!r} in {kind}", t.line, t.column)
        end = self.take("}")
        if shape is None:
            raise ParseError(f"{kind} {name!r} is missing its shape", end.line, end.column)
        if tip is None:
            raise ParseError(f"{kind} {name!r} is missing its tip", end.line, end.column)
        return SpecBlock(kind, name, shape, diagram, tip, legs)

    def sketch_block(self) -> SketchBlock:
        name = self.name("a sketch name")
        self.take("on")
        carrier = self.name("a carrier category name")
        self.take("{")
        specs = []
        while self.peek() and self.peek().text != "}":
            t = self.peek()
            if t.text in ("cone", "cocone"):
                self.take()
                specs.append(self.spec_block(t.text))
            else:
                self._fail("'cone' or 'cocone'")
        self.take("}")
        return SketchBlock(name, carrier, tuple(specs))

    def morphism_block(self) -> MorphismBlock:
        name = self.name("a morphism name")
        self.take(":")
        dom = self.name("a source sketch name")
        self.take("->")
        cod = self.name("a target sketch name")
        self.take("{")
        objects: tuple = ()
        arrows: tuple = ()
        while self.peek() and self.peek().text != "}":
            clause = self.name("a clause (objects/arrows)")
            self.take(":")
            if clause == "objects":
                objects = tuple((k, p[0]) for k, p in self.mapping_list())
            elif clause == "arrows":
                arrows = self.mapping_list()
            else:
                t = self.tokens[self.pos - 2]
                raise ParseError(f"unknown clause {clause!r} in morphism", t.line, t.column)
        self.take("}")
        return MorphismBlock(name, dom, cod, objects, arrows)

    def document(self) -> SketchDocument:
        categories, sketches, morphisms = [], [], []
        while self.peek() is not None:
            t = self.take()
            if t.text == "category":
                categories.append(self.category_block())
            elif t.text == "sketch":
                sketches.append(self.sketch_block())
            elif t.text == "morphism":
                morphisms.append(self.morphism_block())
            else:
                raise ParseError(
                    f"expected 'category', 'sketch' or 'morphism', found {t.text!r}",
                    t.line,
                    t.column,
                )
        return SketchDocument(tuple(categories), tuple(sketches), tuple(morphisms))


def parse_sketch_file(text: str) -> SketchDocument:
    return _Parser(text).document()


# ---------------------------------------------------------------------------
# JSON mirror


def document_to_jsonable(doc: SketchDocument) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "categories": [
            {
                "name": c.name,
                "objects": list(c.objects),
                "arrows": [list(a) for a in c.arrows],
                "relations": [[list(l), list(r)] for l, r in c.relations],
            }
            for c in doc.categories
        ],
        "sketches": [
            {
                "name": s.name,
                "carrier": s.carrier,
                "specs": [
                    {
                        "kind": sp.kind,
                        "name": sp.name,
                        "shape": sp.shape,
                        "diagram": [[k, list(v)] for k, v in sp.diagram],
                        "tip": sp.tip,
                        "legs": [[k, list(v)] for k, v in sp.legs],
                    }
                    for sp in s.specs
                ],
            }
            for s in doc.sketches
        ],
        "morphisms": [
            {
                "name": m.name,
                "dom": m.dom,
                "cod": m.cod,
                "objects": [list(e) for e in m.objects],
                "arrows": [[k, list(v)] for k, v in m.arrows],
            }
            for m in doc.morphisms
        ],
    }


def document_from_jsonable(data: dict) -> SketchDocument:
    return SketchDocument(
        categories=tuple(
            CategoryBlock(
                c["name"],
                tuple(c["objects"]),
                tuple(tuple(a) for a in c["arrows"]),
                tuple((tuple(l), tuple(r)) for l, r in c["relations"]),
            )
            for c in data.get("categories", ())
        ),
        sketches=tuple(
            SketchBlock(
                s["name"],
                s["carrier"],
                tuple(
                    SpecBlock(
                        sp["kind"],
                        sp["name"],
                        sp["shape"],
                        tuple((k, tuple(v)) for k, v in sp["diagram"]),
                        sp["tip"],
                        tuple((k, tuple(v)) for k, v in sp["legs"]),
                    )
                    for sp in s["specs"]
                ),
            )
            for s in data.get("sketches", ())
        ),
        morphisms=tuple(
            MorphismBlock(
                m["name"],
                m["dom"],
                m["cod"],
                tuple(tuple(e) for e in m["objects"]),
                tuple((k, tuple(v)) for k, v in m["arrows"]),
            )
            for m in data.get("morphisms", ())
        ),
    )


def serialize(value) -> str:
    """Canonical JSON for documents and reports (stable key order)."""
    if isinstance(value, SketchDocument):
        value = document_to_jsonable(value)
    return json.dumps(value, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Resolution


def _resolve_path(cat: FinCategory, path: tuple[str, ...], where: str) -> str:
    cur = None
    for seg in path:
        if seg not in cat.src:
            raise ResolutionError(f"{where}: unknown arrow {seg!r}")
        cur = seg if cur is None else cat.compose.get((cur, seg))
        if cur is None:
            raise ResolutionError(f"{where}: path does not compose at {seg!r}")
    return cur


class DocumentEnv:
    """Resolved view of a document: compiled categories, sketches, morphisms."""

    def __init__(self, doc: SketchDocument):
        self.doc = doc
        self._cats: dict[str, FinCategory] = {}
        self._sketches: dict[str, Sketch] = {}
        self._cat_blocks = {c.name: c for c in doc.categories}
        self._sketch_blocks = {s.name: s for s in doc.sketches}
        self._morphism_blocks = {m.name: m for m in doc.morphisms}

    def category(self, name: str) -> FinCategory:
        if name in self._cats:
            return self._cats[name]
        if name in self._cat_blocks:
            c = self._cat_blocks[name]
            cat = compile_presentation(
                CatPresentation(c.objects, c.arrows, c.relations)
            )
        elif name in BUILTIN_SHAPES:
            cat = BUILTIN_SHAPES[name]
        else:
            raise ResolutionError(f"unknown category or shape {name!r}")
        self._cats[name] = cat
        return cat

    def _resolve_spec(self, carrier: FinCategory, sp: SpecBlock):
        shape = self.category(sp.shape)
        obj_map: dict[str, str] = {}
        arr_explicit: dict[str, str] = {}
        for k, path in sp.diagram:
            if k in shape.identity:  # an object entry
                target = path[0]
                if len(path) != 1 or target not in carrier.identity:
                    raise ResolutionError(
                        f"spec {sp.name!r}: diagram object {k!r} must map to an object"
                    )
                obj_map[k] = target
            elif k in shape.src:
                arr_explicit[k] = _resolve_path(carrier, path, f"spec {sp.name!r}")
            else:
                raise ResolutionError(f"spec {sp.name!r}: {k!r} is not in shape {sp.shape!r}")
        missing = [x for x in shape.objects if x not in obj_map]
        if missing:
            raise ResolutionError(f"spec {sp.name!r}: diagram misses objects {missing}")
        arr_map: dict[str, str] = {}
        for a in shape.arrows:
            if a in arr_explicit:
                arr_map[a] = arr_explicit[a]
            elif shape.is_identity(a):
                arr_map[a] = carrier.identity[obj_map[shape.src[a]]]
            else:
                cands = carrier.hom(obj_map[shape.src[a]], obj_map[shape.tgt[a]])
                if len(cands) != 1:
                    raise ResolutionError(
                        f"spec {sp.name!r}: diagram arrow {a!r} is ambiguous or impossible"
                    )
                arr_map[a] = cands[0]
        diagram = FunctorData(shape, carrier, obj_map, arr_map)
        if sp.tip not in carrier.identity:
            raise ResolutionError(f"spec {sp.name!r}: unknown tip {sp.tip!r}")
        legs = {k: _resolve_path(carrier, path, f"spec {sp.name!r}") for k, path in sp.legs}
        for x in shape.objects:
            if x not in legs:
                want = (
                    carrier.hom(sp.tip, obj_map[x])
                    if sp.kind == "cone"
                    else carrier.hom(obj_map[x], sp.tip)
                )
                if len(want) != 1:
                    raise ResolutionError(f"spec {sp.name!r}: leg at {x!r} is ambiguous or missing")
                legs[x] = want[0]
        cls = ConeSpec if sp.kind == "cone" else CoconeSpec
        try:
            return cls(shape, diagram, sp.tip, legs)
        except ValueError as exc:
            raise ResolutionError(f"spec {sp.name!r}: {exc}") from exc

    def named_spec(self, sketch_name: str, spec_name: str):
        """Resolve one cone/cocone of a sketch block by its declared name."""
        if sketch_name not in self._sketch_blocks:
            raise ResolutionError(f"unknown sketch {sketch_name!r}")
        block = self._sketch_blocks[sketch_name]
        carrier = self.category(block.carrier)
        for sp in block.specs:
            if sp.name == spec_name:
                return sp.kind, self._resolve_spec(carrier, sp)
        raise ResolutionError(f"sketch {sketch_name!r} has no spec {spec_name!r}")

    def sketch_names(self) -> list[str]:
        return [s.name for s in self.doc.sketches]

    def morphism_names(self) -> list[str]:
        return [m.name for m in self.doc.morphisms]

    def sketch(self, name: str) -> Sketch:
        if name in self._sketches:
            return self._sketches[name]
        if name not in self._sketch_blocks:
            raise ResolutionError(f"unknown sketch {name!r}")
        block = self._sketch_blocks[name]
        carrier = self.category(block.carrier)
        cones = tuple(
            self._resolve_spec(carrier, sp) for sp in block.specs if sp.kind == "cone"
        )
        cocones = tuple(
            self._resolve_spec(carrier, sp) for sp in block.specs if sp.kind == "cocone"
        )
        s = Sketch(carrier, Extensional(cones), Extensional(cocones))
        self._sketches[name] = s
        return s

    def morphism(self, name: str) -> SketchMorphism:
        if name not in self._morphism_blocks:
            raise ResolutionError(f"unknown morphism {name!r}")
        m = self._morphism_blocks[name]
        dom, cod = self.sketch(m.dom), self.sketch(m.cod)
        dc, cc = dom.carrier, cod.carrier
        obj_map = dict(m.objects)
        for x in dc.objects:
            if x not in obj_map:
                raise ResolutionError(f"morphism {name!r}: object {x!r} unassigned")
            if obj_map[x] not in cc.identity:
                raise ResolutionError(f"morphism {name!r}: unknown target object {obj_map[x]!r}")
        explicit = {k: _resolve_path(cc, p, f"morphism {name!r}") for k, p in m.arrows}
        arr_map: dict[str, str] = {}
        for a in dc.arrows:
            if a in explicit:
                arr_map[a] = explicit[a]
            elif dc.is_identity(a):
                arr_map[a] = cc.identity[obj_map[dc.src[a]]]
            elif ";" in a and all(seg in arr_map or seg in explicit for seg in a.split(";")):
                segs = a.split(";")
                cur = arr_map.get(segs[0], explicit.get(segs[0]))
                for seg in segs[1:]:
                    cur = cc.then(cur, arr_map.get(seg, explicit.get(seg)))
                arr_map[a] = cur
            else:
                raise ResolutionError(f"morphism {name!r}: arrow {a!r} unassigned")
        return SketchMorphism(dom, cod, FunctorData(dc, cc, obj_map, arr_map))
