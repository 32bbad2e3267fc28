"""Bundled example sketch documents."""

from __future__ import annotations

from importlib import resources

from ..dsl import DocumentEnv, SketchDocument, parse_sketch_file

_FILES = {
    "ONE": "one.skt",
    "TERM": "term.skt",
    "PAIR": "pair.skt",
    "GRAPH": "graph.skt",
    "COSPAN_COPROD": "cospan_coprod.skt",
    "COSPAN_COPROD_BOGUS": "cospan_coprod_bogus.skt",
    "SITE_TRIV": "site_triv.skt",
}


def corpus_names() -> list[str]:
    return sorted(_FILES)


def corpus_text(name: str) -> str:
    if name not in _FILES:
        raise KeyError(f"no corpus entry {name!r}")
    return (resources.files(__name__) / _FILES[name]).read_text()


def load_corpus(name: str) -> SketchDocument:
    return parse_sketch_file(corpus_text(name))


def corpus_env(name: str) -> DocumentEnv:
    return DocumentEnv(load_corpus(name))


def corpus_sketch(name: str):
    """The sketch in the named corpus file that shares its name."""
    return corpus_env(name).sketch(name)
