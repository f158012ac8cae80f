"""Bundled example cores and languages.

The lookup directory defaults to the package ``data`` folder and can be
overridden with the ``COREWIDTH_CORPUS`` environment variable.
"""

from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path

from .core import BinaryCore
from .io import core_from_json, language_from_json, read_json
from .relalg.relation import Relation

CORES = ("equality", "random_graph", "liberal_digraph", "henson_p7", "two_cliques")
LANGUAGES = ("graph_clauses", "neq_clauses", "two_cliques", "en_ne_liberal")


def corpus_dir() -> Path:
    env = os.environ.get("COREWIDTH_CORPUS")
    return Path(env) if env else Path(__file__).with_name("data")


@lru_cache(maxsize=None)
def _core(path: str) -> BinaryCore:
    return core_from_json(read_json(path), where=path)


def load_core(name: str) -> BinaryCore:
    return _core(str(corpus_dir() / f"core_{name}.json"))


def load_language(name: str) -> tuple[BinaryCore, dict[str, Relation]]:
    """A language together with the core it is declared over."""
    path = corpus_dir() / f"lang_{name}.json"
    doc = read_json(path)
    core = load_core(doc["core"])
    return core, language_from_json(doc, core, where=str(path))
