"""Access to the data files shipped with the package."""

from __future__ import annotations

import json
from importlib.resources import files
from pathlib import Path

from .corpus import load_alias_map, load_word_list
from .intent import PhraseLexicon

__all__ = [
    "data_path",
    "default_gazetteer",
    "default_templates",
    "default_volitional_verbs",
    "default_stopwords",
    "demo_lexicon",
    "guideline_criteria",
    "guideline_text",
]

# Nationality self-report templates scanned by extract_country_mentions.
DEFAULT_TEMPLATES = (
    "i'm",
    "i am",
    "i am from",
    "i am a",
    "i am an",
    "i am in",
    "i am in the",
    "i am from the",
    "love from",
)


def data_path(name: str) -> Path:
    return Path(str(files("hopespeech").joinpath("data", name)))


def default_gazetteer() -> dict[str, str]:
    return load_alias_map(data_path("gazetteer.tsv"))


def default_templates() -> tuple[str, ...]:
    return DEFAULT_TEMPLATES


def default_volitional_verbs() -> list[str]:
    return load_word_list(data_path("volitional_verbs.tsv"))


def default_stopwords() -> set[str]:
    return set(load_word_list(data_path("stopwords_en.txt")))


def demo_lexicon() -> PhraseLexicon:
    return PhraseLexicon.from_tsv(data_path("demo_lexicon.tsv"))


def guideline_criteria() -> dict:
    return json.loads(data_path("hope_criteria.json").read_text(encoding="utf-8"))


def guideline_text() -> str:
    return data_path("annotation_guideline.md").read_text(encoding="utf-8")
