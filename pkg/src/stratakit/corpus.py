"""Access to the bundled fixture corpus."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .specfile import AlgebraSpec, parse_spec


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    file: str
    tags: tuple[str, ...]
    expect_error: str | None


def corpus_index() -> list[CorpusEntry]:
    raw = resources.files("stratakit.fixtures").joinpath("index.json").read_text()
    data = json.loads(raw)
    return [
        CorpusEntry(
            name=e["name"],
            file=e["file"],
            tags=tuple(e.get("tags", [])),
            expect_error=e.get("expect_error"),
        )
        for e in data["fixtures"]
    ]


def fixture_bytes(file: str) -> bytes:
    return resources.files("stratakit.fixtures").joinpath(file).read_bytes()


def load_fixture(name: str) -> AlgebraSpec:
    for entry in corpus_index():
        if entry.name == name:
            data = json.loads(fixture_bytes(entry.file))
            return parse_spec(data, name=entry.name)
    raise KeyError(f"no bundled fixture named {name}")
