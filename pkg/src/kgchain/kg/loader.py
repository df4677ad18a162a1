"""Graph loading from TSV and JSONL streams.

TSV: one ``subject<TAB>relation<TAB>object`` triple per line, UTF-8;
``#``-prefixed lines are comments and blank lines are ignored.
JSONL: one object per line with exactly the string keys ``s``, ``r``, ``o``.
Duplicate triples are deduplicated; line order never affects the result.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from typing import IO

from ..errors import GraphLoadError
from .graph import KnowledgeGraph, Triple

FORMATS = ("tsv", "jsonl")


def _decode_lines(source: IO | Iterable[str]) -> list[str]:
    data = source.read() if hasattr(source, "read") else None
    if data is None:
        return [line.rstrip("\n").rstrip("\r") for line in source]
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphLoadError(f"stream is not valid UTF-8: {exc}") from exc
    return data.splitlines()

def _field(value: str, line_no: int, line: str, what: str) -> str:
    if not value:
        raise GraphLoadError(f"empty {what} field", line_no, line)
    if value != value.strip():
        raise GraphLoadError(f"{what} field has leading/trailing whitespace", line_no, line)
    return value


def parse_tsv_lines(lines: Iterable[str]) -> list[Triple]:
    triples = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise GraphLoadError(f"expected 3 tab-separated fields, got {len(fields)}", line_no, line)
        s, r, o = (_field(f, line_no, line, w) for f, w in zip(fields, ("subject", "relation", "object")))
        try:
            triples.append(Triple(s, r, o))
        except ValueError as exc:
            raise GraphLoadError(str(exc), line_no, line) from exc
    return triples


def parse_jsonl_lines(lines: Iterable[str]) -> list[Triple]:
    triples = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise GraphLoadError(f"invalid JSON: {exc.msg}", line_no, line) from exc
        if not isinstance(obj, dict) or set(obj) != {"s", "r", "o"}:
            raise GraphLoadError('expected an object with exactly the keys "s", "r", "o"', line_no, line)
        if not all(isinstance(obj[k], str) for k in ("s", "r", "o")):
            raise GraphLoadError("triple fields must all be strings", line_no, line)
        try:
            triples.append(Triple(obj["s"], obj["r"], obj["o"]))
        except ValueError as exc:
            raise GraphLoadError(str(exc), line_no, line) from exc
    return triples


def load_graph(source: IO | Iterable[str], format: str = "tsv", backend: str | None = None) -> KnowledgeGraph:
    """Build a graph from a byte/text stream; an empty stream yields an empty graph."""
    if format not in FORMATS:
        raise ValueError(f"unknown graph format {format!r}; expected one of {FORMATS}")
    lines = _decode_lines(source)
    parse = parse_tsv_lines if format == "tsv" else parse_jsonl_lines
    return KnowledgeGraph(parse(lines), backend=backend)


def load_graph_path(path: str, format: str | None = None, backend: str | None = None) -> KnowledgeGraph:
    """Load from a file path, inferring the format from the extension when not given."""
    if format is None:
        format = "jsonl" if path.endswith((".jsonl", ".json")) else "tsv"
    with open(path, "rb") as fh:
        return load_graph(fh, format=format, backend=backend)
