"""Immutable in-memory triple store with forward and inverse indices.

Entities and relations are plain strings; a triple is a directed,
labelled edge.  The store is read-only after construction, which makes
it safe for unlimited concurrent readers.  Traversal work is delegated
to a kernel operating on interned integer ids (compiled when available,
pure Python otherwise).
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .backend import resolve_core

_FORBIDDEN = ("\t", "\n", "\r")


def _check_name(value: str, what: str) -> str:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{what} must be a non-empty string, got {value!r}")
    if value != value.strip():
        raise ValueError(f"{what} must not have leading/trailing whitespace: {value!r}")
    for ch in _FORBIDDEN:
        if ch in value:
            raise ValueError(f"{what} must not contain tab or newline characters: {value!r}")
    return value


def valid_name(value: str) -> bool:
    """True if ``value`` is usable as an entity or relation name."""
    try:
        _check_name(value, "name")
    except ValueError:
        return False
    return True


@dataclass(frozen=True, slots=True)
class Triple:
    """A directed edge: (subject, relation, object)."""

    subject: str
    relation: str
    object: str

    def __post_init__(self):
        _check_name(self.subject, "subject")
        _check_name(self.relation, "relation")
        _check_name(self.object, "object")

    def render(self) -> str:
        return f"{self.subject} | {self.relation} | {self.object}"


class KnowledgeGraph:
    """Deduplicated triple set plus (subject, relation) and (object, relation) indices."""

    def __init__(self, triples: Iterable[Triple], backend: str | None = None):
        entity_ids: dict[str, int] = {}
        relation_ids: dict[str, int] = {}

        def entity_id(name: str) -> int:
            return entity_ids.setdefault(name, len(entity_ids))

        rows: list[tuple[int, int, int]] = []
        seen: set[tuple[int, int, int]] = set()
        triple_list: list[Triple] = []
        for t in triples:
            row = (entity_id(t.subject), relation_ids.setdefault(t.relation, len(relation_ids)), entity_id(t.object))
            if row in seen:
                continue
            seen.add(row)
            rows.append(row)
            triple_list.append(t)

        self._entities = list(entity_ids)
        self._entity_ids = entity_ids
        self._relations = list(relation_ids)
        self._relation_ids = relation_ids
        self._triples = tuple(triple_list)
        self._triple_set = frozenset(triple_list)
        self._core = resolve_core(backend)(rows)

    @property
    def backend_name(self) -> str:
        return self._core.backend_name

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triple_set

    @property
    def entity_vocabulary(self) -> frozenset[str]:
        return frozenset(self._entities)

    @property
    def relation_vocabulary(self) -> frozenset[str]:
        return frozenset(self._relations)

    @property
    def num_triples(self) -> int:
        return len(self._triples)

    @property
    def num_entities(self) -> int:
        return len(self._entities)

    @property
    def num_relations(self) -> int:
        return len(self._relations)

    def has_entity(self, name: str) -> bool:
        return name in self._entity_ids

    def has_relation(self, name: str) -> bool:
        return name in self._relation_ids

    def relation_sample(self, limit: int = 50) -> list[str]:
        """Deterministic sample of the relation vocabulary for prompt building."""
        return sorted(self._relations)[:limit]

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self._triple_set == other._triple_set

    def __hash__(self):
        return hash(self._triple_set)

    def __repr__(self) -> str:
        return (
            f"KnowledgeGraph({self.num_triples} triples, {self.num_entities} entities, "
            f"{self.num_relations} relations, backend={self.backend_name})"
        )

    def _rows_to_triples(self, row_ids: Iterable[int]) -> frozenset[Triple]:
        return frozenset(self._triples[i] for i in row_ids)

    def _intern_sources(self, names: Iterable[str]) -> list[int]:
        ids = []
        for name in names:
            i = self._entity_ids.get(name)
            if i is not None:
                ids.append(i)
        return ids

    def follow(self, sources: Iterable[str], relation: str) -> tuple[frozenset[str], frozenset[Triple]]:
        """Objects reachable from ``sources`` over ``relation``, with the matched triples.

        Unknown relations or entities simply contribute nothing.
        """
        rel = self._relation_ids.get(relation)
        if rel is None:
            return frozenset(), frozenset()
        objects, rows = self._core.match_forward(self._intern_sources(sources), rel)
        return frozenset(self._entities[i] for i in objects), self._rows_to_triples(rows)

    def follow_inverse(self, sinks: Iterable[str], relation: str) -> tuple[frozenset[str], frozenset[Triple]]:
        """Subjects that reach ``sinks`` over ``relation``, with the matched triples."""
        rel = self._relation_ids.get(relation)
        if rel is None:
            return frozenset(), frozenset()
        subjects, rows = self._core.match_inverse(self._intern_sources(sinks), rel)
        return frozenset(self._entities[i] for i in subjects), self._rows_to_triples(rows)

    def contains(self, triple: Triple) -> bool:
        s = self._entity_ids.get(triple.subject)
        r = self._relation_ids.get(triple.relation)
        o = self._entity_ids.get(triple.object)
        if s is None or r is None or o is None:
            return False
        return self._core.contains(s, r, o)

    def neighborhood(self, center: str, hops: int) -> frozenset[Triple]:
        """All triples within ``hops`` undirected steps of ``center``."""
        if hops < 1:
            raise ValueError(f"hops must be >= 1, got {hops}")
        c = self._entity_ids.get(center)
        if c is None:
            return frozenset()
        return self._rows_to_triples(self._core.neighborhood_rows(c, hops))
