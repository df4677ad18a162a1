"""Pure-Python graph kernel.

Operates entirely on interned integer ids; the facade in ``graph.py``
owns the string<->id tables.  A row is the position of a triple in the
(s, r, o) row table handed to the constructor.  The compiled kernel in
``_fastcore.pyx`` implements the same interface.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence


class PyGraphCore:
    backend_name = "pure-python"

    def __init__(self, rows: Sequence[tuple[int, int, int]]):
        self._rows = list(rows)
        self._fwd: dict[tuple[int, int], list[int]] = {}
        self._inv: dict[tuple[int, int], list[int]] = {}
        self._adj: dict[int, list[int]] = {}
        for i, (s, r, o) in enumerate(self._rows):
            self._fwd.setdefault((s, r), []).append(i)
            self._inv.setdefault((o, r), []).append(i)
            self._adj.setdefault(s, []).append(i)
            if o != s:
                self._adj.setdefault(o, []).append(i)

    def match_forward(self, sources: Iterable[int], relation: int) -> tuple[list[int], list[int]]:
        """Rows whose subject is in ``sources`` under ``relation``.

        Returns (object ids, row ids); object ids are deduplicated.
        """
        objects: set[int] = set()
        matched: list[int] = []
        for s in sources:
            for i in self._fwd.get((s, relation), ()):
                matched.append(i)
                objects.add(self._rows[i][2])
        return list(objects), matched

    def match_inverse(self, sinks: Iterable[int], relation: int) -> tuple[list[int], list[int]]:
        """Rows whose object is in ``sinks`` under ``relation``."""
        subjects: set[int] = set()
        matched: list[int] = []
        for o in sinks:
            for i in self._inv.get((o, relation), ()):
                matched.append(i)
                subjects.add(self._rows[i][0])
        return list(subjects), matched

    def contains(self, s: int, r: int, o: int) -> bool:
        for i in self._fwd.get((s, r), ()):
            if self._rows[i][2] == o:
                return True
        return False

    def neighborhood_rows(self, center: int, hops: int) -> list[int]:
        """Row ids reachable from ``center`` within ``hops`` undirected steps."""
        seen_rows: set[int] = set()
        visited = {center}
        frontier = [center]
        for _ in range(hops):
            next_frontier: list[int] = []
            for e in frontier:
                for i in self._adj.get(e, ()):
                    seen_rows.add(i)
                    s, _, o = self._rows[i]
                    other = o if s == e else s
                    if other not in visited:
                        visited.add(other)
                        next_frontier.append(other)
            if not next_frontier:
                break
            frontier = next_frontier
        return sorted(seen_rows)
