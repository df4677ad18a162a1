# distutils: language = c++
# cython: boundscheck=False, wraparound=False
"""Compiled graph kernel; mirrors the interface of ``_pycore.PyGraphCore``.

Index keys pack (entity, relation) into a single 64-bit integer, so
entity and relation ids must stay below 2**32 (the facade interns ids
densely, making that bound unreachable in practice).
"""

from libc.stdint cimport uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector


cdef inline uint64_t _pack(int a, int b) noexcept:
    return (<uint64_t> <unsigned int> a << 32) | <uint64_t> <unsigned int> b


cdef class FastGraphCore:
    cdef vector[int] _s
    cdef vector[int] _r
    cdef vector[int] _o
    cdef unordered_map[uint64_t, vector[int]] _fwd
    cdef unordered_map[uint64_t, vector[int]] _inv
    cdef unordered_map[int, vector[int]] _adj

    @property
    def backend_name(self):
        return "compiled"

    def __init__(self, rows):
        cdef int i = 0
        cdef int s, r, o
        for s, r, o in rows:
            self._s.push_back(s)
            self._r.push_back(r)
            self._o.push_back(o)
            self._fwd[_pack(s, r)].push_back(i)
            self._inv[_pack(o, r)].push_back(i)
            self._adj[s].push_back(i)
            if o != s:
                self._adj[o].push_back(i)
            i += 1

    def match_forward(self, sources, int relation):
        cdef unordered_set[int] objects
        cdef vector[int] matched
        cdef int s, i
        cdef size_t k
        cdef uint64_t key
        for s in sources:
            key = _pack(s, relation)
            if self._fwd.count(key) == 0:
                continue
            for k in range(self._fwd[key].size()):
                i = self._fwd[key][k]
                matched.push_back(i)
                objects.insert(self._o[i])
        return [e for e in objects], [m for m in matched]

    def match_inverse(self, sinks, int relation):
        cdef unordered_set[int] subjects
        cdef vector[int] matched
        cdef int o, i
        cdef size_t k
        cdef uint64_t key
        for o in sinks:
            key = _pack(o, relation)
            if self._inv.count(key) == 0:
                continue
            for k in range(self._inv[key].size()):
                i = self._inv[key][k]
                matched.push_back(i)
                subjects.insert(self._s[i])
        return [e for e in subjects], [m for m in matched]

    def contains(self, int s, int r, int o):
        cdef uint64_t key = _pack(s, r)
        cdef size_t k
        if self._fwd.count(key) == 0:
            return False
        for k in range(self._fwd[key].size()):
            if self._o[self._fwd[key][k]] == o:
                return True
        return False

    def neighborhood_rows(self, int center, int hops):
        cdef unordered_set[int] seen_rows
        cdef unordered_set[int] visited
        cdef vector[int] frontier
        cdef vector[int] next_frontier
        cdef int step, e, i, other
        cdef size_t k, f
        visited.insert(center)
        frontier.push_back(center)
        for step in range(hops):
            next_frontier.clear()
            for f in range(frontier.size()):
                e = frontier[f]
                if self._adj.count(e) == 0:
                    continue
                for k in range(self._adj[e].size()):
                    i = self._adj[e][k]
                    seen_rows.insert(i)
                    other = self._o[i] if self._s[i] == e else self._s[i]
                    if visited.count(other) == 0:
                        visited.insert(other)
                        next_frontier.push_back(other)
            if next_frontier.empty():
                break
            frontier.swap(next_frontier)
        return sorted(seen_rows)
