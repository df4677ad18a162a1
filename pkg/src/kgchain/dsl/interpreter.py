"""Deterministic interpreter for validated KGQL programs.

Execution is total: given a program that passed validation, every
instruction executes and there is no runtime failure path.  Evidence is
the union of every triple matched by FOLLOW, FOLLOW_INV, or FILTER_HAS.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DslUsageError
from ..kg.graph import KnowledgeGraph, Triple, valid_name
from .program import DslProgram
from .validator import validate


@dataclass(frozen=True)
class ExecutionResult:
    result: frozenset[str]
    evidence: frozenset[Triple]
    steps_executed: int


def execute_traced(
    program: DslProgram, graph: KnowledgeGraph
) -> tuple[ExecutionResult, list[frozenset[str]]]:
    """Execute and also return the working set after every instruction."""
    report = validate(program, graph)
    if not report.ok:
        raise DslUsageError(f"refusing to execute an invalid program: {report.summary()}")

    working: frozenset[str] = frozenset()
    registers: dict[str, frozenset[str]] = {}
    evidence: set[Triple] = set()
    trace: list[frozenset[str]] = []
    steps = 0

    for ins in program.instructions:
        op = ins.opcode
        if op == "START":
            entity = ins.args[0]
            working = frozenset({entity}) if graph.has_entity(entity) else frozenset()
        elif op == "FOLLOW":
            working, matched = graph.follow(working, ins.args[0])
            evidence |= matched
        elif op == "FOLLOW_INV":
            working, matched = graph.follow_inverse(working, ins.args[0])
            evidence |= matched
        elif op == "SAVE":
            registers[ins.args[0]] = working
        elif op == "LOAD":
            working = registers[ins.args[0]]
        elif op == "INTERSECT":
            working = working & registers[ins.args[0]]
        elif op == "UNION":
            working = working | registers[ins.args[0]]
        elif op == "FILTER_HAS":
            relation, target = ins.args
            kept = set()
            for member in working:
                t = Triple(member, relation, target) if _constructible(member, relation, target) else None
                if t is not None and graph.contains(t):
                    kept.add(member)
                    evidence.add(t)
            working = frozenset(kept)
        elif op == "RETURN":
            pass
        steps += 1
        trace.append(working)

    return ExecutionResult(result=working, evidence=frozenset(evidence), steps_executed=steps), trace


def _constructible(s: str, r: str, o: str) -> bool:
    # FILTER_HAS arguments are unvalidated text; names a Triple cannot
    # represent (empty, padded, tab/newline) can never be graph edges.
    return valid_name(s) and valid_name(r) and valid_name(o)


def execute(program: DslProgram, graph: KnowledgeGraph) -> ExecutionResult:
    """Run a validated program; raises DslUsageError if validation fails."""
    result, _ = execute_traced(program, graph)
    return result
