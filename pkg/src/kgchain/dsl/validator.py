"""Static validation of a parsed program against a specific graph.

Issues are data, not failures: an unknown relation on FOLLOW/FOLLOW_INV
(it could never match anything) and register reads without a prior SAVE
are flagged; structural rules are re-checked so that programs built
in code, bypassing the parser, get the same guarantees.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..kg.graph import KnowledgeGraph
from .program import ARITY, MAX_PROGRAM_LENGTH, DslProgram

UNKNOWN_RELATION = "unknown-relation"
UNKNOWN_REGISTER = "unknown-register"
STRUCTURAL = "structural"


@dataclass(frozen=True)
class ValidationIssue:
    index: int  # instruction position, 0-based; -1 for whole-program issues
    kind: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[ValidationIssue, ...]

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"[{i.index}] {i.kind}: {i.message}" for i in self.issues)


def validate(program: DslProgram, graph: KnowledgeGraph) -> ValidationReport:
    issues: list[ValidationIssue] = []

    instructions = program.instructions
    if not instructions:
        issues.append(ValidationIssue(-1, STRUCTURAL, "program is empty"))
    else:
        if instructions[0].opcode != "START":
            issues.append(ValidationIssue(0, STRUCTURAL, "program must begin with START"))
        returns = [i for i, ins in enumerate(instructions) if ins.opcode == "RETURN"]
        if len(returns) != 1 or returns[0] != len(instructions) - 1:
            issues.append(ValidationIssue(len(instructions) - 1, STRUCTURAL, "program must end with its single RETURN"))
        if len(instructions) > MAX_PROGRAM_LENGTH:
            issues.append(
                ValidationIssue(-1, STRUCTURAL, f"program exceeds the {MAX_PROGRAM_LENGTH}-instruction budget")
            )

    saved: set[str] = set()
    for index, ins in enumerate(instructions):
        if len(ins.args) != ARITY.get(ins.opcode, -1):
            issues.append(ValidationIssue(index, STRUCTURAL, f"bad arity for {ins.opcode}"))
            continue
        if ins.opcode in ("FOLLOW", "FOLLOW_INV") and not graph.has_relation(ins.args[0]):
            issues.append(
                ValidationIssue(index, UNKNOWN_RELATION, f"relation {ins.args[0]!r} is not in the graph vocabulary")
            )
        elif ins.opcode == "SAVE":
            saved.add(ins.args[0])
        elif ins.opcode in ("LOAD", "INTERSECT", "UNION") and ins.args[0] not in saved:
            issues.append(
                ValidationIssue(index, UNKNOWN_REGISTER, f"register {ins.args[0]!r} read before any SAVE")
            )
    return ValidationReport(ok=not issues, issues=tuple(issues))
