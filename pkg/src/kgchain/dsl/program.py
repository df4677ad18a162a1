"""Program representation for the KGQL traversal language.

KGQL is a closed, loop-free language of nine opcodes over one value
kind (entity sets).  A program is a `;`-separated statement list; it
must open with START, close with a single RETURN, and stay within
MAX_PROGRAM_LENGTH instructions.  Opcodes and their arity:

    START("entity")            seed the working set (unknown entity -> empty set)
    FOLLOW("relation")         working set -> objects over the relation
    FOLLOW_INV("relation")     working set -> subjects over the relation
    SAVE("reg")                copy the working set into a register
    LOAD("reg")                replace the working set with a register
    INTERSECT("reg")           intersect the working set with a register
    UNION("reg")               union the working set with a register
    FILTER_HAS("rel", "ent")   keep members s with the edge (s, rel, ent)
    RETURN                     yield the working set
"""

from __future__ import annotations

from dataclasses import dataclass

ARITY = {
    "START": 1,
    "FOLLOW": 1,
    "FOLLOW_INV": 1,
    "SAVE": 1,
    "LOAD": 1,
    "INTERSECT": 1,
    "UNION": 1,
    "FILTER_HAS": 2,
    "RETURN": 0,
}

MAX_PROGRAM_LENGTH = 32


@dataclass(frozen=True, slots=True)
class Instruction:
    opcode: str
    args: tuple[str, ...] = ()

    def __post_init__(self):
        if self.opcode not in ARITY:
            raise ValueError(f"unknown opcode {self.opcode!r}")
        if len(self.args) != ARITY[self.opcode]:
            raise ValueError(
                f"{self.opcode} takes {ARITY[self.opcode]} argument(s), got {len(self.args)}"
            )


@dataclass(frozen=True)
class DslProgram:
    """Parsed instruction list plus the raw source it came from."""

    instructions: tuple[Instruction, ...]
    source: str


def escape_string(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def render_instruction(ins: Instruction) -> str:
    if not ins.args:
        return f"{ins.opcode};"
    rendered = ", ".join(f'"{escape_string(a)}"' for a in ins.args)
    return f"{ins.opcode}({rendered});"


def pretty_print(program: DslProgram) -> str:
    """Canonical one-statement-per-line rendering; re-parses to equal instructions."""
    return "\n".join(render_instruction(ins) for ins in program.instructions)
