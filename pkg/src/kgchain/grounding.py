"""Claim extraction from model replies and grounding checks against the graph.

Replies carry structured lines:

    CLAIM: subject | relation | object
    ANSWER: entity, entity, ...

Everything else is free text.  A CLAIM line with the wrong field count
(or a field no graph edge could carry) is left in the remainder
untouched; this is also what makes `|`-injection inert — an entity name
containing `|` cannot survive extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kg.graph import KnowledgeGraph, Triple, valid_name

CLAIM_PREFIX = "CLAIM:"
ANSWER_PREFIX = "ANSWER:"

# Embedded verbatim in every answer-phase prompt.
PROTOCOL_INSTRUCTIONS = (
    "State every fact you rely on as its own line `CLAIM: subject | relation | object`\n"
    "using graph names exactly. Give your final answer as one line\n"
    "`ANSWER: entity` (multiple candidates comma-separated, best first)."
)


@dataclass(frozen=True)
class ClaimExtraction:
    claims: tuple[Triple, ...]
    answers: tuple[str, ...]
    remainder: str


@dataclass(frozen=True)
class GroundingReport:
    grounded: tuple[Triple, ...]
    ungrounded: tuple[Triple, ...]
    passed: bool


def extract(reply: str) -> ClaimExtraction:
    """Pull CLAIM/ANSWER lines out of a reply, preserving order."""
    claims: list[Triple] = []
    answers: list[str] = []
    seen_answers: set[str] = set()
    remainder: list[str] = []

    for line in reply.splitlines():
        stripped = line.strip()
        if stripped.startswith(CLAIM_PREFIX):
            fields = [f.strip() for f in stripped[len(CLAIM_PREFIX):].split("|")]
            if len(fields) == 3 and all(valid_name(f) for f in fields):
                claims.append(Triple(*fields))
                continue
            remainder.append(line)
        elif stripped.startswith(ANSWER_PREFIX):
            for item in stripped[len(ANSWER_PREFIX):].split(","):
                name = item.strip()
                if name and name not in seen_answers:
                    seen_answers.add(name)
                    answers.append(name)
        else:
            remainder.append(line)

    return ClaimExtraction(tuple(claims), tuple(answers), "\n".join(remainder))


def check(claims: list[Triple] | tuple[Triple, ...], graph: KnowledgeGraph) -> GroundingReport:
    """Partition claims by graph membership; passes iff all are grounded."""
    grounded: list[Triple] = []
    ungrounded: list[Triple] = []
    for claim in claims:
        (grounded if graph.contains(claim) else ungrounded).append(claim)
    return GroundingReport(tuple(grounded), tuple(ungrounded), passed=not ungrounded)
