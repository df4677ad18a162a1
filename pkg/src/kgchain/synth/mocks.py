"""Deterministic responders for the synthetic world.

Three flavors:

* oracle — decomposes every fixture question into its canonical plan
  and answers every canonical sub-question with the correct traversal
  program, correct claims, and the correct answer.
* adversarial — same plans and same (correct) programs, but fabricates
  the plain-text answer for questions about odd-indexed people and
  injects one fabricated claim on their program turns.  Landmarks are
  the decoy answers; they are never gold.
* fuzz — reply text derived purely from a hash of the request, for
  crash-resistance runs.

All responders are pure functions of the request text, so identical
requests always earn identical replies.
"""

from __future__ import annotations

import hashlib
import json
import random
import re

from ..llm import CompletionRequest, ProviderConfig, make_oracle_provider
from .world import (
    BORN_IN,
    LANDMARKS,
    LOCATED_IN,
    SPOUSE,
    SynthWorld,
    default_world,
    spouse_of,
)

_ENTITY = r"(P\d{2}|C\d|N\d|E\d|L\d)"

# canonical sub-question templates used inside oracle plans; the text
# doubles as the role marker (terminal vs intermediate) for responders
SQ_SPOUSE = "Who is the spouse of {x}?"
SQ_BIRTHCITY = "In which city was {x} born?"
SQ_BIRTHPLACE = "Where was {x} born?"
SQ_COUNTRY = "Which country is {x} located in?"

_SQ_PATTERNS = (
    (re.compile(rf"^Who is the spouse of {_ENTITY}\?$"), SPOUSE),
    (re.compile(rf"^In which city was {_ENTITY} born\?$"), BORN_IN),
    (re.compile(rf"^Where was {_ENTITY} born\?$"), BORN_IN),
    (re.compile(rf"^Which country is {_ENTITY} located in\?$"), LOCATED_IN),
)

# question templates in all three phrasings, mapped to a plan builder
_QUESTION_PATTERNS = (
    (re.compile(rf"^Who is the spouse of {_ENTITY}\?$"), "spouse"),
    (re.compile(rf"^{_ENTITY} is married to whom\?$"), "spouse"),
    (re.compile(rf"^Name the spouse of {_ENTITY}\.$"), "spouse"),
    (re.compile(rf"^Where was the spouse of {_ENTITY} born\?$"), "spouse-birthplace"),
    (re.compile(rf"^In which city was {_ENTITY}'s spouse born\?$"), "spouse-birthplace"),
    (re.compile(rf"^Name the birthplace of the spouse of {_ENTITY}\.$"), "spouse-birthplace"),
    (re.compile(rf"^Which country is the birthplace of {_ENTITY} located in\?$"), "birth-country"),
    (re.compile(rf"^In which country was {_ENTITY} born\?$"), "birth-country"),
    (re.compile(rf"^Name the country containing the birthplace of {_ENTITY}\.$"), "birth-country"),
)

_QUESTION_LINE = re.compile(r"^Question: (.+)$", re.MULTILINE)
_SUBQUESTION_LINE = re.compile(r"^Sub-question: (.+)$", re.MULTILINE)


def _plan_json(family: str, person: str) -> str:
    if family == "spouse":
        subs = [{"id": "s1", "question": SQ_SPOUSE.format(x=person), "depends_on": [], "expected_kind": "entity-set"}]
    elif family == "spouse-birthplace":
        subs = [
            {"id": "s1", "question": SQ_SPOUSE.format(x=person), "depends_on": [], "expected_kind": "entity-set"},
            {"id": "s2", "question": SQ_BIRTHCITY.format(x="{s1}"), "depends_on": ["s1"], "expected_kind": "entity-set"},
        ]
    else:  # birth-country
        subs = [
            {"id": "s1", "question": SQ_BIRTHPLACE.format(x=person), "depends_on": [], "expected_kind": "entity-set"},
            {"id": "s2", "question": SQ_COUNTRY.format(x="{s1}"), "depends_on": ["s1"], "expected_kind": "entity-set"},
        ]
    return "```json\n" + json.dumps({"subproblems": subs}) + "\n```"


def _index_of(entity: str) -> int:
    return int(entity.lstrip("PCNEL"))


def _origin_person(subquestion_text: str, entity: str) -> str | None:
    """Recover the fixture question's person parameter from a terminal sub-question.

    Returns None for non-terminal sub-questions.
    """
    if subquestion_text.startswith("Who is the spouse of") and entity.startswith("P") and _index_of(entity) < 10:
        return entity  # spouse-family questions are single-step
    if subquestion_text.startswith("In which city was") and entity.startswith("P"):
        return spouse_of(entity)
    if subquestion_text.startswith("In which city was") and entity.startswith("L"):
        return f"P{10 + _index_of(entity):02d}"
    if subquestion_text.startswith("Which country is"):
        return f"P{_index_of(entity) % 10:02d}"
    return None


def fabricated_claim(person: str) -> tuple[str, str, str]:
    """The claim the adversarial responder invents for an odd-indexed person."""
    return (person, SPOUSE, LANDMARKS[_index_of(person) % 10])


def fabricated_claims() -> list[tuple[str, str, str]]:
    return [fabricated_claim(f"P{k:02d}") for k in range(1, 20, 2)]


def _make_responder(world: SynthWorld, adversarial: bool):
    graph = world.graph

    def respond(request: CompletionRequest) -> str:
        text = request.flattened()

        q_match = _QUESTION_LINE.search(text)
        if q_match and "Decompose the question" in text:
            question = q_match.group(1)
            for pattern, family in _QUESTION_PATTERNS:
                m = pattern.match(question)
                if m:
                    return _plan_json(family, m.group(1))
            return "I cannot decompose that."

        sq_match = _SUBQUESTION_LINE.search(text)
        if not sq_match:
            return "I cannot tell."
        subquestion = sq_match.group(1)
        relation = None
        entity = None
        for pattern, rel in _SQ_PATTERNS:
            m = pattern.match(subquestion)
            if m:
                relation, entity = rel, m.group(1)
                break
        if relation is None:
            return "I cannot tell."

        result, matched = graph.follow({entity}, relation)
        origin = _origin_person(subquestion, entity)
        fabricate = adversarial and origin is not None and _index_of(origin) % 2 == 1

        if "```kgql" in text:
            lines = [
                "```kgql",
                f'START("{entity}"); FOLLOW("{relation}"); RETURN;',
                "```",
            ]
            for t in sorted(matched, key=lambda t: (t.subject, t.relation, t.object)):
                lines.append(f"CLAIM: {t.render()}")
            if fabricate:
                s, r, o = fabricated_claim(origin)
                lines.append(f"CLAIM: {s} | {r} | {o}")
            lines.append("ANSWER: " + ", ".join(sorted(result)))
            return "\n".join(lines)

        # plain-text answer turn
        if fabricate:
            decoy = LANDMARKS[_index_of(origin) % 10]
            return f"ANSWER: {decoy}"
        if not result:
            return "I cannot tell."
        return "ANSWER: " + ", ".join(sorted(result))

    return respond


def oracle_responder(request: CompletionRequest) -> str:
    return _make_responder(default_world(), adversarial=False)(request)


def adversarial_responder(request: CompletionRequest) -> str:
    return _make_responder(default_world(), adversarial=True)(request)


def oracle_provider(**overrides) -> ProviderConfig:
    return make_oracle_provider(oracle_responder, **overrides)


def adversarial_provider(**overrides) -> ProviderConfig:
    return make_oracle_provider(adversarial_responder, **overrides)


_FUZZ_SNIPPETS = (
    "CLAIM: {a} | {b}",
    "CLAIM: {a} | {b} | {c}",
    "CLAIM: {a} |{b}| {c} | {d}",
    "ANSWER: {a}, {b}",
    "ANSWER:",
    "```kgql",
    "```",
    "```json",
    '{{"subproblems": "{a}"}}',
    '{{"subproblems": [{{"id": "{a}", "question": "{b} of {{{c}}}", "depends_on": ["{a}"]}}]}}',
    "START(\"{a}\") FOLLOW({b});",
    "START(\"{a}\"); FOLLOW(\"{b}\"); RETURN;",
    "RETURN; RETURN;",
    "{a} {b} {c} {d}",
    "",
)


def make_fuzz_responder(seed: int = 0):
    """Garbage replies derived from a hash of the request; pure and deterministic."""

    def respond(request: CompletionRequest) -> str:
        digest = hashlib.sha256(f"{seed}:{request.flattened()}".encode("utf-8")).digest()
        rng = random.Random(digest)
        words = ["alpha", "bravo", "P03", "C7", "spouse", "born_in", "s1", "s2", "zz", "|", "{s1}"]
        lines = []
        for _ in range(rng.randint(1, 8)):
            snippet = rng.choice(_FUZZ_SNIPPETS)
            fills = {key: rng.choice(words) for key in "abcd"}
            lines.append(snippet.format(a=fills["a"], b=fills["b"], c=fills["c"], d=fills["d"]))
        return "\n".join(lines)

    return respond


def fuzz_provider(seed: int = 0, **overrides) -> ProviderConfig:
    return make_oracle_provider(make_fuzz_responder(seed), **overrides)
