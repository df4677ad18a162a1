"""Question decomposition into a machine-checkable sub-problem DAG.

The provider is prompted with the question, a sample of the graph's
relation vocabulary, and the JSON plan schema; the reply is parsed and
checked (ids, dependencies, acyclicity, single sink).  A malformed
reply earns one repair round with the parse error appended; a second
failure degrades to a single-node plan wrapping the original question,
so callers always receive a valid plan.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import PlanError
from .llm import ChatMessage, ProviderConfig, complete, make_request

EXPECTED_KINDS = ("entity-set", "boolean", "count")

_JSON_FENCE = re.compile(r"^```json\s*$(.*?)^```\s*$", re.MULTILINE | re.DOTALL)


@dataclass(frozen=True)
class SubProblem:
    id: str
    question: str
    depends_on: tuple[str, ...] = ()
    expected_kind: str = "entity-set"


@dataclass(frozen=True)
class SubProblemPlan:
    subproblems: tuple[SubProblem, ...]
    origin_question: str

    def by_id(self, sub_id: str) -> SubProblem:
        for sub in self.subproblems:
            if sub.id == sub_id:
                return sub
        raise KeyError(sub_id)

    @property
    def terminal(self) -> SubProblem:
        """The single answer-bearing sink."""
        depended_on = {dep for sub in self.subproblems for dep in sub.depends_on}
        for sub in self.subproblems:
            if sub.id not in depended_on:
                return sub
        raise PlanError("plan has no sink")  # unreachable for checked plans


def check_plan(plan: SubProblemPlan) -> None:
    """Raise PlanError if the plan violates any structural invariant."""
    subs = plan.subproblems
    if not subs:
        raise PlanError("plan must contain at least one sub-problem")
    ids = [s.id for s in subs]
    for sub in subs:
        if not sub.id:
            raise PlanError("sub-problem with empty id")
        if not sub.question:
            raise PlanError(f"sub-problem {sub.id!r}: empty question")
        if sub.expected_kind not in EXPECTED_KINDS:
            raise PlanError(f"sub-problem {sub.id!r}: unknown expected_kind {sub.expected_kind!r}")
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise PlanError(f"duplicate sub-problem ids: {sorted(dupes)}")
    known = set(ids)
    for sub in subs:
        for dep in sub.depends_on:
            if dep == sub.id:
                raise PlanError(f"sub-problem {sub.id!r} depends on itself")
            if dep not in known:
                raise PlanError(f"sub-problem {sub.id!r} depends on unknown id {dep!r}")
    cycle = _find_cycle(subs)
    if cycle:
        raise PlanError(f"dependency cycle: {' -> '.join(cycle)}")
    depended_on = {dep for sub in subs for dep in sub.depends_on}
    sinks = [s.id for s in subs if s.id not in depended_on]
    if len(sinks) != 1:
        raise PlanError(f"plan must have exactly one terminal sub-problem, found {len(sinks)}: {sinks}")


def _find_cycle(subs: tuple[SubProblem, ...]) -> list[str] | None:
    graph = {s.id: list(s.depends_on) for s in subs}
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(graph, WHITE)
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = GREY
        stack.append(node)
        for dep in graph[node]:
            if color[dep] == GREY:
                return stack[stack.index(dep):] + [dep]
            if color[dep] == WHITE:
                found = visit(dep)
                if found:
                    return found
        stack.pop()
        color[node] = BLACK
        return None

    for node in graph:
        if color[node] == WHITE:
            found = visit(node)
            if found:
                return found
    return None


def topological_order(plan: SubProblemPlan) -> list[str]:
    """Dependencies-first order; ties broken by plan list order."""
    order: list[str] = []
    placed: set[str] = set()
    pending = list(plan.subproblems)
    while pending:
        progressed = False
        remaining = []
        for sub in pending:
            if all(dep in placed for dep in sub.depends_on):
                order.append(sub.id)
                placed.add(sub.id)
                progressed = True
            else:
                remaining.append(sub)
        if not progressed:
            raise PlanError("dependency cycle")  # unreachable for checked plans
        pending = remaining
    return order


def parse_plan(reply: str, origin_question: str) -> SubProblemPlan:
    """Parse the first ```json fenced block (or the whole reply) into a checked plan."""
    match = _JSON_FENCE.search(reply)
    text = match.group(1) if match else reply
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanError(f"no parseable JSON plan in reply: {exc.msg}") from exc
    if not isinstance(data, dict) or "subproblems" not in data:
        raise PlanError('plan JSON must be an object with a "subproblems" array')
    raw_subs = data["subproblems"]
    if not isinstance(raw_subs, list):
        raise PlanError('"subproblems" must be an array')

    subs: list[SubProblem] = []
    for i, raw in enumerate(raw_subs):
        if not isinstance(raw, dict):
            raise PlanError(f"sub-problem #{i} is not an object")
        sub_id = raw.get("id")
        if not isinstance(sub_id, str) or not sub_id:
            raise PlanError(f"sub-problem #{i}: missing or empty 'id'")
        question = raw.get("question")
        if not isinstance(question, str) or not question:
            raise PlanError(f"sub-problem {sub_id!r}: missing 'question'")
        depends_on = raw.get("depends_on", [])
        if not isinstance(depends_on, list) or not all(isinstance(d, str) for d in depends_on):
            raise PlanError(f"sub-problem {sub_id!r}: 'depends_on' must be a list of ids")
        kind = raw.get("expected_kind", "entity-set")
        if kind not in EXPECTED_KINDS:
            raise PlanError(f"sub-problem {sub_id!r}: unknown expected_kind {kind!r}")
        subs.append(SubProblem(sub_id, question, tuple(depends_on), kind))

    plan = SubProblemPlan(tuple(subs), origin_question)
    check_plan(plan)
    return plan


DECOMPOSE_TEMPLATE = """\
Decompose the question below into the smallest set of sub-problems that can each
be answered with a short knowledge-graph lookup. A sub-question may splice in a
dependency's answer with the placeholder {{dep-id}}.

Question: {question}

Known relation names (sample): {relations}

Reply with exactly one fenced block:
```json
{{"subproblems": [{{"id": "s1", "question": "...", "depends_on": [], "expected_kind": "entity-set"}}]}}
```
expected_kind is one of entity-set, boolean, count. Exactly one sub-problem must
be terminal (nothing depends on it); it carries the final answer.
"""


def fallback_plan(question: str) -> SubProblemPlan:
    return SubProblemPlan((SubProblem("s1", question),), origin_question=question)


def decompose(provider: ProviderConfig, question: str, relation_sample: list[str]) -> SubProblemPlan:
    """Ask the provider for a plan; repair once; never return an invalid plan."""
    if not question:
        raise ValueError("question must be non-empty")
    prompt = DECOMPOSE_TEMPLATE.format(question=question, relations=", ".join(relation_sample[:50]))
    messages = [
        ChatMessage("system", "You decompose questions for a knowledge-graph reasoning engine."),
        ChatMessage("user", prompt),
    ]
    reply = complete(provider, make_request(provider, messages))
    try:
        return parse_plan(reply, question)
    except PlanError as first_error:
        repair = prompt + (
            f"\nYour previous reply could not be used ({first_error}). "
            "Reply again with only the JSON block."
        )
        retry_messages = [messages[0], ChatMessage("user", repair)]
        reply = complete(provider, make_request(provider, retry_messages))
        try:
            return parse_plan(reply, question)
        except PlanError:
            return fallback_plan(question)
