"""Code-guided reasoning chains over a sub-problem plan.

Each sub-problem becomes one reasoning step, run in topological order.
With the code module enabled, the model is asked for a KGQL program
which is parsed, validated, and executed against the graph; parse or
validation errors and empty results are retried with the error text
appended, and exhausted retries degrade to neighborhood retrieval plus
a plain answer request.  Claims in every reply are checked against the
graph; unsupported claims trigger bounded re-requests and are stripped
afterwards.  Nothing a model replies can abort a chain — only provider
failures propagate.

Final answers are ranked by support: the number of evidence
observations (traversal matches plus grounded claims, per step) whose
triple touches the answer entity, with ties broken by first mention in
the terminal step's reply.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .decompose import SubProblem, SubProblemPlan, topological_order
from .dsl import DslProgram, ExecutionResult, execute, parse, validate
from .errors import DslParseError, UnresolvedPlaceholderError
from .grounding import PROTOCOL_INSTRUCTIONS, check, extract
from .kg.graph import KnowledgeGraph, Triple
from .llm import ChatMessage, ProviderConfig, complete, make_request

RELATION_SAMPLE_LIMIT = 50

STATUS_OK = "ok"
STATUS_FALLBACK = "fallback-retrieval"
STATUS_PLAIN = "plain"
STATUS_FAILED = "failed"


def retried_status(retries: int) -> str:
    return f"program-retried({retries})"


@dataclass
class ChainConfig:
    program_retries: int = 3
    validation_retries: int = 2
    fallback_hops: int = 1
    code_module: bool = True  # ablation switch: off = plain prompting baseline
    grounding: bool = True

    def __post_init__(self):
        if self.program_retries < 0 or self.validation_retries < 0 or self.fallback_hops < 0:
            raise ValueError("chain retry/hop counts must be >= 0")

    def label(self) -> str:
        return "KDCM + Code Module" if self.code_module else "KDCM"


@dataclass
class ReasoningStep:
    subproblem_id: str
    prompt: str
    raw_reply: str
    program: DslProgram | None
    execution: ExecutionResult | None
    claims: tuple[Triple, ...]
    ungrounded: tuple[Triple, ...]
    status: str
    answers: tuple[str, ...]
    evidence: frozenset[Triple]
    program_attempts: int = 0
    grounding_attempts: int = 0
    # traversal matches and grounded claims kept separate: both back the
    # support score, each counting as its own observation
    traversal_evidence: frozenset[Triple] = field(default_factory=frozenset)
    grounded_claims: frozenset[Triple] = field(default_factory=frozenset)


@dataclass
class ChainTrace:
    origin_question: str
    plan: SubProblemPlan
    steps: list[ReasoningStep]
    final_answers: tuple[tuple[str, int], ...]
    total_evidence: frozenset[Triple]


_PLACEHOLDER = re.compile(r"\{([^{}]+)\}")

DSL_REMINDER = """\
Write one KGQL program that computes the answer set, inside a fenced block:
```kgql
START("entity"); FOLLOW("relation"); RETURN;
```
Opcodes: START("e") seeds the working set with a graph entity;
FOLLOW("r") steps to objects over relation r; FOLLOW_INV("r") steps to
subjects; SAVE("x")/LOAD("x")/INTERSECT("x")/UNION("x") stash and
combine sets in registers; FILTER_HAS("r","e") keeps members having the
edge (member, r, e); RETURN (last, exactly once) yields the set.
Statements end with `;` and string arguments are double-quoted."""

ANSWER_REMINDER = (
    "Give your final answer as one line `ANSWER: entity` "
    "(multiple candidates comma-separated, best first)."
)


def substitute_placeholders(question: str, dep_answers: dict[str, tuple[str, ...]]) -> str:
    def repl(match: re.Match) -> str:
        key = match.group(1)
        if key not in dep_answers:
            raise UnresolvedPlaceholderError(key)
        return ", ".join(dep_answers[key])

    return _PLACEHOLDER.sub(repl, question)


def render_evidence(evidence: frozenset[Triple] | set[Triple]) -> str:
    if not evidence:
        return "(none)"
    return "\n".join(t.render() for t in sorted(evidence, key=lambda t: (t.subject, t.relation, t.object)))


def render_step_prompt(
    sub: SubProblem,
    dep_answers: dict[str, tuple[str, ...]],
    dep_evidence: frozenset[Triple],
    relation_sample: list[str],
    config: ChainConfig,
) -> str:
    """Deterministic step prompt; raises on an unresolvable placeholder."""
    question = substitute_placeholders(sub.question, dep_answers)
    parts = ["Answer one sub-question using only the knowledge graph."]
    if config.code_module:
        parts.append("Facts established by earlier steps:\n" + render_evidence(dep_evidence))
    parts.append(f"Sub-question: {question}")
    if config.code_module:
        parts.append("Relation names available (sample): " + ", ".join(relation_sample))
        parts.append(DSL_REMINDER)
        parts.append(PROTOCOL_INSTRUCTIONS)
    elif config.grounding:
        parts.append(PROTOCOL_INSTRUCTIONS)
    else:
        parts.append(ANSWER_REMINDER)
    return "\n\n".join(parts)


_FENCE_OPEN = "```kgql"
_FENCE_CLOSE = "```"


def extract_kgql_block(text: str) -> str | None:
    """First fenced kgql block; the opener line must be exactly ```kgql."""
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if line.strip() == _FENCE_OPEN:
            for j in range(i + 1, len(lines)):
                if lines[j].strip() == _FENCE_CLOSE:
                    return "\n".join(lines[i + 1 : j])
            return None
    return None


def _ask(provider: ProviderConfig, prompt: str) -> str:
    messages = [
        ChatMessage("system", "You answer questions strictly from the provided knowledge graph."),
        ChatMessage("user", prompt),
    ]
    return complete(provider, make_request(provider, messages))


def _order_entities(entities: frozenset[str], mentioned: tuple[str, ...], reply: str) -> tuple[str, ...]:
    """Deterministic order: reply mention order first, then position, then name."""
    mention_rank = {name: i for i, name in enumerate(mentioned)}

    def key(name: str):
        pos = reply.find(name)
        return (mention_rank.get(name, len(mention_rank)), pos if pos >= 0 else len(reply), name)

    return tuple(sorted(entities, key=key))


def _entities_of(evidence: frozenset[Triple]) -> set[str]:
    names: set[str] = set()
    for t in evidence:
        names.add(t.subject)
        names.add(t.object)
    return names


def _run_step(
    provider: ProviderConfig,
    graph: KnowledgeGraph,
    sub: SubProblem,
    dep_answers: dict[str, tuple[str, ...]],
    dep_evidence: frozenset[Triple],
    config: ChainConfig,
) -> ReasoningStep:
    try:
        prompt = render_step_prompt(
            sub, dep_answers, dep_evidence, graph.relation_sample(RELATION_SAMPLE_LIMIT), config
        )
    except UnresolvedPlaceholderError:
        return ReasoningStep(
            subproblem_id=sub.id, prompt="", raw_reply="", program=None, execution=None,
            claims=(), ungrounded=(), status=STATUS_FAILED, answers=(), evidence=frozenset(),
        )

    program: DslProgram | None = None
    execution: ExecutionResult | None = None
    traversal_evidence: frozenset[Triple] = frozenset()
    raw_reply = ""
    program_attempts = 0
    answers_from_execution = False

    if config.code_module:
        ask_prompt = prompt
        for attempt in range(config.program_retries + 1):
            raw_reply = _ask(provider, ask_prompt)
            program_attempts = attempt + 1
            error = None
            block = extract_kgql_block(raw_reply)
            if block is None:
                error = "no ```kgql block found in the reply"
            else:
                try:
                    candidate = parse(block)
                except DslParseError as exc:
                    error = f"parse error: {exc}"
                else:
                    report = validate(candidate, graph)
                    if not report.ok:
                        error = f"validation failed: {report.summary()}"
                    else:
                        result = execute(candidate, graph)
                        if not result.result:
                            error = "the program returned an empty entity set"
                        else:
                            program, execution = candidate, result
            if error is None:
                break
            ask_prompt = prompt + (
                f"\n\nYour previous program could not be used: {error}. "
                "Reply again with a corrected ```kgql block."
            )

        if execution is not None:
            traversal_evidence = execution.evidence
            answers_from_execution = True
            retries = program_attempts - 1
            status = STATUS_OK if retries == 0 else retried_status(retries)
        else:
            # program path exhausted: retrieve around dependency answers and
            # ask for a plain answer over that context
            seeds = sorted({e for answers in dep_answers.values() for e in answers})
            retrieved: set[Triple] = set()
            for seed in seeds:
                retrieved |= graph.neighborhood(seed, config.fallback_hops) if config.fallback_hops > 0 else frozenset()
            traversal_evidence = frozenset(retrieved)
            question = substitute_placeholders(sub.question, dep_answers)
            fb_prompt = "\n\n".join([
                "Answer one sub-question using only the facts below.",
                "Facts:\n" + render_evidence(traversal_evidence),
                f"Sub-question: {question}",
                PROTOCOL_INSTRUCTIONS if config.grounding else ANSWER_REMINDER,
            ])
            raw_reply = _ask(provider, fb_prompt)
            status = STATUS_FALLBACK
    else:
        raw_reply = _ask(provider, prompt)
        status = STATUS_PLAIN

    extraction = extract(raw_reply)
    claims = extraction.claims
    ungrounded_seen: list[Triple] = []
    grounding_attempts = 0
    stripped = False
    grounded_claims: frozenset[Triple] = frozenset()

    if config.grounding:
        report = check(claims, graph)
        while not report.passed and grounding_attempts < config.validation_retries:
            for t in report.ungrounded:
                if t not in ungrounded_seen:
                    ungrounded_seen.append(t)
            feedback = prompt + (
                "\n\nThese CLAIM lines are not supported by the knowledge graph:\n"
                + "\n".join(t.render() for t in report.ungrounded)
                + "\nRemove or correct unsupported claims and answer again."
            )
            raw_reply = _ask(provider, feedback)
            grounding_attempts += 1
            extraction = extract(raw_reply)
            claims = extraction.claims
            report = check(claims, graph)
        if not report.passed:
            for t in report.ungrounded:
                if t not in ungrounded_seen:
                    ungrounded_seen.append(t)
            claims = report.grounded
            stripped = True
        grounded_claims = frozenset(report.grounded)

    evidence = traversal_evidence | grounded_claims

    if answers_from_execution:
        assert execution is not None
        answers = _order_entities(execution.result, extraction.answers, raw_reply)
    elif status == STATUS_FALLBACK:
        allowed = _entities_of(traversal_evidence)
        answers = tuple(a for a in extraction.answers if a in allowed)
    else:
        answers = extraction.answers

    if stripped and not answers_from_execution:
        # an answer survives claim-stripping only with evidence behind it
        supported = _entities_of(evidence)
        answers = tuple(a for a in answers if a in supported)

    if not answers:
        status = STATUS_FAILED

    return ReasoningStep(
        subproblem_id=sub.id,
        prompt=prompt,
        raw_reply=raw_reply,
        program=program,
        execution=execution,
        claims=claims,
        ungrounded=tuple(ungrounded_seen),
        status=status,
        answers=answers,
        evidence=evidence,
        program_attempts=program_attempts,
        grounding_attempts=grounding_attempts,
        traversal_evidence=traversal_evidence,
        grounded_claims=grounded_claims,
    )


def _support_scores(steps: list[ReasoningStep]) -> dict[str, int]:
    scores: dict[str, int] = {}
    for step in steps:
        for bucket in (step.traversal_evidence, step.grounded_claims):
            for t in bucket:
                for name in (t.subject, t.object):
                    scores[name] = scores.get(name, 0) + 1
    return scores


def run_chain(
    provider: ProviderConfig,
    graph: KnowledgeGraph,
    plan: SubProblemPlan,
    config: ChainConfig | None = None,
) -> ChainTrace:
    """Execute every sub-problem in topological order and rank final answers."""
    config = config or ChainConfig()
    steps_by_id: dict[str, ReasoningStep] = {}
    steps: list[ReasoningStep] = []

    for sub_id in topological_order(plan):
        sub = plan.by_id(sub_id)
        dep_answers = {dep: steps_by_id[dep].answers for dep in sub.depends_on}
        dep_evidence = frozenset().union(*(steps_by_id[dep].evidence for dep in sub.depends_on)) \
            if sub.depends_on else frozenset()
        step = _run_step(provider, graph, sub, dep_answers, dep_evidence, config)
        steps_by_id[sub_id] = step
        steps.append(step)

    terminal = steps_by_id[plan.terminal.id]
    scores = _support_scores(steps)
    reply = terminal.raw_reply

    def rank_key(item: tuple[int, str]):
        index, name = item
        pos = reply.find(name)
        return (-scores.get(name, 0), pos if pos >= 0 else len(reply), index)

    ranked = sorted(enumerate(terminal.answers), key=rank_key)
    final_answers = tuple((name, scores.get(name, 0)) for _, name in ranked)
    total_evidence = frozenset().union(*(s.evidence for s in steps)) if steps else frozenset()

    return ChainTrace(
        origin_question=plan.origin_question,
        plan=plan,
        steps=steps,
        final_answers=final_answers,
        total_evidence=total_evidence,
    )


def _triple_dict(t: Triple) -> dict[str, str]:
    return {"s": t.subject, "r": t.relation, "o": t.object}


def _triples_list(ts) -> list[dict[str, str]]:
    return [_triple_dict(t) for t in sorted(ts, key=lambda t: (t.subject, t.relation, t.object))]


def trace_to_dict(trace: ChainTrace) -> dict:
    """JSON-ready document mirroring the trace field-for-field."""
    return {
        "origin_question": trace.origin_question,
        "plan": {
            "origin_question": trace.plan.origin_question,
            "subproblems": [
                {
                    "id": s.id,
                    "question": s.question,
                    "depends_on": list(s.depends_on),
                    "expected_kind": s.expected_kind,
                }
                for s in trace.plan.subproblems
            ],
        },
        "steps": [
            {
                "subproblem_id": s.subproblem_id,
                "prompt": s.prompt,
                "raw_reply": s.raw_reply,
                "program": s.program.source if s.program else None,
                "execution": {
                    "result": sorted(s.execution.result),
                    "evidence": _triples_list(s.execution.evidence),
                    "steps_executed": s.execution.steps_executed,
                }
                if s.execution
                else None,
                "claims": [_triple_dict(t) for t in s.claims],
                "ungrounded": [_triple_dict(t) for t in s.ungrounded],
                "status": s.status,
                "answers": list(s.answers),
                "evidence": _triples_list(s.evidence),
                "program_attempts": s.program_attempts,
                "grounding_attempts": s.grounding_attempts,
            }
            for s in trace.steps
        ],
        "final_answers": [{"entity": e, "support": n} for e, n in trace.final_answers],
        "total_evidence": _triples_list(trace.total_evidence),
    }


def trace_to_json(trace: ChainTrace) -> str:
    return json.dumps(trace_to_dict(trace), indent=2, ensure_ascii=False, sort_keys=True)
