"""Dataset loading, HIT@K scoring, batch evaluation, and report emission.

A dataset is JSONL, one record per line:
``{"id": ..., "question": ..., "answers": [...]}``.  Each record runs
one full chain (decompose, then execute); HIT@K asks whether any of the
top-k ranked predictions equals a gold answer after normalization
(lowercase, trim, collapse internal whitespace).  Failed records count
as misses rather than being dropped.  Reports carry percentages with
two decimals, rounded half-up, and can be emitted as markdown, CSV, or
JSON, each including a cross-dataset mean row per config.
"""

from __future__ import annotations

import csv
import io
import json
import re
import threading
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import IO

from .chain import ChainConfig, ChainTrace, RELATION_SAMPLE_LIMIT, run_chain, trace_to_json
from .decompose import decompose
from .errors import DatasetError, EvalError, ProviderError
from .kg.graph import KnowledgeGraph
from .llm import ProviderConfig

REPORT_FORMATS = ("csv", "json", "markdown")


@dataclass(frozen=True)
class QaRecord:
    id: str
    question: str
    gold_answers: frozenset[str]


@dataclass
class EvalOutcome:
    record_id: str
    predictions: list[str]
    hit1: int
    hit3: int
    hit5: int
    failed: bool = False
    trace: ChainTrace | None = None
    trace_path: str | None = None


@dataclass(frozen=True)
class MetricsReport:
    dataset: str
    config_label: str
    hit1: float
    hit3: float
    hit5: float
    records: int


def load_dataset(source: IO | Iterable[str]) -> list[QaRecord]:
    """Parse JSONL records; any invariant violation is a per-line error."""
    data = source.read() if hasattr(source, "read") else None
    if data is None:
        lines = list(source)
    else:
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        lines = data.splitlines()

    records: list[QaRecord] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON: {exc.msg}", line_no) from exc
        if not isinstance(obj, dict):
            raise DatasetError("record must be a JSON object", line_no)
        rid = obj.get("id")
        question = obj.get("question")
        answers = obj.get("answers")
        if not isinstance(rid, str) or not rid:
            raise DatasetError("missing or empty 'id'", line_no)
        if not isinstance(question, str) or not question:
            raise DatasetError(f"record {rid!r}: missing or empty 'question'", line_no)
        if not isinstance(answers, list) or not answers or not all(isinstance(a, str) for a in answers):
            raise DatasetError(f"record {rid!r}: 'answers' must be a non-empty list of strings", line_no)
        if rid in seen_ids:
            raise DatasetError(f"duplicate record id {rid!r}", line_no)
        seen_ids.add(rid)
        records.append(QaRecord(rid, question, frozenset(answers)))
    return records


_WHITESPACE = re.compile(r"\s+")


def normalize(text: str) -> str:
    return _WHITESPACE.sub(" ", text.strip()).lower()


def hit_at_k(predictions: Sequence[str], gold: Iterable[str], k: int) -> int:
    """1 iff a normalized gold answer sits in the normalized top-k slice."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    gold_norm = {normalize(g) for g in gold}
    for p in list(predictions)[:k]:
        if normalize(p) in gold_norm:
            return 1
    return 0


def round2(value: Decimal | float) -> float:
    return float(Decimal(value if isinstance(value, Decimal) else str(value)).quantize(
        Decimal("0.01"), rounding=ROUND_HALF_UP
    ))


def _percentage(hits: int, total: int) -> float:
    return round2(Decimal(hits) * 100 / Decimal(total))


def run_eval(
    provider: ProviderConfig,
    graph: KnowledgeGraph,
    records: Sequence[QaRecord],
    config: ChainConfig | None = None,
    parallelism: int = 1,
    *,
    dataset_name: str = "dataset",
    config_label: str | None = None,
    trace_dir: str | None = None,
    sidecar_path: str | None = None,
) -> tuple[MetricsReport, list[EvalOutcome]]:
    """Evaluate every record; aggregation is independent of completion order."""
    if not records:
        raise EvalError("refusing to evaluate an empty dataset")
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    config = config or ChainConfig()

    sidecar_lock = threading.Lock()
    sidecar_fh = open(sidecar_path, "w", encoding="utf-8") if sidecar_path else None

    def evaluate(record: QaRecord) -> EvalOutcome:
        try:
            plan = decompose(provider, record.question, graph.relation_sample(RELATION_SAMPLE_LIMIT))
            trace = run_chain(provider, graph, plan, config)
            predictions = [entity for entity, _ in trace.final_answers]
            outcome = EvalOutcome(
                record_id=record.id,
                predictions=predictions,
                hit1=hit_at_k(predictions, record.gold_answers, 1),
                hit3=hit_at_k(predictions, record.gold_answers, 3),
                hit5=hit_at_k(predictions, record.gold_answers, 5),
                trace=trace,
            )
        except ProviderError:
            outcome = EvalOutcome(record.id, [], 0, 0, 0, failed=True)
        if trace_dir and outcome.trace is not None:
            path = f"{trace_dir}/{record.id}.trace.json"
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(trace_to_json(outcome.trace))
            outcome.trace_path = path
        if sidecar_fh is not None:
            line = json.dumps(
                {
                    "id": outcome.record_id,
                    "predictions": outcome.predictions,
                    "hit1": outcome.hit1,
                    "hit3": outcome.hit3,
                    "hit5": outcome.hit5,
                    "failed": outcome.failed,
                    "trace_path": outcome.trace_path,
                }
            )
            with sidecar_lock:
                sidecar_fh.write(line + "\n")
                sidecar_fh.flush()
        return outcome

    try:
        if parallelism == 1:
            outcomes = [evaluate(r) for r in records]
        else:
            with ThreadPoolExecutor(max_workers=parallelism) as pool:
                outcomes = list(pool.map(evaluate, records))
    finally:
        if sidecar_fh is not None:
            sidecar_fh.close()

    outcomes.sort(key=lambda o: o.record_id)
    n = len(outcomes)
    report = MetricsReport(
        dataset=dataset_name,
        config_label=config_label if config_label is not None else config.label(),
        hit1=_percentage(sum(o.hit1 for o in outcomes), n),
        hit3=_percentage(sum(o.hit3 for o in outcomes), n),
        hit5=_percentage(sum(o.hit5 for o in outcomes), n),
        records=n,
    )
    return report, outcomes


AVERAGE_DATASET = "Average"


def _average_rows(reports: Sequence[MetricsReport]) -> list[MetricsReport]:
    by_label: dict[str, list[MetricsReport]] = {}
    for r in reports:
        by_label.setdefault(r.config_label, []).append(r)
    rows = []
    for label, group in by_label.items():
        n = len(group)
        rows.append(
            MetricsReport(
                dataset=AVERAGE_DATASET,
                config_label=label,
                hit1=round2(sum(Decimal(str(r.hit1)) for r in group) / n),
                hit3=round2(sum(Decimal(str(r.hit3)) for r in group) / n),
                hit5=round2(sum(Decimal(str(r.hit5)) for r in group) / n),
                records=sum(r.records for r in group),
            )
        )
    return rows


def emit_report(reports: Sequence[MetricsReport], format: str = "markdown") -> str:
    """Render data rows plus one cross-dataset mean row per config label."""
    if not reports:
        raise EvalError("no reports to emit")
    if format not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {format!r}; expected one of {REPORT_FORMATS}")
    rows = list(reports) + _average_rows(reports)

    if format == "markdown":
        out = ["| Dataset | Config | HIT@1 | HIT@3 | HIT@5 | Records |",
               "|---|---|---|---|---|---|"]
        for r in rows:
            out.append(
                f"| {r.dataset} | {r.config_label} | {r.hit1:.2f} | {r.hit3:.2f} | {r.hit5:.2f} | {r.records} |"
            )
        return "\n".join(out) + "\n"

    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset", "config", "hit@1", "hit@3", "hit@5", "records"])
        for r in rows:
            writer.writerow([r.dataset, r.config_label, f"{r.hit1:.2f}", f"{r.hit3:.2f}", f"{r.hit5:.2f}", r.records])
        return buf.getvalue()

    return json.dumps(
        {
            "reports": [_report_dict(r) for r in reports],
            "averages": [_report_dict(r) for r in _average_rows(reports)],
        },
        indent=2,
    ) + "\n"


def _report_dict(r: MetricsReport) -> dict:
    return {
        "dataset": r.dataset,
        "config": r.config_label,
        "hit@1": r.hit1,
        "hit@3": r.hit3,
        "hit@5": r.hit5,
        "records": r.records,
    }


def parse_report_csv(text: str) -> list[MetricsReport]:
    """Inverse of emit_report(csv): all rows, averages included."""
    reader = csv.DictReader(io.StringIO(text))
    return [
        MetricsReport(
            dataset=row["dataset"],
            config_label=row["config"],
            hit1=float(row["hit@1"]),
            hit3=float(row["hit@3"]),
            hit5=float(row["hit@5"]),
            records=int(row["records"]),
        )
        for row in reader
    ]


def parse_report_json(text: str) -> tuple[list[MetricsReport], list[MetricsReport]]:
    data = json.loads(text)

    def undo(d: dict) -> MetricsReport:
        return MetricsReport(d["dataset"], d["config"], d["hit@1"], d["hit@3"], d["hit@5"], d["records"])

    return [undo(d) for d in data["reports"]], [undo(d) for d in data["averages"]]
