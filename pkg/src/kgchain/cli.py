"""Operator command line: ingest, ask, eval, trace.

Exit codes are stable contracts: 0 success, 1 generic failure, 2
configuration problem, 3 provider failure.  All commands are
reproducible with mock providers — identical invocation, identical
stdout.
"""

from __future__ import annotations

import argparse
import importlib
import json
import os
import sys

from .chain import ChainConfig, run_chain, trace_to_json
from .decompose import decompose
from .errors import ConfigError, KgchainError, ProviderError
from .evalharness import REPORT_FORMATS, emit_report, load_dataset, run_eval
from .kg.loader import FORMATS, load_graph_path
from .llm import ProviderConfig

EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_CONFIG = 2
EXIT_PROVIDER = 3

_GRAPH_KEYS = {"path", "format", "backend"}
_PROVIDER_KEYS = {
    "kind", "base_url", "credential", "timeout", "max_retries", "backoff_base",
    "max_in_flight", "transcript", "model", "temperature", "max_tokens",
    "script", "default_reply", "responder",
}
_CHAIN_KEYS = {"program_retries", "validation_retries", "fallback_hops", "code_module", "grounding"}
_EVAL_KEYS = {"dataset", "parallelism", "out_dir", "format", "name"}
_TOP_KEYS = {"graph", "provider", "chain", "eval"}


def _require_keys(block: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where} config")


def _require_path(path: str, what: str) -> str:
    if not os.path.exists(path):
        raise ConfigError(f"{what} path does not exist: {path}")
    return path


class RunConfig:
    def __init__(self, raw: dict, config_dir: str):
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        _require_keys(raw, _TOP_KEYS, "top-level")
        self._dir = config_dir

        graph = raw.get("graph")
        if not isinstance(graph, dict) or "path" not in graph:
            raise ConfigError('config requires a "graph" block with a "path"')
        _require_keys(graph, _GRAPH_KEYS, "graph")
        self.graph_path = _require_path(self._resolve(graph["path"]), "graph")
        self.graph_format = graph.get("format")
        if self.graph_format is not None and self.graph_format not in FORMATS:
            raise ConfigError(f"graph format must be one of {FORMATS}")
        self.graph_backend = graph.get("backend")

        provider = raw.get("provider")
        if not isinstance(provider, dict) or "kind" not in provider:
            raise ConfigError('config requires a "provider" block with a "kind"')
        _require_keys(provider, _PROVIDER_KEYS, "provider")
        self.provider = self._build_provider(provider)

        chain = raw.get("chain", {})
        if not isinstance(chain, dict):
            raise ConfigError('"chain" block must be an object')
        _require_keys(chain, _CHAIN_KEYS, "chain")
        try:
            self.chain = ChainConfig(**chain)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad chain config: {exc}") from exc

        self.eval_block = raw.get("eval")
        if self.eval_block is not None:
            if not isinstance(self.eval_block, dict):
                raise ConfigError('"eval" block must be an object')
            _require_keys(self.eval_block, _EVAL_KEYS, "eval")
            if "dataset" not in self.eval_block:
                raise ConfigError('eval config requires a "dataset" path')
            self.eval_block = dict(self.eval_block)
            self.eval_block["dataset"] = _require_path(self._resolve(self.eval_block["dataset"]), "dataset")
            fmt = self.eval_block.get("format", "markdown")
            if fmt not in REPORT_FORMATS:
                raise ConfigError(f"report format must be one of {REPORT_FORMATS}")

    def _resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self._dir, path)

    def _build_provider(self, block: dict) -> ProviderConfig:
        kwargs = dict(block)
        kind = kwargs.pop("kind")
        script = kwargs.pop("script", None)
        responder_ref = kwargs.pop("responder", None)
        transcript = kwargs.pop("transcript", None)

        fields = {}
        if script is not None:
            if not isinstance(script, list) or not all(
                isinstance(e, dict) and set(e) == {"match", "reply"} for e in script
            ):
                raise ConfigError('provider script must be a list of {"match", "reply"} objects')
            fields["script"] = tuple((e["match"], e["reply"]) for e in script)
        if responder_ref is not None:
            fields["responder"] = self._load_responder(responder_ref)
        if transcript is not None:
            fields["transcript_path"] = self._resolve(transcript)
        fields.update(kwargs)
        try:
            return ProviderConfig(kind=kind, **fields)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad provider config: {exc}") from exc

    @staticmethod
    def _load_responder(ref: str):
        if not isinstance(ref, str) or ":" not in ref:
            raise ConfigError('provider responder must be a "module:attribute" reference')
        module_name, attr = ref.split(":", 1)
        try:
            module = importlib.import_module(module_name)
            responder = getattr(module, attr)
        except (ImportError, AttributeError) as exc:
            raise ConfigError(f"cannot load responder {ref!r}: {exc}") from exc
        if not callable(responder):
            raise ConfigError(f"responder {ref!r} is not callable")
        return responder

    def load_graph(self):
        return load_graph_path(self.graph_path, format=self.graph_format, backend=self.graph_backend)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    return RunConfig(raw, os.path.dirname(os.path.abspath(path)))


def cmd_ingest(args) -> int:
    graph = load_graph_path(args.path, format=args.format)
    print(f"{graph.num_triples} triples, {graph.num_entities} entities, {graph.num_relations} relations")
    return EXIT_OK


def cmd_ask(args) -> int:
    config = load_config(args.config)
    graph = config.load_graph()
    plan = decompose(config.provider, args.question, graph.relation_sample())
    trace = run_chain(config.provider, graph, plan, config.chain)
    if not trace.final_answers:
        print("(no answers)")
    for rank, (entity, support) in enumerate(trace.final_answers, start=1):
        print(f"{rank}. {entity} (support={support})")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace_to_json(trace))
    return EXIT_OK


def cmd_eval(args) -> int:
    config = load_config(args.config)
    if config.eval_block is None:
        raise ConfigError('eval command requires an "eval" block in the config')
    graph = config.load_graph()
    with open(config.eval_block["dataset"], "rb") as fh:
        records = load_dataset(fh)

    base = config.chain
    variants = []
    if args.mode in ("baseline", "both"):
        variants.append(
            ChainConfig(base.program_retries, base.validation_retries, base.fallback_hops,
                        code_module=False, grounding=False)
        )
    if args.mode in ("enhanced", "both"):
        variants.append(
            ChainConfig(base.program_retries, base.validation_retries, base.fallback_hops,
                        code_module=True, grounding=True)
        )

    dataset_name = config.eval_block.get("name", os.path.basename(config.eval_block["dataset"]))
    parallelism = config.eval_block.get("parallelism", 1)
    out_dir = config.eval_block.get("out_dir")
    if out_dir:
        out_dir = config._resolve(out_dir)
        os.makedirs(out_dir, exist_ok=True)

    reports = []
    for variant in variants:
        suffix = variant.label().replace(" ", "_").replace("+", "plus")
        report, _ = run_eval(
            config.provider, graph, records, variant, parallelism,
            dataset_name=dataset_name,
            trace_dir=out_dir,
            sidecar_path=os.path.join(out_dir, f"outcomes.{suffix}.jsonl") if out_dir else None,
        )
        reports.append(report)

    fmt = args.format or config.eval_block.get("format", "markdown")
    rendered = emit_report(reports, fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def cmd_trace(args) -> int:
    with open(args.trace_file, encoding="utf-8") as fh:
        doc = json.load(fh)
    print(f"question: {doc['origin_question']}")
    print(f"plan: {len(doc['plan']['subproblems'])} sub-problem(s)")
    for step in doc["steps"]:
        print(f"\nstep {step['subproblem_id']} [{step['status']}]")
        sub = next(s for s in doc["plan"]["subproblems"] if s["id"] == step["subproblem_id"])
        print(f"  question: {sub['question']}")
        if step["program"]:
            for line in step["program"].splitlines():
                print(f"  | {line}")
        print(f"  answers: {', '.join(step['answers']) if step['answers'] else '(none)'}")
        print(f"  evidence: {len(step['evidence'])} triple(s); claims: {len(step['claims'])}; "
              f"ungrounded: {len(step['ungrounded'])}")
    finals = ", ".join(f"{fa['entity']} (support={fa['support']})" for fa in doc["final_answers"])
    print(f"\nfinal answers: {finals if finals else '(none)'}")
    print(f"total evidence: {len(doc['total_evidence'])} triple(s)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgchain", description="Grounded KGQA pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load a graph file and print its size")
    p_ingest.add_argument("path")
    p_ingest.add_argument("--format", choices=FORMATS, default=None)
    p_ingest.set_defaults(func=cmd_ingest)

    p_ask = sub.add_parser("ask", help="answer one question through the full chain")
    p_ask.add_argument("--config", required=True)
    p_ask.add_argument("question")
    p_ask.add_argument("--trace", default=None, help="write the chain trace JSON here")
    p_ask.set_defaults(func=cmd_ask)

    p_eval = sub.add_parser("eval", help="run the dataset in the config's eval block")
    p_eval.add_argument("--config", required=True)
    mode = p_eval.add_mutually_exclusive_group(required=True)
    mode.add_argument("--baseline", dest="mode", action="store_const", const="baseline")
    mode.add_argument("--enhanced", dest="mode", action="store_const", const="enhanced")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    p_eval.add_argument("--out", default=None)
    p_eval.add_argument("--format", choices=REPORT_FORMATS, default=None)
    p_eval.set_defaults(func=cmd_eval)

    p_trace = sub.add_parser("trace", help="pretty-print a stored chain trace")
    p_trace.add_argument("trace_file")
    p_trace.set_defaults(func=cmd_trace)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except KgchainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERIC


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
