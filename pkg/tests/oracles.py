"""Independent brute-force re-implementations used as test oracles.

Nothing here may import from kgchain's traversal, interpreter, or
metric code paths: these functions recompute the same answers from
first principles (linear scans over raw tuples) so the real
implementations have something honest to be compared against.
"""

from __future__ import annotations

import random
import re

Spo = tuple[str, str, str]


def scan_follow(triples: list[Spo], sources: set[str], relation: str) -> tuple[set[str], set[Spo]]:
    result, evidence = set(), set()
    for s, r, o in triples:
        if r == relation and s in sources:
            result.add(o)
            evidence.add((s, r, o))
    return result, evidence


def scan_follow_inverse(triples: list[Spo], sinks: set[str], relation: str) -> tuple[set[str], set[Spo]]:
    result, evidence = set(), set()
    for s, r, o in triples:
        if r == relation and o in sinks:
            result.add(s)
            evidence.add((s, r, o))
    return result, evidence


def brute_execute(
    instructions: list[tuple[str, tuple[str, ...]]], triples: list[Spo], entities: set[str]
) -> tuple[set[str], set[Spo]]:
    """Direct set-algebra evaluation of the instruction semantics table."""
    working: set[str] = set()
    registers: dict[str, set[str]] = {}
    evidence: set[Spo] = set()
    for opcode, args in instructions:
        if opcode == "START":
            working = {args[0]} if args[0] in entities else set()
        elif opcode == "FOLLOW":
            working, matched = scan_follow(triples, working, args[0])
            evidence |= matched
        elif opcode == "FOLLOW_INV":
            working, matched = scan_follow_inverse(triples, working, args[0])
            evidence |= matched
        elif opcode == "SAVE":
            registers[args[0]] = set(working)
        elif opcode == "LOAD":
            working = set(registers[args[0]])
        elif opcode == "INTERSECT":
            working = working & registers[args[0]]
        elif opcode == "UNION":
            working = working | registers[args[0]]
        elif opcode == "FILTER_HAS":
            relation, target = args
            kept = {m for m in working if (m, relation, target) in set(triples)}
            evidence |= {(m, relation, target) for m in kept}
            working = kept
        elif opcode == "RETURN":
            pass
        else:
            raise AssertionError(f"oracle got unknown opcode {opcode}")
    return working, evidence


def brute_hit_at_k(predictions: list[str], gold: set[str], k: int) -> int:
    def norm(t: str) -> str:
        return re.sub(r"\s+", " ", t.strip()).lower()

    top = [norm(p) for p in predictions[:k]]
    return 1 if any(norm(g) in top for g in gold) else 0


def random_graph(rng: random.Random, max_triples: int = 100) -> list[Spo]:
    n_entities = rng.randint(2, 20)
    n_relations = rng.randint(1, 5)
    entities = [f"e{i}" for i in range(n_entities)]
    relations = [f"r{i}" for i in range(n_relations)]
    n = rng.randint(0, max_triples)
    triples = set()
    for _ in range(n):
        triples.add((rng.choice(entities), rng.choice(relations), rng.choice(entities)))
    return sorted(triples)


def random_valid_program(rng: random.Random, triples: list[Spo], max_body: int = 8) -> str:
    """Program text that passes static validation against the graph of ``triples``."""
    entities = sorted({s for s, _, _ in triples} | {o for _, _, o in triples}) or ["e0"]
    relations = sorted({r for _, r, _ in triples}) or ["r0"]

    def entity() -> str:
        return rng.choice(entities) if rng.random() < 0.85 else f"ghost{rng.randint(0, 9)}"

    statements = [f'START("{entity()}");']
    registers: list[str] = []
    for _ in range(rng.randint(0, max_body)):
        choices = ["FOLLOW", "FOLLOW_INV", "SAVE", "FILTER_HAS", "START"]
        if registers:
            choices += ["LOAD", "INTERSECT", "UNION"]
        op = rng.choice(choices)
        if op in ("FOLLOW", "FOLLOW_INV"):
            statements.append(f'{op}("{rng.choice(relations)}");')
        elif op == "SAVE":
            reg = f"x{rng.randint(0, 3)}"
            registers.append(reg)
            statements.append(f'SAVE("{reg}");')
        elif op in ("LOAD", "INTERSECT", "UNION"):
            statements.append(f'{op}("{rng.choice(registers)}");')
        elif op == "FILTER_HAS":
            statements.append(f'FILTER_HAS("{rng.choice(relations)}", "{entity()}");')
        else:
            statements.append(f'START("{entity()}");')
    statements.append("RETURN;")
    sep = rng.choice(["\n", " ", "  \n\t"])
    return sep.join(statements)
