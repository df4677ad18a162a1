"""Deterministic synthetic world for offline runs and tests.

Fifty entities: 20 people (P00..P19, married in consecutive pairs),
10 cities (C0..C9), 5 countries (N0..N4), 5 employers (E0..E4), and
10 landmarks (L0..L9).  People are born in cities, cities sit in
countries, landmarks belong to cities, and everybody works somewhere.
Landmarks never answer any fixture question, which makes them safe
decoys for adversarial responders.

The world also fixes a 30-question QA set (three families of ten) and
three paraphrase templates per family.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..kg.graph import KnowledgeGraph, Triple

PEOPLE = [f"P{i:02d}" for i in range(20)]
CITIES = [f"C{i}" for i in range(10)]
COUNTRIES = [f"N{i}" for i in range(5)]
EMPLOYERS = [f"E{i}" for i in range(5)]
LANDMARKS = [f"L{i}" for i in range(10)]

SPOUSE = "spouse"
BORN_IN = "born_in"
LOCATED_IN = "located_in"
WORKS_FOR = "works_for"
LANDMARK_OF = "landmark_of"


def spouse_of(person: str) -> str:
    i = int(person[1:])
    return PEOPLE[i + 1 if i % 2 == 0 else i - 1]


def birthplace_of(person: str) -> str:
    return CITIES[int(person[1:]) % 10]


def country_of(city: str) -> str:
    return COUNTRIES[int(city[1:]) % 5]


def build_triples() -> list[Triple]:
    triples: list[Triple] = []
    for p in PEOPLE:
        triples.append(Triple(p, SPOUSE, spouse_of(p)))
        triples.append(Triple(p, BORN_IN, birthplace_of(p)))
        triples.append(Triple(p, WORKS_FOR, EMPLOYERS[int(p[1:]) % 5]))
    for c in CITIES:
        triples.append(Triple(c, LOCATED_IN, country_of(c)))
    for i, l in enumerate(LANDMARKS):
        triples.append(Triple(l, LANDMARK_OF, CITIES[i]))
    return triples


@dataclass(frozen=True)
class FixtureQuestion:
    id: str
    question: str
    person: str  # the person parameter the question is about
    family: str  # spouse | spouse-birthplace | birth-country
    gold: tuple[str, ...]


# One canonical phrasing per family plus two paraphrases.
TEMPLATES = {
    "spouse": (
        "Who is the spouse of {p}?",
        "{p} is married to whom?",
        "Name the spouse of {p}.",
    ),
    "spouse-birthplace": (
        "Where was the spouse of {p} born?",
        "In which city was {p}'s spouse born?",
        "Name the birthplace of the spouse of {p}.",
    ),
    "birth-country": (
        "Which country is the birthplace of {p} located in?",
        "In which country was {p} born?",
        "Name the country containing the birthplace of {p}.",
    ),
}


def gold_answer(family: str, person: str) -> tuple[str, ...]:
    if family == "spouse":
        return (spouse_of(person),)
    if family == "spouse-birthplace":
        return (birthplace_of(spouse_of(person)),)
    if family == "birth-country":
        return (country_of(birthplace_of(person)),)
    raise ValueError(f"unknown question family {family!r}")


def build_questions(phrasing: int = 0) -> list[FixtureQuestion]:
    """The 30-question fixture; `phrasing` selects a paraphrase template (0-2)."""
    questions: list[FixtureQuestion] = []
    specs = (
        ("spouse", PEOPLE[:10]),
        ("spouse-birthplace", PEOPLE[10:]),
        ("birth-country", PEOPLE[:10]),
    )
    n = 0
    for family, people in specs:
        for p in people:
            questions.append(
                FixtureQuestion(
                    id=f"q{n:02d}",
                    question=TEMPLATES[family][phrasing].format(p=p),
                    person=p,
                    family=family,
                    gold=gold_answer(family, p),
                )
            )
            n += 1
    return questions


def paraphrase_questions(phrasing: int) -> list[FixtureQuestion]:
    """Ten questions (5 spouse + 5 birth-country) in the given phrasing."""
    qs = build_questions(phrasing)
    return qs[:5] + qs[20:25]


class SynthWorld:
    def __init__(self, backend: str | None = None):
        self.triples = build_triples()
        self.graph = KnowledgeGraph(self.triples, backend=backend)
        self.questions = build_questions()

    def tsv_lines(self) -> list[str]:
        return [f"{t.subject}\t{t.relation}\t{t.object}" for t in self.triples]

    def write_tsv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# synthetic world\n")
            for line in self.tsv_lines():
                fh.write(line + "\n")

    def write_dataset(self, path: str, questions: list[FixtureQuestion] | None = None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for q in questions if questions is not None else self.questions:
                fh.write(json.dumps({"id": q.id, "question": q.question, "answers": list(q.gold)}) + "\n")


_default_world: SynthWorld | None = None


def default_world() -> SynthWorld:
    global _default_world
    if _default_world is None:
        _default_world = SynthWorld()
    return _default_world
