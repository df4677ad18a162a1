import io

import pytest

from kgchain.kg import KnowledgeGraph, Triple, load_graph
from kgchain.synth import default_world

FIXTURE_TSV = "A\tspouse\tB\nB\tborn_in\tC\nA\tborn_in\tC\n"

FIXTURE_TRIPLES = [
    Triple("A", "spouse", "B"),
    Triple("B", "born_in", "C"),
    Triple("A", "born_in", "C"),
]


@pytest.fixture
def tiny_graph() -> KnowledgeGraph:
    return load_graph(io.BytesIO(FIXTURE_TSV.encode()), format="tsv")


@pytest.fixture(scope="session")
def world():
    return default_world()
