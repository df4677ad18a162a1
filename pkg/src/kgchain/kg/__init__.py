"""In-memory knowledge graph: triple store, indices, and loaders."""

from .backend import COMPILED_AVAILABLE, available_cores
from .graph import KnowledgeGraph, Triple, valid_name
from .loader import load_graph, load_graph_path

__all__ = [
    "COMPILED_AVAILABLE",
    "KnowledgeGraph",
    "Triple",
    "available_cores",
    "load_graph",
    "load_graph_path",
    "valid_name",
]
