"""Grounded multi-step question answering over local knowledge graphs.

The pipeline decomposes a question into a sub-problem plan, lets a chat
model emit small graph-traversal programs for each sub-problem, executes
those programs against an in-memory triple store, checks every claimed
fact against the graph, and ranks answers by the evidence that actually
backs them.  Deterministic mock providers make the whole pipeline
testable offline; a HIT@K harness measures the effect of the traversal
programs against a plain-prompting baseline.
"""

__version__ = "0.1.0"

from .errors import KgchainError

__all__ = ["KgchainError", "__version__"]
