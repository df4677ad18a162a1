"""KGQL: grammar, parser, static validator, and interpreter."""

from .interpreter import ExecutionResult, execute, execute_traced
from .parser import parse
from .program import ARITY, MAX_PROGRAM_LENGTH, DslProgram, Instruction, pretty_print
from .validator import (
    STRUCTURAL,
    UNKNOWN_REGISTER,
    UNKNOWN_RELATION,
    ValidationIssue,
    ValidationReport,
    validate,
)

__all__ = [
    "ARITY",
    "MAX_PROGRAM_LENGTH",
    "DslProgram",
    "ExecutionResult",
    "Instruction",
    "STRUCTURAL",
    "UNKNOWN_REGISTER",
    "UNKNOWN_RELATION",
    "ValidationIssue",
    "ValidationReport",
    "execute",
    "execute_traced",
    "parse",
    "pretty_print",
    "validate",
]
