"""Synthetic world, fixture questions, and deterministic mock responders."""

from .mocks import (
    adversarial_provider,
    adversarial_responder,
    fabricated_claims,
    fuzz_provider,
    make_fuzz_responder,
    oracle_provider,
    oracle_responder,
)
from .world import SynthWorld, build_questions, default_world, paraphrase_questions

__all__ = [
    "SynthWorld",
    "adversarial_provider",
    "adversarial_responder",
    "build_questions",
    "default_world",
    "fabricated_claims",
    "fuzz_provider",
    "make_fuzz_responder",
    "oracle_provider",
    "oracle_responder",
    "paraphrase_questions",
]
