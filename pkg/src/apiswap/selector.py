"""Candidate filtering: drop trivial methods, apply the count threshold.

Getters, setters and main methods are noise almost by definition — their
bodies are too small for "was replaced by an API" to mean anything — and a
single observed call replacement is weak evidence.  Both filters are
configurable because the right threshold is a judgement call left to whoever
runs the pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .detector import CandidateReplacement
from .surface import MethodKind, classify_method


@dataclass(frozen=True)
class SelectorConfig:
    min_replacements: int = 2
    drop_trivial: bool = True

    def __post_init__(self):
        if self.min_replacements < 1:
            raise ValueError("min_replacements must be at least 1")


def select(
    candidates: list[CandidateReplacement], config: SelectorConfig
) -> list[CandidateReplacement]:
    """Keep ordinary-method candidates with enough observed replacements.

    Preserves input order; never mutates the input.
    """
    kept = []
    for cand in candidates:
        if cand.replacement_count < config.min_replacements:
            continue
        if config.drop_trivial and classify_method(cand.custom_method) is not MethodKind.Ordinary:
            continue
        kept.append(cand)
    return kept
