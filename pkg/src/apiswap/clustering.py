"""Grouping surviving candidates into replacement rules by shared RHS.

Two candidates describe the same rule when they replace into the same API.
API identity is the simple name plus library attribution: within one name,
if every candidate's library set shares at least one coordinate the whole
group is one rule keyed by that intersection; otherwise the sets genuinely
disagree and the group splits by exact library set.  Arity is deliberately
not part of the key — diff fragments under-count arguments too often.
"""

from __future__ import annotations

from dataclasses import dataclass

from .detector import CandidateReplacement
from .libminer import LibraryCoordinate


@dataclass(frozen=True, order=True)
class RuleMember:
    """One custom implementation on the left-hand side of a rule."""

    repo_id: str
    sha: str
    signature_text: str
    body_text: str

    def to_dict(self) -> dict:
        return {
            "repo_id": self.repo_id,
            "sha": self.sha,
            "signature_text": self.signature_text,
            "body_text": self.body_text,
        }


@dataclass(frozen=True)
class ReplacementRule:
    api_simple_name: str
    libraries: frozenset[LibraryCoordinate]
    members: tuple[RuleMember, ...]

    @property
    def support(self) -> int:
        return len(self.members)

    @property
    def rhs_key(self) -> tuple[str, tuple[str, ...]]:
        return (self.api_simple_name, tuple(sorted(str(c) for c in self.libraries)))

    def to_dict(self) -> dict:
        return {
            "api_simple_name": self.api_simple_name,
            "libraries": sorted(str(c) for c in self.libraries),
            "support": self.support,
            "members": [m.to_dict() for m in self.members],
        }


def _member(cand: CandidateReplacement) -> RuleMember:
    return RuleMember(
        repo_id=cand.repo_id,
        sha=cand.sha,
        signature_text=cand.custom_method.signature_text,
        body_text=cand.custom_method.body_text,
    )


def cluster_by_rhs(candidates: list[CandidateReplacement]) -> list[ReplacementRule]:
    """Partition candidates into rules; sorted by support desc, then key.

    Every candidate lands in exactly one rule.  Members are deduplicated by
    (repo, sha, signature), so Σ support counts distinct custom methods, and
    the result does not depend on input order.
    """
    by_name: dict[str, list[CandidateReplacement]] = {}
    for cand in candidates:
        by_name.setdefault(cand.api_simple_name, []).append(cand)

    rules: list[ReplacementRule] = []
    for name, group in by_name.items():
        common = frozenset.intersection(*(c.candidate_libraries for c in group))
        if common:
            buckets = {common: group}
        else:
            buckets = {}
            for cand in group:
                buckets.setdefault(cand.candidate_libraries, []).append(cand)
        for libraries, bucket in buckets.items():
            members = tuple(sorted({_member(c) for c in bucket}))
            rules.append(
                ReplacementRule(
                    api_simple_name=name, libraries=libraries, members=members
                )
            )
    rules.sort(key=lambda r: (-r.support, r.rhs_key))
    return rules
