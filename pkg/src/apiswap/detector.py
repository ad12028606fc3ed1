"""Commit-level detection of custom-method-to-API replacements.

Given one commit step, the snapshot indexes on each side of it, and the
word-diff pairs of its modified/renamed files, derive raw `m -> API` events
from the paired fragments, then keep only groups that survive the five
exclusion conditions and the added-import library check.

Every (old invocation, new invocation) combination with differing names is
an event, but only the outermost calls of the old side qualify as
m-candidates.  Counting is injective: each pair contributes to at most one
emitted candidate, so the per-step counts can never exceed the number of
observed pairs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import UnknownPairError
from .history import CommitStep, ReplacedCallPair, SnapshotIndex
from .libminer import ApiIndex, LibraryCoordinate
from .surface import MethodDeclaration, MethodInvocation, parse_fragment

CONDITION_KEYS = ("1", "2", "3", "4", "5", "import")

SCHEMA_VERSION = 1


@dataclass
class CandidateReplacement:
    repo_id: str
    sha: str
    custom_method: MethodDeclaration
    api_simple_name: str
    api_arity: int
    api_receiver_text: str
    candidate_libraries: frozenset[LibraryCoordinate]
    file_paths: frozenset[str]
    replacement_count: int
    commit_message: str

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "repo_id": self.repo_id,
            "sha": self.sha,
            "custom_method": self.custom_method.to_dict(),
            "api_simple_name": self.api_simple_name,
            "api_arity": self.api_arity,
            "api_receiver_text": self.api_receiver_text,
            "candidate_libraries": sorted(str(c) for c in self.candidate_libraries),
            "file_paths": sorted(self.file_paths),
            "replacement_count": self.replacement_count,
            "commit_message": self.commit_message,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateReplacement":
        return cls(
            repo_id=d["repo_id"],
            sha=d["sha"],
            custom_method=MethodDeclaration.from_dict(d["custom_method"]),
            api_simple_name=d["api_simple_name"],
            api_arity=d["api_arity"],
            api_receiver_text=d["api_receiver_text"],
            candidate_libraries=frozenset(
                LibraryCoordinate.parse(c) for c in d["candidate_libraries"]
            ),
            file_paths=frozenset(d["file_paths"]),
            replacement_count=d["replacement_count"],
            commit_message=d["commit_message"],
        )


@dataclass
class ConditionTrace:
    """Pass/fail record of the exclusion funnel for one (m, API) group."""

    sha: str
    m_simple_name: str
    m_arity: int
    api_simple_name: str
    # keys "1".."5" and "import"; None = not evaluated (an earlier one failed)
    results: dict[str, Optional[bool]] = field(default_factory=dict)
    emitted: bool = False

    @property
    def failing_condition(self) -> Optional[str]:
        for key in CONDITION_KEYS:
            if self.results.get(key) is False:
                return key
        return None


@dataclass
class _Group:
    m_simple_name: str
    m_arity: int
    api_simple_name: str
    api_arity: int
    api_receiver_text: str
    event_files: set[str] = field(default_factory=set)


def _completed(fragment: str, line: str) -> list[MethodInvocation]:
    """Parse a diff fragment, recovering cut-off calls from the full line.

    Word diffs mark only the words that changed, so a call whose trailing
    arguments are shared context arrives truncated.  The reconstructed line
    holds the whole call: take argument count and receiver from there while
    keeping the fragment's own nesting depth (the fragment decides which
    call actually changed, the line only completes it).
    """
    invs = parse_fragment(fragment)
    if not line or line == fragment or all(i.complete for i in invs):
        return invs
    from_line: dict[str, MethodInvocation] = {}
    for cand in parse_fragment(line):
        from_line.setdefault(cand.simple_name, cand)
    out = []
    for inv in invs:
        fixed = from_line.get(inv.simple_name)
        if not inv.complete and fixed is not None and fixed.complete:
            out.append(replace(fixed, call_depth=inv.call_depth))
        else:
            out.append(inv)
    return out


class ReplacementDetector:
    """Evaluates the exclusion funnel and remembers per-group traces."""

    def __init__(self, index: ApiIndex):
        self.index = index
        self.telemetry: Counter = Counter()
        self._traces: dict[tuple[str, str, int, str], ConditionTrace] = {}

    # -- event derivation -----------------------------------------------------

    def detect(
        self,
        step: CommitStep,
        before: SnapshotIndex,
        after: SnapshotIndex,
        pairs: list[ReplacedCallPair],
    ) -> list[CandidateReplacement]:
        groups: dict[tuple[str, int, str], _Group] = {}
        events_per_pair: list[list[tuple[str, int, str]]] = []
        for pair in pairs:
            old_invs = _completed(pair.old_fragment, pair.old_line)
            new_invs = _completed(pair.new_fragment, pair.new_line)
            ordered: list[tuple[str, int, str]] = []
            for o in old_invs:
                if o.call_depth != 0:
                    continue  # nested old calls do not qualify as m
                for n in new_invs:
                    if n.simple_name == o.simple_name:
                        continue
                    key = (o.simple_name, o.arg_count, n.simple_name)
                    if key not in groups:
                        groups[key] = _Group(
                            m_simple_name=o.simple_name,
                            m_arity=o.arg_count,
                            api_simple_name=n.simple_name,
                            api_arity=n.arg_count,
                            api_receiver_text=n.receiver_text,
                        )
                    groups[key].event_files.add(pair.file_path)
                    ordered.append(key)
            events_per_pair.append(ordered)

        surviving: dict[tuple[str, int, str], tuple[MethodDeclaration, frozenset[LibraryCoordinate]]] = {}
        for key, group in groups.items():
            trace, decl, libraries = self._evaluate(step, before, after, group)
            self._traces[(step.sha, *key)] = trace
            if trace.failing_condition is None:
                surviving[key] = (decl, libraries)
            else:
                self.telemetry[trace.failing_condition] += 1

        # injective attribution: a pair counts toward its first surviving group
        counts: dict[tuple[str, int, str], int] = {k: 0 for k in surviving}
        files: dict[tuple[str, int, str], set[str]] = {k: set() for k in surviving}
        for pair, keys in zip(pairs, events_per_pair):
            for key in keys:
                if key in surviving:
                    counts[key] += 1
                    files[key].add(pair.file_path)
                    break

        candidates: list[CandidateReplacement] = []
        for key, group in groups.items():
            if key not in surviving:
                continue
            if counts[key] == 0:
                # every pair that evidenced this group was claimed by another
                self.telemetry["unattributed"] += 1
                continue
            decl, libraries = surviving[key]
            self._traces[(step.sha, *key)].emitted = True
            candidates.append(
                CandidateReplacement(
                    repo_id=step.repo_id,
                    sha=step.sha,
                    custom_method=decl,
                    api_simple_name=group.api_simple_name,
                    api_arity=group.api_arity,
                    api_receiver_text=group.api_receiver_text,
                    candidate_libraries=libraries,
                    file_paths=frozenset(files[key]),
                    replacement_count=counts[key],
                    commit_message=step.message,
                )
            )
        return candidates

    # -- the exclusion funnel ---------------------------------------------------

    def _evaluate(
        self,
        step: CommitStep,
        before: SnapshotIndex,
        after: SnapshotIndex,
        group: _Group,
    ) -> tuple[ConditionTrace, Optional[MethodDeclaration], frozenset[LibraryCoordinate]]:
        trace = ConditionTrace(
            sha=step.sha,
            m_simple_name=group.m_simple_name,
            m_arity=group.m_arity,
            api_simple_name=group.api_simple_name,
            results={key: None for key in CONDITION_KEYS},
        )
        no_libs: frozenset[LibraryCoordinate] = frozenset()

        # (1) m was declared in the pre-commit snapshot: (name, arity) match
        matches = [
            d
            for d in before.declarations_named(group.m_simple_name)
            if d.arity == group.m_arity
        ]
        trace.results["1"] = bool(matches)
        if not matches:
            return trace, None, no_libs
        decl = matches[0]

        # (2) m had a real body and was not already a wrapper around the API
        has_body = bool(decl.body_text.strip("{} \t\r\n"))
        already_calls_api = any(
            inv.simple_name == group.api_simple_name
            for inv in parse_fragment(decl.body_text)
        )
        trace.results["2"] = has_body and not already_calls_api
        if not trace.results["2"]:
            return trace, None, no_libs

        # (3) the post-commit snapshot really invokes the API (name only)
        trace.results["3"] = after.has_invocation_named(group.api_simple_name)
        if not trace.results["3"]:
            return trace, None, no_libs

        # (4) m is gone: no declaration with its name+arity, no invocation with its name
        trace.results["4"] = not after.has_declaration(
            group.m_simple_name, group.m_arity
        ) and not after.has_invocation_named(group.m_simple_name)
        if not trace.results["4"]:
            return trace, None, no_libs

        # (5) the API is not a method of the client itself
        trace.results["5"] = not after.has_declaration(group.api_simple_name)
        if not trace.results["5"]:
            return trace, None, no_libs

        # import check: an import added to an involved file must resolve
        # to an indexed library package
        libraries = self._added_import_libraries(step, before, after, group.event_files)
        trace.results["import"] = bool(libraries)
        return trace, decl, libraries

    def _added_import_libraries(
        self,
        step: CommitStep,
        before: SnapshotIndex,
        after: SnapshotIndex,
        involved_files: set[str],
    ) -> frozenset[LibraryCoordinate]:
        previous_path = {
            f.path: (f.old_path or f.path) for f in step.changed_java_files
        }
        added: set[str] = set()
        for path in sorted(involved_files):
            new_surface = after.files.get(path)
            if new_surface is None:
                continue
            old_surface = before.files.get(previous_path.get(path, path))
            old_imports = (
                {imp.imported_path for imp in old_surface.imports} if old_surface else set()
            )
            for imp in new_surface.imports:
                if imp.imported_path not in old_imports:
                    added.add(imp.imported_path)
        libraries: set[LibraryCoordinate] = set()
        for dotted in sorted(added):
            match = self.index.match_import_path(dotted)
            if match is not None:
                libraries.update(match[1])
        return frozenset(libraries)

    # -- trace lookup -----------------------------------------------------------

    def resolve_condition_trace(
        self,
        step: CommitStep,
        m_simple_name: str,
        api_simple_name: str,
        m_arity: Optional[int] = None,
    ) -> ConditionTrace:
        for (sha, name, arity, api), trace in self._traces.items():
            if sha != step.sha or name != m_simple_name or api != api_simple_name:
                continue
            if m_arity is None or arity == m_arity:
                return trace
        raise UnknownPairError(
            f"no ({m_simple_name} -> {api_simple_name}) event was derived for {step.sha}"
        )
