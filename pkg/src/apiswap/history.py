"""Client-repository history plumbing.

Walks a repository's first-parent chain, materializes the declaration /
invocation / import sets of the snapshots on each side of every commit, and
extracts the paired deleted/added fragments of word-level diffs.

Snapshots are assembled from the object store (``ls-tree`` + ``cat-file``)
rather than by checking commits out, and every parsed blob is cached by
(blob id, path): stepping from one commit to the next re-parses only files
whose blob actually changed.  An incrementally assembled snapshot is
byte-identical to one built from scratch, which the test suite asserts.
"""

from __future__ import annotations

import os
import re
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import GitError, GitUnavailable, MissingCommit, RepoUnavailable, UnknownBranch
from .surface import FileSurface, MethodDeclaration, MethodInvocation, parse_file

DEFAULT_MAX_FILE_BYTES = 1 << 20  # skip pathological generated sources


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChangedFile:
    path: str
    kind: str  # "added" | "deleted" | "modified" | "renamed"
    old_path: Optional[str] = None  # set only for kind == "renamed"


@dataclass
class CommitStep:
    repo_id: str
    sha: str
    parent_sha: str
    message: str
    changed_java_files: list[ChangedFile] = field(default_factory=list)

    def files_to_scan(self) -> list[ChangedFile]:
        """Only modified/renamed files can contain call replacements."""
        return [f for f in self.changed_java_files if f.kind in ("modified", "renamed")]


@dataclass
class ReplacedCallPair:
    file_path: str
    old_fragment: str
    new_fragment: str
    line_hint: int
    # full-line reconstructions (context plus the respective side's fragments);
    # fragments alone often cut a call mid-expression because word diffs mark
    # only the tokens that changed
    old_line: str = ""
    new_line: str = ""


class SnapshotIndex:
    """Declarations, invocations and imports of one commit's whole tree."""

    def __init__(self, sha: str, files: dict[str, FileSurface], skipped_files: list[str]):
        self.sha = sha
        self.files = files
        self.skipped_files = sorted(skipped_files)
        self._decl_pairs: set[tuple[str, int]] = set()
        self._decls_by_name: dict[str, list[MethodDeclaration]] = {}
        self._invs_by_name: dict[str, list[MethodInvocation]] = {}
        self._import_paths: set[str] = set()
        for path in sorted(files):
            fs = files[path]
            for d in fs.declarations:
                self._decl_pairs.add((d.simple_name, d.arity))
                self._decls_by_name.setdefault(d.simple_name, []).append(d)
            for inv in fs.invocations:
                self._invs_by_name.setdefault(inv.simple_name, []).append(inv)
            for imp in fs.imports:
                self._import_paths.add(imp.imported_path)

    # -- D/I/import membership ------------------------------------------------

    def has_declaration(self, simple_name: str, arity: Optional[int] = None) -> bool:
        if arity is None:
            return simple_name in self._decls_by_name
        return (simple_name, arity) in self._decl_pairs

    def declarations_named(self, simple_name: str) -> list[MethodDeclaration]:
        return list(self._decls_by_name.get(simple_name, ()))

    def has_invocation_named(self, simple_name: str) -> bool:
        return simple_name in self._invs_by_name

    def invocations_named(self, simple_name: str) -> list[MethodInvocation]:
        return list(self._invs_by_name.get(simple_name, ()))

    def import_paths(self) -> set[str]:
        return set(self._import_paths)

    def declaration_count(self) -> int:
        return sum(len(fs.declarations) for fs in self.files.values())

    def to_serializable(self) -> dict:
        return {
            "sha": self.sha,
            "skipped_files": self.skipped_files,
            "files": {path: self.files[path].to_dict() for path in sorted(self.files)},
        }


# ---------------------------------------------------------------------------
# git plumbing
# ---------------------------------------------------------------------------


def _run_git(repo: Path, args: list[str], input_bytes: Optional[bytes] = None) -> bytes:
    # APISWAP_GIT points at an alternate git binary (sandboxes, pinned versions)
    argv = [os.environ.get("APISWAP_GIT", "git"), "-C", str(repo), *args]
    try:
        proc = subprocess.run(argv, input=input_bytes, capture_output=True)
    except FileNotFoundError:
        raise GitUnavailable(f"git binary not found: {argv[0]}") from None
    if proc.returncode != 0:
        raise GitError(argv, proc.returncode, proc.stderr.decode("utf-8", "replace"))
    return proc.stdout


class RepoHistory:
    """One client repository: its linear history, snapshots, and word diffs."""

    def __init__(
        self,
        repo_path: str | Path,
        repo_id: Optional[str] = None,
        max_file_bytes: int = DEFAULT_MAX_FILE_BYTES,
    ):
        self.path = Path(repo_path)
        self.repo_id = repo_id or self.path.name
        self.max_file_bytes = max_file_bytes
        try:
            _run_git(self.path, ["rev-parse", "--git-dir"])
        except (GitError, OSError) as e:
            raise RepoUnavailable(f"{self.path} is not a git repository: {e}") from e
        # (blob id, path) -> FileSurface; size-capped blobs are never parsed
        self._parse_cache: dict[tuple[str, str], FileSurface] = {}
        self._index_cache: dict[str, SnapshotIndex] = {}

    # -- history ------------------------------------------------------------

    def _default_branch(self) -> str:
        try:
            ref = _run_git(self.path, ["symbolic-ref", "refs/remotes/origin/HEAD"])
            return ref.decode().strip()
        except GitError:
            return "HEAD"

    def linear_history(self, branch: Optional[str] = None) -> list[CommitStep]:
        """First-parent chain, oldest first; the root commit is not a step."""
        if branch is not None:
            try:
                _run_git(self.path, ["rev-parse", "--verify", "--quiet", branch + "^{commit}"])
            except GitError as e:
                raise UnknownBranch(f"{self.repo_id}: no branch {branch!r}") from e
            rev = branch
        else:
            rev = self._default_branch()
        try:
            out = _run_git(
                self.path,
                ["log", rev, "--first-parent", "--reverse", "--format=%H%x00%P%x00%B%x1e"],
            )
        except GitError as e:
            if "does not have any commits" in e.stderr or "unknown revision" in e.stderr:
                return []  # empty repository
            raise
        steps: list[CommitStep] = []
        for record in out.decode("utf-8", "replace").split("\x1e"):
            record = record.lstrip("\n")
            if not record.strip():
                continue
            sha, parents, message = record.split("\x00", 2)
            if not parents.strip():
                continue  # root commit: no pre-commit snapshot to compare against
            parent = parents.split()[0]
            steps.append(
                CommitStep(
                    repo_id=self.repo_id,
                    sha=sha,
                    parent_sha=parent,
                    message=message.rstrip("\n"),
                    changed_java_files=self._changed_files(parent, sha),
                )
            )
        return steps

    def _changed_files(self, parent_sha: str, sha: str) -> list[ChangedFile]:
        out = _run_git(self.path, ["diff", "--name-status", "-M", "-z", parent_sha, sha])
        fields = out.decode("utf-8", "replace").split("\0")
        changed: list[ChangedFile] = []
        i = 0
        while i < len(fields) and fields[i]:
            status = fields[i]
            if status.startswith(("R", "C")):
                old, new = fields[i + 1], fields[i + 2]
                i += 3
                if not new.endswith(".java"):
                    continue
                if status.startswith("R"):
                    changed.append(ChangedFile(new, "renamed", old_path=old))
                else:
                    changed.append(ChangedFile(new, "added"))  # a copy leaves the old file alone
            else:
                path = fields[i + 1]
                i += 2
                if not path.endswith(".java"):
                    continue
                kind = {"A": "added", "D": "deleted", "M": "modified"}.get(status[:1], "modified")
                changed.append(ChangedFile(path, kind))
        return changed

    # -- snapshots ------------------------------------------------------------

    def snapshot_index(self, sha: str) -> SnapshotIndex:
        cached = self._index_cache.get(sha)
        if cached is not None:
            return cached
        try:
            _run_git(self.path, ["rev-parse", "--verify", "--quiet", sha + "^{commit}"])
        except GitError as e:
            raise MissingCommit(f"{self.repo_id}: no commit {sha}") from e
        entries = self._list_java_blobs(sha)
        missing = [(oid, path) for oid, size, path in entries
                   if (oid, path) not in self._parse_cache and size <= self.max_file_bytes]
        blobs = self._read_blobs([oid for oid, _ in missing])
        for oid, path in missing:
            text = blobs[oid].decode("utf-8", "replace")
            self._parse_cache[(oid, path)] = parse_file(text, path)
        files: dict[str, FileSurface] = {}
        skipped: list[str] = []
        for oid, size, path in entries:
            if size > self.max_file_bytes:
                skipped.append(path)
                continue
            files[path] = self._parse_cache[(oid, path)]
        index = SnapshotIndex(sha, files, skipped)
        if len(self._index_cache) >= 4:
            self._index_cache.pop(next(iter(self._index_cache)))
        self._index_cache[sha] = index
        return index

    def _list_java_blobs(self, sha: str) -> list[tuple[str, int, str]]:
        out = _run_git(self.path, ["ls-tree", "-r", "-z", "--long", sha])
        entries: list[tuple[str, int, str]] = []
        for entry in out.decode("utf-8", "replace").split("\0"):
            if not entry:
                continue
            meta, path = entry.split("\t", 1)
            mode, kind, oid, size = meta.split()
            if kind == "blob" and path.endswith(".java"):
                entries.append((oid, int(size), path))
        return entries

    def _read_blobs(self, oids: list[str]) -> dict[str, bytes]:
        unique = sorted(set(oids))
        if not unique:
            return {}
        out = _run_git(self.path, ["cat-file", "--batch"], input_bytes="\n".join(unique).encode() + b"\n")
        blobs: dict[str, bytes] = {}
        pos = 0
        while pos < len(out):
            nl = out.index(b"\n", pos)
            header = out[pos:nl].decode()
            parts = header.split()
            if len(parts) != 3 or parts[1] != "blob":
                raise GitError(["git", "cat-file", "--batch"], 0, f"unexpected header {header!r}")
            oid, _, size = parts
            start = nl + 1
            blobs[oid] = out[start : start + int(size)]
            pos = start + int(size) + 1  # trailing newline after each object
        return blobs

    # -- word diffs -----------------------------------------------------------

    def word_diff(
        self,
        parent_sha: str,
        sha: str,
        file_path: str,
        old_path: Optional[str] = None,
    ) -> list[ReplacedCallPair]:
        """Paired deleted/added fragments of one file's word-level diff."""
        pathspec = [file_path] if old_path in (None, file_path) else [old_path, file_path]
        out = _run_git(
            self.path,
            [
                "diff",
                parent_sha,
                sha,
                "--word-diff=plain",
                "--unified=0",
                "--ignore-all-space",
                "-M",
                "--",
                *pathspec,
            ],
        )
        return parse_word_diff(out.decode("utf-8", "replace"), file_path)


# ---------------------------------------------------------------------------
# word-diff parsing
# ---------------------------------------------------------------------------

_HUNK_RE = re.compile(r"^@@ -\d+(?:,\d+)? \+(\d+)(?:,\d+)? @@")
_MARKER_RE = re.compile(r"\[-(.*?)-\]|\{\+(.*?)\+\}", re.DOTALL)
_SKIP_PREFIXES = (
    "diff --git",
    "index ",
    "--- ",
    "+++ ",
    "old mode",
    "new mode",
    "similarity index",
    "dissimilarity index",
    "rename from",
    "rename to",
    "copy from",
    "copy to",
    "new file",
    "deleted file",
    "Binary files",
    "\\ No newline",
)


def _side_text(line: str, keep_deleted: bool) -> str:
    """Reconstruct one side of a word-diff line (context + that side's runs)."""

    def repl(m: re.Match) -> str:
        if m.group(1) is not None:  # [-deleted-]
            return m.group(1) if keep_deleted else ""
        return "" if keep_deleted else m.group(2)

    return _MARKER_RE.sub(repl, line)


def parse_word_diff(diff_text: str, file_path: str) -> list[ReplacedCallPair]:
    """Extract adjacent deleted/added fragment pairs from `--word-diff=plain` text.

    Two shapes produce a pair: a deletion run immediately followed (modulo
    whitespace) by an addition run on the same line, and a block of
    deletion-only lines immediately followed by addition-only lines.
    """
    pairs: list[ReplacedCallPair] = []
    in_hunk = False
    line_no = 0

    # pending deletion-only lines for the block shape
    block_del: list[str] = []
    block_add: list[str] = []
    block_line = 0

    def flush_block() -> None:
        nonlocal block_del, block_add
        if block_del and block_add:
            old = "\n".join(block_del)
            new = "\n".join(block_add)
            pairs.append(
                ReplacedCallPair(
                    file_path=file_path,
                    old_fragment=old,
                    new_fragment=new,
                    line_hint=block_line,
                    old_line=old,
                    new_line=new,
                )
            )
        block_del = []
        block_add = []

    for raw in diff_text.split("\n"):
        if raw.startswith("diff --git"):
            flush_block()
            in_hunk = False
            continue
        hunk = _HUNK_RE.match(raw)
        if hunk:
            flush_block()
            in_hunk = True
            line_no = int(hunk.group(1)) - 1
            continue
        if not in_hunk or raw.startswith(_SKIP_PREFIXES):
            continue

        markers = list(_MARKER_RE.finditer(raw))
        dels = [m for m in markers if m.group(1) is not None]
        adds = [m for m in markers if m.group(2) is not None]
        stripped_ctx = _MARKER_RE.sub("", raw).strip()

        if dels and not adds and not stripped_ctx:
            # whole line deleted: does not exist on the new side
            if block_add:
                flush_block()
            if not block_del:
                block_line = line_no + 1
            block_del.append(_side_text(raw, keep_deleted=True))
            continue
        line_no += 1
        if adds and not dels and not stripped_ctx and block_del:
            block_add.append(_side_text(raw, keep_deleted=False))
            continue
        flush_block()
        if not markers:
            continue

        # in-line shape: each deletion whose next marker is an adjacent addition
        old_line = _side_text(raw, keep_deleted=True)
        new_line = _side_text(raw, keep_deleted=False)
        for i, m in enumerate(markers[:-1]):
            nxt = markers[i + 1]
            if (
                m.group(1) is not None
                and nxt.group(2) is not None
                and not raw[m.end() : nxt.start()].strip()
            ):
                pairs.append(
                    ReplacedCallPair(
                        file_path=file_path,
                        old_fragment=m.group(1),
                        new_fragment=nxt.group(2),
                        line_hint=line_no,
                        old_line=old_line,
                        new_line=new_line,
                    )
                )
    flush_block()
    return pairs
