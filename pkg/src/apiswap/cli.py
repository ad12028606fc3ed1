"""Pipeline orchestration: mine-libs, analyze, filter, cluster, report.

Every stage reads and writes plain files under one work directory, so runs
can be inspected, diffed and resumed with ordinary shell tools.  `analyze`
keeps a per-repository completion ledger: an interrupted run loses at most
the repositories in flight, and re-running with a complete ledger is a
no-op that reassembles the same output bytes.

Exit codes: 0 success, 1 usage error, 2 partial failure (some inputs were
skipped), 3 total failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .clustering import cluster_by_rhs
from .detector import CandidateReplacement, ReplacementDetector
from .errors import ApiswapError, ConfigError
from .history import RepoHistory
from .libminer import (
    DEFAULT_MAVEN_BASE,
    ApiIndex,
    LibraryCoordinate,
    build_index,
    fetch_library_sources,
    resolve_latest_version,
)
from .report import import_labels, precision_report, render_csv, render_table
from .selector import SelectorConfig, select
from .storage import atomic_write_text, dump_jsonl, load_jsonl

log = logging.getLogger("apiswap")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2
EXIT_TOTAL = 3

API_INDEX_NAME = "api-index.jsonl"
PACKAGES_NAME = "packages.jsonl"
CANDIDATES_NAME = "candidates.jsonl"
FILTERED_NAME = "filtered.jsonl"
RULES_NAME = "rules.jsonl"
REPORT_NAME = "report.csv"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LibrarySource:
    coordinate: str  # group:artifact[:version]
    path: Optional[Path] = None  # already-unpacked source tree; fetched if absent


@dataclass
class PipelineConfig:
    work_dir: Path = Path("work")
    libraries: list[LibrarySource] = field(default_factory=list)
    repos_file: Optional[Path] = None
    min_replacements: int = 2
    drop_trivial: bool = True
    jobs: int = 1
    base_url: str = DEFAULT_MAVEN_BASE

    def validate(self) -> None:
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.min_replacements < 1:
            raise ConfigError("min_replacements must be at least 1")


def load_config(path: str | Path) -> PipelineConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        try:
            import tomllib as toml_mod  # Python >= 3.11
        except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
            import tomli as toml_mod
        try:
            data = toml_mod.loads(text)
        except toml_mod.TOMLDecodeError as exc:
            raise ConfigError(f"config is not valid TOML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table/object")

    base = p.parent

    def _path(value: str) -> Path:
        q = Path(value)
        return q if q.is_absolute() else base / q

    cfg = PipelineConfig()
    if "work_dir" in data:
        cfg.work_dir = _path(str(data["work_dir"]))
    if "repos_file" in data:
        cfg.repos_file = _path(str(data["repos_file"]))
    if "jobs" in data:
        cfg.jobs = int(data["jobs"])
    if "base_url" in data:
        cfg.base_url = str(data["base_url"])
    selector = data.get("selector", {})
    if "min_replacements" in selector:
        cfg.min_replacements = int(selector["min_replacements"])
    if "drop_trivial" in selector:
        cfg.drop_trivial = bool(selector["drop_trivial"])
    for row in data.get("libraries", []):
        if isinstance(row, str):
            cfg.libraries.append(LibrarySource(coordinate=row))
            continue
        if not isinstance(row, dict) or "coordinate" not in row:
            raise ConfigError(f"library entries need a coordinate: {row!r}")
        tree = _path(str(row["path"])) if "path" in row else None
        cfg.libraries.append(LibrarySource(coordinate=str(row["coordinate"]), path=tree))
    cfg.validate()
    return cfg


def _read_repos(repos_file: Path) -> list[tuple[str, Path]]:
    """One repository per line: `path` or `id path`; `#` starts a comment."""
    if not repos_file.is_file():
        raise ConfigError(f"repos file not found: {repos_file}")
    repos: list[tuple[str, Path]] = []
    seen: set[str] = set()
    base = repos_file.parent
    for raw in repos_file.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) == 1:
            path = Path(parts[0])
            repo_id = path.name
        else:
            repo_id, path = parts[0], Path(parts[1].strip())
        if not path.is_absolute():
            path = base / path
        if repo_id in seen:
            raise ConfigError(f"duplicate repo id in repos file: {repo_id}")
        seen.add(repo_id)
        repos.append((repo_id, path))
    return repos


def _part_name(repo_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", repo_id) + ".jsonl"


# ---------------------------------------------------------------------------
# analysis core (also used directly by the test suite)
# ---------------------------------------------------------------------------


def analyze_repo(
    history: RepoHistory, detector: ReplacementDetector
) -> list[CandidateReplacement]:
    """Walk one repository's linear history through the detector."""
    out: list[CandidateReplacement] = []
    for step in history.linear_history():
        before = history.snapshot_index(step.parent_sha)
        after = history.snapshot_index(step.sha)
        pairs = []
        for changed in step.files_to_scan():
            pairs.extend(
                history.word_diff(step.parent_sha, step.sha, changed.path, changed.old_path)
            )
        out.extend(detector.detect(step, before, after, pairs))
    return out


_IMPORT_LINE = re.compile(r"^\+\s*import\s+(static\s+)?([A-Za-z_][\w.]*)(\.\*)?\s*;")


def repo_ever_adds_known_import(repo_path: Path, index: ApiIndex) -> bool:
    """Stream first-parent patches, looking for any added import the index
    can attribute to a library.  Far cheaper than parsing every snapshot of
    a repository that never even depended on the mined libraries."""
    argv = [
        os.environ.get("APISWAP_GIT", "git"),
        "-C",
        str(repo_path),
        "log",
        "--first-parent",
        "-p",
        "--no-color",
        "--pretty=format:",
    ]
    proc = subprocess.Popen(argv, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL)
    assert proc.stdout is not None
    try:
        for raw in proc.stdout:
            m = _IMPORT_LINE.match(raw.decode("utf-8", "replace"))
            if m and index.match_import_path(m.group(2)) is not None:
                return True
        return False
    finally:
        proc.stdout.close()
        proc.terminate()
        proc.wait()


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def cmd_mine_libs(config: PipelineConfig) -> int:
    if not config.libraries:
        log.error("no libraries configured; nothing to mine")
        return EXIT_USAGE
    work = config.work_dir
    work.mkdir(parents=True, exist_ok=True)
    entries: list[tuple[LibraryCoordinate, Path]] = []
    failures = 0
    for src in config.libraries:
        try:
            coord = LibraryCoordinate.parse(src.coordinate)
            if src.path is not None:
                tree = Path(src.path)
                if not tree.is_dir():
                    raise ConfigError(f"library tree not found: {tree}")
                if not coord.version:
                    raise ConfigError(
                        f"local library {src.coordinate} needs an explicit version"
                    )
            else:
                if not coord.version:
                    coord = resolve_latest_version(
                        coord.group_id, coord.artifact_id, config.base_url
                    )
                tree = fetch_library_sources(coord, work / "lib-cache", config.base_url)
            entries.append((coord, tree))
        except (ApiswapError, ValueError) as exc:
            failures += 1
            log.warning("skipping library %s: %s", src.coordinate, exc)
    if not entries:
        log.error("every configured library failed to mine")
        return EXIT_TOTAL
    index, degraded = build_index(entries)
    for coordinate, files in degraded.items():
        log.warning("%s: %d files parsed in degraded mode", coordinate, len(files))
    index.save(work / API_INDEX_NAME, work / PACKAGES_NAME)
    log.info(
        "indexed %d apis across %d packages from %d libraries",
        len(index.apis),
        len(index.packages),
        len(entries),
    )
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_analyze(config: PipelineConfig) -> int:
    work = config.work_dir
    api_path, pkg_path = work / API_INDEX_NAME, work / PACKAGES_NAME
    if not api_path.is_file() or not pkg_path.is_file():
        log.error("no API index under %s; run mine-libs first", work)
        return EXIT_USAGE
    if config.repos_file is None:
        log.error("no repos_file configured")
        return EXIT_USAGE
    index = ApiIndex.load(api_path, pkg_path)
    repos = _read_repos(config.repos_file)

    parts_dir = work / "analyze" / "parts"
    parts_dir.mkdir(parents=True, exist_ok=True)
    ledger = work / "analyze" / "analyzed.txt"
    done: set[str] = set()
    if ledger.is_file():
        recorded = {line.strip() for line in ledger.read_text(encoding="utf-8").splitlines()}
        # trust a ledger entry only when its part file actually exists
        done = {rid for rid in recorded if (parts_dir / _part_name(rid)).is_file()}
    todo = [(rid, path) for rid, path in repos if rid not in done]

    def one(repo_id: str, path: Path) -> tuple[str, list[dict]]:
        if not repo_ever_adds_known_import(path, index):
            log.info("%s: never adds a known library import; skipped", repo_id)
            return repo_id, []
        detector = ReplacementDetector(index)
        history = RepoHistory(path, repo_id=repo_id)
        cands = analyze_repo(history, detector)
        log.info("%s: %d candidates", repo_id, len(cands))
        return repo_id, [c.to_dict() for c in cands]

    failed: list[str] = []
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        futures = {pool.submit(one, rid, path): rid for rid, path in todo}
        for fut in as_completed(futures):
            rid = futures[fut]
            try:
                rid, rows = fut.result()
            except Exception as exc:
                log.error("%s: analysis failed: %s", rid, exc)
                failed.append(rid)
                continue
            dump_jsonl(parts_dir / _part_name(rid), rows)
            with ledger.open("a", encoding="utf-8") as fh:
                fh.write(rid + "\n")

    finished = [rid for rid, _ in repos if rid not in set(failed)]
    rows_out: list[str] = []
    for rid in sorted(finished):
        part = parts_dir / _part_name(rid)
        if part.is_file():
            rows_out.extend(
                line for line in part.read_text(encoding="utf-8").splitlines() if line
            )
    atomic_write_text(work / CANDIDATES_NAME, "".join(r + "\n" for r in rows_out))
    log.info("wrote %d candidates", len(rows_out))
    if failed and len(failed) == len(repos):
        return EXIT_TOTAL
    return EXIT_PARTIAL if failed else EXIT_OK


def _load_candidates(path: Path) -> list[CandidateReplacement]:
    return [CandidateReplacement.from_dict(d) for d in load_jsonl(path)]


def cmd_filter(config: PipelineConfig) -> int:
    src = config.work_dir / CANDIDATES_NAME
    if not src.is_file():
        log.error("no %s under %s; run analyze first", CANDIDATES_NAME, config.work_dir)
        return EXIT_USAGE
    selector_cfg = SelectorConfig(
        min_replacements=config.min_replacements, drop_trivial=config.drop_trivial
    )
    kept = select(_load_candidates(src), selector_cfg)
    dump_jsonl(config.work_dir / FILTERED_NAME, (c.to_dict() for c in kept))
    log.info("kept %d candidates", len(kept))
    return EXIT_OK


def cmd_cluster(config: PipelineConfig) -> int:
    src = config.work_dir / FILTERED_NAME
    if not src.is_file():
        log.error("no %s under %s; run filter first", FILTERED_NAME, config.work_dir)
        return EXIT_USAGE
    rules = cluster_by_rhs(_load_candidates(src))
    dump_jsonl(config.work_dir / RULES_NAME, (r.to_dict() for r in rules))
    log.info("formed %d rules", len(rules))
    return EXIT_OK


def cmd_report(config: PipelineConfig, labels: Path, thresholds: list[int]) -> int:
    src = config.work_dir / CANDIDATES_NAME
    if not src.is_file():
        log.error("no %s under %s; run analyze first", CANDIDATES_NAME, config.work_dir)
        return EXIT_USAGE
    if not labels.is_file():
        log.error("labels file not found: %s", labels)
        return EXIT_USAGE
    labeled = import_labels(labels, _load_candidates(src))
    rows = precision_report(labeled, thresholds)
    sys.stdout.write(render_table(rows))
    atomic_write_text(config.work_dir / REPORT_NAME, render_csv(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep usage problems on our own exit code
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="apiswap", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="TOML or JSON pipeline configuration")
    parser.add_argument("--work-dir", help="override the configured work directory")
    parser.add_argument("--jobs", type=int, help="override worker count")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("mine-libs", help="build the API index from configured libraries")
    sub.add_parser("analyze", help="mine candidate replacements from client repos")

    p_filter = sub.add_parser("filter", help="apply trivial-method and threshold filters")
    p_filter.add_argument("--min-replacements", type=int, metavar="T")
    p_filter.add_argument("--keep-trivial", action="store_true")

    sub.add_parser("cluster", help="group filtered candidates into rules")

    p_report = sub.add_parser("report", help="precision table from reviewed labels")
    p_report.add_argument("--labels", required=True)
    p_report.add_argument("--thresholds", default="1,2,3,4,5")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"apiswap: {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        config = load_config(args.config) if args.config else PipelineConfig()
        if args.work_dir:
            config.work_dir = Path(args.work_dir)
        if args.jobs is not None:
            config.jobs = args.jobs
        if args.command == "filter":
            if args.min_replacements is not None:
                config.min_replacements = args.min_replacements
            if args.keep_trivial:
                config.drop_trivial = False
        env_base = os.environ.get("APISWAP_BASE_URL")
        if env_base:
            config.base_url = env_base
        config.validate()

        if args.command == "mine-libs":
            return cmd_mine_libs(config)
        if args.command == "analyze":
            return cmd_analyze(config)
        if args.command == "filter":
            return cmd_filter(config)
        if args.command == "cluster":
            return cmd_cluster(config)
        if args.command == "report":
            try:
                thresholds = [int(t) for t in str(args.thresholds).split(",") if t.strip()]
            except ValueError:
                raise ConfigError(f"bad thresholds list: {args.thresholds!r}") from None
            if not thresholds:
                raise ConfigError("thresholds must name at least one integer")
            return cmd_report(config, Path(args.labels), thresholds)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except ApiswapError as exc:
        log.error("%s", exc)
        return EXIT_TOTAL


if __name__ == "__main__":
    sys.exit(main())
