"""Build the API index: fetch library sources, extract public methods.

The index is the pipeline's definition of "known third-party API": every
public method declared in the source archive of a mined library, plus the
set of packages each library declares (used later to resolve added imports
back to libraries).
"""

from __future__ import annotations

import re
import urllib.error
import urllib.request
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import ArchiveCorrupt, LibraryNotFound, MetadataParseError, NetworkError
from .storage import dump_jsonl, load_jsonl
from .surface import parse_file

DEFAULT_MAVEN_BASE = "https://repo1.maven.org/maven2"

_DEPRECATION_MARK = re.compile(r"@\s*Deprecated\b")
_ANNOTATION_OR_COMMENT_LINE = re.compile(r"^\s*(@|\*|//|/\*|$)")


@dataclass(frozen=True, order=True)
class LibraryCoordinate:
    group_id: str
    artifact_id: str
    version: str

    def __str__(self) -> str:
        return f"{self.group_id}:{self.artifact_id}:{self.version}"

    @classmethod
    def parse(cls, text: str) -> "LibraryCoordinate":
        parts = text.split(":")
        if len(parts) == 2:
            return cls(parts[0], parts[1], "")
        if len(parts) == 3:
            return cls(parts[0], parts[1], parts[2])
        raise ValueError(f"not a group:artifact[:version] coordinate: {text!r}")


@dataclass
class ApiRecord:
    library: LibraryCoordinate
    package_name: str
    file_path: str
    simple_name: str
    arity: int
    signature_text: str
    deprecated: bool = False

    def to_dict(self) -> dict:
        return {
            "library": str(self.library),
            "package_name": self.package_name,
            "file_path": self.file_path,
            "simple_name": self.simple_name,
            "arity": self.arity,
            "signature_text": self.signature_text,
            "deprecated": self.deprecated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ApiRecord":
        return cls(
            library=LibraryCoordinate.parse(d["library"]),
            package_name=d["package_name"],
            file_path=d["file_path"],
            simple_name=d["simple_name"],
            arity=d["arity"],
            signature_text=d["signature_text"],
            deprecated=d.get("deprecated", False),
        )


@dataclass
class ApiIndex:
    apis: list[ApiRecord] = field(default_factory=list)
    packages: dict[str, frozenset[LibraryCoordinate]] = field(default_factory=dict)

    def __post_init__(self):
        self._by_name: dict[str, list[ApiRecord]] = {}
        self._names_arity: set[tuple[str, int]] = set()
        for rec in self.apis:
            self._by_name.setdefault(rec.simple_name, []).append(rec)
            self._names_arity.add((rec.simple_name, rec.arity))

    def has_name(self, simple_name: str) -> bool:
        return simple_name in self._by_name

    def has(self, simple_name: str, arity: int) -> bool:
        return (simple_name, arity) in self._names_arity

    def lookup(self, simple_name: str, arity: Optional[int] = None) -> list[ApiRecord]:
        recs = self._by_name.get(simple_name, [])
        if arity is None:
            return list(recs)
        return [r for r in recs if r.arity == arity]

    def match_import_path(self, dotted: str) -> Optional[tuple[str, frozenset[LibraryCoordinate]]]:
        """Resolve an import path to the longest indexed package prefix."""
        parts = dotted.split(".")
        for cut in range(len(parts), 0, -1):
            prefix = ".".join(parts[:cut])
            libs = self.packages.get(prefix)
            if libs:
                return prefix, libs
        return None

    # -- persistence --------------------------------------------------------

    def save(self, api_path: str | Path, packages_path: str | Path) -> None:
        recs = sorted(
            (r.to_dict() for r in self.apis),
            key=lambda d: (d["library"], d["file_path"], d["simple_name"], d["arity"], d["signature_text"]),
        )
        dump_jsonl(api_path, recs)
        pkg_rows = [
            {"package": pkg, "libraries": sorted(str(c) for c in libs)}
            for pkg, libs in sorted(self.packages.items())
        ]
        dump_jsonl(packages_path, pkg_rows)

    @classmethod
    def load(cls, api_path: str | Path, packages_path: str | Path) -> "ApiIndex":
        apis = [ApiRecord.from_dict(d) for d in load_jsonl(api_path)]
        packages = {
            row["package"]: frozenset(LibraryCoordinate.parse(c) for c in row["libraries"])
            for row in load_jsonl(packages_path)
        }
        return cls(apis=apis, packages=packages)


# ---------------------------------------------------------------------------
# version resolution and fetching
# ---------------------------------------------------------------------------


def _version_sort_key(version: str) -> tuple:
    # component-wise: numeric components compare as numbers, others as text
    comps = re.split(r"[.\-_]", version)
    return tuple((0, int(c), "") if c.isdigit() else (1, 0, c) for c in comps)


def _http_get(url: str, timeout: float = 30.0) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except urllib.error.HTTPError as e:
        if e.code == 404:
            raise LibraryNotFound(url, "HTTP 404") from e
        raise NetworkError(f"GET {url} failed: HTTP {e.code}") from e
    except urllib.error.URLError as e:
        raise NetworkError(f"GET {url} failed: {e.reason}") from e


def resolve_latest_version(
    group_id: str, artifact_id: str, base_url: str = DEFAULT_MAVEN_BASE
) -> LibraryCoordinate:
    """Read maven-metadata.xml and pick the designated (or maximal) release."""
    import xml.etree.ElementTree as ET

    url = f"{base_url.rstrip('/')}/{group_id.replace('.', '/')}/{artifact_id}/maven-metadata.xml"
    try:
        raw = _http_get(url)
    except LibraryNotFound:
        raise LibraryNotFound(f"{group_id}:{artifact_id}", "no metadata document")
    try:
        root = ET.fromstring(raw)
    except ET.ParseError as e:
        raise MetadataParseError(f"unparseable metadata at {url}: {e}") from e
    release = root.findtext("./versioning/release")
    if release:
        return LibraryCoordinate(group_id, artifact_id, release.strip())
    versions = [v.text.strip() for v in root.findall("./versioning/versions/version") if v.text]
    if not versions:
        raise MetadataParseError(f"metadata at {url} lists no versions")
    best = max(versions, key=_version_sort_key)
    return LibraryCoordinate(group_id, artifact_id, best)


def fetch_library_sources(
    coord: LibraryCoordinate, cache_dir: str | Path, base_url: str = DEFAULT_MAVEN_BASE
) -> Path:
    """Download and unpack <artifact>-<version>-sources.jar; cached by coordinate."""
    dest = Path(cache_dir) / coord.group_id / coord.artifact_id / coord.version
    marker = dest / ".complete"
    if marker.exists():
        return dest
    url = (
        f"{base_url.rstrip('/')}/{coord.group_id.replace('.', '/')}/"
        f"{coord.artifact_id}/{coord.version}/{coord.artifact_id}-{coord.version}-sources.jar"
    )
    try:
        blob = _http_get(url)
    except LibraryNotFound:
        raise LibraryNotFound(coord, "no published source archive")
    dest.mkdir(parents=True, exist_ok=True)
    jar = dest / "sources.jar"
    jar.write_bytes(blob)
    try:
        with zipfile.ZipFile(jar) as zf:
            zf.extractall(dest)
    except (zipfile.BadZipFile, OSError) as e:
        raise ArchiveCorrupt(f"{coord}: {e}") from e
    finally:
        if jar.exists():
            jar.unlink()
    marker.write_text("ok\n", encoding="utf-8")
    return dest


# ---------------------------------------------------------------------------
# indexing
# ---------------------------------------------------------------------------


def _is_deprecated(lines: list[str], start_line: int) -> bool:
    """True when a @Deprecated mark sits in the annotation block above a decl."""
    i = start_line - 2  # line above the declaration head, 0-based
    hops = 0
    while i >= 0 and hops < 8 and _ANNOTATION_OR_COMMENT_LINE.match(lines[i]):
        if _DEPRECATION_MARK.search(lines[i]):
            return True
        i -= 1
        hops += 1
    return False


def index_library(
    source_tree: str | Path, coord: LibraryCoordinate
) -> tuple[list[ApiRecord], set[str], list[str]]:
    """Extract every public method and every declared package from a tree.

    Returns (records, packages, degraded_files).  Package attribution comes
    from each file's package declaration, not its path, so archives with a
    nonstandard layout still index correctly.
    """
    root = Path(source_tree)
    records: list[ApiRecord] = []
    packages: set[str] = set()
    degraded: list[str] = []
    for path in sorted(root.rglob("*.java")):
        rel = path.relative_to(root).as_posix()
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError:
            degraded.append(rel)
            continue
        surface = parse_file(text, rel)
        if surface.parse_degraded:
            degraded.append(rel)
        pkg = surface.package_name or ""
        if pkg:
            packages.add(pkg)
        lines = text.splitlines()
        for decl in surface.declarations:
            if "public" not in decl.modifiers:
                continue
            records.append(
                ApiRecord(
                    library=coord,
                    package_name=pkg,
                    file_path=rel,
                    simple_name=decl.simple_name,
                    arity=decl.arity,
                    signature_text=decl.signature_text,
                    deprecated=_is_deprecated(lines, decl.start_line),
                )
            )
    return records, packages, degraded


def build_index(per_library: Iterable[tuple[LibraryCoordinate, str | Path]]) -> tuple[ApiIndex, dict[str, list[str]]]:
    """Index several unpacked trees into one ApiIndex.

    Returns the index plus a map of coordinate → degraded file list.
    """
    apis: list[ApiRecord] = []
    packages: dict[str, set[LibraryCoordinate]] = {}
    degraded: dict[str, list[str]] = {}
    for coord, tree in per_library:
        recs, pkgs, bad = index_library(tree, coord)
        apis.extend(recs)
        for p in pkgs:
            packages.setdefault(p, set()).add(coord)
        if bad:
            degraded[str(coord)] = bad
    apis.sort(key=lambda r: (str(r.library), r.file_path, r.simple_name, r.arity, r.signature_text))
    return (
        ApiIndex(apis=apis, packages={p: frozenset(s) for p, s in packages.items()}),
        degraded,
    )
