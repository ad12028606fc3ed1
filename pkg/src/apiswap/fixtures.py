"""Synthetic git repositories with known replacement ground truth.

Each injection spec grows into a two-commit sequence inside one generated
repository: a base commit introducing a small helper method plus its call
sites, then either a clean replacement commit (helper deleted, every call
site switched to the target API, import added) or one adversarial variant
per requested noise kind.  The manifest written next to the repository says
exactly what a correct detector must and must not report.

All randomized choices — class names, argument names, call-site shapes,
commit authors, messages, filler commits — come from one seeded generator,
and commit timestamps are fixed, so the same seed always yields the same
commit ids and a byte-identical manifest.
"""

from __future__ import annotations

import random
import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path

from .errors import GitError, GitUnavailable
from .storage import dump_json

# each noise kind trips exactly one stage of the detector's funnel;
# "-" means the commit must not even produce a candidate event
NOISE_CONDITION = {
    "wrapper": "2",
    "rename-only": "4",
    "partial-replacement": "4",
    "api-also-declared-locally": "5",
    "formatting-change": "-",
}
NOISE_KINDS = tuple(sorted(NOISE_CONDITION))

_BASE_EPOCH = 1614592800  # fixed start; commits step forward from here
_STEP_SECONDS = 977

_AUTHORS = [
    ("Ana Petrov", "ana@petrovdev.example"),
    ("Kenji Mori", "kenji@morisoft.example"),
    ("Lea Brandt", "lea.brandt@example.org"),
    ("Tomas Ruiz", "truiz@example.net"),
]

_TOPICS = [
    ("TagStore", "tag"),
    ("UserRegistry", "user"),
    ("RouteTable", "route"),
    ("SessionCache", "session"),
    ("InventoryList", "inventory"),
    ("MetricSink", "metric"),
    ("QueueAudit", "queue"),
    ("ShardMap", "shard"),
]

_ARG_POOL = [
    ("users", "name"),
    ("items", "key"),
    ("tags", "label"),
    ("rows", "id"),
    ("names", "probe"),
    ("codes", "token"),
]


@dataclass(frozen=True)
class InjectionSpec:
    method_name: str
    body_template: str  # helper statements; may reference `hay` and `needle`
    call_sites: int
    api_name: str
    api_receiver: str
    import_path: str
    library: str  # group:artifact:version
    noise_kinds: frozenset = frozenset()

    def __post_init__(self):
        if self.call_sites < 1:
            raise ValueError("call_sites must be at least 1")
        unknown = set(self.noise_kinds) - set(NOISE_KINDS)
        if unknown:
            raise ValueError(f"unknown noise kinds: {sorted(unknown)}")
        if "partial-replacement" in self.noise_kinds and self.call_sites < 2:
            raise ValueError("partial replacement needs at least 2 call sites")
        if self.method_name == self.api_name:
            raise ValueError("method and API names must differ")


@dataclass
class _Caller:
    name: str
    shape: int
    args: tuple[str, str]
    file_idx: int


@dataclass
class _Sequence:
    spec: InjectionSpec
    kind: str  # "" for a clean injection, else the noise kind
    method_name: str  # unique per sequence so sequences cannot shadow each other
    package: str
    class_name: str
    callers: list[_Caller]
    rename_target: str = ""

    @property
    def file_count(self) -> int:
        return 1 + max(c.file_idx for c in self.callers)

    def rel_path(self, file_idx: int) -> str:
        cls = self.class_name if file_idx == 0 else f"{self.class_name}Support"
        return f"src/main/java/{self.package.replace('.', '/')}/{cls}.java"


def _call_expr(seq: _Sequence, caller: _Caller, state: str) -> str:
    args = f"({caller.args[0]}, {caller.args[1]})"
    spec = seq.spec
    if state == "base" or (state == "partial" and caller is seq.callers[0]):
        target = seq.method_name
    elif state == "renamed":
        target = seq.rename_target
    elif state == "api-local":
        target = spec.api_name
    else:
        return f"{spec.api_receiver}.{spec.api_name}{args}"
    if caller.file_idx > 0:
        # helpers live in the first class; other files call them qualified
        target = f"{seq.class_name}.{target}"
    return target + args


def _caller_lines(expr: str, shape: int, pad: str) -> list[str]:
    if shape == 0:
        return [f"{pad}return {expr};"]
    if shape == 1:
        return [f"{pad}return !{expr};"]
    if shape == 2:
        return [f"{pad}boolean hit = {expr};", f"{pad}return hit;"]
    return [
        f"{pad}if ({expr}) {{",
        f"{pad}    return true;",
        f"{pad}}}",
        f"{pad}return false;",
    ]


def _helper_lines(name: str, body_template: str) -> list[str]:
    lines = [f"    private static boolean {name}(String[] hay, String needle) {{"]
    for raw in body_template.strip("\n").splitlines():
        lines.append(f"        {raw}" if raw.strip() else "")
    lines.append("    }")
    return lines


def _render_file(seq: _Sequence, file_idx: int, state: str) -> str:
    spec = seq.spec
    needs_import = state in ("replaced", "partial", "wrapper-after") or (
        state == "wrapper-base" and file_idx == 0
    )
    imports = [f"import {spec.import_path};"] if needs_import else []
    cls = seq.class_name if file_idx == 0 else f"{seq.class_name}Support"
    chunks = [f"package {seq.package};", ""]
    if imports:
        chunks.extend(imports + [""])
    chunks.append(f"public class {cls} {{")

    if file_idx == 0:
        if state in ("base", "renamed", "formatted", "partial"):
            chunks.append("")
            chunks.extend(_helper_lines(seq.method_name, spec.body_template))
        elif state == "wrapper-base":
            chunks.append("")
            chunks.extend(
                _helper_lines(
                    seq.method_name,
                    f"return {spec.api_receiver}.{spec.api_name}(hay, needle);",
                )
            )
        if state == "renamed":
            chunks.append("")
            chunks.extend(_helper_lines(seq.rename_target, spec.body_template))
        if state == "api-local":
            chunks.append("")
            chunks.extend(_helper_lines(spec.api_name, spec.body_template))

    pad = "            " if state == "formatted" else "        "
    call_state = {
        "wrapper-base": "base",
        "formatted": "base",
        "wrapper-after": "replaced",
    }.get(state, state)
    for caller in seq.callers:
        if caller.file_idx != file_idx:
            continue
        expr = _call_expr(seq, caller, call_state)
        chunks.append("")
        chunks.append(
            f"    public boolean {caller.name}(String[] {caller.args[0]}, String {caller.args[1]}) {{"
        )
        chunks.extend(_caller_lines(expr, caller.shape, pad))
        chunks.append("    }")
        if state == "formatted":
            chunks.append("")
    chunks.append("}")
    return "\n".join(chunks) + "\n"


_AFTER_STATE = {
    "": "replaced",
    "wrapper": "wrapper-after",
    "rename-only": "renamed",
    "formatting-change": "formatted",
    "partial-replacement": "partial",
    "api-also-declared-locally": "api-local",
}


def _base_state(kind: str) -> str:
    return "wrapper-base" if kind == "wrapper" else "base"


def _base_message(seq: _Sequence, rng: random.Random) -> str:
    topic = seq.class_name.lower()
    return rng.choice(
        [
            f"add {topic} lookup helpers",
            f"introduce {topic} scanning utilities",
            f"new {topic} membership checks",
        ]
    )


def _after_message(seq: _Sequence, rng: random.Random) -> str:
    spec = seq.spec
    api = f"{spec.api_receiver}.{spec.api_name}"
    if seq.kind == "":
        return rng.choice(
            [
                f"replace home-grown {seq.method_name} with {api}",
                f"use {api} instead of our own scan",
                f"drop custom {seq.method_name} in favor of {api}",
            ]
        )
    if seq.kind == "wrapper":
        return f"inline {seq.method_name} wrapper"
    if seq.kind == "rename-only":
        return f"rename {seq.method_name} to {seq.rename_target}"
    if seq.kind == "formatting-change":
        return f"reformat {seq.class_name} call sites"
    if seq.kind == "partial-replacement":
        return f"start moving {seq.method_name} call sites to {api}"
    return f"use a local {spec.api_name} implementation"


class _RepoWriter:
    def __init__(self, path: Path, rng: random.Random):
        if shutil.which("git") is None:
            raise GitUnavailable("git binary not found on PATH")
        self.path = path
        self.rng = rng
        self.ticks = 0
        path.mkdir(parents=True, exist_ok=True)
        self._git("init", "-q", "-b", "main")

    def _git(self, *args: str, env: dict | None = None) -> str:
        full_env = {
            "GIT_CONFIG_GLOBAL": "/dev/null",
            "GIT_CONFIG_SYSTEM": "/dev/null",
            "PATH": "/usr/bin:/bin:/usr/local/bin",
        }
        if env:
            full_env.update(env)
        proc = subprocess.run(
            ["git", "-C", str(self.path), *args],
            capture_output=True,
            env=full_env,
        )
        if proc.returncode != 0:
            raise GitError(list(args), proc.returncode, proc.stderr.decode("utf-8", "replace"))
        return proc.stdout.decode("utf-8", "replace")

    def write(self, rel: str, text: str) -> None:
        target = self.path / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")

    def commit(self, message: str) -> str:
        self.ticks += 1
        stamp = f"{_BASE_EPOCH + self.ticks * _STEP_SECONDS} +0000"
        name, email = self.rng.choice(_AUTHORS)
        env = {
            "GIT_AUTHOR_NAME": name,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_COMMITTER_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_AUTHOR_DATE": stamp,
            "GIT_COMMITTER_DATE": stamp,
        }
        self._git("add", "-A")
        self._git("commit", "-q", "-m", message, env=env)
        return self._git("rev-parse", "HEAD").strip()


def _plan_sequences(specs: list[InjectionSpec], rng: random.Random) -> list[_Sequence]:
    names = [s.method_name for s in specs]
    if len(set(names)) != len(names):
        raise ValueError("method names must be unique across specs")
    api_names = {s.api_name for s in specs}
    if api_names & set(names):
        raise ValueError("an API name collides with a method name")
    for spec in specs:
        if "api-also-declared-locally" in spec.noise_kinds:
            others = {s.api_name for s in specs if s is not spec}
            if spec.api_name in others:
                raise ValueError(
                    f"API {spec.api_name!r} would be declared locally but is "
                    "also the target of another spec"
                )

    sequences = []
    for spec in specs:
        kinds = [""] if not spec.noise_kinds else sorted(spec.noise_kinds)
        for kind in kinds:
            base_cls, topic = rng.choice(_TOPICS)
            n = len(sequences)
            class_name = f"{base_cls}{n}"
            # one spec can expand into several sequences; each needs its own
            # helper name or a kept declaration in one sequence would break
            # condition checks in another
            method_name = spec.method_name if kind == "" else f"{spec.method_name}{n}"
            callers = []
            for i in range(spec.call_sites):
                callers.append(
                    _Caller(
                        name=f"probe{i}",
                        shape=rng.randrange(4),
                        args=rng.choice(_ARG_POOL),
                        file_idx=1 if spec.call_sites >= 4 and i >= spec.call_sites // 2 else 0,
                    )
                )
            sequences.append(
                _Sequence(
                    spec=spec,
                    kind=kind,
                    method_name=method_name,
                    package=f"net.example.{topic}{n}",
                    class_name=class_name,
                    callers=callers,
                    rename_target=f"{method_name}Lookup",
                )
            )
    names = [s.method_name for s in sequences]
    if len(set(names)) != len(names):
        raise ValueError("generated sequence method names collide; rename the specs")
    return sequences


def build_fixture(specs: list[InjectionSpec], seed: int, root_dir) -> tuple[Path, dict]:
    """Build one synthetic repository plus its ground-truth manifest.

    Deterministic for a given (specs, seed): identical commit ids, identical
    manifest bytes.  Returns (repo_path, manifest); the manifest is also
    written to `<root_dir>/manifest.json`.
    """
    root = Path(root_dir)
    rng = random.Random(seed)
    sequences = _plan_sequences(list(specs), rng)

    repo = _RepoWriter(root / "repo", rng)
    repo.write("README.md", "# workbench\n\nSmall data plumbing experiments.\n")
    repo.commit("initial scaffolding")

    manifest: dict = {"schema": 1, "seed": seed, "must_detect": [], "must_not_detect": []}
    for seq in sequences:
        for idx in range(seq.file_count):
            repo.write(seq.rel_path(idx), _render_file(seq, idx, _base_state(seq.kind)))
        repo.commit(_base_message(seq, rng))

        for idx in range(seq.file_count):
            repo.write(seq.rel_path(idx), _render_file(seq, idx, _AFTER_STATE[seq.kind]))
        sha = repo.commit(_after_message(seq, rng))

        spec = seq.spec
        if seq.kind == "":
            manifest["must_detect"].append(
                {
                    "sha": sha,
                    "m_simple_name": seq.method_name,
                    "m_arity": 2,
                    "api_simple_name": spec.api_name,
                    "api_receiver": spec.api_receiver,
                    "replacement_count": spec.call_sites,
                    "import_path": spec.import_path,
                    "library": spec.library,
                    "files": sorted(seq.rel_path(i) for i in range(seq.file_count)),
                }
            )
        else:
            api = seq.rename_target if seq.kind == "rename-only" else spec.api_name
            manifest["must_not_detect"].append(
                {
                    "sha": sha,
                    "m_simple_name": seq.method_name,
                    "m_arity": 2,
                    "api_simple_name": api,
                    "noise_kind": seq.kind,
                    "reason": NOISE_CONDITION[seq.kind],
                }
            )

        if rng.random() < 0.4:
            notes = repo.path / "NOTES.md"
            prior = notes.read_text(encoding="utf-8") if notes.exists() else "# notes\n"
            repo.write("NOTES.md", prior + f"- checked {seq.class_name}\n")
            repo.commit("update working notes")

    dump_json(root / "manifest.json", manifest)
    return repo.path, manifest
