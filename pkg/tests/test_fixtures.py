"""Generator sanity: the synthetic repos must be exactly as advertised."""

import shutil

import pytest

from apiswap.cli import analyze_repo
from apiswap.detector import ReplacementDetector
from apiswap.errors import GitUnavailable, UnknownPairError
from apiswap.fixtures import NOISE_CONDITION, NOISE_KINDS, InjectionSpec, build_fixture
from apiswap.history import RepoHistory
from apiswap.libminer import LibraryCoordinate, build_index
from apiswap.storage import canonical_json, load_json

from test_libminer import LANG3, MINI_TREE

BODY = """\
for (String h : hay) {
    if (h.equals(needle)) {
        return true;
    }
}
return false;"""

ARRAY_IMP = "org.apache.commons.lang3.ArrayUtils"
STRING_IMP = "org.apache.commons.lang3.StringUtils"


def spec(name="hasEntry", k=2, api="contains", recv="ArrayUtils", imp=ARRAY_IMP, noise=()):
    return InjectionSpec(
        method_name=name,
        body_template=BODY,
        call_sites=k,
        api_name=api,
        api_receiver=recv,
        import_path=imp,
        library=str(LANG3),
        noise_kinds=frozenset(noise),
    )


@pytest.fixture(scope="module")
def lang3_index():
    index, degraded = build_index([(LANG3, MINI_TREE)])
    assert degraded == {}
    return index


@pytest.fixture(scope="module")
def mixed_fixture(tmp_path_factory):
    specs = [
        spec("hasEntry", k=1),
        spec("holdsKey", k=5, api="isNotEmpty"),
        spec("seekTag", k=3, api="isBlank", recv="StringUtils", imp=STRING_IMP,
             noise=NOISE_KINDS),
    ]
    root = tmp_path_factory.mktemp("fixture")
    repo, manifest = build_fixture(specs, seed=23, root_dir=root)
    return repo, manifest


def analysis_of(repo, index):
    detector = ReplacementDetector(index)
    history = RepoHistory(repo)
    candidates = analyze_repo(history, detector)
    steps = {s.sha: s for s in history.linear_history()}
    return detector, candidates, steps


# ---------------------------------------------------------------------------
# spec validation
# ---------------------------------------------------------------------------


def test_rejects_zero_call_sites():
    with pytest.raises(ValueError):
        spec(k=0)


def test_rejects_unknown_noise_kind():
    with pytest.raises(ValueError):
        spec(noise=("off-by-one",))


def test_partial_noise_needs_two_sites():
    with pytest.raises(ValueError):
        spec(k=1, noise=("partial-replacement",))


def test_rejects_method_named_like_api():
    with pytest.raises(ValueError):
        spec(name="contains", api="contains")


def test_rejects_duplicate_method_names(tmp_path):
    with pytest.raises(ValueError):
        build_fixture([spec(), spec()], 1, tmp_path)


def test_rejects_shared_locally_declared_api(tmp_path):
    specs = [
        spec("alpha", api="isBlank", noise=("api-also-declared-locally",)),
        spec("beta", api="isBlank"),
    ]
    with pytest.raises(ValueError):
        build_fixture(specs, 1, tmp_path)


def test_git_binary_required(tmp_path, monkeypatch):
    monkeypatch.setattr(shutil, "which", lambda name: None)
    with pytest.raises(GitUnavailable):
        build_fixture([spec()], 1, tmp_path)


# ---------------------------------------------------------------------------
# generated repository properties
# ---------------------------------------------------------------------------


def test_manifest_shape_and_side_file(mixed_fixture):
    repo, manifest = mixed_fixture
    assert manifest["schema"] == 1
    assert len(manifest["must_detect"]) == 2
    assert len(manifest["must_not_detect"]) == len(NOISE_KINDS)
    kinds = {e["noise_kind"]: e["reason"] for e in manifest["must_not_detect"]}
    assert kinds == NOISE_CONDITION
    on_disk = load_json(repo.parent / "manifest.json")
    assert on_disk == manifest


def test_same_seed_rebuild_is_bit_identical(tmp_path):
    specs = [spec("hasEntry", k=2), spec("seekTag", k=2, api="isBlank", noise=("wrapper",))]
    _, first = build_fixture(specs, 99, tmp_path / "one")
    _, second = build_fixture(specs, 99, tmp_path / "two")
    assert canonical_json(first) == canonical_json(second)


def test_different_seed_changes_layout(tmp_path):
    specs = [spec("hasEntry", k=2)]
    _, first = build_fixture(specs, 1, tmp_path / "one")
    _, second = build_fixture(specs, 2, tmp_path / "two")
    assert canonical_json(first) != canonical_json(second)


def test_every_must_detect_is_found_exactly(mixed_fixture, lang3_index):
    repo, manifest = mixed_fixture
    detector, candidates, _ = analysis_of(repo, lang3_index)
    by_key = {(c.sha, c.custom_method.simple_name): c for c in candidates}
    for entry in manifest["must_detect"]:
        cand = by_key[(entry["sha"], entry["m_simple_name"])]
        assert cand.replacement_count == entry["replacement_count"]
        assert cand.api_simple_name == entry["api_simple_name"]
        assert cand.custom_method.arity == entry["m_arity"]
        assert sorted(cand.file_paths) == entry["files"]
        assert LibraryCoordinate.parse(entry["library"]) in cand.candidate_libraries


def test_no_candidate_beyond_the_manifest(mixed_fixture, lang3_index):
    repo, manifest = mixed_fixture
    _, candidates, _ = analysis_of(repo, lang3_index)
    expected = {(e["sha"], e["m_simple_name"]) for e in manifest["must_detect"]}
    assert {(c.sha, c.custom_method.simple_name) for c in candidates} == expected


def test_noise_commits_trip_their_intended_condition(mixed_fixture, lang3_index):
    repo, manifest = mixed_fixture
    detector, _, steps = analysis_of(repo, lang3_index)
    for entry in manifest["must_not_detect"]:
        step = steps[entry["sha"]]
        if entry["reason"] == "-":
            with pytest.raises(UnknownPairError):
                detector.resolve_condition_trace(
                    step, entry["m_simple_name"], entry["api_simple_name"]
                )
            continue
        trace = detector.resolve_condition_trace(
            step, entry["m_simple_name"], entry["api_simple_name"]
        )
        assert not trace.emitted
        assert trace.failing_condition == entry["reason"], entry["noise_kind"]
