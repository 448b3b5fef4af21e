import json
import os
import time

import pytest

from specialopen import theorems as th
from specialopen.cache import ENV_VAR, HomologyCache, complex_key
from specialopen.homology import normalized_chains
from specialopen.manifolds import build_Bk, enumerate_balls, parse_model
from specialopen.sset import nerve


@pytest.fixture(scope="module")
def big_nerve():
    m = parse_model("cycle:8")
    return nerve(build_Bk(m, enumerate_balls(m), 2).A_category, 2)


def test_second_run_hits_and_is_faster(tmp_path, big_nerve):
    cache = HomologyCache(tmp_path)
    t0 = time.perf_counter()
    first = th.complex_homology(big_nerve, 1, cache=cache)
    t1 = time.perf_counter()
    second = th.complex_homology(big_nerve, 1, cache=cache)
    t2 = time.perf_counter()
    assert (cache.misses, cache.hits) == (1, 1)
    assert first.as_dict() == second.as_dict()
    assert t2 - t1 < t1 - t0


def test_cache_never_changes_output(tmp_path, big_nerve):
    plain = th.complex_homology(big_nerve, 1, coeff="f2")
    cache = HomologyCache(tmp_path)
    th.complex_homology(big_nerve, 1, coeff="f2", cache=cache)
    cached = th.complex_homology(big_nerve, 1, coeff="f2", cache=cache)
    assert cache.hits == 1 and cached.as_dict() == plain.as_dict()


def test_changed_degree_is_distinct_key():
    m = parse_model("interval:3")
    cc = normalized_chains(nerve(build_Bk(m, enumerate_balls(m), 1).A_category, 2))
    assert complex_key(cc, through=1) != complex_key(cc, through=0)
    assert complex_key(cc, through=1) == complex_key(cc, through=1)


def test_corrupted_entry_is_recomputed(tmp_path, big_nerve):
    cache = HomologyCache(tmp_path)
    good = th.complex_homology(big_nerve, 1, cache=cache)
    files = [p for p in tmp_path.rglob("*.json")]
    assert len(files) == 1
    entry = json.loads(files[0].read_text())
    entry["result"]["homology"]["betti"] = [99, 99]
    files[0].write_text(json.dumps(entry))
    again = th.complex_homology(big_nerve, 1, cache=cache)
    assert again.as_dict() == good.as_dict() and cache.hits == 0
    # the overwritten entry is trusted again
    th.complex_homology(big_nerve, 1, cache=cache)
    assert cache.hits == 1
    files[0].write_text("{ not json")
    assert th.complex_homology(big_nerve, 1, cache=cache).as_dict() == good.as_dict()


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_directory_warns(tmp_path):
    d = tmp_path / "ro"
    d.mkdir()
    d.chmod(0o500)
    with pytest.warns(UserWarning):
        assert not HomologyCache(d).enabled


def test_unusable_path_warns(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.warns(UserWarning, match="caching disabled"):
        cache = HomologyCache(blocker / "sub")
    assert not cache.enabled and cache.lookup("ab" * 32) is None


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert HomologyCache.from_env().directory == tmp_path
    monkeypatch.delenv(ENV_VAR)
    assert not HomologyCache.from_env().enabled
