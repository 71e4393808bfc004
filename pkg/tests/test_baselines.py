"""Brute-force oracle, Jaccard/MinHash behavior and the LSH pipeline."""

import numpy as np
import pytest

from nandstpm.baselines import (
    LshIndex,
    build_lsh_index,
    brute_force_match,
    event_set,
    jaccard,
    load_lsh_index,
    lsh_candidates,
    lsh_query,
    minhash_signature,
    prepare_refs,
    save_lsh_index,
)
from nandstpm.device import StoredSymbol
from nandstpm.errors import ConfigError, DimensionError
from nandstpm.patterns import SpatiotemporalPattern, pattern_from_strings

_X = int(StoredSymbol.DONT_CARE)


def random_patterns(rng, n, height, width, steps, x_density=0.3, query_patterns=False):
    top = 3 if query_patterns else 4
    grids = rng.integers(0, top, size=(n, height * width, steps), dtype=np.int8)
    if not query_patterns and x_density:
        grids[rng.random(grids.shape) < x_density] = _X
    return [
        SpatiotemporalPattern(height=height, width=width, steps=steps, symbols=g)
        for g in grids
    ]


def test_brute_force_examples():
    refs = [
        pattern_from_strings(1, 2, 2, ["+-", "00"]),
        pattern_from_strings(1, 2, 2, ["XX", "XX"]),
        pattern_from_strings(1, 2, 2, ["+-", "0+"]),
    ]
    query = pattern_from_strings(1, 2, 2, ["+-", "00"], query=True)
    assert brute_force_match(query, refs) == {0, 1}
    other = pattern_from_strings(1, 2, 2, ["-+", "--"], query=True)
    assert brute_force_match(other, refs) == {1}


def test_brute_force_dimension_mismatch():
    refs = [pattern_from_strings(1, 1, 2, ["+0"])]
    query = pattern_from_strings(1, 1, 3, ["+00"], query=True)
    with pytest.raises(DimensionError):
        brute_force_match(query, refs)


def test_brute_force_empty_refs():
    query = pattern_from_strings(1, 1, 2, ["+0"], query=True)
    assert brute_force_match(query, []) == set()


def test_jaccard():
    assert jaccard({1, 2, 3}, {1, 2, 3}) == 1.0
    assert jaccard({1, 2}, {3, 4}) == 0.0
    assert jaccard({"x", "y", "z"}, {"y", "z", "w"}) == 0.5
    assert jaccard(set(), set()) == 1.0
    assert jaccard(set(), {1}) == 0.0


def test_event_set():
    p = pattern_from_strings(1, 2, 3, ["+0-", "X0X"])
    assert event_set(p) == {(0, 0, 1), (0, 2, -1)}


def test_minhash_deterministic_and_order_free():
    events = [(0, 0, 1), (3, 2, -1), (7, 1, 1)]
    a = minhash_signature(events, k=32, seed=5)
    b = minhash_signature(reversed(events), k=32, seed=5)
    assert a == b
    c = minhash_signature(events, k=32, seed=6)
    assert a != c


def test_minhash_empty_set_sentinel():
    empty = minhash_signature([], k=16, seed=1)
    assert (empty.values == np.uint64(0xFFFFFFFFFFFFFFFF)).all()
    nonempty = minhash_signature([(0, 0, 1)], k=16, seed=1)
    assert (nonempty.values != np.uint64(0xFFFFFFFFFFFFFFFF)).all()


def test_minhash_collision_rate_tracks_jaccard():
    """Per-position agreement over ~10^4 pairs stays within 0.02 of Jaccard."""
    rng = np.random.default_rng(11)
    universe = [(int(p), int(t), 1 if b else -1) for p, t, b in
                zip(rng.integers(0, 64, 400), rng.integers(0, 10, 400), rng.integers(0, 2, 400))]
    universe = list(dict.fromkeys(universe))
    sets = []
    for _ in range(150):
        size = int(rng.integers(5, 40))
        idx = rng.choice(len(universe), size=size, replace=False)
        sets.append(frozenset(universe[i] for i in idx))
    sigs = [minhash_signature(s, k=128, seed=3).values for s in sets]

    deviations = []
    n_pairs = 0
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            true_j = jaccard(sets[i], sets[j])
            agree = float((sigs[i] == sigs[j]).mean())
            deviations.append(agree - true_j)
            n_pairs += 1
    assert n_pairs >= 10_000
    assert abs(float(np.mean(deviations))) <= 0.02


def test_lsh_index_validation():
    with pytest.raises(ConfigError):
        build_lsh_index([], k=16, bands=5, rows=4)
    with pytest.raises(ConfigError):
        minhash_signature([], k=0)


def test_lsh_exact_duplicate_always_returned():
    rng = np.random.default_rng(12)
    refs = random_patterns(rng, 20, 3, 3, 4)
    index = build_lsh_index(refs, k=64, bands=16, rows=4)
    for j in (0, 7, 19):
        # a query with the reference's own events collides in every band
        stored = refs[j]
        q_symbols = np.array(stored.symbols)
        q_symbols[q_symbols == _X] = int(StoredSymbol.ZERO)
        q = SpatiotemporalPattern(height=3, width=3, steps=4, symbols=q_symbols)
        assert set(lsh_candidates(index, q)) >= {j}
        assert j in lsh_query(index, q)


def test_lsh_subset_of_brute_force():
    rng = np.random.default_rng(13)
    for _ in range(40):
        n = int(rng.integers(2, 25))
        refs = random_patterns(rng, n, 3, 3, 4)
        index = build_lsh_index(refs, k=32, bands=8, rows=4)
        for q in random_patterns(rng, 3, 3, 3, 4, query_patterns=True):
            assert lsh_query(index, q) <= brute_force_match(q, refs)


def test_lsh_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(14)
    refs = random_patterns(rng, 10, 3, 3, 4)
    index = build_lsh_index(refs, k=32, bands=8, rows=4, seed=77)
    path = tmp_path / "index.json"
    save_lsh_index(index, path)
    loaded = load_lsh_index(path)
    assert loaded.k == 32 and loaded.bands == 8 and loaded.rows == 4 and loaded.seed == 77
    assert np.array_equal(loaded.signatures, index.signatures)
    q = random_patterns(rng, 1, 3, 3, 4, query_patterns=True)[0]
    assert lsh_query(loaded, q) == lsh_query(index, q)


def test_lsh_load_rejects_bad_version(tmp_path):
    rng = np.random.default_rng(15)
    refs = random_patterns(rng, 3, 2, 2, 3)
    path = tmp_path / "index.json"
    save_lsh_index(build_lsh_index(refs, k=16, bands=4, rows=4), path)
    import json

    doc = json.loads(path.read_text())
    doc["version"] = 2
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError):
        load_lsh_index(path)


def test_prepare_refs_shape():
    rng = np.random.default_rng(16)
    refs = random_patterns(rng, 5, 2, 3, 4)
    stacked = prepare_refs(refs)
    assert stacked.shape == (5, 6, 4)
    assert stacked.dtype == np.int8
