"""Pattern grid type and its interchange document."""

import json

import numpy as np
import pytest

from nandstpm.errors import ConfigError, DimensionError
from nandstpm.patterns import (
    SpatiotemporalPattern,
    document_to_patterns,
    dumps_document,
    event_triples,
    pattern_from_strings,
    patterns_to_document,
    read_pattern_file,
    write_pattern_file,
)


def test_from_strings_roundtrip():
    rows = ["+-0X", "0000", "XXXX", "-+-+"]
    p = pattern_from_strings(2, 2, 4, rows)
    assert p.to_strings() == rows
    assert p.pixels == 4
    assert p.contains_dont_care()


def test_bad_symbols_rejected():
    with pytest.raises(ConfigError):
        pattern_from_strings(1, 1, 2, ["+?"])
    with pytest.raises(DimensionError):
        pattern_from_strings(1, 2, 2, ["++"])
    with pytest.raises(DimensionError):
        pattern_from_strings(1, 1, 3, ["++"])


def test_query_alphabet_enforced():
    with pytest.raises(ConfigError):
        pattern_from_strings(1, 1, 2, ["+X"], query=True)
    q = pattern_from_strings(1, 1, 2, ["+0"], query=True)
    assert not q.contains_dont_care()
    with pytest.raises(ConfigError):
        pattern_from_strings(1, 1, 2, ["+X"]).as_query_sequence(0)


def test_symbols_are_frozen():
    p = pattern_from_strings(1, 1, 2, ["+0"])
    with pytest.raises(ValueError):
        p.symbols[0, 0] = 0


def test_equality_and_hash():
    a = pattern_from_strings(1, 2, 2, ["+0", "X-"])
    b = pattern_from_strings(1, 2, 2, ["+0", "X-"])
    c = pattern_from_strings(1, 2, 2, ["+0", "XX"])
    assert a == b and hash(a) == hash(b)
    assert a != c


def test_event_triples():
    p = pattern_from_strings(1, 2, 3, ["+0-", "X0X"])
    assert event_triples(p) == ((0, 0, 1), (0, 2, -1))


def test_document_roundtrip(tmp_path):
    patterns = [
        pattern_from_strings(2, 1, 3, ["+-0", "XXX"]),
        pattern_from_strings(2, 1, 3, ["000", "-+0"]),
    ]
    doc = patterns_to_document(patterns)
    assert doc["height"] == 2 and doc["width"] == 1 and doc["steps"] == 3
    assert [e["id"] for e in doc["patterns"]] == [0, 1]
    assert document_to_patterns(doc) == patterns

    path = tmp_path / "refs.json"
    write_pattern_file(path, patterns)
    assert read_pattern_file(path) == patterns
    # canonical serialization is stable
    assert path.read_text() == dumps_document(json.loads(path.read_text()))


def test_empty_document_needs_dimensions():
    with pytest.raises(DimensionError):
        patterns_to_document([])
    doc = patterns_to_document([], height=2, width=2, steps=4)
    assert doc["patterns"] == []
    assert document_to_patterns(doc) == []


def test_document_rejects_mixed_dimensions():
    a = pattern_from_strings(1, 1, 2, ["+0"])
    b = pattern_from_strings(1, 1, 3, ["+00"])
    with pytest.raises(DimensionError):
        patterns_to_document([a, b])


def test_malformed_document():
    with pytest.raises(ConfigError):
        document_to_patterns({"height": 1, "width": 1})


def test_symbol_shape_checked():
    with pytest.raises(DimensionError):
        SpatiotemporalPattern(height=1, width=2, steps=2, symbols=np.zeros((1, 2), dtype=np.int8))
