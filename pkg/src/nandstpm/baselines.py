"""Software reference matchers: exhaustive search and MinHash LSH.

The brute-force matcher is the correctness oracle for everything else.
The LSH path builds banded MinHash signatures over event sets to pre-filter
candidates, then verifies every candidate exhaustively, so it can miss
matches (recall < 1) but never invent them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .device import StoredSymbol
from .errors import ConfigError, DimensionError
from .patterns import SpatiotemporalPattern, document_to_patterns, event_triples, patterns_to_document

_X = np.int8(StoredSymbol.DONT_CARE)

# Real hash values are reduced mod 2**64 - 1 so the all-ones word can act as
# the reserved empty-set sentinel: it collides only with other sentinels.
_SENTINEL = np.uint64(0xFFFFFFFFFFFFFFFF)
_DEFAULT_SEED = 0x5EED
DEFAULT_K = 128
DEFAULT_BANDS = 32
DEFAULT_ROWS = 4


def event_set(pattern: SpatiotemporalPattern) -> frozenset[tuple[int, int, int]]:
    """(pixel, step, polarity) triples of the non-zero, non-wildcard entries."""
    return frozenset(event_triples(pattern))


def jaccard(a: Iterable, b: Iterable) -> float:
    """|a & b| / |a | b|; two empty sets count as identical."""
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        return 1.0
    return len(sa & sb) / len(union)


def prepare_refs(refs: Sequence[SpatiotemporalPattern]) -> np.ndarray:
    """Stack references into one (n, pixels, steps) int8 array."""
    if not refs:
        return np.empty((0, 0, 0), dtype=np.int8)
    return np.stack([r.symbols for r in refs])


def brute_force_match(
    query: SpatiotemporalPattern,
    refs: Sequence[SpatiotemporalPattern],
    stacked: np.ndarray | None = None,
) -> set[int]:
    """Compare the query against every stored pattern; wildcard always matches."""
    if stacked is None:
        stacked = prepare_refs(refs)
    if len(stacked) == 0:
        return set()
    if stacked.shape[1:] != query.symbols.shape:
        raise DimensionError(
            f"query shape {query.symbols.shape} does not match stored {stacked.shape[1:]}"
        )
    ok = ((stacked == _X) | (stacked == query.symbols)).all(axis=(1, 2))
    return {int(j) for j in np.nonzero(ok)[0]}


def _mix64(x: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


def _pack(events: Iterable[tuple[int, int, int]]) -> np.ndarray:
    packed = [
        (pixel << 20) | (step << 1) | (1 if pol > 0 else 0) for pixel, step, pol in events
    ]
    return np.asarray(sorted(packed), dtype=np.uint64)


def _hash_keys(k: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 2**64, size=k, dtype=np.uint64)


@dataclass(frozen=True)
class MinHashSignature:
    """k per-function minima over a set's hashed elements."""

    values: np.ndarray
    k: int
    seed: int

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.uint64)
        if arr.shape != (self.k,):
            raise DimensionError(f"signature length {arr.shape} != ({self.k},)")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MinHashSignature):
            return NotImplemented
        return (
            self.k == other.k
            and self.seed == other.seed
            and bool(np.array_equal(self.values, other.values))
        )

    def __hash__(self):
        return hash((self.k, self.seed, self.values.tobytes()))


def minhash_signature(
    s: Iterable[tuple[int, int, int]], k: int = DEFAULT_K, seed: int = _DEFAULT_SEED
) -> MinHashSignature:
    if k < 1:
        raise ConfigError("k must be >= 1")
    packed = _pack(s)
    if packed.size == 0:
        values = np.full(k, _SENTINEL, dtype=np.uint64)
        return MinHashSignature(values=values, k=k, seed=seed)
    keys = _hash_keys(k, seed)
    hashed = _mix64(keys[:, None] ^ packed[None, :]) % _SENTINEL
    return MinHashSignature(values=hashed.min(axis=1), k=k, seed=seed)


@dataclass
class LshIndex:
    """Banded MinHash index with the stored patterns kept for verification."""

    k: int
    bands: int
    rows: int
    seed: int
    ids: list[int]
    signatures: np.ndarray
    patterns: list[SpatiotemporalPattern]
    tables: list[dict[bytes, list[int]]] = field(repr=False, default_factory=list)
    stacked: np.ndarray = field(repr=False, default=None)

    def band_key(self, values: np.ndarray, band: int) -> bytes:
        return values[band * self.rows : (band + 1) * self.rows].tobytes()


def build_lsh_index(
    refs: Sequence[SpatiotemporalPattern],
    k: int = DEFAULT_K,
    bands: int = DEFAULT_BANDS,
    rows: int = DEFAULT_ROWS,
    seed: int = _DEFAULT_SEED,
) -> LshIndex:
    if bands * rows != k:
        raise ConfigError(f"bands*rows must equal k: {bands}*{rows} != {k}")
    sigs = np.empty((len(refs), k), dtype=np.uint64)
    for j, ref in enumerate(refs):
        sigs[j] = minhash_signature(event_set(ref), k=k, seed=seed).values
    index = LshIndex(
        k=k,
        bands=bands,
        rows=rows,
        seed=seed,
        ids=list(range(len(refs))),
        signatures=sigs,
        patterns=list(refs),
        tables=[{} for _ in range(bands)],
        stacked=prepare_refs(refs),
    )
    for j in index.ids:
        for band in range(bands):
            key = index.band_key(sigs[j], band)
            index.tables[band].setdefault(key, []).append(j)
    return index


def lsh_candidates(index: LshIndex, query: SpatiotemporalPattern) -> set[int]:
    sig = minhash_signature(event_set(query), k=index.k, seed=index.seed)
    if sig.values.shape != (index.k,):
        raise DimensionError("query signature length does not match the index")
    found: set[int] = set()
    for band in range(index.bands):
        found.update(index.tables[band].get(index.band_key(sig.values, band), ()))
    return found


def lsh_query(index: LshIndex, query: SpatiotemporalPattern) -> set[int]:
    """Band-collision candidates filtered through exact verification."""
    candidates = lsh_candidates(index, query)
    if not candidates:
        return set()
    cand = sorted(candidates)
    verified = brute_force_match(query, [], stacked=index.stacked[cand])
    return {cand[j] for j in verified}


def save_lsh_index(index: LshIndex, path) -> None:
    doc = {
        "version": 1,
        "k": index.k,
        "bands": index.bands,
        "rows": index.rows,
        "seed": index.seed,
        "ids": index.ids,
        "signatures": [[int(v) for v in row] for row in index.signatures],
        "patterns": patterns_to_document(index.patterns),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_lsh_index(path) -> LshIndex:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise ConfigError(f"unsupported index version {doc.get('version')!r}")
    patterns = document_to_patterns(doc["patterns"])
    rebuilt = build_lsh_index(
        patterns, k=doc["k"], bands=doc["bands"], rows=doc["rows"], seed=doc["seed"]
    )
    saved = np.asarray(doc["signatures"], dtype=np.uint64).reshape(-1, doc["k"])
    if not np.array_equal(saved, rebuilt.signatures):
        raise ConfigError("stored signatures disagree with the rebuilt index")
    return rebuilt
