"""Word-vector tables: parsing, exact Euclidean neighbor search, and lexicon expansion.

Vectors are read from the plain text format used by the public GloVe
releases: one record per line, ``token v1 v2 ... vd`` separated by single
spaces. All searches are exhaustive scans; no approximate index is used.
"""

from __future__ import annotations

import contextlib
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator, Sequence

import numpy as np

from .errors import ParseError, UnknownTokenError

_BLOCK_LINES = 20000


@contextlib.contextmanager
def _open_text(source) -> Iterator[IO[str]]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            yield fh
    elif isinstance(source, io.TextIOBase):
        yield source
    else:
        # binary stream; do not close the caller's handle
        wrapper = io.TextIOWrapper(source, encoding="utf-8", newline="")
        try:
            yield wrapper
        finally:
            wrapper.detach()


def _source_name(source) -> str:
    if isinstance(source, (str, os.PathLike)):
        return str(source)
    return getattr(source, "name", "<stream>")


def _parse_block(
    lines: list[str], first_lineno: int, dim: int | None, name: str
) -> tuple[list[str], np.ndarray, int]:
    tokens: list[str] = []
    rows: list[list[str]] = []
    for offset, raw in enumerate(lines):
        lineno = first_lineno + offset
        line = raw.rstrip("\r\n")
        parts = line.split(" ")
        token = parts[0]
        if not token or len(parts) < 2:
            raise ParseError("expected 'token v1 ... vd'", line=lineno, source=name)
        if dim is None:
            dim = len(parts) - 1
        elif len(parts) - 1 != dim:
            raise ParseError(
                f"dimension mismatch: expected {dim} components, got {len(parts) - 1}",
                line=lineno,
                source=name,
            )
        tokens.append(token)
        rows.append(parts[1:])
    try:
        matrix = np.array(rows, dtype=np.float64)
    except ValueError:
        # find the offending line for the message
        for offset, row in enumerate(rows):
            try:
                np.array(row, dtype=np.float64)
            except ValueError:
                bad = next(c for c in row if not _is_float(c))
                raise ParseError(
                    f"non-numeric component {bad!r}", line=first_lineno + offset, source=name
                ) from None
        raise
    if not np.all(np.isfinite(matrix)):
        offset = int(np.flatnonzero(~np.all(np.isfinite(matrix), axis=1))[0])
        raise ParseError("non-finite component", line=first_lineno + offset, source=name)
    return tokens, matrix.reshape(len(tokens), dim), dim


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def iter_vector_blocks(source, block_lines: int = _BLOCK_LINES):
    """Yield ``(tokens, matrix)`` blocks from a vector file, validating as it goes.

    Dimension consistency, numeric components and token uniqueness are checked
    across the whole file; errors name the 1-based line number.
    """
    name = _source_name(source)
    seen: set[str] = set()
    dim: int | None = None
    lineno = 1
    with _open_text(source) as fh:
        pending: list[str] = []
        start = 1
        for line in fh:
            if not pending:
                start = lineno
            pending.append(line)
            lineno += 1
            if len(pending) >= block_lines:
                tokens, matrix, dim = _parse_block(pending, start, dim, name)
                _check_unique(tokens, seen, start, name)
                yield tokens, matrix
                pending = []
        if pending:
            tokens, matrix, dim = _parse_block(pending, start, dim, name)
            _check_unique(tokens, seen, start, name)
            yield tokens, matrix
    if dim is None:
        raise ParseError("empty vector file", source=name)


def _check_unique(tokens: list[str], seen: set[str], start: int, name: str) -> None:
    for offset, tok in enumerate(tokens):
        if tok in seen:
            raise ParseError(f"duplicate token {tok!r}", line=start + offset, source=name)
        seen.add(tok)


@dataclass(frozen=True)
class Neighbor:
    token: str
    distance: float


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable token -> vector map backed by one (vocab_size, dimension) array."""

    tokens: tuple[str, ...]
    vectors: np.ndarray = field(repr=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        vectors = np.array(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(self.tokens) or vectors.shape[1] < 1:
            raise ValueError("vectors must be a (vocab_size, dimension) array")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors must be finite")
        index = {}
        for i, tok in enumerate(self.tokens):
            if not tok or any(c.isspace() for c in tok):
                raise ValueError(f"invalid token {tok!r}")
            if tok in index:
                raise ValueError(f"duplicate token {tok!r}")
            index[tok] = i
        vectors.setflags(write=False)
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_dict(cls, entries: dict[str, Sequence[float]]) -> "EmbeddingTable":
        tokens = tuple(entries)
        return cls(tokens, np.array([entries[t] for t in tokens], dtype=np.float64))

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    @property
    def vocab_size(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def vector(self, token: str) -> np.ndarray:
        try:
            return self.vectors[self._index[token]]
        except KeyError:
            raise UnknownTokenError(token) from None


def parse_embedding_file(source) -> EmbeddingTable:
    """Load a whole vector file into memory.

    For very large files prefer :func:`scan_file`, which keeps only the
    distances to one query word.
    """
    tokens: list[str] = []
    blocks: list[np.ndarray] = []
    for toks, matrix in iter_vector_blocks(source):
        tokens.extend(toks)
        blocks.append(matrix)
    return EmbeddingTable(tuple(tokens), np.vstack(blocks))


def write_embedding_file(table: EmbeddingTable, target, precision: int | None = None) -> None:
    """Serialize in the text vector format.

    With ``precision=None`` floats are written with ``repr`` so that
    re-parsing is exact; otherwise with ``precision`` significant digits.
    """
    fmt = repr if precision is None else (lambda v: f"{v:.{precision}g}")
    lines = (
        tok + " " + " ".join(fmt(float(v)) for v in vec) + "\n"
        for tok, vec in zip(table.tokens, table.vectors)
    )
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.writelines(lines)
    else:
        target.writelines(lines)


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # math.dist rescales internally, so tiny or huge components do not under/overflow
    return math.dist(a.tolist(), b.tolist())


def _row_distances(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    diff = matrix - query
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


@dataclass(frozen=True)
class DistanceScan:
    """Distances from one query word to every other token in a table.

    This is the result of a single exhaustive pass; neighbor, profile and
    summary queries all read from it.
    """

    query: str
    tokens: tuple[str, ...]
    distances: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.tokens)

    def nearest(self, k: int) -> list[Neighbor]:
        """The ``k`` closest tokens, ascending by distance, ties by token."""
        if k < 1:
            raise ValueError("k must be positive")
        if k > len(self.tokens):
            raise ValueError(f"k={k} exceeds the {len(self.tokens)} other tokens")
        d = self.distances
        if k < d.size:
            kth = np.partition(d, k - 1)[k - 1]
            candidates = np.flatnonzero(d <= kth)
        else:
            candidates = np.arange(d.size)
        ranked = sorted(candidates.tolist(), key=lambda i: (d[i], self.tokens[i]))
        return [Neighbor(self.tokens[i], float(d[i])) for i in ranked[:k]]

    def profile(self, n: int) -> list[float]:
        return [nb.distance for nb in self.nearest(n)]

    def stats(self) -> dict[str, float]:
        """min, max, median and sample standard deviation of the distances."""
        d = self.distances
        if d.size < 1:
            raise ValueError("need at least one other token")
        return {
            "min_nonself": float(d.min()),
            "max": float(d.max()),
            "median": float(np.median(d)),
            "stddev": float(d.std(ddof=1)) if d.size > 1 else 0.0,
        }


def scan_table(table: EmbeddingTable, query: str) -> DistanceScan:
    qi = table._index.get(query)
    if qi is None:
        raise UnknownTokenError(query)
    d = _row_distances(table.vectors, table.vectors[qi])
    keep = np.ones(len(table), dtype=bool)
    keep[qi] = False
    tokens = tuple(t for i, t in enumerate(table.tokens) if i != qi)
    return DistanceScan(query, tokens, d[keep])


def scan_file(source, query: str, block_lines: int = _BLOCK_LINES) -> DistanceScan:
    """Stream a vector file once, keeping only distances to ``query``.

    Blocks read before the query line are held until its vector is known,
    so peak memory is bounded by the position of the query in the file.
    """
    qvec: np.ndarray | None = None
    tokens: list[str] = []
    parts: list[np.ndarray] = []
    held: list[tuple[list[str], np.ndarray]] = []
    for toks, matrix in iter_vector_blocks(source, block_lines):
        if qvec is None:
            try:
                pos = toks.index(query)
            except ValueError:
                held.append((toks, matrix))
                continue
            qvec = matrix[pos].copy()
            for htoks, hmat in held:
                tokens.extend(htoks)
                parts.append(_row_distances(hmat, qvec))
            held.clear()
        tokens.extend(toks)
        parts.append(_row_distances(matrix, qvec))
    if qvec is None:
        raise UnknownTokenError(query)
    d = np.concatenate(parts)
    qi = tokens.index(query)
    keep = np.ones(d.size, dtype=bool)
    keep[qi] = False
    del tokens[qi]
    return DistanceScan(query, tuple(tokens), d[keep])


def _scan(table_or_scan, query: str) -> DistanceScan:
    if isinstance(table_or_scan, DistanceScan):
        if table_or_scan.query != query:
            raise ValueError(f"scan was computed for {table_or_scan.query!r}, not {query!r}")
        return table_or_scan
    return scan_table(table_or_scan, query)


def nearest_neighbors(table: EmbeddingTable, query: str, k: int) -> list[Neighbor]:
    if query not in table:
        raise UnknownTokenError(query)
    if k < 1:
        raise ValueError("k must be positive")
    if k >= table.vocab_size:
        raise ValueError(f"k={k} must be below vocab_size={table.vocab_size}")
    return scan_table(table, query).nearest(k)


def distance_profile(table: EmbeddingTable | DistanceScan, query: str, n: int) -> list[float]:
    """Distances of the ``n`` nearest neighbors, nondecreasing."""
    return _scan(table, query).profile(n)


def distance_stats(table: EmbeddingTable | DistanceScan, query: str) -> dict[str, float]:
    """Summary of the distances from ``query`` to every other token.

    The query's own zero distance is excluded; ``stddev`` uses ``N - 1``.
    """
    return _scan(table, query).stats()


def write_profile_csv(neighbors: Sequence[Neighbor], target) -> None:
    """``rank,token,distance`` rows, distance to 6 decimals."""
    text = "rank,token,distance\n" + "".join(
        f"{rank},{nb.token},{nb.distance:.6f}\n" for rank, nb in enumerate(neighbors, start=1)
    )
    if isinstance(target, (str, os.PathLike)):
        Path(target).write_text(text, encoding="utf-8", newline="")
    else:
        target.write(text)


@dataclass(frozen=True)
class Lexicon:
    """A seed word plus its nearest expansion words, nearest first."""

    seed: str
    expansion: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        expansion = tuple(self.expansion)
        if self.seed in expansion:
            raise ValueError("seed must not appear in the expansion")
        if len(set(expansion)) != len(expansion):
            raise ValueError("expansion has duplicates")
        object.__setattr__(self, "expansion", expansion)

    @property
    def k(self) -> int:
        return len(self.expansion)

    @property
    def words(self) -> tuple[str, ...]:
        return (self.seed,) + self.expansion

    def save(self, target) -> None:
        text = "".join(w + "\n" for w in self.words)
        if isinstance(target, (str, os.PathLike)):
            Path(target).write_text(text, encoding="utf-8", newline="")
        else:
            target.write(text)

    @classmethod
    def load(cls, source) -> "Lexicon":
        if isinstance(source, (str, os.PathLike)):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = source.read()
        words = [w.strip() for w in text.splitlines() if w.strip()]
        if not words:
            raise ParseError("empty lexicon file", source=_source_name(source))
        return cls(words[0], tuple(words[1:]))


def build_lexicon(table: EmbeddingTable | DistanceScan, seed: str, k: int) -> Lexicon:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if isinstance(table, EmbeddingTable) and seed not in table:
        raise UnknownTokenError(seed)
    if k == 0:
        return Lexicon(seed)
    if isinstance(table, EmbeddingTable):
        neighbors = nearest_neighbors(table, seed, k)
    else:
        neighbors = _scan(table, seed).nearest(k)
    return Lexicon(seed, tuple(nb.token for nb in neighbors))
