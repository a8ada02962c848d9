"""Tokenization, counting, and unigram statistics over line-per-sentence text.

A corpus is reduced to its word-type counts (`CorpusStats`), which is all the
selection math ever needs. Stats can be saved to and loaded from a small text
format so a corpus owner can share the distribution without sharing the text.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

from .errors import InputError

PathOrFile = Union[str, "os.PathLike[str]", IO[str]]


@dataclass(frozen=True)
class CorpusStats:
    """Word-type counts for one corpus plus derived totals.

    Invariants: `total_tokens` is the sum of all counts, `total_types` the
    number of distinct words, and zero-count entries are never stored.
    Instances are immutable after construction and safe to share read-only.
    """

    counts: dict[str, int]
    total_tokens: int
    total_types: int

    def __post_init__(self) -> None:
        if any(c < 1 for c in self.counts.values()):
            raise ValueError("stats must not contain counts below 1")
        if self.total_tokens != sum(self.counts.values()):
            raise ValueError("total_tokens does not match the sum of counts")
        if self.total_types != len(self.counts):
            raise ValueError("total_types does not match the number of entries")

    @classmethod
    def from_counts(cls, counts: dict[str, int]) -> "CorpusStats":
        """Build stats from a raw count map, dropping zero-count entries."""
        clean = {w: c for w, c in counts.items() if c > 0}
        return cls(counts=clean, total_tokens=sum(clean.values()), total_types=len(clean))


@dataclass(slots=True)
class SentenceRecord:
    """One candidate line, identified by its 0-based index in the original file.

    `tokens` is the squashed token sequence; `type_counts` is derived from it
    once, sorted by word, so repeated scoring never recounts and equal token
    multisets always sum in the same order. `cached_gain` holds the most
    recent gain estimate and `cached_at` the selection iteration it was
    computed at (stale by design between rescores).
    """

    id: int
    tokens: tuple[str, ...]
    token_count: int = -1
    cached_gain: float = 0.0
    cached_at: int = 0
    type_counts: tuple[tuple[str, int], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.token_count < 0:
            self.token_count = len(self.tokens)
        elif self.token_count != len(self.tokens):
            raise ValueError("token_count does not match the token sequence")
        if not self.type_counts:
            self.type_counts = tuple(sorted(Counter(self.tokens).items()))


def tokenize(line: str) -> list[str]:
    """Split a line on runs of Unicode whitespace. No normalization of any kind."""
    return line.split()


def read_lines(path: Union[str, "os.PathLike[str]"]) -> list[str]:
    """Read a text file as a list of lines (newlines stripped).

    Raises InputError for a missing file or invalid UTF-8; the encoding error
    names the offending byte offset.
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from exc
    return text.splitlines()


def count_corpus(lines: Iterable[str]) -> CorpusStats:
    """Count all tokens of all lines. Blank lines contribute nothing.

    Order-independent: permuting the input lines yields identical stats.
    Counting may be sharded across workers and the resulting maps merged;
    this single-pass version is the reference behavior.
    """
    counts: Counter[str] = Counter()
    for line in lines:
        counts.update(line.split())
    return CorpusStats.from_counts(dict(counts))


def merge_stats(*parts: CorpusStats) -> CorpusStats:
    """Merge shard-level stats; the result is independent of shard boundaries."""
    merged: Counter[str] = Counter()
    for part in parts:
        merged.update(part.counts)
    return CorpusStats.from_counts(dict(merged))


def unigram_prob(stats: CorpusStats, word: str) -> float:
    """Empirical probability C(v)/W of a word; 0.0 for absent words."""
    if stats.total_tokens == 0:
        raise InputError("undefined distribution: corpus has no tokens")
    return stats.counts.get(word, 0) / stats.total_tokens


_HEADER_PREFIX = "#total\t"


def save_stats(stats: CorpusStats, destination: PathOrFile) -> None:
    """Write stats in the shareable text format.

    First line is `#total<TAB><total_tokens>`; each following line is
    `<word><TAB><count>`, sorted by descending count with ties broken by
    byte-wise word order, so output is deterministic. Words containing a TAB
    or newline cannot be represented and are rejected.
    """
    for word in stats.counts:
        if "\t" in word or "\n" in word or "\r" in word:
            raise InputError(f"word not representable in stats file: {word!r}")
    # UTF-8 byte order equals code point order, so plain str sort is byte-wise.
    rows = sorted(stats.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if hasattr(destination, "write"):
        _write_stats(stats, rows, destination)  # type: ignore[arg-type]
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            _write_stats(stats, rows, fh)


def _write_stats(stats: CorpusStats, rows: list[tuple[str, int]], fh: IO[str]) -> None:
    fh.write(f"{_HEADER_PREFIX}{stats.total_tokens}\n")
    for word, count in rows:
        fh.write(f"{word}\t{count}\n")


def load_stats(source: PathOrFile) -> CorpusStats:
    """Parse a stats file, validating format and totals.

    Raises InputError naming the 1-based line number for a malformed line,
    a duplicate word entry, or a header total that does not match the sum
    of the counts.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()  # type: ignore[union-attr]
        name = getattr(source, "name", "<stats>")
    else:
        lines = read_lines(source)
        name = str(source)
    if not lines or not lines[0].startswith(_HEADER_PREFIX):
        raise InputError(f"{name}:1: expected '#total<TAB><count>' header")
    try:
        total = int(lines[0][len(_HEADER_PREFIX):])
    except ValueError:
        raise InputError(f"{name}:1: header total is not an integer") from None
    if total < 0:
        raise InputError(f"{name}:1: header total is negative")

    counts: dict[str, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"{name}:{lineno}: expected '<word><TAB><count>'")
        word, count_text = parts
        try:
            count = int(count_text)
        except ValueError:
            raise InputError(f"{name}:{lineno}: count is not an integer") from None
        if count < 1:
            raise InputError(f"{name}:{lineno}: count must be positive")
        if word in counts:
            raise InputError(f"{name}:{lineno}: duplicate entry for {word!r}")
        counts[word] = count

    if sum(counts.values()) != total:
        raise InputError(f"{name}: header total {total} does not match sum of counts")
    return CorpusStats(counts=counts, total_tokens=total, total_types=len(counts))


def looks_like_stats_file(path: Union[str, "os.PathLike[str]"]) -> bool:
    """True when the file starts with the stats header (auto-detection helper)."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(len(_HEADER_PREFIX.encode("utf-8")))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return head == _HEADER_PREFIX.encode("utf-8")
