"""Vocabulary squashing: collapse words that do not distinguish the target corpus.

Every word type across the corpora gets exactly one category based on the
ratio of its empirical probability in the REPRESENTATIVE corpus to that in
the UNADAPTED corpus. Only words strongly biased toward REPRESENTATIVE keep
their identity; the rest collapse to one reserved token per category, which
consolidates probability mass and shrinks the working vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .corpus import CorpusStats
from .errors import InputError

KEPT = "kept"
DUBIOUS = "dubious"
BAD = "bad"
MEH = "meh"
IMPOSSIBLE = "impossible"
USELESS = "useless"

# Tokens substituted for collapsed words. Forbidden as natural input tokens;
# natural occurrences are escaped with a 'raw:' prefix before any processing.
RESERVED_TOKENS = (DUBIOUS, BAD, MEH, IMPOSSIBLE, USELESS)
_RESERVED_SET = frozenset(RESERVED_TOKENS)
_ESCAPE_PREFIX = "raw:"


@dataclass(frozen=True)
class SquashConfig:
    """Thresholds for the ratio-based partition.

    `min_count` is the count below which a word's statistics are considered
    unreliable; it may be overridden per corpus. `ratio_lo` and `ratio_hi`
    bound the "roughly equal frequency" band of the probability ratio.
    """

    min_count: int = 3
    ratio_lo: float = 0.5
    ratio_hi: float = 2.0
    min_count_repr: Optional[int] = None
    min_count_unadapt: Optional[int] = None

    def __post_init__(self) -> None:
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if not (0.0 < self.ratio_lo < 1.0 < self.ratio_hi):
            raise ValueError("need 0 < ratio_lo < 1 < ratio_hi")
        for override in (self.min_count_repr, self.min_count_unadapt):
            if override is not None and override < 1:
                raise ValueError("per-corpus min_count override must be >= 1")

    @property
    def repr_min(self) -> int:
        return self.min_count if self.min_count_repr is None else self.min_count_repr

    @property
    def unadapt_min(self) -> int:
        return self.min_count if self.min_count_unadapt is None else self.min_count_unadapt


@dataclass(frozen=True)
class VocabPartition:
    """Total, exclusive assignment of every known word to one category."""

    category: dict[str, str]
    kept_set: frozenset[str] = field(init=False)

    def __post_init__(self) -> None:
        bad = {c for c in self.category.values()} - {KEPT, DUBIOUS, BAD, MEH, IMPOSSIBLE, USELESS}
        if bad:
            raise ValueError(f"unknown categories: {sorted(bad)}")
        kept = frozenset(w for w, c in self.category.items() if c == KEPT)
        object.__setattr__(self, "kept_set", kept)

    def sizes(self) -> dict[str, int]:
        """Number of word types per category (diagnostic)."""
        out = {c: 0 for c in (KEPT, DUBIOUS, BAD, MEH, IMPOSSIBLE, USELESS)}
        for cat in self.category.values():
            out[cat] += 1
        return out


def escape_reserved(tokens: list[str], found: Optional[set[str]] = None) -> list[str]:
    """Prefix natural occurrences of reserved tokens with 'raw:'.

    Returns the input list unchanged (same object) when nothing needs
    escaping. Escaped types are added to `found` when given, so callers can
    log the rewrite once per run.
    """
    if not _RESERVED_SET.intersection(tokens):
        return tokens
    out = []
    for tok in tokens:
        if tok in _RESERVED_SET:
            if found is not None:
                found.add(tok)
            out.append(_ESCAPE_PREFIX + tok)
        else:
            out.append(tok)
    return out


def escape_stats(stats: CorpusStats, found: Optional[set[str]] = None) -> CorpusStats:
    """Apply the reserved-token escape to the keys of a count map."""
    if not _RESERVED_SET.intersection(stats.counts):
        return stats
    counts: dict[str, int] = {}
    for word, count in stats.counts.items():
        if word in _RESERVED_SET:
            if found is not None:
                found.add(word)
            word = _ESCAPE_PREFIX + word
        counts[word] = counts.get(word, 0) + count
    return CorpusStats.from_counts(counts)


def partition_vocab(
    repr_stats: CorpusStats,
    unadapt_stats: CorpusStats,
    avail_vocab: Iterable[str],
    cfg: SquashConfig = SquashConfig(),
    extra_vocab: Iterable[str] = (),
) -> VocabPartition:
    """Classify every word of REPR, UNADAPT, AVAIL (and extras) into one category.

    Classification order, first match wins:
      1. in REPR but not in AVAIL          -> impossible (cannot be selected)
      2. not in REPR                       -> useless (no probability to improve)
      3. count below min_count in both     -> dubious (unreliable ratio)
      4. ratio P_repr/P_unadapt <= ratio_lo -> bad
      5. ratio strictly inside the band    -> meh
      6. ratio >= ratio_hi                 -> kept
    A word in REPR and AVAIL but absent from UNADAPT has ratio +inf and is
    kept: nothing is more indicative of the target distribution.

    `extra_vocab` extends coverage (e.g. to seed text) without affecting how
    any word is classified.
    """
    if repr_stats.total_tokens == 0:
        raise InputError("cannot partition: REPRESENTATIVE stats are empty")
    if unadapt_stats.total_tokens == 0:
        raise InputError("cannot partition: UNADAPTED stats are empty")

    avail = avail_vocab if isinstance(avail_vocab, (set, frozenset)) else set(avail_vocab)
    vocab = set(repr_stats.counts)
    vocab.update(unadapt_stats.counts)
    vocab.update(avail)
    vocab.update(extra_vocab)

    w_repr = repr_stats.total_tokens
    w_unadapt = unadapt_stats.total_tokens
    category: dict[str, str] = {}
    for word in vocab:
        c_repr = repr_stats.counts.get(word, 0)
        if c_repr == 0:
            category[word] = USELESS
            continue
        if word not in avail:
            category[word] = IMPOSSIBLE
            continue
        c_unadapt = unadapt_stats.counts.get(word, 0)
        if c_repr < cfg.repr_min and c_unadapt < cfg.unadapt_min:
            category[word] = DUBIOUS
            continue
        if c_unadapt == 0:
            category[word] = KEPT
            continue
        ratio = (c_repr * w_unadapt) / (c_unadapt * w_repr)
        if ratio <= cfg.ratio_lo:
            category[word] = BAD
        elif ratio < cfg.ratio_hi:
            category[word] = MEH
        else:
            category[word] = KEPT
    return VocabPartition(category=category)


def apply_squash(tokens: Iterable[str], partition: VocabPartition) -> list[str]:
    """Rewrite a token sequence: kept words unchanged, others to their category token."""
    category = partition.category
    out = []
    for tok in tokens:
        cat = category.get(tok)
        if cat is None:
            raise ValueError(f"token not covered by the vocabulary partition: {tok!r}")
        out.append(tok if cat == KEPT else cat)
    return out


def squash_stats(stats: CorpusStats, partition: VocabPartition) -> CorpusStats:
    """Collapse a count map under the partition; total token mass is preserved."""
    category = partition.category
    counts: dict[str, int] = {}
    for word, count in stats.counts.items():
        cat = category.get(word)
        if cat is None:
            raise ValueError(f"word not covered by the vocabulary partition: {word!r}")
        key = word if cat == KEPT else cat
        counts[key] = counts.get(key, 0) + count
    return CorpusStats.from_counts(counts)
