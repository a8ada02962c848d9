"""Post-hoc evaluation of a selected subset, plus a Moore-Lewis baseline ranker.

Both work on raw (pre-squash) text: evaluation asks how well a plain unigram
model of the subset encodes the target stats, and what fraction of the target
tokens the subset cannot represent at all (OOV).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2
from typing import Iterable, Sequence

from .corpus import CorpusStats, count_corpus, tokenize
from .errors import InputError
from .score import ModelState, cross_entropy

TSV_FIELDS = (
    "subset_lines",
    "subset_tokens",
    "h_bits",
    "perplexity",
    "oov_tokens",
    "oov_types",
    "oov_token_rate",
)


@dataclass(frozen=True)
class EvalReport:
    """Cross-entropy, perplexity, and OOV coverage of a subset against target stats."""

    subset_lines: int
    subset_tokens: int
    h_bits: float
    perplexity: float
    oov_tokens: int
    oov_types: int
    oov_token_rate: float

    def to_kv(self) -> str:
        """Single-line key=value rendering."""
        return (
            f"subset_lines={self.subset_lines} subset_tokens={self.subset_tokens} "
            f"h_bits={self.h_bits:.6f} perplexity={self.perplexity:.6g} "
            f"oov_tokens={self.oov_tokens} oov_types={self.oov_types} "
            f"oov_token_rate={self.oov_token_rate:.6f}"
        )

    def to_tsv(self) -> str:
        """Values only, tab-separated, in TSV_FIELDS order."""
        return (
            f"{self.subset_lines}\t{self.subset_tokens}\t{self.h_bits:.6f}\t"
            f"{self.perplexity:.6g}\t{self.oov_tokens}\t{self.oov_types}\t"
            f"{self.oov_token_rate:.6f}"
        )

    @staticmethod
    def tsv_header() -> str:
        return "\t".join(TSV_FIELDS)


def evaluate_subset(
    subset: Sequence[str],
    repr_stats: CorpusStats,
    delta: float = 0.001,
) -> EvalReport:
    """Score a subset of lines against target stats.

    The model is a delta-smoothed unigram over the subset's raw vocabulary
    joined with the target vocabulary, so an empty subset still yields a
    finite (pure-smoothing) cross-entropy with OOV rate 1.0.
    """
    if repr_stats.total_tokens == 0:
        raise InputError("REPRESENTATIVE stats are empty")
    subset_stats = count_corpus(subset)
    vocab = set(subset_stats.counts)
    vocab.update(repr_stats.counts)
    state = ModelState(
        sel_counts=dict(subset_stats.counts),
        sel_tokens=subset_stats.total_tokens,
        delta=delta,
        vocab_size=len(vocab),
    )
    h_bits = cross_entropy(state, repr_stats)

    oov_tokens = 0
    oov_types = 0
    for word, count in repr_stats.counts.items():
        if word not in subset_stats.counts:
            oov_tokens += count
            oov_types += 1
    return EvalReport(
        subset_lines=len(subset),
        subset_tokens=subset_stats.total_tokens,
        h_bits=h_bits,
        perplexity=2.0 ** h_bits,
        oov_tokens=oov_tokens,
        oov_types=oov_types,
        oov_token_rate=oov_tokens / repr_stats.total_tokens,
    )


def moore_lewis_rank(
    avail: Iterable[str],
    in_stats: CorpusStats,
    pool_stats: CorpusStats,
    delta: float = 0.001,
) -> list[tuple[int, float]]:
    """Rank lines by per-token cross-entropy difference (in-domain minus pool).

    Lower is more in-domain; ties break by line id. Each side is a
    delta-smoothed unigram model over its own vocabulary, so identical stats
    on both sides give every sentence a score of exactly 0. Blank lines are
    not ranked. Returns (line id, score in bits per token) sorted ascending.
    """
    if in_stats.total_tokens == 0 or pool_stats.total_tokens == 0:
        raise InputError("Moore-Lewis ranking needs nonempty stats on both sides")

    in_denom = in_stats.total_tokens + delta * in_stats.total_types
    pool_denom = pool_stats.total_tokens + delta * pool_stats.total_types
    memo: dict[str, float] = {}

    def token_score(word: str) -> float:
        cached = memo.get(word)
        if cached is None:
            q_in = (in_stats.counts.get(word, 0) + delta) / in_denom
            q_pool = (pool_stats.counts.get(word, 0) + delta) / pool_denom
            cached = log2(q_pool) - log2(q_in)  # -log q_in + log q_pool
            memo[word] = cached
        return cached

    scored: list[tuple[int, float]] = []
    for line_id, line in enumerate(avail):
        tokens = tokenize(line)
        if not tokens:
            continue
        total = 0.0
        for tok in tokens:
            total += token_score(tok)
        scored.append((line_id, total / len(tokens)))
    scored.sort(key=lambda pair: (pair[1], pair[0]))
    return scored
