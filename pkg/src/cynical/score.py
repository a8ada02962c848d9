"""Entropy arithmetic for incremental selection.

Everything here works in bits (base-2 logs) over a delta-smoothed unigram
model of the selected corpus: smoothed probability of a word is
(C_n(v) + delta) / (W_n + delta*|V|) for the scoring vocabulary of size |V|.
The smoothing keeps every quantity finite (an unseen word has a tiny but
nonzero probability) while preserving that "unseen -> seen once" is the
largest possible per-word improvement.

The change in cross-entropy from adding one sentence splits exactly into a
positive length penalty plus a non-positive per-word gain; `delta_h` computes
that split, and adding it to the running total reproduces a from-scratch
`cross_entropy` evaluation to within float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum, log2
from typing import Mapping

from .corpus import CorpusStats, SentenceRecord
from .errors import InputError, StaleBreakdownError


@dataclass(slots=True)
class ModelState:
    """Counts and running cross-entropy of the selected corpus.

    `version` increments on every update so breakdowns computed against an
    older state are rejected instead of silently corrupting `h_current`.
    Scoring against a fixed state is read-only and safe to parallelize;
    updates must be serialized.
    """

    sel_counts: dict[str, int]
    sel_tokens: int
    delta: float
    vocab_size: int
    h_current: float = 0.0
    version: int = 0

    def __post_init__(self) -> None:
        if self.delta <= 0.0:
            raise ValueError("smoothing constant delta must be > 0")
        if self.vocab_size < 1:
            raise ValueError("scoring vocabulary must be nonempty")
        if self.sel_tokens != sum(self.sel_counts.values()):
            raise ValueError("sel_tokens does not match the sum of sel_counts")

    @property
    def smooth_mass(self) -> float:
        """Total smoothing mass delta*|V| added to the token denominator."""
        return self.delta * self.vocab_size


@dataclass(frozen=True, slots=True)
class ScoreBreakdown:
    """One candidate's score: delta_h == penalty + gain, penalty >= 0 >= gain."""

    penalty: float
    gain: float
    delta_h: float
    state_version: int = 0


def penalty(sel_tokens: int, cand_tokens: int, smooth_mass: float = 0.0) -> float:
    """Entropy cost of growing the corpus by `cand_tokens` tokens.

    log2((W_n + dV + w) / (W_n + dV)): nonnegative, zero only for an empty
    candidate, and strictly decreasing in W_n for a fixed w.
    """
    if cand_tokens < 0:
        raise ValueError("candidate token count must be >= 0")
    denom = sel_tokens + smooth_mass
    if denom <= 0.0:
        raise ValueError("selected corpus plus smoothing mass must be positive")
    return log2((denom + cand_tokens) / denom)


def word_gain(p_repr: float, sel_count: int, cand_count: int, delta: float) -> float:
    """Entropy reduction from raising one word's count by `cand_count`.

    p_repr * log2((C_n + d) / (C_n + d + c)): non-positive, zero only when
    the word is absent from the candidate or carries no target probability.
    """
    if cand_count == 0 or p_repr == 0.0:
        return 0.0
    return p_repr * log2((sel_count + delta) / (sel_count + delta + cand_count))


def word_gain_estimate(p_repr: float, sel_count: int, delta: float) -> float:
    """Word gain assuming a single occurrence; an upper bound on the true gain."""
    return word_gain(p_repr, sel_count, 1, delta)


def sentence_gain(state: ModelState, record: SentenceRecord, p_repr: Mapping[str, float]) -> float:
    """Sum of word gains over the distinct types in a sentence.

    Words absent from the sentence contribute nothing, so only its own types
    are visited. Summation follows the record's sorted type order so equal
    token multisets produce bit-identical gains.
    """
    counts = state.sel_counts
    delta = state.delta
    total = 0.0
    for word, cand_count in record.type_counts:
        p = p_repr.get(word, 0.0)
        if p == 0.0:
            continue
        sel = counts.get(word, 0)
        total += p * log2((sel + delta) / (sel + delta + cand_count))
    return total


def delta_h(state: ModelState, record: SentenceRecord, p_repr: Mapping[str, float]) -> ScoreBreakdown:
    """Full score of one candidate against the current state."""
    pen = penalty(state.sel_tokens, record.token_count, state.smooth_mass)
    gain = sentence_gain(state, record, p_repr)
    return ScoreBreakdown(penalty=pen, gain=gain, delta_h=pen + gain, state_version=state.version)


def cross_entropy(state: ModelState, repr_stats: CorpusStats) -> float:
    """Bits per token needed to encode the target corpus under the selected model.

    Direct evaluation over the target vocabulary; finite for every state,
    including an empty one, thanks to the smoothing mass.
    """
    if repr_stats.total_tokens == 0:
        raise InputError("undefined distribution: REPRESENTATIVE stats are empty")
    counts = state.sel_counts
    delta = state.delta
    denom = state.sel_tokens + state.smooth_mass
    terms = [
        count * log2((counts.get(word, 0) + delta) / denom)
        for word, count in repr_stats.counts.items()
    ]
    return -fsum(terms) / repr_stats.total_tokens


def update_state(state: ModelState, record: SentenceRecord, breakdown: ScoreBreakdown) -> ModelState:
    """Commit one selected sentence, mutating the state in place.

    The breakdown must have been computed against exactly this state; a
    version mismatch raises StaleBreakdownError.
    """
    if breakdown.state_version != state.version:
        raise StaleBreakdownError(
            f"breakdown from state version {breakdown.state_version}, "
            f"state is at version {state.version}"
        )
    counts = state.sel_counts
    for word, cand_count in record.type_counts:
        counts[word] = counts.get(word, 0) + cand_count
    state.sel_tokens += record.token_count
    state.h_current += breakdown.delta_h
    state.version += 1
    return state


def initial_state(
    sel_counts: dict[str, int],
    delta: float,
    vocab_size: int,
    repr_stats: CorpusStats,
) -> ModelState:
    """Build a state primed with seed counts, with h_current evaluated directly."""
    state = ModelState(
        sel_counts=dict(sel_counts),
        sel_tokens=sum(sel_counts.values()),
        delta=delta,
        vocab_size=vocab_size,
    )
    state.h_current = cross_entropy(state, repr_stats)
    return state
