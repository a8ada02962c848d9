"""Greedy selection engine.

The fast path never scores the whole pool. Each kept word holds a list of the
candidate sentences containing it, sorted by cached gain (best first). A step
picks the word whose single-occurrence gain estimate is currently best, then
rescores only the head region of that word's list: cached gains are lower
bounds (per-word gains only shrink in magnitude as counts grow), so once the
freshly rescored head re-sorts to index i, no entry at or beyond i can win.

Selected sentences are removed from the alive set, not from every list they
appear in; the leftover entries are ghosts, dropped whenever a list visit
touches them. Batch mode rescores the top ceil(sqrt(A)) entries of the best
word's list and selects the top ceil(sqrt(A)/2), de-duplicating identical
token sequences within the batch. Exact mode ignores the index and scores
every alive sentence per step; it optimizes the same smoothed objective over
the same squashed vocabulary, at a cost only suitable for small pools.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, insort
from collections import Counter
from dataclasses import dataclass
from math import isqrt, log2
from typing import Iterator, Optional, Sequence

from .corpus import CorpusStats, SentenceRecord
from .errors import InputError, NothingSelectableError
from .score import (
    ModelState,
    delta_h,
    initial_state,
    penalty,
    sentence_gain,
    update_state,
    word_gain_estimate,
)
from .squash import KEPT, VocabPartition, squash_stats

EXACT_TRIGGER = "exact"
MODES = ("exact", "fast", "batch")


@dataclass(frozen=True, slots=True)
class SelectionEvent:
    """One selected line: its score breakdown and the entropy after committing it."""

    iteration: int
    sentence_id: int
    trigger_word: str
    penalty: float
    gain: float
    delta_h: float
    h_after: float
    batch_index: int = 0


@dataclass(frozen=True)
class StopConfig:
    """When to stop selecting.

    The run halts once the chosen delta-H has stayed positive for `patience`
    consecutive selections, and that trailing positive run is not emitted.
    Caps on emitted lines or their token total stop the run early.
    """

    patience: int = 10
    max_lines: Optional[int] = None
    max_tokens: Optional[int] = None

    def __post_init__(self) -> None:
        if self.patience < 1:
            raise ValueError("patience must be >= 1")


@dataclass(frozen=True, slots=True)
class BatchTrace:
    """Bookkeeping for one batch step (observability for tests and logging)."""

    trigger_word: str
    alive_candidates: int
    rescored: int
    attempted: int
    selected: int


class AliveSet:
    """Constant-time liveness test over sentence ids; a killed id never returns."""

    __slots__ = ("_ids",)

    def __init__(self, ids) -> None:
        self._ids = set(ids)

    def __contains__(self, sentence_id: int) -> bool:
        return sentence_id in self._ids

    def __len__(self) -> int:
        return len(self._ids)

    def kill(self, sentence_id: int) -> None:
        self._ids.remove(sentence_id)

    def sorted_ids(self) -> list[int]:
        return sorted(self._ids)


def _ceil_sqrt(n: int) -> int:
    return isqrt(n - 1) + 1 if n > 0 else 0


def _ceil_half_sqrt(n: int) -> int:
    # smallest m with 2m >= sqrt(n), computed in exact integer arithmetic
    return isqrt(n - 1) // 2 + 1 if n > 0 else 0


class SelectionEngine:
    """Mutable selection run state. Steps are strictly sequential."""

    def __init__(
        self,
        records: list[Optional[SentenceRecord]],
        state: ModelState,
        p_repr: dict[str, float],
        index: dict[str, list[tuple[float, int]]],
        repr_squashed: CorpusStats,
    ) -> None:
        self.records = records
        self.state = state
        self.p_repr = p_repr
        self.index = index
        self.repr_squashed = repr_squashed
        self.alive = AliveSet(rec.id for rec in records if rec is not None)
        self.iteration = 0
        self.stop_reason: Optional[str] = None
        self.window_rescores = 0  # sentence-gain refreshes done by lazy/batch scoring
        self.batch_log: list[BatchTrace] = []
        self._estimates: dict[str, float] = {}
        self._heap: list[tuple[float, str]] = []
        # word -> {occurrences -> gain term}; entries for a word are dropped
        # whenever a selection changes that word's count, so cached terms are
        # always bit-identical to a fresh evaluation
        self._gain_terms: dict[str, dict[int, float]] = {}
        self._init_word_heap()

    # -- word-level bookkeeping -------------------------------------------

    def _init_word_heap(self) -> None:
        sel = self.state.sel_counts
        delta = self.state.delta
        for word in self.index:
            self._estimates[word] = word_gain_estimate(self.p_repr[word], sel.get(word, 0), delta)
        self._heap = [(est, word) for word, est in self._estimates.items()]
        heapq.heapify(self._heap)

    def _drop_word(self, word: str) -> None:
        self.index.pop(word, None)
        self._estimates.pop(word, None)

    def _refresh_estimates(self, record: SentenceRecord) -> None:
        sel = self.state.sel_counts
        delta = self.state.delta
        for word, _count in record.type_counts:
            if word in self._estimates:
                est = word_gain_estimate(self.p_repr[word], sel.get(word, 0), delta)
                self._estimates[word] = est
                heapq.heappush(self._heap, (est, word))

    def fresh_gain(self, record: SentenceRecord) -> float:
        """Current sentence gain, served from the per-word term cache.

        Matches `score.sentence_gain` bit for bit: identical terms summed in
        the same sorted-type order, only memoized.
        """
        terms = self._gain_terms
        counts = self.state.sel_counts
        delta = self.state.delta
        p_repr = self.p_repr
        total = 0.0
        for word, cand_count in record.type_counts:
            per_word = terms.get(word)
            if per_word is None:
                per_word = terms[word] = {}
            term = per_word.get(cand_count)
            if term is None:
                p = p_repr.get(word, 0.0)
                if p == 0.0:
                    term = 0.0
                else:
                    seen = counts.get(word, 0)
                    term = p * log2((seen + delta) / (seen + delta + cand_count))
                per_word[cand_count] = term
            total += term
        return total

    def best_word(self) -> Optional[str]:
        """Kept word with the best current gain estimate, ties to the
        lexicographically smaller word; exhausted words are dropped. Returns
        None when every list has run out (natural termination)."""
        heap = self._heap
        alive = self.alive
        while heap:
            est, word = heap[0]
            current = self._estimates.get(word)
            if current is None or est != current:
                heapq.heappop(heap)  # dead word or superseded estimate
                continue
            lst = self.index[word]
            k = 0
            while k < len(lst) and lst[k][1] not in alive:
                k += 1
            if k:
                del lst[:k]
            if not lst:
                self._drop_word(word)
                heapq.heappop(heap)
                continue
            return word
        return None

    # -- candidate scoring --------------------------------------------------

    def lazy_top(self, word: str) -> Optional[int]:
        """Best candidate for `word` by fresh delta-H, rescoring only the heads.

        Ghosts at the head (and inside the rescore window) are pruned on
        contact. The list is left sorted by the updated cached gains. Returns
        None when pruning empties the list.
        """
        lst = self.index[word]
        alive = self.alive
        k = 0
        while k < len(lst) and lst[k][1] not in alive:
            k += 1
        if k:
            del lst[:k]
        if not lst:
            return None

        state = self.state
        records = self.records
        _stale0, sid0 = lst[0]
        rec0 = records[sid0]
        fresh0 = self.fresh_gain(rec0)
        self.window_rescores += 1
        rec0.cached_gain = fresh0
        rec0.cached_at = self.iteration
        key0 = (fresh0, sid0)

        # Entries sorting below the head's fresh key may still beat it; their
        # stale keys are lower bounds, so everything from the head's new
        # position onward cannot.
        j = bisect_left(lst, key0, 1, len(lst))
        rescored = [key0]
        if j > 1:
            for _stale, sid in lst[1:j]:
                if sid not in alive:
                    continue
                rec = records[sid]
                fresh = self.fresh_gain(rec)
                self.window_rescores += 1
                rec.cached_gain = fresh
                rec.cached_at = self.iteration
                rescored.append((fresh, sid))
            del lst[:j]
            for entry in rescored:
                insort(lst, entry)
        else:
            lst[0] = key0

        sel_tokens = state.sel_tokens
        smooth = state.smooth_mass
        pen_by_len: dict[int, float] = {}
        best: Optional[tuple[float, int]] = None
        for gain, sid in rescored:
            length = records[sid].token_count
            pen = pen_by_len.get(length)
            if pen is None:
                pen = pen_by_len[length] = penalty(sel_tokens, length, smooth)
            dh = pen + gain
            if best is None or (dh, sid) < best:
                best = (dh, sid)
        assert best is not None
        return best[1]

    # -- selection steps ----------------------------------------------------

    def _commit(self, sentence_id: int, trigger_word: str, batch_index: int = 0) -> SelectionEvent:
        record = self.records[sentence_id]
        assert record is not None
        breakdown = delta_h(self.state, record, self.p_repr)
        self.alive.kill(sentence_id)
        lst = self.index.get(trigger_word)
        if lst and lst[0][1] == sentence_id:
            del lst[0]  # head shift; entries in other lists stay behind as ghosts
        update_state(self.state, record, breakdown)
        for word, _count in record.type_counts:
            self._gain_terms.pop(word, None)  # counts changed: drop cached terms
        self.iteration += 1
        self._refresh_estimates(record)
        return SelectionEvent(
            iteration=self.iteration,
            sentence_id=sentence_id,
            trigger_word=trigger_word,
            penalty=breakdown.penalty,
            gain=breakdown.gain,
            delta_h=breakdown.delta_h,
            h_after=self.state.h_current,
            batch_index=batch_index,
        )

    def select_next(self) -> Optional[SelectionEvent]:
        """One lazy-greedy selection; None when no candidate remains reachable."""
        while True:
            word = self.best_word()
            if word is None:
                return None
            sentence_id = self.lazy_top(word)
            if sentence_id is None:
                self._drop_word(word)  # all ghosts: retry with the next-best word
                continue
            return self._commit(sentence_id, word)

    def exact_select_next(self) -> Optional[SelectionEvent]:
        """Score every alive sentence, select the global argmin (ties to lowest id).

        Cost is O(alive * sentence types) per step; intended for small pools
        and as the reference the fast modes are judged against.
        """
        state = self.state
        records = self.records
        sel_tokens = state.sel_tokens
        smooth = state.smooth_mass
        best_dh = 0.0
        best_id = -1
        for sid in self.alive.sorted_ids():
            rec = records[sid]
            assert rec is not None
            dh = penalty(sel_tokens, rec.token_count, smooth) + self.fresh_gain(rec)
            if best_id < 0 or dh < best_dh:
                best_dh = dh
                best_id = sid
        if best_id < 0:
            return None
        return self._commit(best_id, EXACT_TRIGGER)

    def select_batch(self) -> list[SelectionEvent]:
        """One batch step: rescore ceil(sqrt(A)) entries of the best word's list,
        select the top ceil(sqrt(A)/2) of them by fresh delta-H, skipping
        within-batch duplicate token sequences (copies return to the list)."""
        while True:
            word = self.best_word()
            if word is None:
                return []
            lst = self.index[word]
            alive = self.alive
            live = [entry for entry in lst if entry[1] in alive]
            if len(live) != len(lst):
                lst[:] = live  # count A over live entries only
            if not lst:
                self._drop_word(word)
                continue

            a = len(lst)
            n_rescore = _ceil_sqrt(a)
            n_select = _ceil_half_sqrt(a)
            state = self.state
            records = self.records
            sel_tokens = state.sel_tokens
            smooth = state.smooth_mass
            scored: list[tuple[float, float, int]] = []
            for _stale, sid in lst[:n_rescore]:
                rec = records[sid]
                fresh = self.fresh_gain(rec)
                self.window_rescores += 1
                rec.cached_gain = fresh
                rec.cached_at = self.iteration
                dh = penalty(sel_tokens, rec.token_count, smooth) + fresh
                scored.append((dh, fresh, sid))
            del lst[:n_rescore]
            scored.sort(key=lambda t: (t[0], t[2]))
            chosen = scored[:n_select]
            for _dh, gain, sid in scored[n_select:]:
                insort(lst, (gain, sid))

            events: list[SelectionEvent] = []
            seen: set[tuple[str, ...]] = set()
            for _dh, gain, sid in chosen:
                rec = records[sid]
                if rec.tokens in seen:
                    insort(lst, (gain, sid))  # duplicate within the batch: un-select
                    continue
                seen.add(rec.tokens)
                events.append(self._commit(sid, word, batch_index=len(events)))
            self.batch_log.append(
                BatchTrace(
                    trigger_word=word,
                    alive_candidates=a,
                    rescored=n_rescore,
                    attempted=n_select,
                    selected=len(events),
                )
            )
            return events


def build_engine(
    avail_tokens: Sequence[Sequence[str]],
    seed_tokens: Sequence[Sequence[str]],
    repr_stats: CorpusStats,
    partition: VocabPartition,
    *,
    delta: float = 0.001,
    require_word_index: bool = True,
) -> SelectionEngine:
    """Assemble a selection run from tokenized corpora and a vocabulary partition.

    All squashing happens here so the model state, the word index, and the
    candidate records are guaranteed consistent. Blank lines are skipped but
    their line indices are preserved, so emitted ids refer to the original
    file. With `require_word_index` (any indexed mode), an AVAILABLE pool in
    which no kept word occurs raises NothingSelectableError; exact mode does
    not need the index and may pass False.
    """
    if repr_stats.total_tokens == 0:
        raise InputError("REPRESENTATIVE stats are empty")
    repr_squashed = squash_stats(repr_stats, partition)
    w_repr = repr_squashed.total_tokens
    p_repr = {word: count / w_repr for word, count in repr_squashed.counts.items()}

    category = partition.category
    canon: dict[str, str] = {}

    def squash_line(tokens: Sequence[str]) -> list[str]:
        out = []
        for tok in tokens:
            cat = category.get(tok)
            if cat is None:
                raise ValueError(f"token not covered by the vocabulary partition: {tok!r}")
            out.append(canon.setdefault(tok, tok) if cat == KEPT else cat)
        return out

    seed_counts: Counter[str] = Counter()
    for tokens in seed_tokens:
        seed_counts.update(squash_line(tokens))

    records: list[Optional[SentenceRecord]] = []
    vocab = set(repr_squashed.counts)
    vocab.update(seed_counts)
    n_lines = 0
    for line_no, tokens in enumerate(avail_tokens):
        n_lines += 1
        if not tokens:
            records.append(None)
            continue
        squashed = tuple(squash_line(tokens))
        record = SentenceRecord(id=line_no, tokens=squashed)
        records.append(record)
        for word, _count in record.type_counts:
            vocab.add(word)
    if n_lines == 0 or all(rec is None for rec in records):
        raise InputError("AVAILABLE corpus has no selectable lines")

    state = initial_state(dict(seed_counts), delta, len(vocab), repr_squashed)

    # Initial cached gains at iteration 0. The per-(word, count) memo is valid
    # because the state is fixed until the first selection.
    sel = state.sel_counts
    memo: dict[tuple[str, int], float] = {}
    kept = partition.kept_set
    index: dict[str, list[tuple[float, int]]] = {}
    for record in records:
        if record is None:
            continue
        gain = 0.0
        for word, count in record.type_counts:
            term = memo.get((word, count))
            if term is None:
                p = p_repr.get(word, 0.0)
                if p == 0.0:
                    term = 0.0
                else:
                    seen = sel.get(word, 0)
                    term = p * log2((seen + delta) / (seen + delta + count))
                memo[(word, count)] = term
            gain += term
        record.cached_gain = gain
        record.cached_at = 0
        for word, _count in record.type_counts:
            if word in kept:
                index.setdefault(word, []).append((gain, record.id))
    for lst in index.values():
        lst.sort()

    if require_word_index and not index:
        raise NothingSelectableError("no AVAILABLE sentence contains a kept word")
    return SelectionEngine(records, state, p_repr, index, repr_squashed)


def run(
    engine: SelectionEngine,
    stop: StopConfig = StopConfig(),
    mode: str = "fast",
) -> Iterator[SelectionEvent]:
    """Select until the stopping rule fires, yielding events in selection order.

    Positive-delta-H selections are held back until a useful (delta-H <= 0)
    selection follows them; a trailing positive run is never emitted, and once
    it reaches `patience` the run stops. Line and token caps flush held-back
    events so a capped run emits exactly its cap. `engine.stop_reason` is set
    to one of "delta-h positive", "max-lines", "max-tokens", "exhausted" when
    the iterator finishes.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == "batch":
        step = engine.select_batch
    elif mode == "exact":
        step = lambda: _as_list(engine.exact_select_next())  # noqa: E731
    else:
        step = lambda: _as_list(engine.select_next())  # noqa: E731

    engine.stop_reason = None
    pending: list[SelectionEvent] = []
    n_selected = 0
    tokens_selected = 0
    while True:
        events = step()
        if not events:
            engine.stop_reason = "exhausted"
            return
        for event in events:
            record = engine.records[event.sentence_id]
            assert record is not None
            n_selected += 1
            tokens_selected += record.token_count
            if event.delta_h > 0.0:
                pending.append(event)
                if len(pending) >= stop.patience:
                    engine.stop_reason = "delta-h positive"
                    return
            else:
                if pending:
                    yield from pending
                    pending.clear()
                yield event
            if stop.max_lines is not None and n_selected >= stop.max_lines:
                yield from pending
                engine.stop_reason = "max-lines"
                return
            if stop.max_tokens is not None and tokens_selected >= stop.max_tokens:
                yield from pending
                engine.stop_reason = "max-tokens"
                return


def _as_list(event: Optional[SelectionEvent]) -> list[SelectionEvent]:
    return [] if event is None else [event]
