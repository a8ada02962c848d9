"""Incremental cross-entropy data selection.

Rank a pool of candidate sentences by how much each one, added right now,
improves a unigram model of a target corpus. Selection is greedy and lazy:
only sentences containing the currently most-needed word are rescored, the
working vocabulary is squashed down to the words that actually distinguish
the target, and an exhaustive exact mode serves as the reference.
"""

from .corpus import CorpusStats, SentenceRecord, count_corpus, load_stats, save_stats, tokenize
from .errors import CynicalError, InputError, NothingSelectableError, StaleBreakdownError
from .evaluation import EvalReport, evaluate_subset, moore_lewis_rank
from .score import ModelState, ScoreBreakdown, cross_entropy, delta_h, penalty, word_gain
from .select import SelectionEngine, SelectionEvent, StopConfig, build_engine, run
from .squash import SquashConfig, VocabPartition, apply_squash, partition_vocab, squash_stats

__version__ = "0.1.0"

__all__ = [
    "CorpusStats",
    "CynicalError",
    "EvalReport",
    "InputError",
    "ModelState",
    "NothingSelectableError",
    "ScoreBreakdown",
    "SelectionEngine",
    "SelectionEvent",
    "SentenceRecord",
    "SquashConfig",
    "StaleBreakdownError",
    "StopConfig",
    "VocabPartition",
    "apply_squash",
    "build_engine",
    "count_corpus",
    "cross_entropy",
    "delta_h",
    "evaluate_subset",
    "load_stats",
    "moore_lewis_rank",
    "partition_vocab",
    "penalty",
    "run",
    "save_stats",
    "squash_stats",
    "tokenize",
    "word_gain",
]
