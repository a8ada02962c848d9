"""Command line interface: stats extraction, selection runs, and evaluation.

Every command is a pure function of its input files and flags; repeated runs
produce byte-identical output. Exit codes: 0 success, 2 input error, 3 empty
result (nothing selectable or an empty ranked output).
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass
from typing import IO, Optional

from . import corpus, evaluation, select, squash
from .errors import InputError, NothingSelectableError
from .select import SelectionEvent, StopConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3


@dataclass(frozen=True)
class RunConfig:
    """Everything a selection run depends on. There is no randomness to seed."""

    repr_path: str
    avail_path: str
    out_path: str
    unadapt_path: Optional[str]
    seed_path: Optional[str]
    mode: str
    delta: float
    squash_cfg: squash.SquashConfig
    stop: StopConfig
    log_base: str

    def __post_init__(self) -> None:
        if self.mode not in select.MODES:
            raise InputError(f"unknown mode {self.mode!r}")
        if self.delta <= 0.0:
            raise InputError("--delta must be > 0")
        for name, path in (("--repr", self.repr_path), ("--avail", self.avail_path)):
            if os.path.abspath(path) == os.path.abspath(self.out_path):
                raise InputError(f"{name} and --out must be different files")


def base_factor(log_base: str) -> float:
    """Multiplier taking internal bits to the reporting base.

    The base changes only reported magnitudes; every selection decision is
    made in bits.
    """
    if log_base == "2":
        return 1.0
    if log_base == "e":
        return math.log(2.0)
    if log_base == "10":
        return math.log10(2.0)
    raise InputError(f"unsupported log base {log_base!r}")


def format_jaded_row(event: SelectionEvent, text: str, factor: float = 1.0) -> str:
    """One ranked-output TSV row.

    Columns: iteration, batch_index, sentence_id, trigger_word, penalty,
    gain, delta_h, h_after (six decimals, in the reporting base), original
    line text.
    """
    return (
        f"{event.iteration}\t{event.batch_index}\t{event.sentence_id}\t"
        f"{event.trigger_word}\t{event.penalty * factor:.6f}\t"
        f"{event.gain * factor:.6f}\t{event.delta_h * factor:.6f}\t"
        f"{event.h_after * factor:.6f}\t{text}\n"
    )


class JadedWriter:
    """Streams selection events as ranked-output rows; rows written are final."""

    def __init__(self, fh: IO[str], factor: float = 1.0) -> None:
        self._fh = fh
        self._factor = factor

    def write_event(self, event: SelectionEvent, text: str) -> None:
        self._fh.write(format_jaded_row(event, text, self._factor))


def load_stats_or_text(path: str) -> corpus.CorpusStats:
    """Load a corpus either as raw text or as a saved stats file (auto-detected)."""
    if corpus.looks_like_stats_file(path):
        return corpus.load_stats(path)
    return corpus.count_corpus(corpus.read_lines(path))


def cmd_stats(args: argparse.Namespace) -> int:
    stats = corpus.count_corpus(corpus.read_lines(args.input))
    if args.out is None:
        corpus.save_stats(stats, sys.stdout)
    else:
        corpus.save_stats(stats, args.out)
    return EXIT_OK


def _tokenize_corpus(lines: list[str], found: set[str]) -> list[list[str]]:
    return [squash.escape_reserved(corpus.tokenize(line), found) for line in lines]


def cmd_select(args: argparse.Namespace) -> int:
    cfg = RunConfig(
        repr_path=args.repr,
        avail_path=args.avail,
        out_path=args.out,
        unadapt_path=args.unadapt,
        seed_path=args.seed,
        mode=args.mode,
        delta=args.delta,
        squash_cfg=_squash_config(args),
        stop=StopConfig(patience=args.patience, max_lines=args.max_lines, max_tokens=args.max_tokens),
        log_base=args.log_base,
    )

    escaped: set[str] = set()
    avail_lines = corpus.read_lines(cfg.avail_path)
    avail_tokens = _tokenize_corpus(avail_lines, escaped)
    repr_stats = squash.escape_stats(load_stats_or_text(cfg.repr_path), escaped)
    if cfg.unadapt_path is None:
        unadapt_stats = _count_token_lines(avail_tokens)
    else:
        unadapt_stats = squash.escape_stats(load_stats_or_text(cfg.unadapt_path), escaped)
    seed_tokens: list[list[str]] = []
    if cfg.seed_path is not None:
        seed_tokens = _tokenize_corpus(corpus.read_lines(cfg.seed_path), escaped)
    if escaped:
        logger.warning("reserved tokens found in input, escaped with 'raw:': %s", sorted(escaped))

    avail_vocab: set[str] = set()
    for tokens in avail_tokens:
        avail_vocab.update(tokens)
    seed_vocab: set[str] = set()
    for tokens in seed_tokens:
        seed_vocab.update(tokens)

    partition = squash.partition_vocab(
        repr_stats, unadapt_stats, avail_vocab, cfg.squash_cfg, extra_vocab=seed_vocab
    )
    engine = select.build_engine(
        avail_tokens,
        seed_tokens,
        repr_stats,
        partition,
        delta=cfg.delta,
        require_word_index=cfg.mode != "exact",
    )

    factor = base_factor(cfg.log_base)
    unit = {"2": "bits", "e": "nats", "10": "hartleys"}[cfg.log_base]
    h_final = engine.state.h_current
    n_lines = 0
    n_tokens = 0
    with open(cfg.out_path, "w", encoding="utf-8") as out:
        writer = JadedWriter(out, factor)
        for event in select.run(engine, cfg.stop, cfg.mode):
            writer.write_event(event, avail_lines[event.sentence_id])
            n_lines += 1
            record = engine.records[event.sentence_id]
            assert record is not None
            n_tokens += record.token_count
            h_final = event.h_after
    print(
        f"selected {n_lines} lines, {n_tokens} tokens | "
        f"final H {h_final * factor:.6f} {unit} | "
        f"stop reason: {engine.stop_reason}"
    )
    return EXIT_OK if n_lines > 0 else EXIT_EMPTY


def _count_token_lines(token_lines: list[list[str]]) -> corpus.CorpusStats:
    from collections import Counter

    counts: Counter[str] = Counter()
    for tokens in token_lines:
        counts.update(tokens)
    return corpus.CorpusStats.from_counts(dict(counts))


def _squash_config(args: argparse.Namespace) -> squash.SquashConfig:
    try:
        return squash.SquashConfig(
            min_count=args.min_count,
            ratio_lo=args.ratio_lo,
            ratio_hi=args.ratio_hi,
            min_count_repr=args.min_count_repr,
            min_count_unadapt=args.min_count_unadapt,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_eval(args: argparse.Namespace) -> int:
    subset_lines = corpus.read_lines(args.subset)
    repr_stats = load_stats_or_text(args.repr)
    report = evaluation.evaluate_subset(subset_lines, repr_stats, args.delta)
    if args.format == "tsv":
        print(report.tsv_header())
        print(report.to_tsv())
    else:
        print(report.to_kv())

    if args.baseline == "moore-lewis":
        if args.unadapt is None:
            pool_stats = corpus.count_corpus(subset_lines)
        else:
            pool_stats = load_stats_or_text(args.unadapt)
        ranking = evaluation.moore_lewis_rank(subset_lines, repr_stats, pool_stats, args.delta)
        rows = [
            f"{line_id}\t{score:.6f}\t{subset_lines[line_id]}\n" for line_id, score in ranking
        ]
        if args.out is None:
            sys.stdout.writelines(rows)
        else:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.writelines(rows)
        if not ranking:
            return EXIT_EMPTY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cynical",
        description="Rank a pool of sentences by the cross-entropy improvement "
        "each contributes toward modeling a target corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="count a text file into a shareable stats file")
    p_stats.add_argument("input", help="text file, one sentence per line")
    p_stats.add_argument("--out", help="stats file to write (default: stdout)")
    p_stats.set_defaults(func=cmd_stats)

    p_sel = sub.add_parser("select", help="rank the AVAILABLE pool and write the result")
    p_sel.add_argument("--repr", required=True, help="target corpus: text or stats file")
    p_sel.add_argument("--unadapt", help="pool-distribution corpus: text or stats file (default: AVAILABLE)")
    p_sel.add_argument("--seed", help="already-committed text, primes the model (default: empty)")
    p_sel.add_argument("--avail", required=True, help="candidate pool, one sentence per line")
    p_sel.add_argument("--out", required=True, help="ranked output file (TSV)")
    p_sel.add_argument("--mode", choices=select.MODES, default="fast")
    p_sel.add_argument("--delta", type=float, default=0.001, help="smoothing mass per vocabulary type")
    p_sel.add_argument("--min-count", type=int, default=3, help="count below which word stats are unreliable")
    p_sel.add_argument("--min-count-repr", type=int, default=None, help="override --min-count for REPR")
    p_sel.add_argument("--min-count-unadapt", type=int, default=None, help="override --min-count for UNADAPT")
    p_sel.add_argument("--ratio-lo", type=float, default=0.5, help="ratio at or below which a word is 'bad'")
    p_sel.add_argument("--ratio-hi", type=float, default=2.0, help="ratio at or above which a word is kept")
    p_sel.add_argument("--patience", type=int, default=10, help="consecutive positive-delta-H selections before stopping")
    p_sel.add_argument("--max-lines", type=int, default=None)
    p_sel.add_argument("--max-tokens", type=int, default=None)
    p_sel.add_argument("--log-base", choices=("2", "e", "10"), default="2",
                       help="reporting base for scores (decisions always use bits)")
    p_sel.set_defaults(func=cmd_select)

    p_eval = sub.add_parser("eval", help="evaluate a subset against target stats")
    p_eval.add_argument("subset", help="selected text, one sentence per line")
    p_eval.add_argument("--repr", required=True, help="target corpus: text or stats file")
    p_eval.add_argument("--delta", type=float, default=0.001)
    p_eval.add_argument("--format", choices=("kv", "tsv"), default="kv")
    p_eval.add_argument("--baseline", choices=("moore-lewis",), default=None,
                        help="also rank the subset with the cross-entropy-difference baseline")
    p_eval.add_argument("--unadapt", help="pool stats for the baseline (default: the subset itself)")
    p_eval.add_argument("--out", help="file for the baseline ranking (default: stdout)")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NothingSelectableError as exc:
        print(f"nothing selectable: {exc}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
