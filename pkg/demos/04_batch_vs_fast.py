"""Batch mode against one-at-a-time mode on a pool full of duplicates.

Batch steps rescore the top ceil(sqrt(A)) entries of the best word's list and
take the top ceil(sqrt(A)/2), so the run makes far fewer decisions. Identical
sentences are never taken twice within one batch; the copies go back on the
list and surface in later batches instead.
"""

import random
import time

from cynical import StopConfig, build_engine, count_corpus, run
from cynical.squash import SquashConfig, partition_vocab

IN_WORDS = [f"need{i:02d}" for i in range(40)]
NOISE = [f"junk{i:02d}" for i in range(120)]


def make_pool(rng, n_lines):
    pool = ["thank you very much ."] * 60  # the classic pile of duplicates
    for _ in range(n_lines):
        if rng.random() < 0.25:
            k = rng.randint(3, 8)
            pool.append(" ".join(rng.choice(IN_WORDS) for _ in range(k)))
        else:
            k = rng.randint(3, 10)
            pool.append(" ".join(rng.choice(NOISE) for _ in range(k)))
    rng.shuffle(pool)
    return pool


def build(pool, repr_stats):
    avail_tokens = [line.split() for line in pool]
    partition = partition_vocab(
        repr_stats, count_corpus(pool), {w for t in avail_tokens for w in t},
        SquashConfig(min_count=2),
    )
    return build_engine(avail_tokens, [], repr_stats, partition, delta=0.001)


def main():
    rng = random.Random(99)
    repr_lines = [
        " ".join(rng.choice(IN_WORDS + ["thank", "you", "very", "much", "."]) for _ in range(8))
        for _ in range(400)
    ]
    repr_stats = count_corpus(repr_lines)
    pool = make_pool(rng, 8000)

    timings = {}
    events_by_mode = {}
    for mode in ("fast", "batch"):
        engine = build(pool, repr_stats)
        started = time.perf_counter()
        events = list(run(engine, StopConfig(patience=10 ** 9, max_lines=1500), mode))
        timings[mode] = time.perf_counter() - started
        events_by_mode[mode] = events
        if mode == "batch":
            batch_engine = engine

    print(f"fast : {len(events_by_mode['fast']):>5} lines in {timings['fast'] * 1e3:7.1f} ms")
    print(f"batch: {len(events_by_mode['batch']):>5} lines in {timings['batch'] * 1e3:7.1f} ms")

    traces = batch_engine.batch_log
    print(f"\nbatch mode made {len(traces)} decisions instead of 1500. First few steps:")
    print(f"  {'A':>5} {'rescored':>8} {'selected':>8}  trigger")
    for trace in traces[:6]:
        print(f"  {trace.alive_candidates:>5} {trace.rescored:>8} {trace.selected:>8}  {trace.trigger_word}")

    dup = tuple("thank you very much .".split())
    dup_batches = []
    position = 0
    for batch_no, trace in enumerate(traces):
        batch_events = events_by_mode["batch"][position:position + trace.selected]
        position += trace.selected
        if any(batch_engine.records[e.sentence_id].tokens == dup for e in batch_events):
            dup_batches.append(batch_no)
    print(f"\nthe 60 copies of 'thank you very much .' were taken one per batch,")
    print(f"spread over batches {dup_batches[:8]} ... ({len(dup_batches)} batches total)")


if __name__ == "__main__":
    main()
