"""Walk through one selection run with the library API.

A small pool of candidate sentences is ranked by how much each one, added to
what was already selected, improves a unigram model of the target corpus.
Watch the trigger words rotate: the engine always chases the word whose
probability estimate is currently furthest behind the target.
"""

from cynical import (
    SquashConfig,
    StopConfig,
    build_engine,
    count_corpus,
    partition_vocab,
    run,
    tokenize,
)

REPR = [
    "the pangolin rolled into a ball",
    "the pangolin ate termites at dusk",
    "a shy pangolin avoided the aardvark",
    "termites fear the hungry pangolin",
    "the aardvark and the pangolin share a burrow",
]

AVAIL = [
    "stock prices fell sharply on tuesday",
    "the pangolin is a nocturnal mammal",
    "termites build towering mounds",
    "quarterly earnings beat expectations",
    "the aardvark digs for termites at night",
    "a ball python is not a pangolin",
    "investors await the central bank decision",
    "dusk settles over the termite mounds",
    "the hungry aardvark found a burrow",
    "markets rallied after the announcement",
]


def main():
    repr_stats = count_corpus(REPR)
    avail_tokens = [tokenize(line) for line in AVAIL]
    unadapt_stats = count_corpus(AVAIL)

    cfg = SquashConfig(min_count=1, ratio_hi=1.5)
    partition = partition_vocab(
        repr_stats, unadapt_stats, {w for t in avail_tokens for w in t}, cfg
    )
    kept = sorted(partition.kept_set)
    print(f"target vocabulary worth chasing ({len(kept)} words): {', '.join(kept)}")
    print()

    engine = build_engine(avail_tokens, [], repr_stats, partition, delta=0.01)
    print(f"H before selecting anything: {engine.state.h_current:.4f} bits")
    print()
    print(f"{'#':>2}  {'line':>4}  {'trigger':<10} {'dH':>8}  {'H after':>8}  text")
    for event in run(engine, StopConfig(patience=3), "fast"):
        print(
            f"{event.iteration:>2}  {event.sentence_id:>4}  {event.trigger_word:<10}"
            f" {event.delta_h:>8.4f}  {event.h_after:>8.4f}  {AVAIL[event.sentence_id]}"
        )
    print()
    print(f"stopped because: {engine.stop_reason}")
    print()
    print("notes: the first pick can raise H on a tiny vocabulary (the empty-seed")
    print("uniform model is a decent code when |V| is small); it is still emitted")
    print("because net-useful lines follow it. The finance lines never even reach")
    print("the index: none of their words are kept.")


if __name__ == "__main__":
    main()
