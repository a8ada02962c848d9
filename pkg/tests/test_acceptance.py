"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines.
Tolerances are fixed here, not configurable. The heavyweight corpora (the
100k-line OOV mixture, the 50k/400k scaling pair) are generated once inside
their tests; everything is seeded, so reruns are bit-reproducible.
"""

import math
import random
import time
from collections import Counter

from cynical.cli import main
from cynical.corpus import CorpusStats, SentenceRecord, count_corpus
from cynical.evaluation import evaluate_subset, moore_lewis_rank
from cynical.score import ModelState, delta_h
from cynical.select import StopConfig, build_engine, run
from cynical.squash import SquashConfig, apply_squash, partition_vocab, squash_stats

from tests.oracle import direct_h, oracle_first_scores, oracle_run
from tests.synthdata import build_partition_for, make_two_domain, random_oracle_instance

EXHAUST = StopConfig(patience=10 ** 9)


def report(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:02d} {name}: {status}  {detail}".rstrip())
    assert ok, f"criterion {number} ({name}) failed: {detail}"


def trailing_positive_run(events):
    n = 0
    for event in reversed(events):
        if event.delta_h > 0:
            n += 1
        else:
            break
    return n


def drain_exact(engine):
    events = []
    while True:
        event = engine.exact_select_next()
        if event is None:
            return events
        events.append(event)


def oracle_instance_files(tmp_path):
    repr_path = tmp_path / "repr.txt"
    repr_path.write_text("x x y\n", encoding="utf-8")
    avail_path = tmp_path / "avail.txt"
    avail_path.write_text("x\ny\nz z z\n", encoding="utf-8")
    return str(repr_path), str(avail_path)


def test_criterion_1_decomposition_identity():
    """delta_h equals the direct cross-entropy difference on random pairs."""
    rng = random.Random(101)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        words = [f"w{i}" for i in range(rng.randint(2, 50))]
        repr_counts = {
            w: rng.randint(1, 100) for w in rng.sample(words, rng.randint(1, len(words)))
        }
        repr_stats = CorpusStats.from_counts(repr_counts)
        p_repr = {w: c / repr_stats.total_tokens for w, c in repr_counts.items()}
        sel_counts = {
            w: rng.randint(1, 100) for w in rng.sample(words, rng.randint(0, len(words)))
        }
        delta = rng.choice([0.001, 0.01, 0.1])
        state = ModelState(
            sel_counts=dict(sel_counts),
            sel_tokens=sum(sel_counts.values()),
            delta=delta,
            vocab_size=len(words),
        )
        record = SentenceRecord(id=0, tokens=tuple(rng.choices(words, k=rng.randint(1, 10))))
        breakdown = delta_h(state, record, p_repr)

        after = dict(sel_counts)
        for word, count in record.type_counts:
            after[word] = after.get(word, 0) + count
        h_before = direct_h(
            sel_counts, state.sel_tokens, delta, len(words), repr_counts, repr_stats.total_tokens
        )
        h_after = direct_h(
            after,
            state.sel_tokens + record.token_count,
            delta,
            len(words),
            repr_counts,
            repr_stats.total_tokens,
        )
        worst = max(worst, abs(breakdown.delta_h - (h_after - h_before)))
    elapsed = time.perf_counter() - started
    report(
        1,
        "decomposition identity",
        worst < 1e-9 and elapsed < 1.0,
        f"worst |err| {worst:.2e} over 1000 pairs in {elapsed:.2f}s",
    )


def test_criterion_2_oracle_equivalence():
    """Exact mode reproduces the brute-force stepwise argmin on 100 instances."""
    rng = random.Random(202)
    started = time.perf_counter()
    checked_events = 0
    for instance in range(100):
        avail, seed, repr_stats, partition, delta = random_oracle_instance(
            rng, max_lines=200, max_vocab=100, max_repr_tokens=1000
        )
        engine = build_engine(
            avail, seed, repr_stats, partition, delta=delta, require_word_index=False
        )
        got = [(e.sentence_id, e.delta_h) for e in drain_exact(engine)]
        expected = oracle_run(avail, seed, repr_stats, partition, delta)
        assert [i for i, _ in got] == [i for i, _ in expected], f"instance {instance}: ids differ"
        for (_, dh_got), (_, dh_exp) in zip(got, expected):
            assert abs(dh_got - dh_exp) < 1e-9, f"instance {instance}: scores differ"
        checked_events += len(got)
    elapsed = time.perf_counter() - started
    report(
        2,
        "oracle equivalence",
        elapsed < 30.0,
        f"100 instances, {checked_events} selections matched in {elapsed:.1f}s",
    )


def test_criterion_3_telescoping_ten_thousand_steps():
    """Final h_after of a 10,000-line fast run matches direct evaluation."""
    rng = random.Random(303)
    repr_lines, avail_lines = make_two_domain(rng, n_in=11_000, n_out=22_000, n_repr=1_500)
    seed_lines = [avail_lines[0], avail_lines[1]]
    repr_stats = count_corpus(repr_lines)
    partition, avail_tokens = build_partition_for(repr_stats, avail_lines)
    seed_tokens = [line.split() for line in seed_lines]
    engine = build_engine(avail_tokens, seed_tokens, repr_stats, partition, delta=0.001)
    events = list(run(engine, StopConfig(patience=10 ** 9, max_lines=10_000), "fast"))
    assert len(events) == 10_000

    selected: Counter[str] = Counter()
    for tokens in seed_tokens:
        selected.update(apply_squash(tokens, partition))
    for event in events:
        selected.update(engine.records[event.sentence_id].tokens)
    repr_squashed = squash_stats(repr_stats, partition)
    vocab = set(repr_squashed.counts) | set(selected)
    for record in engine.records:
        if record is not None:
            vocab.update(record.tokens)
    direct = direct_h(
        dict(selected),
        sum(selected.values()),
        0.001,
        len(vocab),
        repr_squashed.counts,
        repr_squashed.total_tokens,
    )
    err = abs(events[-1].h_after - direct)
    report(3, "telescoping over 10k steps", err < 1e-6, f"|drift| {err:.2e} bits")


def test_criterion_4_degenerate_distribution_contrast():
    """REPR == AVAIL distribution: Moore-Lewis is silent, delta-H still ranks."""
    rng = random.Random(404)
    vocab = [f"w{i:02d}" for i in range(30)]
    weights = [1.0 / (k + 1) for k in range(30)]
    cum = list(__import__("itertools").accumulate(weights))
    lines = [
        " ".join(rng.choices(vocab, cum_weights=cum, k=rng.randint(2, 9))) for _ in range(60)
    ]
    stats = count_corpus(lines)

    ml = moore_lewis_rank(lines, stats, stats)
    ml_all_zero = all(score == 0.0 for _, score in ml)

    partition, avail_tokens = build_partition_for(stats, lines)
    assert not partition.kept_set  # identical distributions keep nothing
    engine = build_engine(
        avail_tokens, [], stats, partition, delta=0.001, require_word_index=False
    )
    first_scores = sorted(set(oracle_first_scores(avail_tokens, [], stats, partition, 0.001).values()))
    events = drain_exact(engine)
    deltas = {round(e.delta_h, 12) for e in events}
    strict_ranking = len(events) == len(lines) and len(deltas) > 1 and len(first_scores) > 1
    report(
        4,
        "degenerate-distribution contrast",
        ml_all_zero and strict_ranking,
        f"ML scores all 0.0; delta-H takes {len(deltas)} distinct values over {len(events)} rows",
    )


def test_criterion_5_kept_word_coverage():
    """Selection covers kept vocabulary early, and completely by exhaustion."""
    rng = random.Random(505)
    repr_lines, avail_lines = make_two_domain(rng, n_in=1_200, n_out=2_400, n_repr=400)
    repr_stats = count_corpus(repr_lines)
    partition, avail_tokens = build_partition_for(repr_stats, avail_lines)
    engine = build_engine(avail_tokens, [], repr_stats, partition, delta=0.001)

    reachable = {
        word
        for tokens in avail_tokens
        for word in tokens
        if word in partition.kept_set
    }
    assert reachable
    budget = 2 * len(reachable)

    events = list(run(engine, EXHAUST, "fast"))
    seen: set[str] = set()
    kept_tokens_used = 0
    coverage_at_budget = None
    for event in events:
        for token in engine.records[event.sentence_id].tokens:
            if token in reachable:
                kept_tokens_used += 1
                seen.add(token)
        if coverage_at_budget is None and kept_tokens_used >= budget:
            coverage_at_budget = len(seen) / len(reachable)
    final_coverage = len(seen) / len(reachable)
    ok = coverage_at_budget is not None and coverage_at_budget >= 0.9 and final_coverage == 1.0
    report(
        5,
        "kept-word coverage",
        ok,
        f"{coverage_at_budget:.1%} covered at 2x|kept|={budget} kept tokens; "
        f"{final_coverage:.0%} at exhaustion ({len(reachable)} reachable)",
    )


def test_criterion_6_directional_oov():
    """At equal subset size, selection leaves no more OOV target tokens than Moore-Lewis."""
    rng = random.Random(606)
    repr_lines, avail_lines = make_two_domain(rng, n_in=10_000, n_out=90_000, n_repr=2_000)
    repr_stats = count_corpus(repr_lines)
    partition, avail_tokens = build_partition_for(repr_stats, avail_lines)
    engine = build_engine(avail_tokens, [], repr_stats, partition, delta=0.001)
    events = list(run(engine, StopConfig(), "fast"))
    assert events
    subset_size = len(events)

    cynical_subset = [avail_lines[e.sentence_id] for e in events]
    ranking = moore_lewis_rank(avail_lines, repr_stats, count_corpus(avail_lines))
    ml_subset = [avail_lines[line_id] for line_id, _ in ranking[:subset_size]]

    cynical_oov = evaluate_subset(cynical_subset, repr_stats).oov_tokens
    ml_oov = evaluate_subset(ml_subset, repr_stats).oov_tokens
    report(
        6,
        "directional OOV",
        cynical_oov <= ml_oov,
        f"at {subset_size} lines: {cynical_oov} OOV tokens vs Moore-Lewis {ml_oov}",
    )


def test_criterion_7_stopping_rule():
    """The 3-line instance halts after two emissions; positive tails never leak."""
    repr_stats = count_corpus(["x x y"])
    avail = [["x"], ["y"], ["z", "z", "z"]]
    unadapt = count_corpus(["x", "y", "z z z"])
    partition = partition_vocab(
        repr_stats, unadapt, {"x", "y", "z"}, SquashConfig(min_count=1, ratio_hi=1.5)
    )

    outcomes = []
    for mode in ("fast", "exact"):
        engine = build_engine(
            avail, [], repr_stats, partition, delta=0.001, require_word_index=(mode == "fast")
        )
        events = list(run(engine, StopConfig(), mode))
        outcomes.append(
            [e.sentence_id for e in events] == [0, 1]
            and trailing_positive_run(events) < StopConfig().patience
        )

    engine = build_engine(avail, [], repr_stats, partition, delta=0.001)
    truncated = list(run(engine, StopConfig(patience=1), "fast"))
    outcomes.append(truncated == [] and engine.stop_reason == "delta-h positive")
    report(
        7,
        "stopping rule",
        all(outcomes),
        "fast and exact both emit exactly [0, 1]; patience=1 truncates the first positive",
    )


def test_criterion_8_batch_mode_contract():
    """Batch sizing follows ceil(sqrt(A))/ceil(sqrt(A)/2); duplicates never share a batch."""
    rng = random.Random(808)
    kept_words = [f"kw{i:02d}" for i in range(10)]
    filler_words = [f"zz{i}" for i in range(8)]
    repr_lines = [" ".join(rng.choices(kept_words, k=8)) for _ in range(80)]
    repr_stats = count_corpus(repr_lines)
    duplicate_line = "kw00 kw01 kw02"
    distinct = [
        " ".join(rng.choices(kept_words + filler_words[:2], k=rng.randint(2, 6)))
        for _ in range(30)
    ]
    filler = [" ".join(rng.choices(filler_words, k=6)) for _ in range(100)]
    avail_lines = [duplicate_line] * 20 + distinct + filler
    rng.shuffle(avail_lines)
    partition, avail_tokens = build_partition_for(
        repr_stats, avail_lines, SquashConfig(min_count=1)
    )
    assert partition.category["kw00"] == "kept"
    engine = build_engine(avail_tokens, [], repr_stats, partition, delta=0.001)
    reachable_ids = sorted(
        line_id
        for line_id, tokens in enumerate(avail_tokens)
        if any(word in partition.kept_set for word in tokens)
    )

    dup_sequence = tuple(apply_squash(duplicate_line.split(), partition))
    batches = []
    while True:
        events = engine.select_batch()
        if not events:
            break
        batches.append(events)

    sizing_ok = True
    for trace in engine.batch_log:
        a = trace.alive_candidates
        if trace.rescored != math.ceil(math.sqrt(a)):
            sizing_ok = False
        if trace.attempted != math.ceil(math.sqrt(a) / 2):
            sizing_ok = False

    no_intra_batch_dup = True
    batches_with_dup = 0
    emitted = []
    for events in batches:
        sequences = [engine.records[e.sentence_id].tokens for e in events]
        if len(sequences) != len(set(sequences)):
            no_intra_batch_dup = False
        if dup_sequence in sequences:
            batches_with_dup += 1
        emitted.extend(e.sentence_id for e in events)

    all_selected = sorted(emitted) == reachable_ids
    spread = batches_with_dup >= 2
    report(
        8,
        "batch-mode contract",
        sizing_ok and no_intra_batch_dup and spread and all_selected,
        f"{len(batches)} batches; the duplicate line spread over {batches_with_dup} of them",
    )


def test_criterion_9_scaling_sanity():
    """Fast mode scales within 40x and batch mode within 24x from N to 8N lines."""
    n_base = 50_000

    def timed(n_lines, mode):
        rng = random.Random(909)
        repr_lines, avail_lines = make_two_domain(
            rng, n_in=n_lines // 10, n_out=n_lines - n_lines // 10, n_repr=1_500
        )
        repr_stats = count_corpus(repr_lines)
        started = time.perf_counter()
        partition, avail_tokens = build_partition_for(repr_stats, avail_lines)
        engine = build_engine(avail_tokens, [], repr_stats, partition, delta=0.001)
        stop = StopConfig(patience=10 ** 9, max_lines=n_lines // 25)
        events = list(run(engine, stop, mode))
        elapsed = time.perf_counter() - started
        assert len(events) == n_lines // 25
        return elapsed

    fast_ratio = timed(8 * n_base, "fast") / timed(n_base, "fast")
    batch_ratio = timed(8 * n_base, "batch") / timed(n_base, "batch")
    report(
        9,
        "scaling sanity",
        fast_ratio <= 40.0 and batch_ratio <= 24.0,
        f"fast 8N/N {fast_ratio:.1f}x (<=40), batch {batch_ratio:.1f}x (<=24)",
    )


def test_criterion_10_determinism(tmp_path):
    """Byte-identical ranked output across repeated CLI runs of the scenarios."""
    repr_path, avail_path = oracle_instance_files(tmp_path)

    rng = random.Random(1010)
    repr_lines, avail_lines = make_two_domain(rng, n_in=1_200, n_out=2_400, n_repr=400)
    synth_repr = tmp_path / "synth_repr.txt"
    synth_repr.write_text("\n".join(repr_lines) + "\n", encoding="utf-8")
    synth_avail = tmp_path / "synth_avail.txt"
    synth_avail.write_text("\n".join(avail_lines) + "\n", encoding="utf-8")

    scenarios = []
    for mode in ("fast", "exact", "batch"):
        scenarios.append(
            (
                f"tiny-{mode}",
                ["select", "--repr", repr_path, "--avail", avail_path, "--mode", mode,
                 "--min-count", "1", "--ratio-hi", "1.5"],
            )
        )
    for mode in ("fast", "batch"):
        scenarios.append(
            (
                f"synthetic-{mode}",
                ["select", "--repr", str(synth_repr), "--avail", str(synth_avail),
                 "--mode", mode, "--max-lines", "400"],
            )
        )

    all_identical = True
    for name, args in scenarios:
        out1 = tmp_path / f"{name}-1.tsv"
        out2 = tmp_path / f"{name}-2.tsv"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        if out1.read_bytes() != out2.read_bytes():
            all_identical = False
    report(10, "determinism", all_identical, f"{len(scenarios)} scenarios, two runs each")
