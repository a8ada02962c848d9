"""The stats-only exchange, end to end through the command line.

A data owner who cannot share raw text shares only word counts: `cynical
stats` turns their corpus into a counts file, and `cynical select` accepts
that file anywhere raw text is accepted. The ranked output is byte-identical
either way.
"""

import filecmp
import random
import tempfile
from pathlib import Path

from cynical.cli import main

IN_WORDS = [f"topic{i}" for i in range(30)]
OUT_WORDS = [f"noise{i}" for i in range(80)]
FUNCTION = ["the", "a", "of", "and", "to"]


def make_line(rng, content):
    k = rng.randint(3, 9)
    return " ".join(
        rng.choice(FUNCTION) if rng.random() < 0.35 else rng.choice(content)
        for _ in range(k)
    )


def main_demo():
    rng = random.Random(2024)
    workdir = Path(tempfile.mkdtemp(prefix="cynical-demo-"))
    print(f"working in {workdir}")

    repr_path = workdir / "client_corpus.txt"
    repr_path.write_text(
        "\n".join(make_line(rng, IN_WORDS) for _ in range(300)) + "\n", encoding="utf-8"
    )
    avail_path = workdir / "pool.txt"
    pool = [make_line(rng, IN_WORDS) for _ in range(150)]
    pool += [make_line(rng, OUT_WORDS) for _ in range(850)]
    rng.shuffle(pool)
    avail_path.write_text("\n".join(pool) + "\n", encoding="utf-8")

    # the client runs this on their side and ships only the counts
    stats_path = workdir / "client_stats.txt"
    assert main(["stats", str(repr_path), "--out", str(stats_path)]) == 0
    head = stats_path.read_text(encoding="utf-8").splitlines()[:4]
    print("\nshared stats file starts with:")
    for line in head:
        print(f"  {line}")

    out_from_text = workdir / "ranked_from_text.tsv"
    out_from_stats = workdir / "ranked_from_stats.tsv"
    print("\nselecting with the raw client corpus...")
    main(["select", "--repr", str(repr_path), "--avail", str(avail_path),
          "--out", str(out_from_text)])
    print("selecting with only the shared stats...")
    main(["select", "--repr", str(stats_path), "--avail", str(avail_path),
          "--out", str(out_from_stats)])

    identical = filecmp.cmp(out_from_text, out_from_stats, shallow=False)
    print(f"\nranked outputs byte-identical: {identical}")
    first = out_from_text.read_text(encoding="utf-8").splitlines()[0].split("\t")
    print(f"first selected line (dH {first[6]} bits, trigger {first[3]!r}): {first[8]}")


if __name__ == "__main__":
    main_demo()
