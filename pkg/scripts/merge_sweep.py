#!/usr/bin/env python3
"""Segments per word and round-trip check as a function of the merge count.

Learns the largest table once and reads smaller tables off as prefixes.
"""

import argparse
import time

from nmtprep.bpe import build_vocab, desegment_line, learn_bpe, segment_line, segments_per_word
from nmtprep.fixtures import make_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lines", type=int, default=20000)
    ap.add_argument("--merges", type=int, nargs="+", default=[100, 500, 1000, 5000, 10000, 20000])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    train = make_corpus(args.lines, seed=args.seed, lexicon_size=20000, max_syllables=5)
    held_out = make_corpus(2000, seed=args.seed + 1, lexicon_size=20000, max_syllables=5)
    t0 = time.perf_counter()
    full = learn_bpe(build_vocab(train), max(args.merges))
    print(f"learned {len(full)} merges from {args.lines} lines in {time.perf_counter() - t0:.1f}s")

    words = [w for line in held_out for w in line.split()]
    print(f"{'merges':>8} {'seg/word':>9} {'round trip':>10}")
    for n in sorted(args.merges):
        table = full.truncate(min(n, len(full)))
        ok = all(desegment_line(segment_line(table, line)) == line for line in held_out)
        print(f"{len(table):>8} {segments_per_word(table, words):>9.3f} {'ok' if ok else 'FAILED':>10}")


if __name__ == "__main__":
    main()
