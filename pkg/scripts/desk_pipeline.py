#!/usr/bin/env python3
"""Run one language pair's preprocessing end to end on synthetic desk data.

Real corpora are swapped for fixtures from ``nmtprep.fixtures`` so the whole
chain runs in seconds: diacritic stripping, joint (or bi-script) BPE, a
parallel + back-translation mix, length filtering, shuffling, corpus stats,
right-to-left targets and dropout mask plans, depending on the config.

    python scripts/desk_pipeline.py configs/en-ro.conf --out runs/en-ro
"""

import argparse
import hashlib
import logging
import pathlib
import time

from nmtprep.bpe import learn_joint_bpe, segment_line
from nmtprep.config import PipelineConfig
from nmtprep.corpus import (
    MixComponent,
    MixRecipe,
    ParallelCorpus,
    corpus_stats,
    length_filter,
    mix_corpora,
    render_stats,
    shuffle_corpus,
)
from nmtprep.diacritics import strip_diacritics
from nmtprep.dropout import DropoutConfig, make_corpus_plans
from nmtprep.fixtures import make_corpus
from nmtprep.rerank import reverse_target
from nmtprep.textio import write_lines
from nmtprep.translit import learn_biscript_bpe, segment_russian

log = logging.getLogger("desk_pipeline")


def write_pair(out, name, pairs):
    src = out / f"{name}.src"
    tgt = out / f"{name}.tgt"
    write_lines(src, [s for s, _ in pairs])
    write_lines(tgt, [t for _, t in pairs])
    return src, tgt


def digest(path):
    return hashlib.sha256(pathlib.Path(path).read_bytes()).hexdigest()[:16]


def run(cfg: PipelineConfig, out: pathlib.Path, n_lines: int, merges: int):
    out.mkdir(parents=True, exist_ok=True)
    lang = cfg.pair.split("-")[1] if "-" in cfg.pair else "de"
    # source side is English; the "back-translated" corpus is a second draw
    parallel = list(zip(make_corpus(n_lines, cfg.seed, ("en",)), make_corpus(n_lines, cfg.seed + 1, (lang,))))
    synthetic = list(zip(make_corpus(2 * n_lines, cfg.seed + 2, ("en",)),
                         make_corpus(2 * n_lines, cfg.seed + 3, (lang,))))
    if cfg.strip_diacritics == "source":
        # the Romanian side is the source of RO->EN
        parallel = [(s, strip_diacritics(t)) for s, t in parallel]
        synthetic = [(s, strip_diacritics(t)) for s, t in synthetic]

    en_side = [s for s, _ in parallel + synthetic]
    xx_side = [t for _, t in parallel + synthetic]
    t0 = time.perf_counter()
    if cfg.translit_bpe:
        tables = learn_biscript_bpe(en_side, xx_side, merges)
        tables.save(out / "codes")
        seg_src = lambda line: segment_line(tables.latin, line)  # noqa: E731
        seg_tgt = lambda line: segment_russian(tables, line)  # noqa: E731
        n_rules = len(tables.latin)
    else:
        table = learn_joint_bpe(en_side, xx_side, merges)
        table.save(out / "codes")
        seg_src = seg_tgt = lambda line: segment_line(table, line)  # noqa: E731
        n_rules = len(table)
    log.info("learned %d merges in %.1fs", n_rules, time.perf_counter() - t0)

    par_src, par_tgt = write_pair(out, "parallel.bpe", [(seg_src(s), seg_tgt(t)) for s, t in parallel])
    syn_src, syn_tgt = write_pair(out, "synthetic.bpe", [(seg_src(s), seg_tgt(t)) for s, t in synthetic])
    recipe = MixRecipe([
        MixComponent(ParallelCorpus.open(par_src, par_tgt), copies=2),
        MixComponent(ParallelCorpus.open(syn_src, syn_tgt), copies=1, sample=n_lines),
    ], seed=cfg.seed, max_len=cfg.max_len)
    mixed = shuffle_corpus(length_filter(mix_corpora(recipe), cfg.max_len), cfg.seed)
    train_src, train_tgt = write_pair(out, "train", mixed)

    if cfg.r2l_rerank:
        write_pair(out, "train.r2l", reverse_target(mixed))
    if cfg.dropout:
        dcfg = DropoutConfig(cfg.p_word, cfg.p_layer, (cfg.embedding_size, cfg.hidden_size), cfg.seed)
        plans = make_corpus_plans(dcfg, [(len(s.split()), len(t.split())) for s, t in mixed[:100]])
        write_lines(out / "train.maskplan", [line for p in plans for line in p.dumps().splitlines()])

    stats = corpus_stats([("parallel", "parallel", len(parallel)), ("synthetic", "synthetic-to-EN", len(synthetic))])
    print(render_stats({lang.upper(): stats}, scale=1000, decimals=1))
    print(f"mixed: {recipe.total} lines, kept {len(mixed)} after max_len={cfg.max_len}")
    for path in sorted(out.iterdir()):
        print(f"  {path.name:24s} {digest(path)}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config", help="pipeline config, e.g. configs/en-de.conf")
    ap.add_argument("--out", default="runs/desk", help="output directory")
    ap.add_argument("--lines", type=int, default=2000, help="parallel lines to synthesize")
    ap.add_argument("--merges", type=int, help="override the config's merge count")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    cfg = PipelineConfig.load(args.config)
    run(cfg, pathlib.Path(args.out), args.lines, args.merges or cfg.merges)


if __name__ == "__main__":
    main()
