"""Command-line entry point: ``nmtprep <subcommand> [options]``.

Exit status is 0 on success, 1 for input errors (including usage errors) and
2 for internal errors. Data goes to stdout or the named output files,
diagnostics to stderr. Filters read stdin and write stdout when paths are
omitted.
"""

import argparse
import logging
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor

from . import __version__, FORMAT_VERSIONS
from .bleu import corpus_bleu
from .bpe import MergeTable, build_vocab, desegment_line, learn_bpe, learn_joint_bpe
from .config import PipelineConfig
from .corpus import (
    MixRecipe,
    corpus_stats,
    length_filter,
    mix_corpora,
    render_stats,
    reservoir_sample,
    shuffle_corpus,
)
from .diacritics import strip_diacritics
from .dropout import DropoutConfig, make_mask_plan
from .rerank import (
    CheckpointLog,
    NBestList,
    attach_scores,
    early_stop,
    ensemble_scores,
    format_score,
    read_score_column,
    rescore,
    reverse_hypotheses,
    reverse_line,
    select_best,
    select_checkpoints,
)
from .textio import InputError, read_lines, write_lines
from .translit import BiScriptMergeTable, TranslitTable, iso9, learn_biscript_bpe

logger = logging.getLogger("nmtprep")


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# helpers


def _config(args) -> PipelineConfig:
    return PipelineConfig.load(args.config) if args.config else PipelineConfig()


def _pick(value, default):
    return default if value is None else value


def _read_pairs(args):
    if not args.input_target:
        raise InputError("parallel input needs both --input and --input-target")
    src = read_lines(args.input)
    tgt = read_lines(args.input_target)
    if len(src) != len(tgt):
        raise InputError(f"{args.input} has {len(src)} lines but {args.input_target} has {len(tgt)}")
    return list(zip(src, tgt))


def _write_pairs(args, pairs):
    if not args.output or args.output == "-" or not args.output_target:
        raise InputError("parallel output needs both --output and --output-target files")
    write_lines(args.output, [s for s, _ in pairs])
    write_lines(args.output_target, [t for _, t in pairs])


def _segment_chunk(segmenter, lines):
    return [segmenter.segment_line(line) for line in lines]


def _map_lines(segmenter, lines, threads):
    """Segment lines, optionally across processes; output order is input order."""
    if threads <= 1 or len(lines) < 2:
        return _segment_chunk(segmenter, lines)
    size = -(-len(lines) // threads)
    chunks = [lines[i:i + size] for i in range(0, len(lines), size)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        results = pool.map(_segment_chunk, [segmenter] * len(chunks), chunks)
        return [line for chunk in results for line in chunk]


# --------------------------------------------------------------------------
# subcommands


def cmd_learn_bpe(args):
    cfg = _config(args)
    vocab = build_vocab(read_lines(args.input))
    table = learn_bpe(vocab, _pick(args.merges, cfg.merges), args.min_frequency)
    write_lines(args.output, table.dumps().splitlines())


def cmd_learn_joint_bpe(args):
    cfg = _config(args)
    merges = _pick(args.merges, cfg.merges)
    src, tgt = read_lines(args.source), read_lines(args.target)
    if args.translit_target or cfg.translit_bpe:
        if not args.output or args.output == "-":
            raise InputError("--translit-target writes <output>.lat and <output>.cyr; give -o BASENAME")
        learn_biscript_bpe(src, tgt, merges, min_frequency=args.min_frequency).save(args.output)
        return
    table = learn_joint_bpe(src, tgt, merges, args.min_frequency)
    write_lines(args.output, table.dumps().splitlines())


def cmd_apply_bpe(args):
    table = MergeTable.load(args.codes)
    write_lines(args.output, _map_lines(table.segmenter, read_lines(args.input), args.threads))


def cmd_segment_ru(args):
    tables = BiScriptMergeTable.load(args.codes)
    write_lines(args.output, _map_lines(tables.segmenter, read_lines(args.input), args.threads))


def cmd_desegment(args):
    write_lines(args.output, [desegment_line(line) for line in read_lines(args.input)])


def cmd_translit(args):
    table = TranslitTable.load(args.table) if args.table else iso9()
    fn = table.to_latin if args.to == "latin" else table.to_cyrillic
    write_lines(args.output, [fn(line) for line in read_lines(args.input)])


def cmd_strip_diacritics(args):
    write_lines(args.output, [strip_diacritics(line) for line in read_lines(args.input)])


def cmd_sample(args):
    seed = _pick(args.seed, _config(args).seed)
    if args.input_target:
        pairs = _read_pairs(args)
        _write_pairs(args, reservoir_sample(pairs, args.n, seed))
    else:
        write_lines(args.output, reservoir_sample(read_lines(args.input), args.n, seed))


def cmd_mix(args):
    recipe = MixRecipe.load(args.recipe)
    pairs = mix_corpora(recipe)
    if len(pairs) != recipe.total:
        raise RuntimeError(f"mixed {len(pairs)} pairs, recipe arithmetic says {recipe.total}")
    _write_pairs(args, pairs)
    logger.info("mixed %d pairs", len(pairs))


def cmd_filter_len(args):
    max_len = _pick(args.max_len, _config(args).max_len)
    _write_pairs(args, length_filter(_read_pairs(args), max_len))


def cmd_shuffle(args):
    seed = _pick(args.seed, _config(args).seed)
    if args.input_target:
        _write_pairs(args, shuffle_corpus(_read_pairs(args), seed))
    else:
        write_lines(args.output, shuffle_corpus(read_lines(args.input), seed))


def cmd_stats(args):
    columns = {}
    for item in args.components:
        label_col, sep, path = item.partition("=")
        if not sep or not path:
            raise InputError(f"expected LABEL[@COLUMN]=PATH, got {item!r}")
        label, _, column = label_col.partition("@")
        n = len(read_lines(path))
        columns.setdefault(column or "count", []).append((path, label, n))
    stats = {col: corpus_stats(comps) for col, comps in columns.items()}
    write_lines(args.output, render_stats(stats, args.scale, args.decimals).splitlines())


def cmd_reverse_target(args):
    write_lines(args.output, [reverse_line(line) for line in read_lines(args.input)])


def cmd_rerank(args):
    cfg = _config(args)
    nbest = NBestList.from_lines(read_lines(args.nbest), _pick(args.nbest_size, cfg.nbest_size))
    if args.reverse:
        write_lines(args.output, reverse_hypotheses(nbest).dumps().splitlines())
        return
    for item in args.scores:
        name, sep, path = item.partition("=")
        if not sep:
            raise InputError(f"expected NAME=FILE, got {item!r}")
        nbest = attach_scores(nbest, name, read_score_column(read_lines(path)))
    names = args.use
    if not names:
        names = list(nbest.hypotheses[0].scores) if nbest.hypotheses else []
    if not nbest.hypotheses:
        write_lines(args.output, [])
        return
    scored = rescore(nbest, names, args.weights, args.normalize)
    if args.nbest_out:
        write_lines(args.nbest_out, scored.dumps().splitlines())
    write_lines(args.output, [" ".join(h.tokens) for h in select_best(scored)])


def cmd_ensemble_scores(args):
    columns = [read_score_column(read_lines(path)) for path in args.columns]
    write_lines(args.output, [format_score(x) for x in ensemble_scores(columns)])


def cmd_select_checkpoints(args):
    k = _pick(args.k, _config(args).ensemble_k)
    log = CheckpointLog.from_lines(read_lines(args.input))
    write_lines(args.output, select_checkpoints(log, k))


def cmd_early_stop(args):
    patience = _pick(args.patience, _config(args).patience)
    lines = read_lines(args.input)
    if args.checkpoint_log:
        history = [e.score for e in CheckpointLog.from_lines(lines).events if e.score is not None]
    else:
        history = read_score_column([line for line in lines if line.strip()])
    decision = early_stop(history, patience)
    best = "none" if decision.best_index is None else str(decision.best_index)
    write_lines(args.output, [f"stop={int(decision.stop)} best_index={best}"])


def cmd_bleu(args):
    hyps = read_lines(args.input)
    refs = [read_lines(path) for path in args.references]
    if any(len(r) != len(refs[0]) for r in refs):
        raise InputError("reference files differ in line count")
    references = refs[0] if len(refs) == 1 else list(zip(*refs))
    report = corpus_bleu(hyps, references, args.max_n, args.smooth)
    write_lines(args.output, [report.render()])


def cmd_mask_plan(args):
    cfg = _config(args)
    dcfg = DropoutConfig(
        p_word=_pick(args.p_word, cfg.p_word),
        p_layer=_pick(args.p_layer, cfg.p_layer),
        layer_sizes=tuple(int(x) for x in args.layers.split(",")) if args.layers
        else (cfg.embedding_size, cfg.hidden_size),
        seed=_pick(args.seed, cfg.seed),
        scaled=args.scaled,
    )
    if args.input:
        pairs = _read_pairs(args)
        lengths = [(len(s.split()), len(t.split())) for s, t in pairs]
    else:
        if args.src_len is None or args.tgt_len is None:
            raise InputError("give --src-len and --tgt-len, or --input/--input-target")
        lengths = [(args.src_len, args.tgt_len)]
    text = "".join(make_mask_plan(dcfg, s, t, i).dumps() for i, (s, t) in enumerate(lengths))
    write_lines(args.output, text.splitlines())


# --------------------------------------------------------------------------
# parser


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="pipeline config (key=value lines)")
    common.add_argument("--threads", type=int, default=1, help="worker processes (output does not depend on it)")
    common.add_argument("-v", "--verbose", action="store_true")

    def io(p, inp=True, out=True):
        if inp:
            p.add_argument("-i", "--input", default="-", help="input file (default: stdin)")
        if out:
            p.add_argument("-o", "--output", default="-", help="output file (default: stdout)")

    def parallel(p):
        p.add_argument("-i", "--input", help="source-side input")
        p.add_argument("--input-target", help="target-side input")
        p.add_argument("-o", "--output", help="source-side output")
        p.add_argument("--output-target", help="target-side output")

    parser = ArgumentParser(prog="nmtprep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=version_string())
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=ArgumentParser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("learn-bpe", cmd_learn_bpe, "learn a BPE merge table from one corpus")
    io(p)
    p.add_argument("--merges", type=int, help="number of merge operations (default: 89500)")
    p.add_argument("--min-frequency", type=int, default=2)

    p = add("learn-joint-bpe", cmd_learn_joint_bpe, "learn one merge table on source + target text")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--merges", type=int)
    p.add_argument("--min-frequency", type=int, default=2)
    p.add_argument("--translit-target", action="store_true",
                   help="target is Russian: latinize it, write BASENAME.lat and BASENAME.cyr")

    p = add("apply-bpe", cmd_apply_bpe, "segment text with a merge table")
    p.add_argument("-c", "--codes", required=True)
    io(p)

    p = add("desegment", cmd_desegment, "undo BPE segmentation")
    io(p)

    p = add("translit", cmd_translit, "ISO 9 transliteration")
    p.add_argument("--to", choices=("latin", "cyrillic"), default="latin")
    p.add_argument("--table", help="alternative <cyrillic>TAB<latin> table")
    io(p)

    p = add("segment-ru", cmd_segment_ru, "segment Russian text with Latin + Cyrillic merge tables")
    p.add_argument("-c", "--codes", required=True, help="basename of the .lat/.cyr tables")
    io(p)

    p = add("strip-diacritics", cmd_strip_diacritics, "remove Romanian diacritics")
    io(p)

    p = add("sample", cmd_sample, "seeded uniform sample of lines or line pairs")
    parallel(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int)

    p = add("mix", cmd_mix, "build a training corpus from a mix recipe")
    p.add_argument("recipe")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--output-target", required=True)

    p = add("filter-len", cmd_filter_len, "drop pairs with a side longer than max_len tokens")
    parallel(p)
    p.add_argument("--max-len", type=int)

    p = add("shuffle", cmd_shuffle, "seeded shuffle of lines or line pairs")
    parallel(p)
    p.add_argument("--seed", type=int)

    p = add("stats", cmd_stats, "parallel/synthetic corpus size table")
    p.add_argument("components", nargs="+", metavar="LABEL[@COLUMN]=PATH")
    p.add_argument("--scale", type=float, default=1e6, help="divide counts by this (default: millions)")
    p.add_argument("--decimals", type=int, default=1)
    p.add_argument("-o", "--output", default="-")

    p = add("reverse-target", cmd_reverse_target, "reverse token order of each line")
    io(p)

    p = add("rerank", cmd_rerank, "rescore an n-best list and print the 1-best per sentence")
    p.add_argument("-n", "--nbest", required=True)
    p.add_argument("--scores", nargs="*", default=[], metavar="NAME=FILE")
    p.add_argument("--use", nargs="*", metavar="NAME", help="score names to combine (default: all)")
    p.add_argument("--weights", type=float, nargs="*", help="default: uniform")
    p.add_argument("--normalize", action="store_true", help="divide scores by hypothesis length")
    p.add_argument("--nbest-size", type=int)
    p.add_argument("--nbest-out", help="also write the rescored n-best list")
    p.add_argument("--reverse", action="store_true",
                   help="only reverse hypothesis tokens (input for a right-to-left scorer)")
    p.add_argument("-o", "--output", default="-")

    p = add("ensemble-scores", cmd_ensemble_scores, "uniform mean of score columns")
    p.add_argument("columns", nargs="+")
    p.add_argument("-o", "--output", default="-")

    p = add("select-checkpoints", cmd_select_checkpoints, "ids of the last k saved checkpoints")
    io(p)
    p.add_argument("-k", type=int)

    p = add("early-stop", cmd_early_stop, "early-stopping decision from validation scores")
    io(p)
    p.add_argument("--patience", type=int)
    p.add_argument("--checkpoint-log", action="store_true", help="input is a checkpoint log")

    p = add("bleu", cmd_bleu, "corpus BLEU")
    io(p)
    p.add_argument("-r", "--references", nargs="+", required=True)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--smooth", action="store_true")

    p = add("mask-plan", cmd_mask_plan, "pervasive-dropout mask plans")
    parallel(p)
    p.add_argument("--src-len", type=int)
    p.add_argument("--tgt-len", type=int)
    p.add_argument("--p-word", type=float)
    p.add_argument("--p-layer", type=float)
    p.add_argument("--layers", help="comma-separated layer sizes")
    p.add_argument("--seed", type=int)
    p.add_argument("--scaled", action="store_true")
    p.set_defaults(output="-")

    return parser


def version_string() -> str:
    formats = ", ".join(f"{k} {v}" for k, v in FORMAT_VERSIONS.items())
    return f"nmtprep {__version__} ({formats})"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_usage(sys.stderr)
            print("nmtprep: error: a subcommand is required", file=sys.stderr)
            return 1
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s", stream=sys.stderr)
        if args.threads < 1:
            raise InputError("--threads must be at least 1")
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"nmtprep: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return exc.code or 0
    except Exception:
        traceback.print_exc()
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
