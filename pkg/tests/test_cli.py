import hashlib
import subprocess
import sys

import pytest

from nmtprep.bpe import MergeTable
from nmtprep.cli import main
from nmtprep.fixtures import make_corpus


def run(*argv):
    return main([str(a) for a in argv])


def read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


@pytest.fixture
def corpus(write):
    src = make_corpus(200, seed=1, langs=("en",))
    tgt = make_corpus(200, seed=2, langs=("ro",))
    return write("train.en", src), write("train.ro", tgt)


def test_version(capsys):
    assert run("--version") == 0
    assert "bpe-merges v1" in capsys.readouterr().out


def test_unknown_subcommand(capsys):
    assert run("frobnicate") == 1
    assert "usage" in capsys.readouterr().err


def test_missing_subcommand(capsys):
    assert run() == 1
    assert "usage" in capsys.readouterr().err


def test_input_error_exit_code(tmp_path, capsys):
    assert run("apply-bpe", "-c", tmp_path / "missing", "-i", tmp_path / "x") == 1
    assert "no such file" in capsys.readouterr().err


def test_invalid_utf8_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_bytes(b"ok\n\xc3\x28\n")
    assert run("learn-bpe", "-i", bad, "-o", tmp_path / "codes") == 1
    assert "byte offset 3" in capsys.readouterr().err


def test_internal_error_exit_code(monkeypatch, tmp_path):
    import nmtprep.cli as cli

    def boom(args):
        raise RuntimeError("bug")

    monkeypatch.setattr(cli, "cmd_desegment", boom)
    (tmp_path / "x").write_text("a\n")
    assert run("desegment", "-i", tmp_path / "x") == 2


def test_learn_apply_desegment(corpus, tmp_path):
    src, _ = corpus
    codes = tmp_path / "codes"
    assert run("learn-bpe", "-i", src, "-o", codes, "--merges", 200) == 0
    table = MergeTable.load(codes)
    assert 0 < len(table) <= 200
    seg = tmp_path / "seg"
    assert run("apply-bpe", "-c", codes, "-i", src, "-o", seg) == 0
    assert any("@@ " in line for line in read(seg))
    back = tmp_path / "back"
    assert run("desegment", "-i", seg, "-o", back) == 0
    assert read(back) == read(src)


def test_learn_bpe_config_default(corpus, tmp_path):
    src, _ = corpus
    conf = tmp_path / "c.conf"
    conf.write_text("merges=7\n")
    assert run("learn-bpe", "--config", conf, "-i", src, "-o", tmp_path / "codes") == 0
    assert len(MergeTable.load(tmp_path / "codes")) == 7


def test_apply_bpe_threads_identical(corpus, tmp_path):
    src, tgt = corpus
    codes = tmp_path / "codes"
    run("learn-joint-bpe", "--source", src, "--target", tgt, "-o", codes, "--merges", 300)
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"seg{threads}"
        assert run("apply-bpe", "-c", codes, "-i", src, "-o", out, "--threads", threads) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_translit_and_segment_ru(write, tmp_path):
    en = write("en", ["the cat sat on the mat"] * 3)
    ru = write("ru", ["кот сидел на мате", "чай и кот"] * 3)
    lat = tmp_path / "ru.lat.txt"
    assert run("translit", "--to", "latin", "-i", ru, "-o", lat) == 0
    assert read(lat)[1] == "čaj i kot"
    cyr = tmp_path / "ru.cyr.txt"
    assert run("translit", "--to", "cyrillic", "-i", lat, "-o", cyr) == 0
    assert read(cyr) == read(ru)
    base = tmp_path / "codes"
    assert run("learn-joint-bpe", "--source", en, "--target", ru, "--translit-target",
               "-o", base, "--merges", 50) == 0
    seg = tmp_path / "ru.seg"
    assert run("segment-ru", "-c", base, "-i", ru, "-o", seg) == 0
    assert run("desegment", "-i", seg, "-o", tmp_path / "ru.back") == 0
    assert read(tmp_path / "ru.back") == read(ru)


def test_strip_diacritics(write, tmp_path):
    inp = write("ro", ["București şi Timișoara"])
    assert run("strip-diacritics", "-i", inp, "-o", tmp_path / "out") == 0
    assert read(tmp_path / "out") == ["Bucuresti si Timisoara"]


def test_sample_and_shuffle_parallel(corpus, tmp_path):
    src, tgt = corpus
    o1, o2 = tmp_path / "s.en", tmp_path / "s.ro"
    assert run("sample", "-n", 20, "--seed", 3, "-i", src, "--input-target", tgt,
               "-o", o1, "--output-target", o2) == 0
    pairs = set(zip(read(src), read(tgt)))
    got = list(zip(read(o1), read(o2)))
    assert len(got) == 20 and set(got) <= pairs
    assert run("shuffle", "--seed", 3, "-i", o1, "--input-target", o2,
               "-o", tmp_path / "h.en", "--output-target", tmp_path / "h.ro") == 0
    assert sorted(zip(read(tmp_path / "h.en"), read(tmp_path / "h.ro"))) == sorted(got)


def test_sample_too_many(corpus, tmp_path, capsys):
    src, _ = corpus
    assert run("sample", "-n", 500, "-i", src, "-o", tmp_path / "x") == 1
    assert "500" in capsys.readouterr().err


def test_mix_and_filter(write, tmp_path):
    write("a.src", ["a b", "c d", "e"])
    write("a.tgt", ["x", "y", "z " * 60])
    write("b.src", ["p", "q"])
    write("b.tgt", ["r", "s"])
    recipe = tmp_path / "r.recipe"
    recipe.write_text("seed=1\na.src\ta.tgt\tcopies=2\nb.src\tb.tgt\tcopies=1\tsample=1\n")
    assert run("mix", recipe, "-o", tmp_path / "m.src", "--output-target", tmp_path / "m.tgt") == 0
    assert len(read(tmp_path / "m.src")) == 7
    assert run("filter-len", "-i", tmp_path / "m.src", "--input-target", tmp_path / "m.tgt",
               "-o", tmp_path / "f.src", "--output-target", tmp_path / "f.tgt") == 0
    assert len(read(tmp_path / "f.src")) == 5


def test_stats(write, tmp_path):
    p = write("p", ["x"] * 42)
    s = write("s", ["x"] * 40)
    f = write("f", ["x"] * 36)
    assert run("stats", f"parallel@DE={p}", f"synthetic-to-EN@DE={s}", f"synthetic-from-EN@DE={f}",
               "--scale", 10, "-o", tmp_path / "out") == 0
    assert read(tmp_path / "out") == [
        "type             |   DE",
        "parallel         |  4.2",
        "synthetic (*→EN) |  4.0",
        "synthetic (EN→*) |  3.6",
        "total            | 11.8",
    ]


def test_reverse_target(write, tmp_path):
    t = write("t", ["a b c", "d"])
    assert run("reverse-target", "-i", t, "-o", tmp_path / "r") == 0
    assert read(tmp_path / "r") == ["c b a", "d"]


def test_rerank(write, tmp_path):
    nbest = write("nbest", ["0 ||| a b ||| l2r=-1.0 ||| ", "0 ||| a c ||| l2r=-1.2 ||| ",
                            "1 ||| z ||| l2r=-0.5 ||| "])
    r2l = write("r2l", ["-2.0", "-0.8", "-0.1"])
    out = tmp_path / "best"
    assert run("rerank", "-n", nbest, "--scores", f"r2l={r2l}", "-o", out,
               "--nbest-out", tmp_path / "scored") == 0
    assert read(out) == ["a c", "z"]
    assert read(tmp_path / "scored")[1] == "0 ||| a c ||| l2r=-1.2 r2l=-0.8 ||| -1.0"
    assert run("rerank", "-n", nbest, "--reverse", "-o", tmp_path / "rev") == 0
    assert read(tmp_path / "rev")[0] == "0 ||| b a ||| l2r=-1.0 ||| "


def test_rerank_length_mismatch(write, tmp_path):
    nbest = write("nbest", ["0 ||| a ||| l2r=-1.0 ||| "])
    r2l = write("r2l", ["-2.0", "-0.8"])
    assert run("rerank", "-n", nbest, "--scores", f"r2l={r2l}", "-o", tmp_path / "x") == 1


def test_ensemble_scores(write, tmp_path):
    a = write("a", ["-1", "-3"])
    b = write("b", ["-3", "-1"])
    assert run("ensemble-scores", a, b, "-o", tmp_path / "e") == 0
    assert read(tmp_path / "e") == ["-2.0", "-2.0"]


def test_select_checkpoints_and_early_stop(write, tmp_path):
    log = write("log", [f"{30000 * i}\tmodel.{30000 * i}.npz\t{20 + (i if i < 6 else 6 - i)}" for i in range(1, 11)])
    assert run("select-checkpoints", "-i", log, "-o", tmp_path / "ids") == 0
    assert read(tmp_path / "ids") == [f"model.{30000 * i}.npz" for i in (7, 8, 9, 10)]
    assert run("early-stop", "-i", log, "--checkpoint-log", "--patience", 3, "-o", tmp_path / "es") == 0
    assert read(tmp_path / "es") == ["stop=1 best_index=4"]
    hist = write("hist", ["10", "10", "10"])
    assert run("early-stop", "-i", hist, "--patience", 3, "-o", tmp_path / "es2") == 0
    assert read(tmp_path / "es2") == ["stop=0 best_index=0"]


def test_bleu_identical(corpus, tmp_path):
    src, _ = corpus
    assert run("bleu", "-i", src, "-r", src, "-o", tmp_path / "b") == 0
    assert read(tmp_path / "b")[0].startswith("BLEU = 100.00 (BP=1.000")


def test_mask_plan(write, tmp_path):
    out = tmp_path / "plan"
    assert run("mask-plan", "--src-len", 3, "--tgt-len", 2, "--layers", "4,2", "--seed", 9, "-o", out) == 0
    lines = read(out)
    assert lines[0] == "#maskplan v1 seed=9 p_word=0.1 p_layer=0.2 scaled=0"
    assert [len(l.split(" ")[1]) for l in lines[1:]] == [4, 2, 3, 2]
    src = write("s", ["a b", "c"])
    tgt = write("t", ["x", "y z w"])
    assert run("mask-plan", "-i", src, "--input-target", tgt, "--layers", "2", "-o", out) == 0
    assert sum(l.startswith("#maskplan") for l in read(out)) == 2


def test_mask_plan_bad_probability(tmp_path):
    assert run("mask-plan", "--src-len", 1, "--tgt-len", 1, "--p-word", 2, "-o", tmp_path / "p") == 1


def test_streams_compose(corpus, tmp_path):
    src, _ = corpus
    codes = tmp_path / "codes"
    run("learn-bpe", "-i", src, "-o", codes, "--merges", 100)
    exe = [sys.executable, "-m", "nmtprep"]
    data = open(src, "rb").read()
    seg = subprocess.run(exe + ["apply-bpe", "-c", str(codes)], input=data, capture_output=True, check=True)
    back = subprocess.run(exe + ["desegment"], input=seg.stdout, capture_output=True, check=True)
    assert back.stdout == data


# end-to-end Romanian recipe: strip -> learn joint -> apply -> mix -> shuffle


def ro_pipeline(workdir, en_lines, ro_lines):
    workdir.mkdir()
    (workdir / "train.en").write_text("\n".join(en_lines) + "\n", encoding="utf-8")
    (workdir / "train.ro").write_text("\n".join(ro_lines) + "\n", encoding="utf-8")
    w = lambda name: str(workdir / name)  # noqa: E731
    assert run("strip-diacritics", "-i", w("train.ro"), "-o", w("train.ro.nodia")) == 0
    assert run("learn-joint-bpe", "--config", "configs/en-ro.conf", "--source", w("train.ro.nodia"),
               "--target", w("train.en"), "--merges", 2000, "-o", w("codes")) == 0
    for name in ("train.ro.nodia", "train.en"):
        assert run("apply-bpe", "-c", w("codes"), "-i", w(name), "-o", w(name + ".bpe")) == 0
    (workdir / "mix.recipe").write_text("seed=5\ntrain.ro.nodia.bpe\ttrain.en.bpe\tcopies=2\n")
    assert run("mix", w("mix.recipe"), "-o", w("mix.ro"), "--output-target", w("mix.en")) == 0
    assert run("shuffle", "--seed", 5, "-i", w("mix.ro"), "--input-target", w("mix.en"),
               "-o", w("final.ro"), "--output-target", w("final.en")) == 0
    return {name: hashlib.sha256((workdir / name).read_bytes()).hexdigest()
            for name in ("codes", "final.ro", "final.en")}


def test_ro_pipeline_end_to_end(tmp_path, monkeypatch):
    import pathlib
    monkeypatch.chdir(pathlib.Path(__file__).resolve().parents[1])
    en = make_corpus(1000, seed=21, langs=("en",))
    ro = make_corpus(1000, seed=22, langs=("ro",))
    first = ro_pipeline(tmp_path / "run1", en, ro)
    second = ro_pipeline(tmp_path / "run2", en, ro)
    assert first == second
    final_ro = read(tmp_path / "run1" / "final.ro")
    assert len(final_ro) == 2000
    assert not any(ch in line for line in final_ro for ch in "ăâîșțşţ")
    from nmtprep.bpe import desegment_line
    from nmtprep.diacritics import strip_diacritics
    assert sorted(desegment_line(l) for l in final_ro) == sorted(strip_diacritics(l) for l in ro * 2)
