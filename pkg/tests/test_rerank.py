import random

import pytest
from hypothesis import given, strategies as st

from oracles import scan_early_stop
from nmtprep.rerank import (
    DEFAULT_NBEST_SIZE,
    CheckpointEvent,
    CheckpointLog,
    Hypothesis,
    NBestList,
    attach_scores,
    combine_and_select,
    early_stop,
    ensemble_scores,
    first_stop,
    reverse_hypotheses,
    reverse_line,
    reverse_target,
    select_checkpoints,
)
from nmtprep.textio import InputError


def two_hyp_fixture():
    nbest = NBestList([Hypothesis(0, ["a", "b"]), Hypothesis(0, ["a", "c"])])
    nbest = attach_scores(nbest, "l2r", [-1.0, -1.2])
    return attach_scores(nbest, "r2l", [-2.0, -0.8])


def random_nbest(rng, n_sent=5, max_n=8, names=("l2r",)):
    hyps = []
    for sid in range(n_sent):
        for k in range(rng.randint(1, max_n)):
            toks = [rng.choice("abcde") for _ in range(rng.randint(1, 6))]
            hyps.append(Hypothesis(sid, toks, {n: -rng.uniform(0, 20) for n in names}))
    return NBestList(hyps)


# reversal


def test_reverse_target_examples():
    assert reverse_target([("x y", "a b c")]) == [("x y", "c b a")]
    assert reverse_target([("x", "a")]) == [("x", "a")]


@given(st.text())
def test_reverse_line_involution(line):
    assert reverse_line(reverse_line(line)) == line


def test_reverse_target_involution_corpus(desk_corpus):
    pairs = list(zip(desk_corpus, desk_corpus[::-1]))
    assert reverse_target(reverse_target(pairs)) == pairs


def test_reverse_hypotheses():
    nbest = two_hyp_fixture()
    rev = reverse_hypotheses(nbest)
    assert [h.tokens for h in rev.hypotheses] == [["b", "a"], ["c", "a"]]
    assert [h.scores for h in rev.hypotheses] == [h.scores for h in nbest.hypotheses]
    assert reverse_hypotheses(NBestList([Hypothesis(0, ["x"])])).hypotheses[0].tokens == ["x"]
    nb = random_nbest(random.Random(0), 30)
    assert reverse_hypotheses(reverse_hypotheses(nb)) == nb


# scores


def test_attach_one_score():
    nb = attach_scores(NBestList([Hypothesis(0, ["a"])]), "lm", [-3.5])
    assert nb.hypotheses[0].scores == {"lm": -3.5}


def test_attach_errors():
    nb = two_hyp_fixture()
    with pytest.raises(InputError):
        attach_scores(nb, "x", [1.0])
    with pytest.raises(InputError):
        attach_scores(nb, "l2r", [1.0, 2.0])


def test_combine_hand_fixture():
    # means: (-1.5, -1.0) -> second hypothesis
    best = combine_and_select(two_hyp_fixture(), ["l2r", "r2l"])
    assert best[0].tokens == ["a", "c"]
    assert best[0].combined == -1.0


def test_combine_weights():
    best = combine_and_select(two_hyp_fixture(), ["l2r", "r2l"], weights=[1.0, 0.0])
    assert best[0].tokens == ["a", "b"]


def test_combine_missing_score():
    with pytest.raises(InputError, match="missing"):
        combine_and_select(two_hyp_fixture(), ["l2r", "lm"])
    with pytest.raises(InputError):
        combine_and_select(two_hyp_fixture(), ["l2r"], weights=[1.0, 1.0])


def test_combine_tie_keeps_lower_rank():
    nb = NBestList([Hypothesis(0, ["x"], {"a": -1.0}), Hypothesis(0, ["y"], {"a": -1.0})])
    assert combine_and_select(nb, ["a"])[0].tokens == ["x"]


def test_combine_gap_is_empty_group():
    nb = NBestList([Hypothesis(0, ["x"], {"a": -1.0}), Hypothesis(2, ["y"], {"a": -1.0})])
    with pytest.raises(InputError, match="sentence 1"):
        combine_and_select(nb, ["a"])


def test_length_normalization():
    nb = NBestList([Hypothesis(0, ["x"], {"a": -1.0}), Hypothesis(0, ["y", "z", "w"], {"a": -2.4})])
    assert combine_and_select(nb, ["a"])[0].tokens == ["x"]
    assert combine_and_select(nb, ["a"], length_normalize=True)[0].tokens == ["y", "z", "w"]


def test_single_column_is_identity_ranking():
    rng = random.Random(1)
    for _ in range(100):
        nb = random_nbest(rng)
        best = combine_and_select(nb, ["l2r"])
        for group, top in zip(nb.groups(), best):
            # exhaustive argmax, first index on ties
            scores = [h.scores["l2r"] for h in group]
            expected = group[scores.index(max(scores))]
            assert (top.tokens, top.scores) == (expected.tokens, expected.scores)


def test_column_order_invariance():
    rng = random.Random(2)
    for _ in range(100):
        nb = random_nbest(rng, names=("a", "b", "c"))
        ref = [h.tokens for h in combine_and_select(nb, ["a", "b", "c"])]
        assert [h.tokens for h in combine_and_select(nb, ["c", "a", "b"])] == ref


def test_nbest_size_declared():
    assert DEFAULT_NBEST_SIZE == 50
    hyps = [Hypothesis(0, ["x"]) for _ in range(3)]
    with pytest.raises(InputError):
        NBestList(hyps, size=2)


def test_nbest_noncontiguous():
    with pytest.raises(InputError):
        NBestList([Hypothesis(0, ["a"]), Hypothesis(1, ["b"]), Hypothesis(0, ["c"])])


def test_nbest_file_format():
    nb = two_hyp_fixture()
    text = nb.dumps()
    assert text.splitlines()[0] == "0 ||| a b ||| l2r=-1.0 r2l=-2.0 ||| "
    assert NBestList.from_lines(text.splitlines()) == nb
    scored = combine_and_select(nb, ["l2r", "r2l"])
    assert scored[0].dumps() == "0 ||| a c ||| l2r=-1.2 r2l=-0.8 ||| -1.0"


@pytest.mark.parametrize("line", ["0 ||| a", "x ||| a ||| l=1 ||| ", "0 ||| a ||| l=1 l=2 ||| ", "0 ||| a ||| =1 ||| "])
def test_nbest_malformed(line):
    with pytest.raises(InputError):
        NBestList.from_lines([line])


# ensembling


def test_ensemble_identity_and_symmetry():
    assert ensemble_scores([[-1.0, -2.5]]) == [-1.0, -2.5]
    assert ensemble_scores([[-1.0, -3.0], [-3.0, -1.0]]) == [-2.0, -2.0]


def test_ensemble_ragged():
    with pytest.raises(InputError):
        ensemble_scores([[1.0], [1.0, 2.0]])
    with pytest.raises(InputError):
        ensemble_scores([])


def test_ensemble8_is_mean_of_two_ensembles():
    rng = random.Random(3)
    cols = [[-rng.uniform(0, 30) for _ in range(20)] for _ in range(8)]
    e8 = ensemble_scores(cols)
    halves = ensemble_scores([ensemble_scores(cols[:4]), ensemble_scores(cols[4:])])
    assert e8 == pytest.approx(halves, abs=1e-12)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=20), st.integers(1, 9))
def test_ensemble_identical_columns(col, k):
    assert ensemble_scores([col] * k) == col


# checkpoints


def test_select_last_four():
    log = CheckpointLog([CheckpointEvent(30000 * i, f"{30 * i}k") for i in range(1, 11)])
    assert select_checkpoints(log, 4) == ["210k", "240k", "270k", "300k"]
    assert select_checkpoints(log, 40) == [f"{30 * i}k" for i in range(1, 11)]
    assert select_checkpoints(log) == ["210k", "240k", "270k", "300k"]


def test_checkpoint_log_format():
    lines = ["30000\tmodel.iter30000.npz\t21.5", "60000\tmodel.iter60000.npz"]
    log = CheckpointLog.from_lines(lines)
    assert log.events[1] == CheckpointEvent(60000, "model.iter60000.npz", None)
    assert log.dumps().splitlines() == lines
    with pytest.raises(InputError):
        CheckpointLog.from_lines(["60000\ta", "30000\tb"])
    with pytest.raises(InputError):
        select_checkpoints(CheckpointLog([]), 4)


# early stopping


def test_early_stop_increasing_never_stops():
    hist = list(range(30))
    assert early_stop(hist, 3) == (False, 29)
    assert first_stop(hist, 3) is None


def test_early_stop_plateau():
    assert early_stop([10, 10, 10], 3) == (False, 0)
    assert early_stop([10, 10, 10, 10], 3) == (True, 0)
    assert first_stop([10, 10, 10, 10], 3) == 3


def test_early_stop_default_patience():
    assert early_stop([1.0] + [0.5] * 9).stop is False
    assert early_stop([1.0] + [0.5] * 10).stop is True


def test_early_stop_against_scan():
    rng = random.Random(4)
    for _ in range(2000):
        hist = [rng.randint(0, 6) for _ in range(rng.randint(0, 15))]
        patience = rng.randint(1, 5)
        assert tuple(early_stop(hist, patience)) == scan_early_stop(hist, patience)
