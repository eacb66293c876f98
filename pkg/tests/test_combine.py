import pytest

from asrec.combine import build_multi_nbest, rover
from asrec.core import NBestList
from asrec.errors import DataError
from conftest import random_nbest


# -- rover ---------------------------------------------------------------------


def test_majority_vote():
    assert rover([("a b c", 1.0), ("a x c", 1.0), ("a b c", 1.0)]) == "a b c"


def test_weighted_null_wins():
    # slot 2 votes: b with weight 1 vs null with weight 3
    assert rover([("a b", 1.0), ("a", 3.0)]) == "a"


def test_duplicated_single_hypothesis_is_identity():
    assert rover([("this is it", 1.0), ("this is it", 1.0)]) == "this is it"


def test_insertion_creates_slot():
    assert rover([("a c", 1.0), ("a b c", 1.0), ("a b c", 1.0)]) == "a b c"


def test_empty_input_rejected():
    with pytest.raises(DataError):
        rover([])
    with pytest.raises(DataError):
        rover([("only one", 1.0)])


def test_nonpositive_weight_rejected():
    with pytest.raises(ValueError):
        rover([("a", 1.0), ("b", 0.0)])


def test_vote_tie_prefers_earliest_system():
    # two-way tie in the second slot: system order decides
    assert rover([("a x", 1.0), ("a y", 1.0)]) == "a x"


def random_case(rng):
    vocab = ["a", "b", "c", "d"]
    base = [rng.choice(vocab) for _ in range(rng.randint(1, 5))]
    hyps = []
    for _ in range(3):
        words = list(base)
        if words and rng.random() < 0.5:
            words[rng.randrange(len(words))] = rng.choice(vocab)
        if rng.random() < 0.3:
            words.insert(rng.randint(0, len(words)), rng.choice(vocab))
        if len(words) > 1 and rng.random() < 0.3:
            words.pop(rng.randrange(len(words)))
        hyps.append((" ".join(words), rng.choice([1.0, 2.0])))
    return hyps


def test_duplication_invariance(rng):
    for _ in range(60):
        hyps = random_case(rng)
        assert rover(hyps) == rover(hyps + hyps)


def test_output_length_bounded(rng):
    for _ in range(40):
        hyps = random_case(rng)
        out_len = len(rover(hyps).split())
        assert out_len <= sum(len(t.split()) for t, _ in hyps)


# -- multi-model N-best ----------------------------------------------------------


def five_best(prefix):
    return NBestList.from_pairs([(f"{prefix} {k}", -float(k)) for k in range(1, 6)])


def test_pattern_e1e2t1t2t3():
    combined = build_multi_nbest(five_best("e"), five_best("t"), "E1E2T1T2T3")
    assert [h.text for h in combined.nbest] == ["e 1", "e 2", "t 1", "t 2", "t 3"]
    assert [h.rank for h in combined.nbest] == [1, 2, 3, 4, 5]
    assert combined.sources == ("E1", "E2", "T1", "T2", "T3")
    assert "cross-system-scores-not-comparable" in combined.flags


def test_pattern_s1s2e1e2e3():
    combined = build_multi_nbest(five_best("s"), five_best("e"), "S1S2E1E2E3")
    assert len(combined.nbest) == 5
    assert [h.text for h in combined.nbest] == ["s 1", "s 2", "e 1", "e 2", "e 3"]


def test_pattern_missing_rank():
    with pytest.raises(DataError, match="T6"):
        build_multi_nbest(five_best("e"), five_best("t"), "E1T6")


def test_pattern_verbatim_copies(rng):
    a, b = random_nbest(rng), random_nbest(rng)
    pattern = "A1B1"
    combined = build_multi_nbest(a, b, pattern)
    assert len(combined.nbest) == 2
    assert combined.nbest.hypotheses[0].text == a.hypotheses[0].text
    assert combined.nbest.hypotheses[0].asr_logscore == a.hypotheses[0].asr_logscore
    assert combined.nbest.hypotheses[1].text == b.hypotheses[0].text


def test_pattern_malformed():
    with pytest.raises(ValueError):
        build_multi_nbest(five_best("a"), five_best("b"), "E1-T2")
    with pytest.raises(ValueError):
        build_multi_nbest(five_best("a"), five_best("b"), "")
    with pytest.raises(ValueError, match="more than two"):
        build_multi_nbest(five_best("a"), five_best("b"), "A1B1C1")
