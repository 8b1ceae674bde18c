import random

import pytest

from spkrerank.core import Config, LabelsRequiredError
from spkrerank.graph import InteractionGraph
from spkrerank.metrics import accuracy_report, conversation_accuracy, diff_report, speaker_accuracy
from spkrerank.rerank import Combination, ConversationDecision, enumerate_and_select, process_case

from conftest import conv, make_case, normed, utt


def decision(cid, baseline, reranked=None):
    reranked = baseline if reranked is None else reranked
    return ConversationDecision(cid, Combination(tuple(baseline), 0.0), Combination(tuple(reranked), 0.0),
                                1, False, 5)


def labelled(cid, index, truths):
    return conv(cid, index, *[utt(f"{cid}_u{i}", {"X": 0.0, "Y": 0.0, "Z": 0.0}, t) for i, t in enumerate(truths)])


@pytest.fixture
def two_conversations():
    case = make_case([labelled("c0", 0, "XYX"), labelled("c1", 1, "YZ")])
    decisions = [decision("c0", "XYX"), decision("c1", "YX", "YZ")]
    return case, decisions


def test_two_conversation_fixture(two_conversations):
    case, decisions = two_conversations
    # reranked: everything right; baseline: c1 slot 1 wrong -> 4 of 5 slots, 1 of 2 conversations
    assert conversation_accuracy(decisions, case, "baseline") == 0.5
    assert speaker_accuracy(decisions, case, "baseline") == 4 / 5
    assert conversation_accuracy(decisions, case) == 1.0
    assert speaker_accuracy(decisions, case) == 1.0


def test_nine_of_ten():
    case = make_case([labelled("c0", 0, "XYXYX"), labelled("c1", 1, "ZZYXY")])
    decisions = [decision("c0", "XYXYX"), decision("c1", "ZZYXX")]
    assert speaker_accuracy(decisions, case) == 0.9
    assert conversation_accuracy(decisions, case) == 0.5


def test_three_conversation_hand_tally():
    case = make_case([labelled("c0", 0, "XY"), labelled("c1", 1, "XYZ"), labelled("c2", 2, "ZZZ")])
    decisions = [decision("c0", "XX"), decision("c1", "XYZ"), decision("c2", "ZYY")]
    # slots right: 1 + 3 + 1 = 5 of 8; conversations right: c1 only
    rep = accuracy_report(decisions, case)
    assert rep.speaker_accuracy == 5 / 8
    assert rep.conversation_accuracy == 1 / 3
    assert [o.n_slots_correct for o in rep.per_conversation] == [1, 3, 1]
    assert (rep.n_utterances, rep.n_conversations) == (8, 3)


def test_swapped_slots_count_as_wrong():
    case = make_case([labelled("c0", 0, "XY")])
    rep = accuracy_report([decision("c0", "YX")], case)
    assert rep.conversation_accuracy == 0.0 and rep.speaker_accuracy == 0.0
    assert rep.per_conversation[0].set_correct


def test_missing_labels_raise():
    case = make_case([conv("c0", 0, utt("u0", {"X": 1.0}))])
    with pytest.raises(LabelsRequiredError):
        speaker_accuracy([decision("c0", "X")], case)
    with pytest.raises(LabelsRequiredError):
        conversation_accuracy([decision("c0", "X")], case)


def test_mismatched_decisions_raise(two_conversations):
    case, decisions = two_conversations
    with pytest.raises(ValueError):
        speaker_accuracy(decisions[:1], case)
    with pytest.raises(ValueError):
        accuracy_report(decisions, case, which="oracle")


def test_diff_report(two_conversations):
    case, decisions = two_conversations
    (entry,) = diff_report(decisions, case)
    assert (entry.conversation_id, entry.slot, entry.truth, entry.baseline_pred, entry.reranked_pred) == \
        ("c1", 1, "Z", "X", "Z")
    same = [decision("c0", "XYX"), decision("c1", "YZ")]
    assert diff_report(same, case) == []


def test_diff_report_without_truth():
    c = conv("c", 0, normed("u0", {"1": 0.9, "2": 0.85}), normed("u1", {"4": 0.95, "3": 0.2}))
    g = InteractionGraph.from_edges([("1", "3", 3), ("2", "4", 5)])
    d = enumerate_and_select(c, g, Config(rel_threshold=0.0))
    (entry,) = diff_report([d], make_case([c]))
    assert (entry.slot, entry.truth, entry.baseline_pred, entry.reranked_pred) == (0, None, "1", "2")


def test_metric_properties_on_random_runs():
    from spkrerank.synth import SynthSpec, generate_case
    for seed in range(5):
        case = generate_case(SynthSpec(seed=seed, n_conversations=30, min_slots=3, max_slots=3))
        decisions, _ = process_case(case)
        for which in ("baseline", "reranked"):
            rep = accuracy_report(decisions, case, which)
            assert 0 <= rep.conversation_accuracy <= rep.speaker_accuracy <= 1
            assert (rep.conversation_accuracy == 1) == (rep.speaker_accuracy == 1)
        order = list(range(len(decisions)))
        random.Random(seed).shuffle(order)
        shuffled = make_case([case.conversations[i] for i in order], enrolled=case.enrolled)
        sd = [decisions[i] for i in order]
        assert speaker_accuracy(sd, shuffled) == pytest.approx(speaker_accuracy(decisions, case), abs=1e-15)
        assert conversation_accuracy(sd, shuffled) == conversation_accuracy(decisions, case)
