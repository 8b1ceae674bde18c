import pytest
from hypothesis import given, settings, strategies as st

from spkrerank.core import CandidateScore, Case, Config, check_case, validate_case, ValidationError

from spkrerank.metrics import accuracy_report, diff_report
from spkrerank.rerank import process_case

from conftest import conv, make_case, utt


@pytest.fixture
def good_case():
    return make_case([
        conv("c0", 0, utt("u0", {"A": 1.0, "B": 0.2}, "A"), utt("u1", {"A": 0.1, "B": 0.9}, "B")),
        conv("c1", 1, utt("u2", {"A": 0.3, "C": 0.8}, "C")),
    ])


def test_valid_case_has_no_violations(good_case):
    assert validate_case(good_case) == []
    assert check_case(good_case) is good_case


def test_unknown_candidate_is_reported():
    case = make_case([conv("c0", 0, utt("u0", {"A": 1.0, "S9": 0.2}))], enrolled=["A", "B"])
    (v,) = validate_case(case)
    assert v.kind == "unknown_speaker"
    assert "S9" in str(v) and "u0" in str(v)
    assert (v.conversation, v.utterance) == (0, 0)


def test_duplicate_candidate_is_reported():
    u = utt("u0", {"A": 1.0})
    u = type(u)("u0", u.candidates + (CandidateScore("A", 0.5),))
    (v,) = validate_case(make_case([conv("c0", 0, u)], enrolled=["A"]))
    assert v.kind == "duplicate_candidate"


def test_other_violations():
    case = Case("x", ("A", "A", ""), (
        conv("c0", 3, utt("u0", {"A": float("nan")}, "Z")),
        conv("c1", 3),
        conv("c2", 4, type(utt("u", {}))("u1", ())),
    ))
    kinds = sorted(v.kind for v in validate_case(case))
    assert kinds == sorted(["duplicate_enrolled", "empty_speaker_id", "non_finite_score", "unknown_truth",
                            "index_order", "empty_conversation", "empty_candidates"])
    with pytest.raises(ValidationError) as exc:
        check_case(case)
    assert len(exc.value.violations) == 7


def test_truth_outside_candidates_is_allowed():
    case = make_case([conv("c0", 0, utt("u0", {"A": 1.0}, "B"))], enrolled=["A", "B"])
    assert validate_case(case) == []


def test_validate_is_idempotent(good_case):
    assert validate_case(good_case) == validate_case(good_case)


def test_config_defaults_and_checks():
    c = Config()
    assert (c.lam, c.top_k, c.rel_threshold, c.allow_repeat_speakers, c.max_combinations) == \
        (1.0, 5, 0.5, True, 100_000)
    assert Config.from_dict(c.to_dict()) == c
    for bad in (dict(lam=-1), dict(top_k=0), dict(rel_threshold=1.5), dict(max_combinations=0)):
        with pytest.raises(ValueError):
            Config(**bad)


@st.composite
def cases(draw):
    enrolled = draw(st.lists(st.sampled_from("ABCDEFG"), min_size=1, max_size=7, unique=True))
    convs = []
    for ci in range(draw(st.integers(1, 4))):
        utts = []
        for ui in range(draw(st.integers(1, 4))):
            scores = draw(st.dictionaries(st.sampled_from(enrolled), st.floats(-1e6, 1e6), min_size=1))
            utts.append(utt(f"c{ci}u{ui}", scores, draw(st.sampled_from(enrolled))))
        convs.append(conv(f"c{ci}", ci, *utts))
    return make_case(convs, enrolled=enrolled)


@settings(max_examples=100, deadline=None)
@given(cases(), st.booleans())
def test_valid_cases_run_end_to_end(case, allow_repeat):
    assert validate_case(case) == []
    decisions, _ = process_case(case, Config(allow_repeat_speakers=allow_repeat))
    accuracy_report(decisions, case)
    diff_report(decisions, case)
