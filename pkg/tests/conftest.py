import random

import pytest

from spkrerank import _kernels
from spkrerank.core import CandidateScore, Case, Conversation, Utterance
from spkrerank.graph import InteractionGraph

BACKENDS = {"numpy": _kernels.score_all_numpy, "python": _kernels.score_all_python}
if _kernels.HAS_NUMBA:
    BACKENDS["numba"] = _kernels.score_all_numba


@pytest.fixture(params=sorted(BACKENDS))
def scorer(request):
    return BACKENDS[request.param]


def utt(uid, scores, truth=None):
    return Utterance(uid, tuple(CandidateScore(k, float(v)) for k, v in scores.items()), truth)


def normed(uid, norms):
    """Utterance whose raw and normalized scores are both ``norms``."""
    return Utterance(uid, tuple(CandidateScore(k, v, v) for k, v in norms.items()))


def conv(cid, index, *utterances):
    return Conversation(cid, index, tuple(utterances))


def make_case(conversations, enrolled=None, case_id="case"):
    if enrolled is None:
        enrolled = sorted({c.speaker for cv in conversations for u in cv.utterances for c in u.candidates})
    return Case(case_id, tuple(enrolled), tuple(conversations))


def random_slot_raw(rng: random.Random, max_slots=4, max_cands=6, pool=8):
    speakers = [f"S{i}" for i in range(pool)]
    n_slots = rng.randint(1, max_slots)
    slots = []
    for _ in range(n_slots):
        chosen = rng.sample(speakers, rng.randint(1, max_cands))
        slots.append({s: rng.uniform(-5, 5) for s in chosen})
    return slots


def random_edges(rng: random.Random, pool=8, max_w=6, density=0.5):
    speakers = [f"S{i}" for i in range(pool)]
    edges = {}
    for i in range(pool):
        for j in range(i + 1, pool):
            if rng.random() < density:
                edges[frozenset((speakers[i], speakers[j]))] = rng.randint(1, max_w)
    return edges


def graph_from_edges(edges):
    return InteractionGraph.from_edges([(*sorted(p), w) for p, w in edges.items()])


def conversation_from_slots(slot_raw, cid="c0", index=0):
    return conv(cid, index, *[utt(f"{cid}_u{i}", r) for i, r in enumerate(slot_raw)])


ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        ACCEPTANCE.append((number, bool(passed), detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
