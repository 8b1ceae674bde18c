"""Speaker accuracy, conversation accuracy and baseline-vs-reranked diffs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Case, LabelsRequiredError, SpeakerId
from .rerank import ConversationDecision

WHICH = ("baseline", "reranked")


@dataclass(frozen=True)
class ConversationOutcome:
    conversation_id: str
    correct: bool
    n_slots_correct: int
    n_slots: int
    set_correct: bool


@dataclass(frozen=True)
class AccuracyReport:
    speaker_accuracy: float
    conversation_accuracy: float
    n_utterances: int
    n_conversations: int
    per_conversation: tuple[ConversationOutcome, ...]


@dataclass(frozen=True)
class DiffEntry:
    conversation_id: str
    slot: int
    truth: Optional[SpeakerId]
    baseline_pred: SpeakerId
    reranked_pred: SpeakerId


def _predictions(decision: ConversationDecision, which: str):
    if which not in WHICH:
        raise ValueError(f"which must be one of {WHICH}, got {which!r}")
    return getattr(decision, which).assignment


def _pairs(decisions: Sequence[ConversationDecision], case: Case):
    if len(decisions) != len(case.conversations):
        raise ValueError(f"{len(decisions)} decisions for {len(case.conversations)} conversations")
    for d, conv in zip(decisions, case.conversations):
        if d.conversation_id != conv.conversation_id:
            raise ValueError(f"decision for {d.conversation_id!r} paired with "
                             f"conversation {conv.conversation_id!r}")
        yield d, conv


def _truths(conv):
    truths = tuple(u.truth for u in conv.utterances)
    if any(t is None for t in truths):
        missing = [u.utterance_id for u in conv.utterances if u.truth is None]
        raise LabelsRequiredError(
            f"conversation {conv.conversation_id!r} has unlabeled utterances {missing}; "
            "accuracy metrics need every utterance labeled")
    return truths


def accuracy_report(decisions, case: Case, which: str = "reranked") -> AccuracyReport:
    """Score ``which`` predictions against ground truth.

    A conversation counts as correct only if every slot matches its label;
    ``set_correct`` records the looser same-speaker-set check for reference.
    """
    outcomes = []
    slots = hits = 0
    for d, conv in _pairs(decisions, case):
        truths = _truths(conv)
        preds = _predictions(d, which)
        n_ok = sum(p == t for p, t in zip(preds, truths))
        outcomes.append(ConversationOutcome(conv.conversation_id, n_ok == len(truths), n_ok,
                                            len(truths), set(preds) == set(truths)))
        slots += len(truths)
        hits += n_ok
    n_conv = len(outcomes)
    return AccuracyReport(
        speaker_accuracy=hits / slots if slots else 0.0,
        conversation_accuracy=sum(o.correct for o in outcomes) / n_conv if n_conv else 0.0,
        n_utterances=slots,
        n_conversations=n_conv,
        per_conversation=tuple(outcomes),
    )


def speaker_accuracy(decisions, case: Case, which: str = "reranked") -> float:
    return accuracy_report(decisions, case, which).speaker_accuracy


def conversation_accuracy(decisions, case: Case, which: str = "reranked") -> float:
    return accuracy_report(decisions, case, which).conversation_accuracy


def diff_report(decisions, case: Case) -> list[DiffEntry]:
    """One entry per slot where the baseline and re-ranked predictions differ."""
    out = []
    for d, conv in _pairs(decisions, case):
        for slot, (utt, b, r) in enumerate(zip(conv.utterances, d.baseline.assignment,
                                               d.reranked.assignment)):
            if b != r:
                out.append(DiffEntry(conv.conversation_id, slot, utt.truth, b, r))
    return out
