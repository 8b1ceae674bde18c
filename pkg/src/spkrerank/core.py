"""Domain types shared across the package and validation of ingested cases."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

SpeakerId = str


class ValidationError(ValueError):
    """Raised when a case violates one or more invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"case failed validation ({len(self.violations)} violation(s)):\n{lines}")


class LabelsRequiredError(ValueError):
    """Raised by metrics when an utterance lacks a ground-truth label."""


@dataclass(frozen=True)
class CandidateScore:
    speaker: SpeakerId
    raw_score: float
    norm_score: Optional[float] = None


@dataclass(frozen=True)
class Utterance:
    utterance_id: str
    candidates: tuple[CandidateScore, ...]
    truth: Optional[SpeakerId] = None

    def candidate(self, speaker: SpeakerId) -> CandidateScore:
        for c in self.candidates:
            if c.speaker == speaker:
                return c
        raise KeyError(speaker)


@dataclass(frozen=True)
class Conversation:
    conversation_id: str
    index: int
    utterances: tuple[Utterance, ...]


@dataclass(frozen=True)
class Case:
    case_id: str
    enrolled: tuple[SpeakerId, ...]
    conversations: tuple[Conversation, ...]

    @property
    def is_labeled(self) -> bool:
        return all(u.truth is not None for c in self.conversations for u in c.utterances)


@dataclass(frozen=True)
class Config:
    """Re-ranking parameters.

    ``lam`` weights the pair-interaction boost (1.0 by default, 0.2 is the
    documented lighter setting). A candidate survives pruning when its
    normalized score is at least ``rel_threshold`` times the best one in its
    utterance, and at most ``top_k`` survive per utterance.
    """

    lam: float = 1.0
    top_k: int = 5
    rel_threshold: float = 0.5
    allow_repeat_speakers: bool = True
    max_combinations: int = 100_000

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be a finite non-negative real, got {self.lam!r}")
        if int(self.top_k) != self.top_k or self.top_k < 1:
            raise ValueError(f"top_k must be a positive integer, got {self.top_k!r}")
        if not 0.0 <= self.rel_threshold <= 1.0:
            raise ValueError(f"rel_threshold must lie in [0, 1], got {self.rel_threshold!r}")
        if int(self.max_combinations) != self.max_combinations or self.max_combinations < 1:
            raise ValueError(f"max_combinations must be a positive integer, got {self.max_combinations!r}")

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "top_k": self.top_k,
            "rel_threshold": self.rel_threshold,
            "allow_repeat_speakers": self.allow_repeat_speakers,
            "max_combinations": self.max_combinations,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        return cls(
            lam=d.get("lambda", 1.0),
            top_k=d.get("top_k", 5),
            rel_threshold=d.get("rel_threshold", 0.5),
            allow_repeat_speakers=d.get("allow_repeat_speakers", True),
            max_combinations=d.get("max_combinations", 100_000),
        )

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    conversation: Optional[int] = None
    utterance: Optional[int] = None

    def __str__(self):
        where = ""
        if self.conversation is not None:
            where = f"conversation[{self.conversation}]"
            if self.utterance is not None:
                where += f".utterance[{self.utterance}]"
            where += ": "
        return f"{where}{self.kind}: {self.message}"


def validate_case(case: Case) -> list[Violation]:
    """Return every invariant violation found in ``case`` (empty when valid)."""
    out: list[Violation] = []
    seen: set[str] = set()
    for spk in case.enrolled:
        if not isinstance(spk, str) or not spk:
            out.append(Violation("empty_speaker_id", f"enrolled speaker id {spk!r} is empty"))
        elif spk in seen:
            out.append(Violation("duplicate_enrolled", f"speaker {spk!r} enrolled twice"))
        seen.add(spk)
    enrolled = set(case.enrolled)

    prev_index = None
    for ci, conv in enumerate(case.conversations):
        if prev_index is not None and conv.index <= prev_index:
            out.append(Violation(
                "index_order",
                f"conversation {conv.conversation_id!r} has index {conv.index} after {prev_index}",
                ci))
        prev_index = conv.index
        if not conv.utterances:
            out.append(Violation("empty_conversation",
                                 f"conversation {conv.conversation_id!r} has no utterances", ci))
        for ui, utt in enumerate(conv.utterances):
            if not utt.candidates:
                out.append(Violation("empty_candidates",
                                     f"utterance {utt.utterance_id!r} has no candidates", ci, ui))
            names: set[str] = set()
            for cand in utt.candidates:
                if cand.speaker in names:
                    out.append(Violation("duplicate_candidate",
                                         f"speaker {cand.speaker!r} listed twice in utterance "
                                         f"{utt.utterance_id!r}", ci, ui))
                names.add(cand.speaker)
                if cand.speaker not in enrolled:
                    out.append(Violation("unknown_speaker",
                                         f"candidate {cand.speaker!r} in utterance "
                                         f"{utt.utterance_id!r} is not enrolled", ci, ui))
                if not math.isfinite(cand.raw_score):
                    out.append(Violation("non_finite_score",
                                         f"candidate {cand.speaker!r} has raw score "
                                         f"{cand.raw_score!r}", ci, ui))
            if utt.truth is not None and utt.truth not in enrolled:
                out.append(Violation("unknown_truth",
                                     f"truth {utt.truth!r} of utterance {utt.utterance_id!r} "
                                     f"is not enrolled", ci, ui))
    return out


def check_case(case: Case) -> Case:
    """Raise :class:`ValidationError` unless ``case`` is valid."""
    violations = validate_case(case)
    if violations:
        raise ValidationError(violations)
    return case
