"""Speaker identification re-ranking with conversation interaction graphs."""
from .core import (
    CandidateScore,
    Case,
    Config,
    Conversation,
    LabelsRequiredError,
    Utterance,
    ValidationError,
    Violation,
    validate_case,
)
from .graph import GraphSnapshot, InteractionGraph, SelfLoopError
from .metrics import (
    AccuracyReport,
    DiffEntry,
    accuracy_report,
    conversation_accuracy,
    diff_report,
    speaker_accuracy,
)
from .rerank import (
    Combination,
    ConversationDecision,
    ScoreError,
    enumerate_and_select,
    normalize_scores,
    process_case,
    prune_candidates,
    score_combination,
)
from .synth import SynthSpec, generate_case, topology_drift

__version__ = "0.1.0"

__all__ = [
    "GraphSnapshot",
    "InteractionGraph",
    "SelfLoopError",
    "CandidateScore",
    "Case",
    "Config",
    "Conversation",
    "LabelsRequiredError",
    "Utterance",
    "ValidationError",
    "Violation",
    "validate_case",
    "AccuracyReport",
    "DiffEntry",
    "accuracy_report",
    "conversation_accuracy",
    "diff_report",
    "speaker_accuracy",
    "Combination",
    "ConversationDecision",
    "ScoreError",
    "enumerate_and_select",
    "normalize_scores",
    "process_case",
    "prune_candidates",
    "score_combination",
    "SynthSpec",
    "generate_case",
    "topology_drift",
]
