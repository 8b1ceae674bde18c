"""Network-aware re-ranking of speaker combinations, one conversation at a time.

A combination assigns one candidate speaker to every utterance slot of a
conversation. Its joint score is the centrality-weighted mean acoustic score
of its distinct speakers, boosted by a factor ``1 + lam * e_ij / E`` for every
pair of them that has talked before. The best-scoring combination wins, and
its speakers are then recorded in the interaction graph so later
conversations see the updated network.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .core import (
    CandidateScore,
    Case,
    Config,
    Conversation,
    SpeakerId,
    Utterance,
    check_case,
)
from .graph import GraphSnapshot, InteractionGraph, _GraphStats


class ScoreError(ValueError):
    pass


@dataclass(frozen=True)
class Combination:
    assignment: tuple[SpeakerId, ...]
    score: float

    @property
    def distinct(self) -> frozenset:
        return frozenset(self.assignment)


@dataclass(frozen=True)
class ConversationDecision:
    conversation_id: str
    baseline: Combination
    reranked: Combination
    n_combinations_scored: int
    pruned: bool
    effective_top_k: int
    repeat_fallback: bool = False

    @property
    def changed(self) -> bool:
        return self.baseline.assignment != self.reranked.assignment


def normalize_scores(utterance: Utterance) -> Utterance:
    """Min-max normalize raw scores within one utterance.

    The best raw score maps to 1 and the worst to 0. When all raw scores are
    equal (including the single-candidate case) every norm is 1.
    """
    if not utterance.candidates:
        raise ScoreError(f"utterance {utterance.utterance_id!r} has no candidates")
    raws = [c.raw_score for c in utterance.candidates]
    for c in utterance.candidates:
        if not math.isfinite(c.raw_score):
            raise ScoreError(f"non-finite raw score {c.raw_score!r} for {c.speaker!r} "
                             f"in utterance {utterance.utterance_id!r}")
    lo, hi = min(raws), max(raws)
    span = hi - lo
    if span == 0.0:
        norms = [1.0] * len(raws)
    else:
        norms = [min(1.0, max(0.0, (r - lo) / span)) for r in raws]
    cands = tuple(replace(c, norm_score=v) for c, v in zip(utterance.candidates, norms))
    return replace(utterance, candidates=cands)


def normalize_conversation(conv: Conversation) -> Conversation:
    return replace(conv, utterances=tuple(normalize_scores(u) for u in conv.utterances))


def _rank_key(c: CandidateScore):
    return (-c.norm_score, c.speaker)


def prune_candidates(utterance: Utterance, config: Config, top_k: Optional[int] = None) -> list[CandidateScore]:
    """Drop candidates far below the best one, then keep the ``top_k`` best.

    The result is ordered by descending normalized score with ties broken by
    speaker id, and always holds at least one candidate.
    """
    if any(c.norm_score is None for c in utterance.candidates):
        raise ScoreError(f"utterance {utterance.utterance_id!r} is not normalized")
    k = config.top_k if top_k is None else top_k
    best = max(c.norm_score for c in utterance.candidates)
    floor = config.rel_threshold * best
    kept = sorted((c for c in utterance.candidates if c.norm_score >= floor), key=_rank_key)
    return kept[:max(1, k)]


def _speaker_means(assignment: Sequence[SpeakerId], conversation: Conversation) -> dict:
    per: dict[SpeakerId, list[float]] = {}
    for spk, utt in zip(assignment, conversation.utterances):
        norm = utt.candidate(spk).norm_score
        if norm is None:
            raise ScoreError(f"utterance {utt.utterance_id!r} is not normalized")
        per.setdefault(spk, []).append(norm)
    return {k: sum(v) / len(v) for k, v in per.items()}


def score_combination(combination, conversation: Conversation, graph: _GraphStats, config: Config) -> float:
    """Joint score of one assignment against a graph state.

    ``combination`` may be a :class:`Combination` or a plain sequence of
    speaker ids, one per utterance slot. Speakers filling several slots
    contribute the mean of their normalized scores.
    """
    assignment = getattr(combination, "assignment", combination)
    if len(assignment) != len(conversation.utterances):
        raise ValueError(f"assignment has {len(assignment)} slots, conversation "
                         f"{conversation.conversation_id!r} has {len(conversation.utterances)}")
    means = _speaker_means(assignment, conversation)
    speakers = sorted(means)
    total = graph.total_weight
    acc = sum(means[k] * (1.0 + graph.degree_centrality(k)) for k in speakers)
    boost = 1.0
    if total > 0:
        for i, j in combinations(speakers, 2):
            boost *= 1.0 + config.lam * (graph.pair_weight(i, j) / total)
    return acc / len(speakers) * boost


def baseline_assignment(conversation: Conversation) -> tuple[SpeakerId, ...]:
    """Per-slot acoustic argmax on normalized scores, ties going to the smallest speaker id."""
    return tuple(min(u.candidates, key=_rank_key).speaker for u in conversation.utterances)


def _encode(options: list[list[CandidateScore]], graph: _GraphStats):
    speakers = sorted({c.speaker for opts in options for c in opts})
    local = {s: i for i, s in enumerate(speakers)}
    S = len(options)
    K = max(len(o) for o in options)
    cand = np.zeros((S, K), dtype=np.int64)
    val = np.zeros((S, K))
    sizes = np.array([len(o) for o in options], dtype=np.int64)
    for s, opts in enumerate(options):
        for d, c in enumerate(opts):
            cand[s, d] = local[c.speaker]
            val[s, d] = c.norm_score
    n = len(speakers)
    cent = np.array([graph.degree_centrality(k) for k in speakers], dtype=np.float64)
    ratio = np.zeros((n, n))
    total = graph.total_weight
    if total > 0:
        for i, j in combinations(range(n), 2):
            w = graph.pair_weight(speakers[i], speakers[j])
            if w:
                ratio[i, j] = ratio[j, i] = w / total
    return cand, val, sizes, cent, ratio


def _survivors(conversation: Conversation, config: Config):
    """Pruned options per slot, shrinking ``top_k`` until the product fits the budget."""
    # decrementing past the widest slot changes nothing, so start there
    k = min(config.top_k, max(len(u.candidates) for u in conversation.utterances))
    while True:
        options = [prune_candidates(u, config, top_k=k) for u in conversation.utterances]
        if _kernels.n_combinations(len(o) for o in options) <= config.max_combinations or k == 1:
            return options, k
        k -= 1


def enumerate_and_select(conversation: Conversation, graph: _GraphStats, config: Config,
                         scorer=None) -> ConversationDecision:
    """Score every surviving combination and return the best one.

    ``conversation`` must already be normalized. Ties go to the
    lexicographically smallest assignment tuple.
    """
    scorer = scorer or _kernels.score_all
    options, k = _survivors(conversation, config)
    pruned = any(len(o) < len(u.candidates) for o, u in zip(options, conversation.utterances))
    # slot options in speaker-id order make combination index order lexicographic
    options = [sorted(o, key=lambda c: c.speaker) for o in options]
    cand, val, sizes, cent, ratio = _encode(options, graph)

    scores = scorer(cand, val, sizes, cent, ratio, float(config.lam), bool(config.allow_repeat_speakers))
    fallback = False
    best = _kernels.best_index(scores)
    if scores[best] < 0:
        # no repeat-free assignment exists among the survivors
        fallback = True
        scores = scorer(cand, val, sizes, cent, ratio, float(config.lam), True)
        best = _kernels.best_index(scores)
    digits = np.unravel_index(best, tuple(int(s) for s in sizes))
    assignment = tuple(options[s][int(d)].speaker for s, d in enumerate(digits))
    reranked = Combination(assignment, float(scores[best]))

    base = baseline_assignment(conversation)
    baseline = Combination(base, score_combination(base, conversation, graph, config))
    return ConversationDecision(
        conversation_id=conversation.conversation_id,
        baseline=baseline,
        reranked=reranked,
        n_combinations_scored=int(scores.shape[0]),
        pruned=pruned,
        effective_top_k=k,
        repeat_fallback=fallback,
    )


def process_case(case: Case, config: Config = Config(), graph: Optional[InteractionGraph] = None,
                 scorer=None) -> tuple[list[ConversationDecision], InteractionGraph]:
    """Re-rank every conversation in order, feeding each decision back into the graph.

    Each conversation is scored against the graph as it stood before that
    conversation; only the re-ranked prediction (never ground truth) is
    recorded. ``graph`` is updated in place when given.
    """
    check_case(case)
    graph = InteractionGraph() if graph is None else graph
    decisions = []
    for conv in case.conversations:
        conv = normalize_conversation(conv)
        view: GraphSnapshot = graph.snapshot()
        decision = enumerate_and_select(conv, view, config, scorer=scorer)
        graph.record_conversation(decision.reranked.distinct)
        decisions.append(decision)
    return decisions, graph
