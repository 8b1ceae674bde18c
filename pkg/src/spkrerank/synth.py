"""Synthetic cases: a group-structured network, conversations drawn from it, noisy scores.

Speakers are split into contiguous groups. Each conversation either stays
inside one group (with probability ``within_group_bias``) or spans at least
two groups. Inside a group, earlier members talk more often
(weights ``1 / (rank + 1) ** activity_skew``), which gives each group a
central character. Every slot scores all enrolled speakers: the true speaker
gets ``score_separability + noise`` and impostors get ``noise``, with
Gaussian noise of standard deviation ``noise_sd``.

A SynthSpec may carry a topology drift: from conversation ``drift_point`` on,
speaker groups are relabelled through ``regroup`` (``regroup[g]`` is the new
label of group ``g``), so mapping two groups onto one label merges them.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import CandidateScore, Case, Conversation, Utterance


@dataclass(frozen=True)
class SynthSpec:
    n_speakers: int = 20
    n_groups: int = 4
    within_group_bias: float = 0.9
    n_conversations: int = 100
    min_slots: int = 2
    max_slots: int = 5
    min_participants: int = 2
    max_participants: int = 4
    score_separability: float = 1.0
    noise_sd: float = 0.3
    activity_skew: float = 1.5
    seed: int = 0
    drift_point: Optional[int] = None
    regroup: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.n_speakers < 2:
            raise ValueError(f"n_speakers must be >= 2, got {self.n_speakers}")
        if not 1 <= self.n_groups <= self.n_speakers:
            raise ValueError(f"n_groups must lie in [1, n_speakers], got {self.n_groups}")
        if not 0.0 <= self.within_group_bias <= 1.0:
            raise ValueError(f"within_group_bias must lie in [0, 1], got {self.within_group_bias}")
        if self.n_conversations < 1:
            raise ValueError(f"n_conversations must be >= 1, got {self.n_conversations}")
        if not 1 <= self.min_slots <= self.max_slots:
            raise ValueError(f"need 1 <= min_slots <= max_slots, got {self.min_slots}..{self.max_slots}")
        if not 1 <= self.min_participants <= self.max_participants:
            raise ValueError("need 1 <= min_participants <= max_participants, got "
                             f"{self.min_participants}..{self.max_participants}")
        if not self.score_separability > 0:
            raise ValueError(f"score_separability must be > 0, got {self.score_separability}")
        if not self.noise_sd >= 0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")
        if self.activity_skew < 0:
            raise ValueError(f"activity_skew must be >= 0, got {self.activity_skew}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if (self.drift_point is None) != (self.regroup is None):
            raise ValueError("drift_point and regroup must be given together")
        if self.regroup is not None:
            if len(self.regroup) != self.n_groups:
                raise ValueError(f"regroup needs {self.n_groups} entries, got {len(self.regroup)}")
            if any(not 0 <= g < self.n_groups for g in self.regroup):
                raise ValueError(f"regroup labels must lie in [0, {self.n_groups}), got {self.regroup}")
            if not 0 <= self.drift_point < self.n_conversations:
                raise IndexError(f"drift_point {self.drift_point} outside [0, {self.n_conversations})")


def speaker_ids(n: int) -> list[str]:
    width = len(str(n - 1))
    return [f"S{i:0{width}d}" for i in range(n)]


def base_groups(spec: SynthSpec) -> np.ndarray:
    return np.arange(spec.n_speakers) * spec.n_groups // spec.n_speakers


def groups_at(spec: SynthSpec, conversation_index: int) -> np.ndarray:
    """Group label of every speaker for the given conversation."""
    g = base_groups(spec)
    if spec.regroup is not None and conversation_index >= spec.drift_point:
        g = np.asarray(spec.regroup)[g]
    return g


def activity(spec: SynthSpec) -> np.ndarray:
    g = base_groups(spec)
    rank = np.zeros(spec.n_speakers)
    for label in np.unique(g):
        idx = np.flatnonzero(g == label)
        rank[idx] = np.arange(len(idx))
    return 1.0 / (rank + 1.0) ** spec.activity_skew


def topology_drift(spec: SynthSpec, drift_point: int, regroup) -> SynthSpec:
    """Variant of ``spec`` whose groups are relabelled from ``drift_point`` on."""
    if not 0 <= drift_point < spec.n_conversations:
        raise IndexError(f"drift_point {drift_point} outside [0, {spec.n_conversations})")
    return replace(spec, drift_point=int(drift_point), regroup=tuple(int(x) for x in regroup))


def _draw(rng, pool, weights, k):
    p = weights[pool] / weights[pool].sum()
    return rng.choice(pool, size=k, replace=False, p=p)


def _participants(spec, rng, groups, weights, within):
    n_part = int(rng.integers(spec.min_participants, spec.max_participants + 1))
    labels = np.unique(groups)
    if within or len(labels) == 1:
        label = labels[rng.integers(len(labels))]
        pool = np.flatnonzero(groups == label)
        return _draw(rng, pool, weights, min(n_part, len(pool))), True
    n_part = max(n_part, 2)
    pool = np.arange(spec.n_speakers)
    while True:
        chosen = _draw(rng, pool, weights, n_part)
        if len(np.unique(groups[chosen])) > 1:
            return chosen, False


def generate(spec: SynthSpec) -> tuple[Case, list[bool]]:
    """Generate a labelled case and, per conversation, whether it stayed in one group."""
    rng = np.random.default_rng(spec.seed)
    ids = speaker_ids(spec.n_speakers)
    weights = activity(spec)
    conversations = []
    within_flags = []
    for c in range(spec.n_conversations):
        groups = groups_at(spec, c)
        within = bool(rng.random() < spec.within_group_bias)
        people, within = _participants(spec, rng, groups, weights, within)
        n_slots = max(int(rng.integers(spec.min_slots, spec.max_slots + 1)), len(people))
        extra = rng.choice(people, size=n_slots - len(people))
        slots = rng.permutation(np.concatenate([people, extra]))
        utterances = []
        for u, truth in enumerate(slots):
            raw = rng.normal(0.0, spec.noise_sd, spec.n_speakers) if spec.noise_sd > 0 \
                else np.zeros(spec.n_speakers)
            raw[truth] += spec.score_separability
            cands = tuple(CandidateScore(ids[k], float(raw[k])) for k in range(spec.n_speakers))
            utterances.append(Utterance(f"c{c:04d}_u{u}", cands, ids[int(truth)]))
        conversations.append(Conversation(f"c{c:04d}", c, tuple(utterances)))
        within_flags.append(within)
    case = Case(f"synth-{spec.seed}", tuple(ids), tuple(conversations))
    return case, within_flags


def generate_case(spec: SynthSpec) -> Case:
    return generate(spec)[0]
