"""Seeded Monte-Carlo comparison of baseline and re-ranked accuracy."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .core import Config
from .metrics import accuracy_report
from .rerank import process_case
from .synth import SynthSpec, generate_case

# Pruning tight enough that only near-ties are re-ranked; used by the
# direction-of-effect experiment.
EXPERIMENT_CONFIG = Config(rel_threshold=0.9)


@dataclass(frozen=True)
class PairedResult:
    seeds: tuple[int, ...]
    # columns: baseline speaker, reranked speaker, baseline conversation, reranked conversation
    table: np.ndarray

    @property
    def means(self):
        return self.table.mean(axis=0)

    def gap(self, metric: str) -> float:
        b, r = self._cols(metric)
        return float(self.table[:, r].mean() - self.table[:, b].mean())

    def wins_losses(self, metric: str) -> tuple[int, int]:
        b, r = self._cols(metric)
        diff = self.table[:, r] - self.table[:, b]
        return int((diff > 0).sum()), int((diff < 0).sum())

    def sign_test(self, metric: str) -> float:
        return sign_test_pvalue(*self.wins_losses(metric))

    @staticmethod
    def _cols(metric):
        if metric == "speaker":
            return 0, 1
        if metric == "conversation":
            return 2, 3
        raise ValueError(f"metric must be 'speaker' or 'conversation', got {metric!r}")


def sign_test_pvalue(wins: int, losses: int) -> float:
    """One-sided exact sign test: P(X >= wins) for X ~ Binomial(wins + losses, 1/2). Ties are dropped."""
    n = wins + losses
    if n == 0:
        return 1.0
    return sum(math.comb(n, k) for k in range(wins, n + 1)) / 2.0 ** n


def run_seeds(spec: SynthSpec, config: Config = EXPERIMENT_CONFIG, seeds: Iterable[int] = range(100)) -> PairedResult:
    seeds = tuple(seeds)
    rows = []
    for seed in seeds:
        case = generate_case(replace(spec, seed=seed))
        decisions, _ = process_case(case, config)
        b = accuracy_report(decisions, case, "baseline")
        r = accuracy_report(decisions, case, "reranked")
        rows.append((b.speaker_accuracy, r.speaker_accuracy, b.conversation_accuracy, r.conversation_accuracy))
    return PairedResult(seeds, np.array(rows))
