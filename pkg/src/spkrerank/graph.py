"""Weighted undirected interaction graph built from conversation decisions."""
from __future__ import annotations

from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Mapping

from .core import SpeakerId


class SelfLoopError(ValueError):
    pass


def _key(i: SpeakerId, j: SpeakerId) -> tuple[SpeakerId, SpeakerId]:
    return (i, j) if i < j else (j, i)


class _GraphStats:
    """Read-only statistics shared by the live graph and its snapshots."""

    _nodes: set | frozenset
    _weights: Mapping[tuple[SpeakerId, SpeakerId], int]
    _strength: Mapping[SpeakerId, int]
    _total: int

    @property
    def nodes(self) -> frozenset:
        return frozenset(self._nodes)

    @property
    def total_weight(self) -> int:
        return self._total

    @property
    def edge_weights(self) -> Mapping[tuple[SpeakerId, SpeakerId], int]:
        """Edges keyed by lexicographically ordered speaker pairs."""
        return MappingProxyType(dict(self._weights))

    def pair_weight(self, i: SpeakerId, j: SpeakerId) -> int:
        if i == j:
            raise SelfLoopError(f"self-loop query for speaker {i!r}")
        return self._weights.get(_key(i, j), 0)

    def strength(self, k: SpeakerId) -> int:
        """Sum of weights of edges incident to ``k``."""
        return self._strength.get(k, 0)

    def degree_centrality(self, k: SpeakerId) -> float:
        # Incident weight over total weight, so values sum to 2 over all nodes.
        if self._total == 0:
            return 0.0
        return self._strength.get(k, 0) / self._total

    def sorted_edges(self) -> list[tuple[SpeakerId, SpeakerId, int]]:
        return [(i, j, w) for (i, j), w in sorted(self._weights.items())]

    def stats(self) -> tuple:
        return (frozenset(self._nodes), tuple(self.sorted_edges()), self._total)

    def __eq__(self, other):
        if not isinstance(other, _GraphStats):
            return NotImplemented
        return self.stats() == other.stats()

    __hash__ = None

    def __repr__(self):
        return (f"{type(self).__name__}(nodes={len(self._nodes)}, "
                f"edges={len(self._weights)}, total_weight={self._total})")


class GraphSnapshot(_GraphStats):
    """Immutable view of an :class:`InteractionGraph` at one point in time."""

    def __init__(self, nodes, weights, strength, total):
        self._nodes = frozenset(nodes)
        self._weights = MappingProxyType(dict(weights))
        self._strength = MappingProxyType(dict(strength))
        self._total = total


class InteractionGraph(_GraphStats):
    """Counts, per unordered speaker pair, the conversations they shared.

    The graph has a single writer; hand readers a :meth:`snapshot`.
    """

    def __init__(self):
        self._nodes: set[SpeakerId] = set()
        self._weights: dict[tuple[SpeakerId, SpeakerId], int] = {}
        self._strength: dict[SpeakerId, int] = {}
        self._total = 0

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[SpeakerId, SpeakerId, int]], nodes=()) -> "InteractionGraph":
        g = cls()
        g._nodes.update(nodes)
        for i, j, w in edges:
            if i == j:
                raise SelfLoopError(f"self-loop edge on {i!r}")
            if int(w) != w or w < 1:
                raise ValueError(f"edge ({i!r}, {j!r}) has invalid weight {w!r}")
            g._add(i, j, int(w))
        return g

    def _add(self, i, j, w):
        self._nodes.add(i)
        self._nodes.add(j)
        k = _key(i, j)
        self._weights[k] = self._weights.get(k, 0) + w
        self._strength[i] = self._strength.get(i, 0) + w
        self._strength[j] = self._strength.get(j, 0) + w
        self._total += w

    def record_conversation(self, speakers: Iterable[SpeakerId]) -> "InteractionGraph":
        """Add one interaction for every unordered pair in ``speakers``."""
        distinct = sorted(set(speakers))
        if not distinct:
            raise ValueError("a conversation needs at least one speaker")
        self._nodes.update(distinct)
        for i, j in combinations(distinct, 2):
            self._add(i, j, 1)
        return self

    def snapshot(self) -> GraphSnapshot:
        return GraphSnapshot(self._nodes, self._weights, self._strength, self._total)

    def copy(self) -> "InteractionGraph":
        g = InteractionGraph()
        g._nodes = set(self._nodes)
        g._weights = dict(self._weights)
        g._strength = dict(self._strength)
        g._total = self._total
        return g


def record_conversation(graph: InteractionGraph, speakers: Iterable[SpeakerId]) -> InteractionGraph:
    return graph.record_conversation(speakers)


def pair_weight(graph: _GraphStats, i: SpeakerId, j: SpeakerId) -> int:
    return graph.pair_weight(i, j)


def degree_centrality(graph: _GraphStats, k: SpeakerId) -> float:
    return graph.degree_centrality(k)


def snapshot(graph: InteractionGraph) -> GraphSnapshot:
    return graph.snapshot()
