"""Persistent state-transition graph with embedding-based vertex merging.

The graph is a cumulative memory of every observation cluster and transition
seen over a whole run: vertices and edges are only ever added, never removed.
Observations merge into an existing vertex when their embedding's cosine
similarity with that vertex's representative reaches the merge threshold;
the representative is the first-seen embedding and never changes, which keeps
vertex identity stable and runs reproducible.

Mutation happens in two forms. ``map_state``/``record_trajectory`` mutate the
graph directly. ``transaction()`` supports the training loop's single-writer
discipline: rollout workers resolve observations against a read-only view
(new observations get staged, provisional keys), and the whole group of
trajectories is committed in one exclusive update phase. A commit returns a
receipt that ``rollback`` can undo, so a failed iteration leaves the graph
exactly as it found it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .centrality import CentralityScores, compute_scores
from .embeddings import EmbeddingProvider
from .errors import (
    EmptyTrajectoryError,
    InvalidEmbeddingError,
    ProviderInconsistencyError,
    RevisionMismatchError,
)
from .trajectories import StateKey, Trajectory


@dataclass
class Vertex:
    key: StateKey
    representative: np.ndarray | None
    visits: int


class _EmbeddingIndex:
    """Growing matrix of representative embeddings for vectorized cosine scans."""

    def __init__(self):
        self.keys: list[StateKey] = []
        self._matrix: np.ndarray | None = None
        self._norms: np.ndarray | None = None
        self.count = 0
        self.dim: int | None = None

    def add(self, key: StateKey, embedding: np.ndarray) -> None:
        if self.dim is None:
            self.dim = embedding.shape[0]
            self._matrix = np.zeros((16, self.dim))
            self._norms = np.zeros(16)
        if self.count == self._matrix.shape[0]:
            self._matrix = np.vstack([self._matrix, np.zeros_like(self._matrix)])
            self._norms = np.concatenate([self._norms, np.zeros_like(self._norms)])
        self._matrix[self.count] = embedding
        self._norms[self.count] = np.linalg.norm(embedding)
        self.keys.append(key)
        self.count += 1

    def drop_last(self, n: int) -> None:
        self.count -= n
        del self.keys[self.count:]

    def similarities(self, embedding: np.ndarray) -> np.ndarray:
        """Cosine against every stored representative; bit-identical rows score exactly 1."""
        m = self._matrix[: self.count]
        sims = (m @ embedding) / (self._norms[: self.count] * np.linalg.norm(embedding))
        near = np.nonzero(sims >= 1.0 - 1e-12)[0]
        for i in near:
            if np.array_equal(m[i], embedding):
                sims[i] = 1.0
        return sims

    def check_dim(self, embedding: np.ndarray) -> None:
        if embedding.ndim != 1:
            raise InvalidEmbeddingError("embeddings must be one-dimensional vectors")
        if float(np.linalg.norm(embedding)) == 0.0:
            raise InvalidEmbeddingError("zero-norm embedding cannot be compared")
        if self.dim is not None and embedding.shape[0] != self.dim:
            raise ProviderInconsistencyError(
                f"embedding dimension {embedding.shape[0]} != established {self.dim}"
            )


@dataclass
class CommitReceipt:
    """Undo log for one committed iteration."""

    new_vertex_keys: list[StateKey]
    new_edges: list[tuple[StateKey, StateKey]]
    visit_deltas: dict[StateKey, int]
    edge_deltas: dict[tuple[StateKey, StateKey], int]
    revision_delta: int
    memo_added: list[str]
    next_key_before: int


class TransitionGraph:
    """Directed graph of observation clusters with visit and traversal counters."""

    def __init__(self):
        self._vertices: dict[StateKey, Vertex] = {}
        self._edges: dict[tuple[StateKey, StateKey], int] = {}
        self._index = _EmbeddingIndex()
        self._next_key: StateKey = 0
        self.revision = 0
        self.snapshot: CentralityScores | None = None
        # founding-observation memo: text -> key, valid forever because a
        # founding text's cosine with its own vertex is exactly 1 and argmax
        # ties break toward the lowest (earliest) key.
        self._exact_memo: dict[str, StateKey] = {}

    # -- read access -------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self._vertices)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def vertex_keys(self) -> list[StateKey]:
        return list(self._vertices)

    def edge_pairs(self) -> list[tuple[StateKey, StateKey]]:
        return list(self._edges)

    def visit_count(self, key: StateKey) -> int:
        return self._vertices[key].visits

    def traversal_count(self, src: StateKey, dst: StateKey) -> int:
        return self._edges[(src, dst)]

    def has_vertex(self, key: StateKey) -> bool:
        return key in self._vertices

    def has_edge(self, src: StateKey, dst: StateKey) -> bool:
        return (src, dst) in self._edges

    # -- direct mutation ----------------------------------------------------

    def map_state(
        self, observation: str, provider: EmbeddingProvider, threshold: float
    ) -> StateKey:
        """Merge an observation into the best-matching vertex or create a new one.

        Returns the key of the vertex whose representative has maximal cosine
        similarity >= threshold (ties to the lowest key); otherwise inserts a
        fresh vertex with this observation's embedding as its representative.
        """
        if not observation:
            raise ValueError("observation must be non-empty")
        embedding = np.asarray(provider.embed(observation), dtype=float)
        self._index.check_dim(embedding)
        matched = self._best_match(embedding, threshold)
        if matched is not None:
            self._vertices[matched].visits += 1
            return matched
        return self._insert_vertex(embedding)

    def _best_match(self, embedding: np.ndarray, threshold: float) -> StateKey | None:
        if self._index.count == 0:
            return None
        sims = self._index.similarities(embedding)
        best = int(np.argmax(sims))
        if sims[best] >= threshold:
            return self._index.keys[best]
        return None

    def lookup_state(
        self, observation: str, provider: EmbeddingProvider, threshold: float
    ) -> StateKey | None:
        """Match an observation against existing vertices without mutating anything."""
        memo = self._exact_memo.get(observation)
        if memo is not None:
            return memo
        embedding = np.asarray(provider.embed(observation), dtype=float)
        self._index.check_dim(embedding)
        return self._best_match(embedding, threshold)

    def _insert_vertex(self, embedding: np.ndarray | None) -> StateKey:
        key = self._next_key
        self._next_key += 1
        self._vertices[key] = Vertex(key, embedding, 1)
        if embedding is not None:
            self._index.add(key, embedding)
        return key

    def record_trajectory(self, trajectory: Trajectory) -> None:
        """Add a trajectory's vertices and transition edges, bumping the revision once.

        Trajectory keys are expected to come from ``map_state`` (which owns
        visit counting); keys the graph has never seen are inserted as bare
        vertices so synthetic key sequences also work.
        """
        if len(trajectory) < 1:
            raise EmptyTrajectoryError("cannot record a trajectory with no steps")
        keys = trajectory.state_keys
        for key in keys:
            if key not in self._vertices:
                self._vertices[key] = Vertex(key, None, 1)
                if key >= self._next_key:
                    self._next_key = key + 1
        for src, dst in zip(keys, keys[1:]):
            self._edges[(src, dst)] = self._edges.get((src, dst), 0) + 1
        self.revision += 1

    # -- snapshots -----------------------------------------------------------

    def compute_centralities(self, metric: str, normalize: bool = True) -> CentralityScores:
        return compute_scores(
            self.vertex_keys(), self.edge_pairs(), metric, self.revision, normalize=normalize
        )

    def transaction(self, provider: EmbeddingProvider, threshold: float) -> GraphTransaction:
        return GraphTransaction(self, provider, threshold)

    def rollback(self, receipt: CommitReceipt) -> None:
        """Undo one committed transaction, restoring the pre-commit graph."""
        embedded = sum(
            1 for k in receipt.new_vertex_keys if self._vertices[k].representative is not None
        )
        for key in receipt.new_vertex_keys:
            del self._vertices[key]
        if embedded:
            self._index.drop_last(embedded)
        for edge in receipt.new_edges:
            del self._edges[edge]
        for key, delta in receipt.visit_deltas.items():
            self._vertices[key].visits -= delta
        for edge, delta in receipt.edge_deltas.items():
            self._edges[edge] -= delta
        for text in receipt.memo_added:
            del self._exact_memo[text]
        self.revision -= receipt.revision_delta
        self._next_key = receipt.next_key_before

    # -- export ---------------------------------------------------------------

    def export_edge_list(self, scores: CentralityScores) -> str:
        """Deterministic text dump of vertices and edges with their scores.

        Format: '#' header lines carrying revision and metric, then one
        ``V <key> <visits> <score>`` line per vertex and one
        ``E <src> <dst> <traversals> <score>`` line per edge, all body lines
        sorted lexicographically. Exporting twice without intervening graph
        changes yields byte-identical documents.
        """
        if scores.revision != self.revision:
            raise RevisionMismatchError(
                f"snapshot revision {scores.revision} != graph revision {self.revision}"
            )
        lines = [f"# transition-graph revision={self.revision} metric={scores.metric}"]
        body = [
            f"V {key} {vertex.visits} {scores.node(key):.6f}"
            for key, vertex in self._vertices.items()
        ]
        body += [
            f"E {src} {dst} {count} {scores.edge(src, dst):.6f}"
            for (src, dst), count in self._edges.items()
        ]
        return "\n".join(lines + sorted(body)) + "\n"


@dataclass
class _StagedVertex:
    key: StateKey
    embedding: np.ndarray
    visits: int
    founding_text: str


class GraphTransaction:
    """Read-only observation resolution plus a deferred, atomic commit.

    ``resolve`` never mutates the graph: matches against committed vertices
    only tally a pending visit, and unmatched observations are staged with a
    provisional key that ``commit`` turns into a real vertex. The combined
    (committed + staged) candidate set replays exactly what sequential
    ``map_state`` calls would have done.
    """

    def __init__(self, graph: TransitionGraph, provider: EmbeddingProvider, threshold: float):
        self._graph = graph
        self._provider = provider
        self._threshold = threshold
        self._staged: list[_StagedVertex] = []
        self._staged_index = _EmbeddingIndex()
        self._visit_deltas: dict[StateKey, int] = {}
        self._text_memo: dict[str, StateKey] = {}

    def resolve(self, observation: str) -> StateKey:
        memo = self._graph._exact_memo.get(observation)
        if memo is None:
            memo = self._text_memo.get(observation)
        if memo is not None:
            self._bump(memo)
            return memo

        embedding = np.asarray(self._provider.embed(observation), dtype=float)
        self._graph._index.check_dim(embedding)
        self._staged_index.check_dim(embedding)

        best_key, best_sim = None, -np.inf
        if self._graph._index.count:
            sims = self._graph._index.similarities(embedding)
            i = int(np.argmax(sims))
            best_key, best_sim = self._graph._index.keys[i], float(sims[i])
        if self._staged_index.count:
            sims = self._staged_index.similarities(embedding)
            i = int(np.argmax(sims))
            if float(sims[i]) > best_sim:  # strict: earlier (committed) keys win ties
                best_key, best_sim = self._staged_index.keys[i], float(sims[i])

        if best_key is not None and best_sim >= self._threshold:
            self._bump(best_key)
            if best_sim == 1.0:
                self._text_memo[observation] = best_key
            return best_key

        key = self._graph._next_key + len(self._staged)
        self._staged.append(_StagedVertex(key, embedding, 1, observation))
        self._staged_index.add(key, embedding)
        self._text_memo[observation] = key
        return key

    def _bump(self, key: StateKey) -> None:
        if key >= self._graph._next_key:  # staged keys sit past the committed range
            self._staged[key - self._graph._next_key].visits += 1
        else:
            self._visit_deltas[key] = self._visit_deltas.get(key, 0) + 1

    def commit(self, trajectories: list[Trajectory]) -> CommitReceipt:
        """Apply staged vertices, visit counts, and trajectory edges in one update."""
        graph = self._graph
        receipt = CommitReceipt(
            new_vertex_keys=[],
            new_edges=[],
            visit_deltas=dict(self._visit_deltas),
            edge_deltas={},
            revision_delta=0,
            memo_added=[],
            next_key_before=graph._next_key,
        )
        for staged in self._staged:
            assert staged.key == graph._next_key
            graph._next_key += 1
            graph._vertices[staged.key] = Vertex(staged.key, staged.embedding, staged.visits)
            graph._index.add(staged.key, staged.embedding)
            receipt.new_vertex_keys.append(staged.key)
        for key, delta in self._visit_deltas.items():
            graph._vertices[key].visits += delta
        for text, key in self._text_memo.items():
            if text not in graph._exact_memo:
                graph._exact_memo[text] = key
                receipt.memo_added.append(text)
        for trajectory in trajectories:
            if len(trajectory) < 1:
                raise EmptyTrajectoryError("cannot record a trajectory with no steps")
            keys = trajectory.state_keys
            for src, dst in zip(keys, keys[1:]):
                edge = (src, dst)
                if edge in graph._edges:
                    graph._edges[edge] += 1
                    receipt.edge_deltas[edge] = receipt.edge_deltas.get(edge, 0) + 1
                else:
                    graph._edges[edge] = 1
                    receipt.new_edges.append(edge)
            graph.revision += 1
            receipt.revision_delta += 1
        # edges recorded as new may have been traversed repeatedly; fold the
        # extra traversals into the delta map so rollback removes them wholesale
        for edge in receipt.new_edges:
            receipt.edge_deltas.pop(edge, None)
        self._staged = []
        self._visit_deltas = {}
        self._text_memo = {}
        return receipt


@dataclass
class RefreshPolicy:
    """When to recompute centralities: every K iterations, or on graph growth."""

    every_k_iterations: int = 1
    growth_factor: float = 2.0


def maybe_refresh(
    graph: TransitionGraph,
    policy: RefreshPolicy,
    iteration: int,
    metric: str = "betweenness",
    normalize: bool = True,
) -> CentralityScores:
    """Return a centrality snapshot, recomputing only when the policy says so.

    Recomputes when the iteration index is a multiple of K, when no snapshot
    exists yet, or when the vertex count has grown past growth_factor times
    the count at the last snapshot; otherwise the cached snapshot is returned
    unchanged (possibly stale, by design).
    """
    snapshot = graph.snapshot
    due = (
        snapshot is None
        or snapshot.metric != metric
        or iteration % policy.every_k_iterations == 0
        or graph.num_vertices >= policy.growth_factor * snapshot.vertex_count
    )
    if due:
        snapshot = graph.compute_centralities(metric, normalize=normalize)
        graph.snapshot = snapshot
    return snapshot
