"""Clustered network graphs and their combination / regularization weights."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class TopologyError(ValueError):
    """Base class for invalid network descriptions."""


class NonSymmetricAdjacencyError(TopologyError):
    pass


class DisconnectedGraphError(TopologyError):
    pass


class EmptyClusterError(TopologyError):
    pass


@dataclass(frozen=True)
class Topology:
    """Undirected network with a cluster label per node.

    Nodes are indexed ``0..N-1``; cluster ids run ``1..Q``. Every node is
    its own neighbor.
    """

    adjacency: np.ndarray
    cluster_of: np.ndarray
    neighbors: tuple = field(repr=False)
    in_cluster: tuple = field(repr=False)
    out_cluster: tuple = field(repr=False)

    @property
    def N(self) -> int:
        return self.adjacency.shape[0]

    @property
    def Q(self) -> int:
        return int(self.cluster_of.max())

    def cluster_members(self, q: int) -> np.ndarray:
        return np.flatnonzero(self.cluster_of == q)

    def n_links(self) -> int:
        """Number of directed node-to-neighbor links, self-loops excluded."""
        return int(self.adjacency.sum() - self.N)


def _is_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        k = stack.pop()
        for l in np.flatnonzero(adj[k]):
            if not seen[l]:
                seen[l] = True
                stack.append(l)
    return bool(seen.all())


def build_topology(adjacency, cluster_of) -> Topology:
    """Validate a network and derive its neighbor sets.

    Parameters
    ----------
    adjacency : (N, N) array_like of bool
        Symmetric link indicator. The diagonal is forced to true.
    cluster_of : (N,) array_like of int
        Cluster id of every node, contiguous from 1.

    Raises
    ------
    NonSymmetricAdjacencyError, DisconnectedGraphError, EmptyClusterError
    """
    adj = np.array(adjacency, dtype=bool)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] == 0:
        raise TopologyError(f"adjacency must be a non-empty square matrix, got shape {adj.shape}")
    n = adj.shape[0]
    labels = np.asarray(cluster_of, dtype=int).reshape(-1)
    if labels.shape != (n,):
        raise TopologyError(f"cluster_of has {labels.size} entries for {n} nodes")
    if not np.array_equal(adj, adj.T):
        i, j = np.argwhere(adj != adj.T)[0]
        raise NonSymmetricAdjacencyError(f"adjacency[{i}][{j}] != adjacency[{j}][{i}]")
    if labels.min() < 1:
        raise TopologyError("cluster ids must start at 1")
    q = labels.max()
    missing = sorted(set(range(1, q + 1)) - set(labels.tolist()))
    if missing:
        raise EmptyClusterError(f"cluster(s) {missing} have no nodes")
    np.fill_diagonal(adj, True)
    if not _is_connected(adj):
        raise DisconnectedGraphError("network graph has more than one component")

    adj.setflags(write=False)
    labels.setflags(write=False)
    neighbors = tuple(np.flatnonzero(adj[k]) for k in range(n))
    in_cluster = tuple(nb[labels[nb] == labels[k]] for k, nb in enumerate(neighbors))
    out_cluster = tuple(nb[labels[nb] != labels[k]] for k, nb in enumerate(neighbors))
    return Topology(adj, labels, neighbors, in_cluster, out_cluster)


def topology_from_edges(n_nodes: int, edges, cluster_of) -> Topology:
    """Build a topology from 1-based undirected ``(k, l)`` edge pairs."""
    adj = np.zeros((n_nodes, n_nodes), dtype=bool)
    for k, l in edges:
        if not (1 <= k <= n_nodes and 1 <= l <= n_nodes):
            raise TopologyError(f"edge ({k}, {l}) references a node outside 1..{n_nodes}")
        adj[k - 1, l - 1] = adj[l - 1, k - 1] = True
    return build_topology(adj, cluster_of)


def metropolis_weights(top: Topology) -> np.ndarray:
    """Metropolis combination matrix restricted to each node's cluster.

    Entry ``A[l, k]`` weights node ``l``'s intermediate estimate in node
    ``k``'s combination; columns sum to one.
    """
    n = top.N
    deg = np.array([len(c) for c in top.in_cluster])
    A = np.zeros((n, n))
    for k in range(n):
        for l in top.in_cluster[k]:
            if l != k:
                A[l, k] = 1.0 / max(deg[k], deg[l])
        A[k, k] = 1.0 - A[:, k].sum()
    return A


def uniform_regularization(top: Topology) -> np.ndarray:
    """Regularization weights ``P[k, l] = 1/|N_k \\ C(k)|`` over out-of-cluster neighbors."""
    n = top.N
    P = np.zeros((n, n))
    for k in range(n):
        out = top.out_cluster[k]
        if out.size:
            P[k, out] = 1.0 / out.size
    return P


@dataclass(frozen=True)
class WeightMatrices:
    """Combination, regularization and step-size parameters of a network.

    ``mu`` and ``eta`` hold one value per node.
    """

    A: np.ndarray
    P: np.ndarray
    mu: np.ndarray
    eta: np.ndarray
    epsilon: float = 1e-5

    def __post_init__(self):
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.P.shape != (n, n):
            raise ValueError("A and P must both be N x N")
        if np.any(self.A < 0) or np.any(self.P < 0):
            raise ValueError("weights must be nonnegative")
        if not np.allclose(self.A.sum(axis=0), 1.0, atol=1e-12):
            raise ValueError("columns of A must sum to one")
        rows = self.P.sum(axis=1)
        if not np.all(np.isclose(rows, 1.0, atol=1e-12) | (rows == 0)):
            raise ValueError("rows of P must sum to one or zero")
        if self.mu.shape != (n,) or self.eta.shape != (n,):
            raise ValueError("mu and eta need one entry per node")
        if np.any(self.mu <= 0) or np.any(self.eta < 0) or self.epsilon <= 0:
            raise ValueError("need mu > 0, eta >= 0, epsilon > 0")

    @property
    def N(self) -> int:
        return self.A.shape[0]


def network_weights(top: Topology, mu, eta, epsilon: float = 1e-5) -> WeightMatrices:
    """Metropolis combiners, uniform regularizers and broadcast step sizes."""
    n = top.N
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (n,)).copy()
    eta = np.broadcast_to(np.asarray(eta, dtype=float), (n,)).copy()
    return WeightMatrices(metropolis_weights(top), uniform_regularization(top), mu, eta, float(epsilon))
