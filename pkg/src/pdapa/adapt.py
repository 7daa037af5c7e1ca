"""Adapt-then-combine iterations of multi-task diffusion APA.

All network-level functions accept arrays with arbitrary leading batch
dimensions: estimates are ``(..., N, L)``, data matrices ``(..., N, P, L)``,
desired vectors ``(..., N, P)`` and masks ``(..., N, L)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import DataBlock
from .topology import WeightMatrices


class NonFiniteInputError(FloatingPointError):
    pass


def spd_solve(G: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``G x = b`` for a batch of SPD matrices via Cholesky."""
    C = np.linalg.cholesky(G)
    P = G.shape[-1]
    y = np.empty_like(b)
    for i in range(P):
        y[..., i] = (b[..., i] - np.einsum("...j,...j->...", C[..., i, :i], y[..., :i])) / C[..., i, i]
    x = np.empty_like(b)
    for i in reversed(range(P)):
        x[..., i] = (y[..., i] - np.einsum("...j,...j->...", C[..., i + 1 :, i], x[..., i + 1 :])) / C[..., i, i]
    return x


def apa_direction(w: np.ndarray, U: np.ndarray, d: np.ndarray, epsilon: float) -> np.ndarray:
    """``U^T (eps I + U U^T)^{-1} (d - U w)`` for batched data."""
    e = d - np.einsum("...pl,...l->...p", U, w)
    G = np.einsum("...pl,...ql->...pq", U, U)
    P = U.shape[-2]
    G = G + epsilon * np.eye(P)
    return np.einsum("...pl,...p->...l", U, spd_solve(G, e))


# -- single-node operations -------------------------------------------------


def adapt_step(w, block: DataBlock, mu, eta, epsilon, neighbor_w=(), neighbor_masks=(), rho=()):
    """Intermediate estimate of one node.

    ``neighbor_w``, ``neighbor_masks`` and ``rho`` list the out-of-cluster
    neighbors' estimates, the masks they transmitted with, and the
    regularization weights. Entries a neighbor did not send contribute
    nothing to the regularizer.
    """
    w = np.asarray(w, dtype=float)
    U, d = np.asarray(block.U, dtype=float), np.asarray(block.d, dtype=float)
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(U)) and np.all(np.isfinite(d))):
        raise NonFiniteInputError("non-finite estimate or data")
    reg = np.zeros_like(w)
    for wl, sl, r in zip(neighbor_w, neighbor_masks, rho):
        reg += r * np.where(sl, np.asarray(wl) - w, 0.0)
    return w + mu * apa_direction(w, U, d, epsilon) + (mu * eta) * reg


def combine_step(psi_k, neighbor_psi=(), neighbor_masks=(), a=()):
    """Combine one node's intermediate with its in-cluster neighbors' partial ones.

    Entries a neighbor did not send are replaced by the node's own values.
    The self weight is implied as ``1 - sum(a)``.
    """
    psi_k = np.asarray(psi_k, dtype=float)
    out = psi_k.copy()
    for pl, sl, alk in zip(neighbor_psi, neighbor_masks, a):
        out = out + alk * np.where(sl, np.asarray(pl) - psi_k, 0.0)
    return out


# -- network operations -----------------------------------------------------


def _regularizer(w: np.ndarray, P: np.ndarray, S: np.ndarray | None) -> np.ndarray:
    acc = np.zeros_like(w)
    for l in range(P.shape[0]):
        if not P[:, l].any():
            continue
        diff = w[..., l : l + 1, :] - w
        if S is not None:
            diff = np.where(S[..., l : l + 1, :], diff, 0.0)
        acc += P[:, l][:, None] * diff
    return acc


def _combine(psi: np.ndarray, A: np.ndarray, S: np.ndarray | None) -> np.ndarray:
    # psi_k + sum_l a_lk S_l (psi_l - psi_k): exact when nothing is sent
    acc = psi.copy()
    off = A - np.diag(np.diag(A))
    for l in range(A.shape[0]):
        if not off[l].any():
            continue
        diff = psi[..., l : l + 1, :] - psi
        if S is not None:
            diff = np.where(S[..., l : l + 1, :], diff, 0.0)
        acc += off[l][:, None] * diff
    return acc


def _adapt(w, U, d, S, weights: WeightMatrices):
    mu = weights.mu[:, None]
    step = mu * apa_direction(w, U, d, weights.epsilon)
    reg = _regularizer(w, weights.P, S)
    return w + step + (mu * weights.eta[:, None]) * reg


def partial_diffusion_step(w, U, d, S, weights: WeightMatrices) -> np.ndarray:
    """One synchronous iteration of multi-task partial-diffusion APA.

    Every node adapts from the time-``n`` estimates first, then combines.
    ``S[..., l, :]`` is the mask node ``l`` transmits with; it gates both
    the regularizer and the combination.
    """
    psi = _adapt(w, U, d, S, weights)
    return _combine(psi, weights.A, S)


def full_diffusion_step(w, U, d, weights: WeightMatrices) -> np.ndarray:
    """One iteration of multi-task diffusion APA with complete exchange."""
    psi = _adapt(w, U, d, None, weights)
    return _combine(psi, weights.A, None)


def independent_apa_step(w, U, d, mu, epsilon) -> np.ndarray:
    """Non-cooperative APA at every node."""
    mu = np.broadcast_to(np.asarray(mu, dtype=float), w.shape[-2:-1])[:, None]
    return w + mu * apa_direction(w, U, d, epsilon)


def nlms_step(w, u, d, mu, epsilon) -> np.ndarray:
    """Normalized LMS update ``w + mu u (eps + |u|^2)^{-1} (d - u^T w)``."""
    u = np.asarray(u, dtype=float)
    return w + mu * u * (d - u @ w) / (epsilon + u @ u)


@dataclass
class NetworkState:
    """Estimates ``w`` of shape ``(N, L)`` at iteration ``n``."""

    w: np.ndarray
    n: int = 0

    @classmethod
    def zeros(cls, N: int, L: int) -> NetworkState:
        return cls(np.zeros((N, L)))


def step_network(state: NetworkState, U, d, S, weights: WeightMatrices) -> NetworkState:
    """Advance a network by one iteration; ``S=None`` means full exchange."""
    if not (np.all(np.isfinite(U)) and np.all(np.isfinite(d))):
        raise NonFiniteInputError("non-finite data block")
    if S is None:
        w = full_diffusion_step(state.w, U, d, weights)
    else:
        w = partial_diffusion_step(state.w, U, d, np.asarray(S, dtype=bool), weights)
    return NetworkState(w, state.n + 1)
