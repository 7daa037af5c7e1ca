"""Entry-selection masks for partial diffusion and their second moments."""

from __future__ import annotations

from enum import Enum

import numpy as np


class Scheme(str, Enum):
    PERIODIC = "periodic"
    UNCOORDINATED = "uncoordinated"
    COORDINATED = "coordinated"


def _check_m(M: int, L: int):
    if not 0 <= M <= L:
        raise ValueError(f"M must satisfy 0 <= M <= L, got M={M}, L={L}")


def _random_subsets(rng: np.random.Generator, M: int, L: int, shape) -> np.ndarray:
    """Boolean masks with exactly ``M`` ones, by a partial Fisher-Yates shuffle."""
    shape = tuple(shape)
    mask = np.zeros(shape + (L,), dtype=bool)
    if M == 0:
        return mask
    if M == L:
        mask[...] = True
        return mask
    idx = np.broadcast_to(np.arange(L), shape + (L,)).copy()
    for j in range(M):
        pick = rng.integers(j, L, size=shape)
        a = idx[..., j].copy()
        b = np.take_along_axis(idx, pick[..., None], axis=-1)[..., 0]
        idx[..., j] = b
        np.put_along_axis(idx, pick[..., None], a[..., None], axis=-1)
    np.put_along_axis(mask, idx[..., :M], True, axis=-1)
    return mask


def periodic_mask(n: int, M: int, L: int) -> np.ndarray:
    """Round-robin entries ``(n*M + j) mod L`` for ``j < M``."""
    mask = np.zeros(L, dtype=bool)
    mask[(n * M + np.arange(M)) % L] = True
    return mask


def select(scheme, k: int, n: int, rng: np.random.Generator, M: int, L: int) -> np.ndarray:
    """Mask of the entries node ``k`` transmits at time ``n``.

    For the coordinated scheme every node must be served the same draw;
    :class:`MaskSource` handles that at network level.
    """
    scheme = Scheme(scheme)
    _check_m(M, L)
    if scheme is Scheme.PERIODIC:
        return periodic_mask(n, M, L)
    return _random_subsets(rng, M, L, ())


class MaskSource:
    """Sequential generator of network masks ``S_k(n)`` for one run.

    Masks come out in chunks of shape ``(count, N, L)``; draws depend only on
    the generator state, so a run reproduces regardless of how many runs are
    simulated alongside it, provided chunks are requested identically.
    """

    def __init__(self, scheme, M: int, L: int, N: int, rng: np.random.Generator):
        _check_m(M, L)
        self.scheme = Scheme(scheme)
        self.M, self.L, self.N = M, L, N
        self.rng = rng
        self.n = 0

    def next(self, count: int) -> np.ndarray:
        n0 = self.n
        self.n += count
        M, L, N = self.M, self.L, self.N
        if self.scheme is Scheme.PERIODIC:
            times = np.arange(n0, n0 + count)
            mask = np.zeros((count, L), dtype=bool)
            cols = (times[:, None] * M + np.arange(M)[None, :]) % L
            np.put_along_axis(mask, cols, True, axis=1)
            return np.broadcast_to(mask[:, None, :], (count, N, L)).copy()
        if self.scheme is Scheme.COORDINATED:
            shared = _random_subsets(self.rng, M, L, (count, 1))
            return np.broadcast_to(shared, (count, N, L)).copy()
        return _random_subsets(self.rng, M, L, (count, N))


def cross_moment(scheme, M: int, L: int, same_node: bool, same_entry: bool) -> float:
    """Closed-form ``E[s_{r,i}(n) s_{s,j}(n)]`` for one pair class."""
    scheme = Scheme(scheme)
    _check_m(M, L)
    if M == 0:
        return 0.0
    p = M / L
    q = p * (M - 1) / (L - 1) if L > 1 else p
    if scheme is Scheme.PERIODIC:
        return p
    if scheme is Scheme.COORDINATED:
        return p if same_entry else q
    if same_node:
        return p if same_entry else q
    return p * p


def moment_table(scheme, M: int, L: int) -> np.ndarray:
    """``m[same_node, same_entry]`` as a 2 x 2 array."""
    return np.array([[cross_moment(scheme, M, L, sn, se) for se in (False, True)] for sn in (False, True)])


def estimate_cross_moment(scheme, M: int, L: int, pair, trials: int, seed) -> float:
    """Empirical ``E[s_{r,i} s_{s,j}]`` over ``trials`` independent mask draws.

    ``pair`` is ``((i, r), (j, s))`` with node indices ``i, j`` and entry
    indices ``r, s``. The periodic scheme is deterministic; its estimate is
    the average over times ``0..trials-1``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    (i, r), (j, s) = pair
    src = MaskSource(scheme, M, L, max(i, j) + 1, np.random.default_rng(seed))
    total = 0
    done = 0
    while done < trials:
        count = min(8192, trials - done)
        S = src.next(count)
        total += int(np.count_nonzero(S[:, i, r] & S[:, j, s]))
        done += count
    return total / trials
