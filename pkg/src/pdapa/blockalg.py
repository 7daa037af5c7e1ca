"""Block vectorization and the block Kronecker product.

For an ``NL x NL`` matrix made of ``L x L`` blocks, ``bvec`` stacks the
column-major ``vec`` of every block, walking blocks column-block-major.
The block Kronecker product is the linear map that satisfies::

    bvec(Q @ S @ P.T) == block_kron(P, Q, L) @ bvec(S)

Both are permutations of their ordinary counterparts, which is how they
are computed here.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def _check(dim: int, L: int):
    if L <= 0 or dim % L:
        raise ValueError(f"dimension {dim} is not a multiple of block size {L}")


@lru_cache(maxsize=32)
def _bvec_index(dim: int, L: int) -> np.ndarray:
    """``idx[k]`` is the flat (row-major) position of the k-th bvec entry."""
    n = dim // L
    # bvec order: block col j, block row i, within-block col t, within-block row r
    j, i, t, r = np.meshgrid(np.arange(n), np.arange(n), np.arange(L), np.arange(L), indexing="ij")
    rows = i * L + r
    cols = j * L + t
    idx = (rows * dim + cols).reshape(-1)
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=32)
def _vec_to_bvec(dim: int, L: int) -> np.ndarray:
    """Permutation ``perm`` with ``bvec(S) == vec(S)[perm]``."""
    flat = _bvec_index(dim, L)
    rows, cols = np.divmod(flat, dim)
    perm = cols * dim + rows
    perm.setflags(write=False)
    return perm


def bvec(S: np.ndarray, L: int) -> np.ndarray:
    """Block vectorization of a square matrix with ``L x L`` blocks."""
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"bvec needs a square matrix, got shape {S.shape}")
    _check(S.shape[0], L)
    return S.reshape(-1)[_bvec_index(S.shape[0], L)]


def unbvec(v: np.ndarray, L: int) -> np.ndarray:
    """Inverse of :func:`bvec`."""
    v = np.asarray(v).reshape(-1)
    dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"length {v.size} is not a perfect square")
    _check(dim, L)
    out = np.empty(v.size, dtype=v.dtype)
    out[_bvec_index(dim, L)] = v
    return out.reshape(dim, dim)


def block_kron(P: np.ndarray, Q: np.ndarray, L: int) -> np.ndarray:
    """Block Kronecker product ``P (x)_b Q`` for ``L x L`` blocks."""
    P = np.asarray(P)
    Q = np.asarray(Q)
    if P.shape != Q.shape or P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"operands must be square and equal-sized, got {P.shape} and {Q.shape}")
    _check(P.shape[0], L)
    perm = _vec_to_bvec(P.shape[0], L)
    K = np.kron(P, Q)
    return K[np.ix_(perm, perm)]


def block_kron_reference(P: np.ndarray, Q: np.ndarray, L: int) -> np.ndarray:
    """Build ``P (x)_b Q`` column by column from its action on basis matrices.

    Slow; kept as an independent check of :func:`block_kron`.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    dim = P.shape[0]
    _check(dim, L)
    out = np.empty((dim * dim, dim * dim))
    e = np.zeros(dim * dim)
    for c in range(dim * dim):
        e[c] = 1.0
        E = unbvec(e, L)
        out[:, c] = bvec(Q @ E @ P.T, L)
        e[c] = 0.0
    return out


def apply_block_kron(P: np.ndarray, Q: np.ndarray, sigma: np.ndarray, L: int) -> np.ndarray:
    """``(P (x)_b Q) @ sigma`` without forming the product."""
    return bvec(Q @ unbvec(sigma, L) @ P.T, L)


def to_bvec_operator(K_vec: np.ndarray, dim: int, L: int) -> np.ndarray:
    """Re-express an operator on ``vec`` coordinates in ``bvec`` coordinates."""
    perm = _vec_to_bvec(dim, L)
    return K_vec[np.ix_(perm, perm)]
