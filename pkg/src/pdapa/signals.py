"""Node input processes, cluster optima and the linear measurement model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter


@dataclass(frozen=True)
class NodeSignalModel:
    """Stationary AR(1) Gaussian input plus white observation noise at one node.

    ``noise_var = 0`` gives a noiseless node.
    """

    ar_coeff: float
    input_var: float
    noise_var: float

    def __post_init__(self):
        if not 0.0 <= self.ar_coeff < 1.0:
            raise ValueError(f"ar_coeff must lie in [0, 1), got {self.ar_coeff}")
        if self.input_var <= 0:
            raise ValueError("input_var must be positive")
        if self.noise_var < 0:
            raise ValueError("noise_var must be non-negative")


def default_signal_models(n_nodes: int, rng: np.random.Generator) -> list[NodeSignalModel]:
    """Heterogeneous per-node statistics drawn once per experiment."""
    a = rng.uniform(0.0, 0.5, n_nodes)
    su = rng.uniform(0.8, 1.2, n_nodes)
    sv = rng.uniform(1e-3, 1e-2, n_nodes)
    return [NodeSignalModel(float(x), float(y), float(z)) for x, y, z in zip(a, su, sv)]


def gen_regressors(model: NodeSignalModel, length: int, rng: np.random.Generator, batch=()) -> np.ndarray:
    """Scalar input samples ``u(0..length-1)`` of a stationary AR(1) process.

    ``batch`` prepends independent leading dimensions. The process starts in
    its stationary distribution, so every sample has variance ``input_var``.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    a = model.ar_coeff
    shape = tuple(batch) + (length,)
    drive = rng.standard_normal(shape) * np.sqrt(model.input_var * (1.0 - a * a))
    if a == 0.0:
        return drive
    start = rng.standard_normal(tuple(batch) + (1,)) * np.sqrt(model.input_var)
    u, _ = lfilter([1.0], [1.0, -a], drive, axis=-1, zi=a * start)
    return u


def gen_noise(model: NodeSignalModel, length: int, rng: np.random.Generator, batch=()) -> np.ndarray:
    return rng.standard_normal(tuple(batch) + (length,)) * np.sqrt(model.noise_var)


@dataclass(frozen=True)
class OptimalWeights:
    """Cluster optima ``w0 + delta[q] * w_cluster[q]``; ``delta`` and ``w_cluster`` are 0-indexed by cluster."""

    w0: np.ndarray
    delta: np.ndarray
    w_cluster: np.ndarray

    @property
    def L(self) -> int:
        return self.w0.size

    def cluster_optimum(self, q: int) -> np.ndarray:
        """Optimum of cluster ``q`` (1-based)."""
        return self.w0 + self.delta[q - 1] * self.w_cluster[q - 1]

    def per_node(self, cluster_of) -> np.ndarray:
        """``(N, L)`` array of node optima; rows of one cluster are identical."""
        return np.stack([self.cluster_optimum(int(q)) for q in cluster_of])


def make_optimal_weights(L: int, delta, rng: np.random.Generator) -> OptimalWeights:
    """Random unit-norm base vector with Gaussian per-cluster perturbations."""
    delta = np.asarray(delta, dtype=float)
    w0 = rng.standard_normal(L)
    w0 /= np.linalg.norm(w0)
    wc = rng.standard_normal((delta.size, L))
    return OptimalWeights(w0, delta, wc)


def observe(w_star: np.ndarray, u: np.ndarray, noise_sample: float) -> float:
    """Linear measurement ``u^T w* + v``."""
    w_star = np.asarray(w_star)
    u = np.asarray(u)
    if w_star.shape != u.shape or w_star.ndim != 1:
        raise ValueError(f"regressor shape {u.shape} does not match weights {w_star.shape}")
    return float(u @ w_star + noise_sample)


def tapped_regressor(u: np.ndarray, n: int, L: int) -> np.ndarray:
    """``[u(n), u(n-1), ..., u(n-L+1)]`` with zeros before time 0."""
    out = np.zeros(L)
    m = min(L, n + 1)
    if m > 0:
        out[:m] = u[n::-1][:m]
    return out


@dataclass(frozen=True)
class DataBlock:
    """Projection data: the ``P`` newest regressor rows and desired samples, newest first."""

    U: np.ndarray
    d: np.ndarray


def stack_block(u: np.ndarray, d: np.ndarray, n: int, P: int, L: int) -> DataBlock:
    """Stack the data used by a projection of order ``P`` at time ``n``.

    ``u`` and ``d`` are a node's scalar input and desired sequences. Rows
    for times before 0 are zero.
    """
    U = np.zeros((P, L))
    dv = np.zeros(P)
    for i in range(min(P, n + 1)):
        U[i] = tapped_regressor(u, n - i, L)
        dv[i] = d[n - i]
    return DataBlock(U, dv)


def desired_signal(u: np.ndarray, w_star: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``d(m) = u_m^T w* + v(m)`` along the last axis with zero pre-history."""
    L = w_star.size
    clean = lfilter(w_star, [1.0], u, axis=-1) if L > 1 else u * w_star[0]
    return clean + v


def sample_blocks(model: NodeSignalModel, P: int, L: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Independent stationary ``(samples, P, L)`` data matrices for one node."""
    span = L + P - 1
    u = gen_regressors(model, span, rng, batch=(samples,))
    # row i, column j holds u(n - i - j); newest sample is the last one
    idx = (span - 1) - (np.arange(P)[:, None] + np.arange(L)[None, :])
    return u[:, idx]
