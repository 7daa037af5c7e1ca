"""Built-in invariant checks run by ``pdapa selftest``."""

from __future__ import annotations

import numpy as np

from .adapt import full_diffusion_step, independent_apa_step, partial_diffusion_step
from .blockalg import block_kron, block_kron_reference, bvec
from .selection import Scheme, cross_moment, estimate_cross_moment
from .theory import build_global_model, combination_model, expected_kron, selection_moments
from .topology import network_weights, topology_from_edges


def _selection_moments():
    trials = 20_000
    for scheme in (Scheme.UNCOORDINATED, Scheme.COORDINATED):
        for (M, L) in ((2, 4), (3, 8)):
            for sn in (False, True):
                for se in (False, True):
                    pair = ((0, 0), (0 if sn else 1, 0 if se else 1))
                    p = cross_moment(scheme, M, L, sn, se)
                    est = estimate_cross_moment(scheme, M, L, pair, trials, seed=hash((M, L, sn, se)) & 0xFFFF)
                    se_ = np.sqrt(max(p * (1 - p), 1e-12) / trials)
                    if abs(est - p) > 5 * se_:
                        return False
    return True


def _bvec_identity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        N, L = rng.integers(2, 4), rng.integers(2, 4)
        P, Q, S = (rng.standard_normal((N * L, N * L)) for _ in range(3))
        lhs = bvec(Q @ S @ P.T, L)
        if np.linalg.norm(lhs - block_kron(P, Q, L) @ bvec(S, L)) > 1e-12 * np.linalg.norm(lhs):
            return False
    return True


def _block_kron_reference():
    rng = np.random.default_rng(2)
    P, Q = rng.standard_normal((6, 6)), rng.standard_normal((6, 6))
    return np.allclose(block_kron(P, Q, 3), block_kron_reference(P, Q, 3), rtol=0, atol=1e-13)


def _network():
    top = topology_from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 4)], [1, 1, 2, 2])
    return top, network_weights(top, 0.3, 0.05)


def _reductions():
    top, wm = _network()
    rng = np.random.default_rng(3)
    N, L, P = 4, 5, 3
    w_opt = rng.standard_normal((N, L))
    a = b = c = d_ = np.zeros((N, L))
    for _ in range(200):
        U = rng.standard_normal((N, P, L))
        d = np.einsum("kpl,kl->kp", U, w_opt) + 0.01 * rng.standard_normal((N, P))
        a = full_diffusion_step(a, U, d, wm)
        b = partial_diffusion_step(b, U, d, np.ones((N, L), bool), wm)
        c = partial_diffusion_step(c, U, d, np.zeros((N, L), bool), wm)
        d_ = independent_apa_step(d_, U, d, wm.mu, wm.epsilon)
    return np.array_equal(a, b) and np.array_equal(c, d_)


def _weights():
    _, wm = _network()
    cols = np.allclose(wm.A.sum(axis=0), 1.0, atol=1e-12)
    rows = all(abs(s - 1.0) < 1e-12 or s == 0.0 for s in wm.P.sum(axis=1))
    return cols and rows


def _periodic_phi():
    _, wm = _network()
    L, M = 2, 1
    gm = build_global_model(wm, np.ones((4, L)), np.array([np.eye(L) * 0.5] * 4), M, L)
    Bt = combination_model(wm.A).transpose()
    table = np.full((2, 2), M / L)
    Phi = selection_moments(gm, Scheme.PERIODIC, M)[0]
    rows = np.allclose(Phi.sum(axis=1), 1.0, atol=1e-12)
    return rows and np.allclose(Phi, expected_kron(Bt, Bt, table, L), rtol=0, atol=1e-12)


CHECKS = [
    ("selection moments match closed forms", _selection_moments),
    ("bvec / block Kronecker identity", _bvec_identity),
    ("block Kronecker matches basis construction", _block_kron_reference),
    ("M=L and M=0 reductions are exact", _reductions),
    ("weight matrices are normalized", _weights),
    ("periodic Phi closed form matches moment expansion", _periodic_phi),
]


def run_selftest(report=print):
    passed = failed = 0
    for name, fn in CHECKS:
        try:
            ok = bool(fn())
        except Exception as exc:  # a crash counts as a failure
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        report(f"{'PASS' if ok else 'FAIL'}  {name}")
        passed += ok
        failed += not ok
    return passed, failed
