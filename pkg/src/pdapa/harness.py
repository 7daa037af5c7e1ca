"""Monte-Carlo experiments, learning curves and theory comparisons."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adapt import full_diffusion_step, partial_diffusion_step
from .selection import MaskSource, Scheme
from .signals import NodeSignalModel, default_signal_models, desired_signal, gen_noise, gen_regressors, make_optimal_weights
from .theory import DEFAULT_NL_CAP, DEFAULT_SAMPLES, TheoryError, predict, to_db
from .topology import Topology, WeightMatrices, network_weights

log = logging.getLogger(__name__)

DIVERGENCE_DB = 100.0
DIVERGENCE_LIN = 10.0 ** (DIVERGENCE_DB / 10.0)
BATCH_RUNS = 100
MASK_CHUNK = 256
DEFAULT_DELTA = (0.025, -0.025, 0.015)


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    ``models=None`` draws heterogeneous node statistics from the seed.
    ``mode`` is ``"partial"`` or ``"full"`` (complete exchange).
    """

    topology: Topology
    L: int
    P: int
    M: int
    scheme: str = "uncoordinated"
    mu: float | tuple = 0.2
    eta: float = 0.0018
    epsilon: float = 1e-5
    delta: tuple | None = None
    models: list | None = None
    T: int = 5000
    R: int = 50
    seed: int = 0
    mode: str = "partial"
    per_node: bool = False
    track_mean: bool = False
    theory_samples: int = DEFAULT_SAMPLES
    nl_cap: int = DEFAULT_NL_CAP

    def __post_init__(self):
        if self.R < 1 or self.T < 1:
            raise ValueError("runs and iterations must be >= 1")
        if self.L < 1 or self.P < 1:
            raise ValueError("L and P must be >= 1")
        if not 0 <= self.M <= self.L:
            raise ValueError(f"M must satisfy 0 <= M <= L, got {self.M}")
        if self.mode not in ("partial", "full"):
            raise ValueError(f"unknown mode {self.mode!r}")
        self.scheme = Scheme(self.scheme).value
        if self.models is not None and len(self.models) != self.topology.N:
            raise ValueError("one signal model per node is required")
        if self.delta is not None and len(self.delta) != self.topology.Q:
            raise ValueError(f"need {self.topology.Q} cluster deltas, got {len(self.delta)}")

    @property
    def N(self) -> int:
        return self.topology.N


@dataclass
class Setup:
    weights: WeightMatrices
    models: list
    w_star: np.ndarray


def make_setup(cfg: ExperimentConfig) -> Setup:
    """Draw the quantities shared by all runs from the master seed."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(0,)))
    models = cfg.models
    if models is None:
        models = default_signal_models(cfg.N, rng)
    delta = cfg.delta
    if delta is None:
        delta = (DEFAULT_DELTA * cfg.topology.Q)[: cfg.topology.Q]
    opt = make_optimal_weights(cfg.L, delta, rng)
    w_star = opt.per_node(cfg.topology.cluster_of)
    weights = network_weights(cfg.topology, cfg.mu, cfg.eta, cfg.epsilon)
    return Setup(weights, list(models), w_star)


@dataclass
class LearningCurve:
    """Run-averaged network NMSD in dB, with optional per-node curves."""

    nmsd_db: np.ndarray
    node_db: np.ndarray | None = None


@dataclass
class ExperimentResult:
    curve: LearningCurve
    steady_db: float
    diverged: int
    runs: int
    comm_per_iter: int
    w_star: np.ndarray
    mean_w_final: np.ndarray | None = None
    mean_w: np.ndarray | None = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "runs": self.runs,
            "iterations": int(self.curve.nmsd_db.size),
            "diverged_runs": self.diverged,
            "steady_state_nmsd_db": self.steady_db,
            "final_nmsd_db": float(self.curve.nmsd_db[-1]),
            "time_to_minus20_db": time_to_level(self.curve.nmsd_db, -20.0),
            "transmitted_entries_per_iter": self.comm_per_iter,
        }


def time_to_level(curve_db, level_db: float):
    """First iteration at which the curve is at or below ``level_db``; ``None`` if never."""
    hit = np.flatnonzero(np.asarray(curve_db) <= level_db)
    return int(hit[0]) if hit.size else None


def steady_state(curve_lin: np.ndarray) -> float:
    """dB value of the mean over the final 10% of iterations."""
    n = max(1, int(np.ceil(0.1 * curve_lin.size)))
    return float(to_db(curve_lin[-n:].mean()))


def run_seed(seed: int, r: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(1, r))


def _run_signals(cfg, setup, r):
    """Input and desired sequences ``(N, T)`` and the mask source of run ``r``."""
    s_sig, s_noise, s_mask = run_seed(cfg.seed, r).spawn(3)
    rs, rn = np.random.default_rng(s_sig), np.random.default_rng(s_noise)
    u = np.empty((cfg.N, cfg.T))
    d = np.empty((cfg.N, cfg.T))
    for k, model in enumerate(setup.models):
        u[k] = gen_regressors(model, cfg.T, rs)
        v = gen_noise(model, cfg.T, rn)
        d[k] = desired_signal(u[k], setup.w_star[k], v)
    masks = MaskSource(cfg.scheme, cfg.M, cfg.L, cfg.N, np.random.default_rng(s_mask))
    return u, d, masks


def simulate_batch(cfg: ExperimentConfig, setup: Setup, runs) -> dict:
    """Simulate runs ``runs`` side by side; return per-iteration sums over runs."""
    runs = list(runs)
    R, N, L, P, T = len(runs), cfg.N, cfg.L, cfg.P, cfg.T
    pad = L + P - 2
    upad = np.zeros((R, N, T + pad))
    dpad = np.zeros((R, N, T + P - 1))
    sources = []
    for i, r in enumerate(runs):
        u, d, src = _run_signals(cfg, setup, r)
        upad[i, :, pad:] = u
        dpad[i, :, P - 1 :] = d
        sources.append(src)
    uidx = pad - (np.arange(P)[:, None] + np.arange(L)[None, :])
    didx = (P - 1) - np.arange(P)

    ws = setup.w_star
    wnorm = (ws**2).sum(axis=1)
    w = np.zeros((R, N, L))
    alive = np.ones(R, dtype=bool)
    node_sum = np.zeros((T, N))
    mean_sum = np.zeros((T, N, L)) if cfg.track_mean else None
    partial = cfg.mode == "partial"
    chunk = None
    for n in range(T):
        ratio = ((ws[None] - w) ** 2).sum(axis=2) / wnorm[None]
        net = ratio.mean(axis=1)
        bad = alive & ~(np.isfinite(net) & (net <= DIVERGENCE_LIN))
        if bad.any():
            alive &= ~bad
            w[bad] = 0.0
            log.info("run(s) %s diverged at iteration %d", [runs[i] for i in np.flatnonzero(bad)], n)
        ratio[~alive] = DIVERGENCE_LIN
        node_sum[n] = ratio.sum(axis=0)
        if mean_sum is not None:
            mean_sum[n] = w[alive].sum(axis=0)
        if n == T - 1:
            break
        if partial and n % MASK_CHUNK == 0:
            chunk = np.stack([s.next(MASK_CHUNK) for s in sources], axis=1)
        U = upad[:, :, n + uidx]
        dv = dpad[:, :, n + didx]
        with np.errstate(all="ignore"):
            if partial:
                w = partial_diffusion_step(w, U, dv, chunk[n % MASK_CHUNK], setup.weights)
            else:
                w = full_diffusion_step(w, U, dv, setup.weights)
        w[~alive] = 0.0
    return {
        "node_sum": node_sum,
        "diverged": int((~alive).sum()),
        "w_final_sum": w[alive].sum(axis=0),
        "alive": int(alive.sum()),
        "mean_sum": mean_sum,
    }


def _batch_job(args):
    cfg, setup, runs = args
    return simulate_batch(cfg, setup, runs)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Average ``cfg.R`` independent runs.

    Runs are grouped in fixed batches and reduced in batch order, so the
    result does not depend on ``jobs``.
    """
    setup = make_setup(cfg)
    batches = [range(s, min(s + BATCH_RUNS, cfg.R)) for s in range(0, cfg.R, BATCH_RUNS)]
    tasks = [(cfg, setup, b) for b in batches]
    log.debug("N=%d L=%d M=%d scheme=%s: %d runs in %d batches, jobs=%d",
              cfg.topology.N, cfg.L, cfg.M, cfg.scheme, cfg.R, len(batches), jobs)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_batch_job, tasks))
    else:
        parts = [_batch_job(t) for t in tasks]

    node_sum = sum(p["node_sum"] for p in parts)
    diverged = sum(p["diverged"] for p in parts)
    alive = sum(p["alive"] for p in parts)
    node_lin = node_sum / cfg.R
    net_lin = node_lin.mean(axis=1)
    curve = LearningCurve(to_db(net_lin), to_db(node_lin) if cfg.per_node else None)
    mean_final = sum(p["w_final_sum"] for p in parts) / alive if alive else None
    mean_w = None
    if cfg.track_mean and alive:
        mean_w = sum(p["mean_sum"] for p in parts) / alive
    if diverged:
        log.info("%d of %d runs diverged", diverged, cfg.R)
    links = cfg.topology.n_links()
    comm = links * (cfg.M if cfg.mode == "partial" else cfg.L)
    return ExperimentResult(curve, steady_state(net_lin), diverged, cfg.R, comm, setup.w_star, mean_final, mean_w)


# -- theory comparison ------------------------------------------------------


@dataclass
class ComparisonReport:
    sim: ExperimentResult
    theory: object | None
    status: str
    max_transient_diff_db: float | None = None
    steady_diff_db: float | None = None
    from_iter: int = 50

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "simulation": self.sim.summary(),
            "from_iteration": self.from_iter,
            "max_transient_diff_db": self.max_transient_diff_db,
            "steady_state_diff_db": self.steady_diff_db,
        }
        if self.theory is not None:
            th = self.theory.to_json()
            th.pop("msd_transient")
            out["theory"] = th
        return out


def theory_for(cfg: ExperimentConfig, setup: Setup | None = None, normalized: bool = True):
    """Theory prediction for ``cfg``; NMSD weighting by default."""
    setup = setup or make_setup(cfg)
    M = cfg.M if cfg.mode == "partial" else cfg.L
    return predict(
        setup.weights,
        setup.w_star,
        setup.models,
        cfg.P,
        M,
        cfg.scheme,
        cfg.T,
        samples=cfg.theory_samples,
        seed=cfg.seed,
        normalized=normalized,
        nl_cap=cfg.nl_cap,
    )


def compare_theory(cfg: ExperimentConfig, jobs: int = 1, from_iter: int = 50) -> ComparisonReport:
    """Simulated vs predicted NMSD curves and steady states.

    ``status`` is ``"ok"``, ``"unstable"`` (both sides judged separately in
    the JSON) or ``"simulation-only"`` when the theory cap is exceeded.
    """
    sim = run_experiment(cfg, jobs)
    try:
        th = theory_for(cfg)
    except TheoryError as exc:
        log.warning("theory unavailable: %s", exc)
        return ComparisonReport(sim, None, "simulation-only", from_iter=from_iter)
    if not th.stable:
        return ComparisonReport(sim, th, "unstable", from_iter=from_iter)
    th_db = to_db(th.msd_transient)
    diff = np.abs(th_db[from_iter:] - sim.curve.nmsd_db[from_iter:])
    max_diff = float(diff.max()) if diff.size else None
    return ComparisonReport(sim, th, "ok", max_diff, th.msd_steady_db - sim.steady_db, from_iter)


# -- output files -----------------------------------------------------------


def _fmt(x) -> str:
    return f"{x:.10g}"


def curve_csv(curve: LearningCurve) -> str:
    cols = ["iter", "nmsd_db"]
    if curve.node_db is not None:
        cols += [f"node_{k + 1}" for k in range(curve.node_db.shape[1])]
    lines = [",".join(cols)]
    for n, v in enumerate(curve.nmsd_db):
        row = [str(n), _fmt(v)]
        if curve.node_db is not None:
            row += [_fmt(x) for x in curve.node_db[n]]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_files(out_dir: str, files: dict):
    """Write ``{name: text or ndarray}`` atomically: either all files appear or none."""
    os.makedirs(out_dir, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".pdapa-", dir=out_dir)
    try:
        for name, content in files.items():
            path = os.path.join(tmp, name)
            if isinstance(content, np.ndarray):
                np.savetxt(path, content, fmt="%.17g")
            else:
                with open(path, "w") as fh:
                    fh.write(content)
        for name in files:
            os.replace(os.path.join(tmp, name), os.path.join(out_dir, name))
    finally:
        for name in os.listdir(tmp):
            os.remove(os.path.join(tmp, name))
        os.rmdir(tmp)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def signal_models_json(models: list[NodeSignalModel]) -> list[dict]:
    return [{"ar_coeff": m.ar_coeff, "input_var": m.input_var, "noise_var": m.noise_var} for m in models]
