"""TOML experiment files.

Grammar (every key outside ``[topology]``/``[clusters]`` is optional)::

    [topology]
    nodes = 4
    edges = [[1, 2], [2, 3], [3, 4]]     # 1-based, undirected

    [clusters]
    assignment = [1, 1, 2, 2]            # cluster id of each node, 1..Q
    delta = [0.025, -0.025]              # one offset per cluster

    [signal]                             # omit to draw per-node statistics from the seed
    ar_coeff = [0.2, 0.3, 0.1, 0.4]      # scalar or one value per node
    input_var = 1.0
    noise_var = [1e-3, 2e-3, 5e-3, 1e-2]

    [algorithm]
    L = 4
    P = 2
    M = 2
    scheme = "uncoordinated"             # periodic | uncoordinated | coordinated
    mode = "partial"                     # partial | full
    mu = 0.2                             # scalar or one value per node
    eta = 0.0018
    epsilon = 1e-5

    [experiment]
    iterations = 5000
    runs = 50
    seed = 0
    per_node = false                     # add node_k columns to the CSV
    dump_wstar = false                   # write the node optima to wstar.txt
    theory_samples = 20000
    nl_cap = 48
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .harness import ExperimentConfig
from .signals import NodeSignalModel
from .topology import TopologyError, topology_from_edges


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


SECTIONS = {
    "topology": {"nodes", "edges"},
    "clusters": {"assignment", "delta"},
    "signal": {"ar_coeff", "input_var", "noise_var"},
    "algorithm": {"L", "P", "M", "scheme", "mode", "mu", "eta", "epsilon"},
    "experiment": {"iterations", "runs", "seed", "per_node", "dump_wstar", "theory_samples", "nl_cap"},
}


@dataclass
class LoadedConfig:
    experiment: ExperimentConfig
    dump_wstar: bool = False


def _per_node(value, n, name):
    if isinstance(value, list):
        if len(value) != n:
            raise ConfigError(f"{name}: expected {n} values, got {len(value)}")
        return [float(v) for v in value]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)] * n
    raise ConfigError(f"{name}: expected a number or a list of numbers")


def _int(sec, key, default=None):
    v = sec.get(key, default)
    if v is None:
        raise ConfigError(f"missing required key {key!r}")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    return v


def _float(sec, key, default):
    v = sec.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    return float(v)


def parse_config(doc: dict) -> LoadedConfig:
    """Build an :class:`ExperimentConfig` from a parsed TOML document."""
    for name, sec in doc.items():
        if name not in SECTIONS or not isinstance(sec, dict):
            raise ConfigError(f"unknown section [{name}]")
        extra = set(sec) - SECTIONS[name]
        if extra:
            raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(extra))}")
    for name in ("topology", "clusters"):
        if name not in doc:
            raise ConfigError(f"missing section [{name}]")
    topo, cl = doc["topology"], doc["clusters"]
    alg, exp = doc.get("algorithm", {}), doc.get("experiment", {})
    n = _int(topo, "nodes")
    edges = topo.get("edges", [])
    if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 2 for e in edges):
        raise ConfigError("edges: expected a list of [i, j] pairs")
    assignment = cl.get("assignment")
    if not isinstance(assignment, list):
        raise ConfigError("clusters.assignment: expected a list")
    try:
        top = topology_from_edges(n, [tuple(e) for e in edges], assignment)
    except (TopologyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid topology: {exc}") from exc

    models = None
    if "signal" in doc:
        sig = doc["signal"]
        missing = SECTIONS["signal"] - set(sig)
        if missing:
            raise ConfigError(f"[signal] needs all of ar_coeff, input_var, noise_var; missing {', '.join(sorted(missing))}")
        cols = [_per_node(sig[k], n, k) for k in ("ar_coeff", "input_var", "noise_var")]
        try:
            models = [NodeSignalModel(a, s, v) for a, s, v in zip(*cols)]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    delta = cl.get("delta")
    if delta is not None:
        delta = tuple(_per_node(delta, len(delta) if isinstance(delta, list) else 1, "delta"))
    mu = alg.get("mu", 0.2)
    mu = tuple(_per_node(mu, n, "mu")) if isinstance(mu, list) else _float(alg, "mu", 0.2)
    try:
        cfg = ExperimentConfig(
            topology=top,
            L=_int(alg, "L", 4),
            P=_int(alg, "P", 2),
            M=_int(alg, "M", alg.get("L", 4)),
            scheme=str(alg.get("scheme", "uncoordinated")),
            mode=str(alg.get("mode", "partial")),
            mu=mu,
            eta=_float(alg, "eta", 0.0018),
            epsilon=_float(alg, "epsilon", 1e-5),
            delta=delta,
            models=models,
            T=_int(exp, "iterations", 5000),
            R=_int(exp, "runs", 50),
            seed=_int(exp, "seed", 0),
            per_node=bool(exp.get("per_node", False)),
            theory_samples=_int(exp, "theory_samples", 20000),
            nl_cap=_int(exp, "nl_cap", 48),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return LoadedConfig(cfg, bool(exp.get("dump_wstar", False)))


def load_config(path: str) -> LoadedConfig:
    """Read and validate a config file.

    Raises ``FileNotFoundError`` for a missing file and :class:`ConfigError`
    for anything unparsable or inconsistent.
    """
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(doc)
