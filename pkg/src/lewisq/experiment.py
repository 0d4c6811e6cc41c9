"""Sampling-scheme comparison harness.

For every (method, tau_h, sample size, trial) cell the harness samples the
regression data, solves the reduced problem, and records the relative
error of the solution against a reference minimizer of the full problem
in the l_2, l_1 and l_inf norms.

Config files are flat ``key = value`` text; lists are comma separated and
``#`` starts a comment. Recognized keys and defaults are in `DEFAULTS`.
"""
import csv
import logging
import platform
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import InvalidSpec, TooLarge
from .io import dumps_report, read_csv
from .lewis import lewis_weights
from .loss import bound_B, h_to_rho_tau, rho_as_phi
from .regression import QuantileProblem, exact_small, solve_lp, solve_quantile
from .sampler import fixed_size_plan, sample_rows, uniform_plan
from .synthetic import SyntheticSpec, gen_synthetic

log = logging.getLogger(__name__)

METHODS = ("lewis", "uniform")

DEFAULTS = {
    "methods": "lewis,uniform",
    "tau_h": "0.5,0.75",
    "sizes": "100,200,300,400,500,600,700,800,900,1000",
    "trials": "50",
    "seed": "0",
    "n": "10000",
    "d": "20",
    "q": "1.5",
    "noise_ratio": "0.2",
    "outlier_prob": "0.001",
    "outlier_scale": "500",
    "data": "",
    "epsilon": "",
    "force_n": "true",
    "solve_gap": "1e-4",
    "solve_epochs": "60",
    "reference": "lp",
    "reference_gap": "1e-6",
    "reference_epochs": "6000",
    "timing": "false",
}


@dataclass(frozen=True)
class ExperimentRow:
    method: str
    tau_h: float
    size: int
    trial: int
    err2: float
    err1: float
    errinf: float
    wall_time: float = 0.0


def parse_config(text):
    """Parse ``key = value`` lines into a dict of strings, defaults filled in."""
    cfg = dict(DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidSpec(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise InvalidSpec(f"config line {lineno}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def _floats(s):
    return [float(t) for t in s.split(",") if t.strip()]


def _ints(s):
    return [int(t) for t in s.split(",") if t.strip()]


def _flag(s):
    return s.strip().lower() in ("1", "true", "yes", "on")


def relative_errors(x, ref):
    diff = np.asarray(x) - np.asarray(ref)
    return tuple(float(np.linalg.norm(diff, k) / np.linalg.norm(ref, k)) for k in (2, 1, np.inf))


def cell_seed(root, trial, method, size, tau_index):
    """Seed stream for one cell; distinct per (trial, method, size, tau_h)."""
    return np.random.SeedSequence(root, spawn_key=(trial, METHODS.index(method), size, tau_index))


def load_dataset(cfg):
    if cfg["data"]:
        A, b, _ = read_csv(cfg["data"])
        return A, b, None
    spec = SyntheticSpec(n=int(cfg["n"]), d=int(cfg["d"]), q=float(cfg["q"]),
                         seed=int(cfg["seed"]), noise_ratio=float(cfg["noise_ratio"]),
                         outlier_prob=float(cfg["outlier_prob"]),
                         outlier_scale=float(cfg["outlier_scale"]))
    data = gen_synthetic(spec)
    return data.A, data.b, data


def reference_solution(A, b, tau, cfg):
    """Reference minimizer of the full problem.

    Exact enumeration when small enough; otherwise the linear-program
    solution (``reference = lp``) or a long direct run of the stochastic
    solver (``reference = solver``).
    """
    try:
        x, _ = exact_small(QuantileProblem(A, b, tau))
        return x
    except TooLarge:
        pass
    if cfg["reference"] == "lp":
        return solve_lp(A, b, tau)
    if cfg["reference"] != "solver":
        raise InvalidSpec(f"reference must be 'lp' or 'solver', got {cfg['reference']!r}")
    return solve_quantile(A, b, tau, target_gap=float(cfg["reference_gap"]),
                          max_epochs=int(cfg["reference_epochs"]), seed=int(cfg["seed"]))


def run_experiment(cfg, csv_path=None, json_path=None):
    """Run every cell of the config; return the rows and the JSON summary dict.

    Rows are ordered by (method, tau_h, size, trial) and written to
    `csv_path` as they complete.
    """
    methods = [m.strip() for m in cfg["methods"].split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise InvalidSpec(f"unknown method {m!r}")
    taus_h = _floats(cfg["tau_h"])
    sizes = _ints(cfg["sizes"])
    trials = int(cfg["trials"])
    root = int(cfg["seed"])
    timing = _flag(cfg["timing"])
    epsilon = float(cfg["epsilon"]) if cfg["epsilon"] else None
    force_n = _flag(cfg["force_n"])
    solve_gap, solve_epochs = float(cfg["solve_gap"]), int(cfg["solve_epochs"])

    A, b, _ = load_dataset(cfg)
    n = A.shape[0]
    M = np.column_stack([A, b])
    d = A.shape[1]
    lewis = lewis_weights(M, p=1.0) if "lewis" in methods else None
    refs = {}
    for t_h in taus_h:
        refs[t_h] = reference_solution(A, b, h_to_rho_tau(t_h), cfg)

    fields = ["method", "tau_h", "size", "trial", "err2", "err1", "errinf"]
    if timing:
        fields.append("wall_time")
    sink = open(csv_path, "w", newline="") if csv_path else None
    writer = csv.writer(sink, lineterminator="\n") if sink else None
    if writer:
        writer.writerow(fields)
        sink.flush()
    rows = []
    try:
        for method in methods:
            for ti, t_h in enumerate(taus_h):
                tau = h_to_rho_tau(t_h)
                for size in sizes:
                    if method == "lewis" and epsilon:
                        # Below-floor sizes are logged; without force_n they are refused.
                        plan = fixed_size_plan(lewis, size, rho_as_phi(tau), bound_B(tau), epsilon)
                        if not (force_n or plan.floor_holds()):
                            raise InvalidSpec(f"size {size} is below the sampling floor for "
                                              f"eps={epsilon}; set force_n = true to allow it")
                    elif method == "lewis":
                        plan = fixed_size_plan(lewis, size)
                    else:
                        plan = uniform_plan(n, size)
                    for trial in range(trials):
                        t0 = time.perf_counter()
                        sample_seq, solve_seq = cell_seed(root, trial, method, size, ti).spawn(2)
                        S = sample_rows(M, plan, sample_seq)
                        x = solve_quantile(S.rows[:, :d], S.rows[:, d], tau, target_gap=solve_gap,
                                           max_epochs=solve_epochs, seed=solve_seq)
                        e2, e1, einf = relative_errors(x, refs[t_h])
                        row = ExperimentRow(method, t_h, size, trial, e2, e1, einf,
                                            time.perf_counter() - t0)
                        rows.append(row)
                        if writer:
                            vals = [method, repr(t_h), size, trial, repr(e2), repr(e1), repr(einf)]
                            if timing:
                                vals.append(repr(row.wall_time))
                            writer.writerow(vals)
                            sink.flush()
    finally:
        if sink:
            sink.close()

    summary = summarize(rows, cfg, refs)
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(dumps_report(summary))
    return rows, summary


def cell_means(rows):
    """Mean errors per (method, tau_h, size)."""
    cells = {}
    for r in rows:
        cells.setdefault((r.method, r.tau_h, r.size), []).append(r)
    out = []
    for (method, t_h, size), rs in cells.items():
        out.append({
            "method": method, "tau_h": t_h, "size": size, "trials": len(rs),
            "err2": float(np.mean([r.err2 for r in rs])),
            "err1": float(np.mean([r.err1 for r in rs])),
            "errinf": float(np.mean([r.errinf for r in rs])),
        })
    return out


def summarize(rows, cfg, refs):
    import numba
    import scipy

    return {
        "config": {k: cfg[k] for k in sorted(cfg)},
        "perCellMeans": cell_means(rows),
        "reference": {repr(k): v for k, v in refs.items()},
        "seeds": {
            "root": int(cfg["seed"]),
            "derivation": "SeedSequence(root, spawn_key=(trial, method, size, tau_index)).spawn(2)",
        },
        "versions": {
            "lewisq": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "numba": numba.__version__, "python": platform.python_version(),
        },
    }
