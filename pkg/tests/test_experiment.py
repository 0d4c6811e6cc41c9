import csv
import json

import numpy as np
import pytest

from lewisq.errors import InvalidSpec
from lewisq.experiment import (cell_seed, load_dataset, parse_config, reference_solution,
                               relative_errors, run_experiment)
from lewisq.io import write_csv
from lewisq.loss import h_to_rho_tau, rho

SMALL = """
# small grid
methods = lewis, uniform
tau_h = 0.5, 0.75
sizes = 60, 200
trials = 3
n = 2000
d = 5
seed = 4
"""


def blockwise_quantile(A, b, tau):
    """Minimizer for basis-vector rows: each coordinate is a 1-D quantile problem."""
    x = np.empty(A.shape[1])
    for j in range(A.shape[1]):
        bj = b[A[:, j] == 1]
        costs = [rho(tau, c - bj).sum() for c in bj]
        x[j] = bj[int(np.argmin(costs))]
    return x


def test_parse_config():
    cfg = parse_config(SMALL)
    assert cfg["methods"] == "lewis, uniform" and cfg["trials"] == "3"
    assert cfg["q"] == "1.5"
    with pytest.raises(InvalidSpec):
        parse_config("bogus = 1\n")
    with pytest.raises(InvalidSpec):
        parse_config("no equals sign\n")


def test_relative_errors():
    e2, e1, einf = relative_errors([1.0, 2.0], [1.0, 1.0])
    assert (e2, e1, einf) == (pytest.approx(1 / np.sqrt(2)), 0.5, 1.0)


def test_reference_matches_blockwise_oracle():
    cfg = parse_config(SMALL)
    A, b, _ = load_dataset(cfg)
    for tau_h in (0.75, 0.95):
        tau = h_to_rho_tau(tau_h)
        x = reference_solution(A, b, tau, cfg)
        oracle = blockwise_quantile(A, b, tau)
        obj = lambda z: rho(tau, A @ z - b).sum()  # noqa: E731
        assert obj(x) == pytest.approx(obj(oracle), rel=1e-10)


def test_seeds_distinct_per_cell():
    states = {tuple(cell_seed(0, t, m, s, k).generate_state(2))
              for t in range(3) for m in ("lewis", "uniform") for s in (10, 20) for k in (0, 1)}
    assert len(states) == 24


def test_run_small_grid(tmp_path):
    cfg = parse_config(SMALL)
    rows, summary = run_experiment(cfg, tmp_path / "a.csv", tmp_path / "a.json")
    assert len(rows) == 2 * 2 * 2 * 3
    keys = [(r.method, r.tau_h, r.size, r.trial) for r in rows]
    order = {"lewis": 0, "uniform": 1}
    assert keys == sorted(keys, key=lambda k: (order[k[0]], k[1], k[2], k[3]))
    assert all(np.isfinite([r.err2, r.err1, r.errinf]).all() and min(r.err2, r.err1, r.errinf) >= 0
               for r in rows)
    with open(tmp_path / "a.csv") as fh:
        table = list(csv.DictReader(fh))
    assert list(table[0]) == ["method", "tau_h", "size", "trial", "err2", "err1", "errinf"]
    assert float(table[0]["err2"]) == rows[0].err2
    js = json.loads((tmp_path / "a.json").read_text())
    assert set(js) >= {"config", "perCellMeans", "seeds", "versions"}
    assert len(js["perCellMeans"]) == 8
    cell = js["perCellMeans"][0]
    assert cell["err2"] == pytest.approx(np.mean([r.err2 for r in rows[:3]]))
    run_experiment(cfg, tmp_path / "b.csv", tmp_path / "b.json")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_single_method_deterministic(tmp_path):
    cfg = parse_config("methods = lewis\ntau_h = 0.5\nsizes = 100\ntrials = 2\nn = 1000\nd = 4\n")
    run_experiment(cfg, tmp_path / "a.csv")
    run_experiment(cfg, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_realizable_full_size_recovers_truth(tmp_path, rng):
    A = rng.standard_normal((60, 3))
    x_true = np.array([1.0, -2.0, 0.5])
    write_csv(tmp_path / "d.csv", A, A @ x_true)
    cfg = parse_config(f"data = {tmp_path / 'd.csv'}\nsizes = 60\ntrials = 2\ntau_h = 0.75\n")
    rows, _ = run_experiment(cfg)
    assert max(r.err2 for r in rows) <= 1e-6


def test_ingested_data_uses_exact_reference(tmp_path, rng):
    A = rng.standard_normal((40, 2))
    b = A @ np.array([1.0, 1.0]) + rng.laplace(size=40)
    write_csv(tmp_path / "d.csv", A, b)
    cfg = parse_config(f"data = {tmp_path / 'd.csv'}\nsizes = 40\ntrials = 1\ntau_h = 0.5\n")
    _, summary = run_experiment(cfg)
    from lewisq.regression import QuantileProblem, exact_small
    x, _ = exact_small(QuantileProblem(A, b, 1.0))
    np.testing.assert_array_equal(summary["reference"]["0.5"], x)


def test_force_n_and_bad_method():
    cfg = parse_config("epsilon = 0.5\nforce_n = false\nsizes = 100\ntrials = 1\nn = 1000\nd = 4\n")
    with pytest.raises(InvalidSpec):
        run_experiment(cfg)
    with pytest.raises(InvalidSpec):
        run_experiment(parse_config("methods = lewis, sketch\n"))
