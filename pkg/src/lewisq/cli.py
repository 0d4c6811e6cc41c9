"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 bad input data, 3 numerical failure.
Seeds are always logged to stderr so every run can be repeated exactly.
"""
import argparse
import logging
import sys

from . import errors
from .experiment import parse_config, run_experiment
from .graph import balance_alpha, sparsify, verify_cuts
from .io import dumps_report, format_edgelist, read_csv, read_edgelist, read_matrix, write_csv
from .io import write_matrix
from .lewis import lewis_weights
from .loss import h_to_rho_tau
from .regression import QuantileProblem, fit
from .sampler import DEFAULT_C, quantile_sample
from .synthetic import SyntheticSpec, gen_synthetic

log = logging.getLogger("lewisq")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

_NUMERIC = (errors.NoConvergence, errors.RankDeficient, errors.SingularGram,
            errors.DegeneratePlan, errors.Degenerate)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_lewis_weights(args):
    A = read_matrix(args.matrix)
    res = lewis_weights(A, p=args.p, tol=args.tol, max_iter=args.max_iter)
    log.info("converged in %d iterations, defect %.3g, sum %.6g",
             res.iterations, res.residual, res.total)
    _emit("".join(f"{float(w)!r}\n" for w in res.weights), args.out)


def cmd_sample(args):
    A = read_matrix(args.matrix)
    log.info("seed=%d", args.seed)
    S = quantile_sample(A, args.tau, args.eps, args.seed, C=args.constant)
    report = {"N": S.N, "n": int(A.shape[0]), "tau": args.tau, "epsilon": args.eps,
              "constant": args.constant, "seed": args.seed,
              "source_indices": (S.source_indices + 1).tolist()}
    if args.out:
        write_matrix(args.out, S.rows)
    _emit(dumps_report(report), args.report)


def _tau_from_args(args):
    if (args.tau is None) == (args.tau_h is None):
        raise UsageError("fit: give exactly one of --tau or --tau-h")
    return args.tau if args.tau is not None else h_to_rho_tau(args.tau_h)


def cmd_fit(args):
    tau = _tau_from_args(args)
    A, b, header = read_csv(args.csv)
    log.info("seed=%d", args.seed)
    rep = fit(QuantileProblem(A, b, tau), args.eps, seed=args.seed, C=args.constant,
              max_epochs=args.budget, repeats=args.repeats)
    out = {
        "solution": dict(zip(header[:-1], rep.solution.tolist())),
        "objective": rep.objective,
        "tau": tau,
        "epsilon": args.eps,
        "seed": args.seed,
        "sampled_rows": rep.sampled_rows,
        "sgd_iterations": rep.sgd_iterations,
        "initial_distance": rep.initial_distance,
        "degraded": rep.degraded,
        "leverage_flatness": rep.leverage_flatness,
        "attempts": rep.attempts,
        "repeats": args.repeats,
    }
    if rep.degraded:
        log.warning("solver stopped on budget before reaching the target gap")
    _emit(dumps_report(out), args.out)


def cmd_sparsify(args):
    G = read_edgelist(args.edgelist)
    alpha = args.alpha
    if alpha is None:
        alpha = balance_alpha(G)
        log.info("measured balance alpha=%.6g", alpha)
    log.info("seed=%d", args.seed)
    res = sparsify(G, alpha, args.eps, seed=args.seed, C=args.constant)
    log.info("kept %d of %d edges from %d draws", res.m_prime, G.edge_count, res.samples)
    comment = (f"sparsifier eps={args.eps!r} alpha={alpha!r} seed={args.seed} "
               f"constant={args.constant!r} draws={res.samples}")
    _emit(format_edgelist(res.graph, comment), args.out)


def cmd_verify_cuts(args):
    G, Gp = read_edgelist(args.g), read_edgelist(args.gp)
    rep = verify_cuts(G, Gp, args.eps)
    out = {"max_deviation": rep.max_deviation, "worst_cut": [v + 1 for v in rep.worst_cut],
           "cuts_checked": rep.cuts_checked, "epsilon": rep.epsilon, "passed": rep.passed}
    _emit(dumps_report(out), args.out)


def cmd_gen_synthetic(args):
    spec = SyntheticSpec(n=args.n, d=args.d, q=args.q, seed=args.seed,
                         noise_ratio=args.noise_ratio, outlier_prob=args.outlier_prob,
                         outlier_scale=args.outlier_scale)
    log.info("seed=%d", args.seed)
    data = gen_synthetic(spec)
    write_csv(args.out, data.A, data.b)
    if args.truth:
        _emit(dumps_report({"x_true": data.x_true, "counts": data.counts,
                            "seed": args.seed}), args.truth)


def cmd_experiment(args):
    with open(args.config) as fh:
        cfg = parse_config(fh.read())
    if args.force_n is not None:
        cfg["force_n"] = "true" if args.force_n else "false"
    log.info("seed=%s", cfg["seed"])
    _, summary = run_experiment(cfg, csv_path=f"{args.out}.csv", json_path=f"{args.out}.json")
    log.info("wrote %s.csv and %s.json (%d cells)", args.out, args.out,
             len(summary["perCellMeans"]))


def build_parser():
    p = _Parser(prog="lewisq", description="Lewis-weight sampling for quantile losses.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("lewis-weights", help="l_p Lewis weights of a Matrix Market matrix")
    s.add_argument("matrix")
    s.add_argument("--p", type=float, default=1.0)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lewis_weights)

    s = sub.add_parser("sample", help="rescaled Lewis-weight row sample for rho_tau")
    s.add_argument("matrix")
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--constant", type=float, default=DEFAULT_C)
    s.add_argument("--out", help="Matrix Market file for the sampled rows")
    s.add_argument("--report", help="JSON summary path (default stdout)")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("fit", help="sampled quantile regression on a CSV file")
    s.add_argument("csv")
    s.add_argument("--tau", type=float)
    s.add_argument("--tau-h", type=float, help="pinball-loss quantile, converted to tau")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=80, help="solver epochs")
    s.add_argument("--repeats", type=int, default=1)
    s.add_argument("--constant", type=float, default=DEFAULT_C)
    s.add_argument("--out")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("sparsify", help="cut sparsifier of a balanced digraph")
    s.add_argument("edgelist")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--alpha", type=float, help="balance bound (measured when omitted)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--constant", type=float, default=DEFAULT_C)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sparsify)

    s = sub.add_parser("verify-cuts", help="compare all directed cuts of two graphs")
    s.add_argument("g")
    s.add_argument("gp")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify_cuts)

    s = sub.add_parser("gen-synthetic", help="imbalanced synthetic regression data as CSV")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise-ratio", type=float, default=0.2)
    s.add_argument("--outlier-prob", type=float, default=0.001)
    s.add_argument("--outlier-scale", type=float, default=500.0)
    s.add_argument("--out", required=True)
    s.add_argument("--truth", help="JSON path for the ground-truth coefficients")
    s.set_defaults(func=cmd_gen_synthetic)

    s = sub.add_parser("experiment", help="Lewis vs uniform sampling comparison")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="output prefix; writes PREFIX.csv and PREFIX.json")
    s.add_argument("--force-n", action=argparse.BooleanOptionalAction, default=None,
                   help="allow Lewis sample sizes below the floor when epsilon is set "
                        "(overrides the config key)")
    s.set_defaults(func=cmd_experiment)
    return p


def _setup_logging():
    # Fresh handler per call so the current sys.stderr is used.
    for h in list(log.handlers):
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("lewisq: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    log.propagate = False


def main(argv=None):
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("lewisq: a subcommand is required (see --help)")
        if args.verbose:
            log.setLevel(logging.DEBUG)
        args.func(args)
    except UsageError as exc:
        print(str(exc).splitlines()[0], file=sys.stderr)
        return EXIT_USAGE
    except _NUMERIC as exc:
        print(f"lewisq: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (errors.LewisqError, ValueError, OSError) as exc:
        print(f"lewisq: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
