"""Command-line entry point: ``linscreen <subcommand>``.

Exit status is 0 on success, 2 on validation errors (bad flags or files,
dimension mismatches, violated hypotheses) and 3 on numerical failures
(singular Gram matrices, covariances that are not positive definite).
Structured output goes to files; only ``bounds`` prints to stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import io
from .bounds import bound_from_params
from .conditions import ic_check, ic_worst_case, rdd_brute_force, rdd_check
from .errors import NumericalError, ValidationError
from .experiments import (
    ExperimentConfig,
    gnuplot_script,
    run_trials,
    summarize,
    write_summary_csv,
    write_trials_jsonl,
)
from .model import DesignMatrix, assemble, standardize
from .randomdesign import GENERATOR, CovarianceSpec, SeedPath, materialize, sample_beta, sample_design, sample_noise
from .screeners import ScreeningMatrix, Threshold, TopD, build, estimate, select

log = logging.getLogger("linscreen")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def cmd_gen(args) -> None:
    spec = CovarianceSpec.parse(args.cov, args.p)
    cov = materialize(spec)
    root = SeedPath(args.seed)
    x = sample_design(cov, args.n, root.child(0))
    beta = sample_beta(args.p, args.s, args.tau, args.rho, root.child(1))
    eps = sample_noise(args.n, args.sigma, root.child(2))
    inst = assemble(x, beta, eps)
    prefix = args.out_prefix
    io.write_matrix(f"{prefix}_x.csv", x.values)
    io.write_coefficients(f"{prefix}_beta.csv", beta)
    io.write_matrix(f"{prefix}_y.csv", inst.response)
    io.write_json(f"{prefix}_meta.json", {
        "params": {"p": args.p, "n": args.n, "cov": args.cov, "s": args.s, "tau": args.tau,
                   "rho": args.rho, "sigma": args.sigma, "seed": args.seed},
        "seed_paths": {"design": root.child(0).to_dict(), "beta": root.child(1).to_dict(),
                       "noise": root.child(2).to_dict()},
        "kappa": cov.kappa,
        "generator": GENERATOR,
        "beta_distribution": "support uniform without replacement; |beta_i| ~ U[tau, rho*tau]; fair signs",
    })
    log.info("wrote %s_{x,beta,y}.csv and %s_meta.json", prefix, prefix)


def cmd_screen(args) -> None:
    x = DesignMatrix(io.read_matrix(args.x))
    y = io.read_vector(args.y)
    if args.standardize:
        x = standardize(x)
    a = build(args.method, x)
    est = estimate(a, y)
    rule = TopD(args.top_d) if args.top_d is not None else Threshold(args.gamma)
    sub = select(est, rule)
    out = {
        "method": args.method,
        "rule": {"top_d": args.top_d} if isinstance(rule, TopD) else {"gamma": args.gamma},
        "indices": [i + 1 for i in sub.indices],
        "params": {"x": args.x, "y": args.y, "standardize": args.standardize},
    }
    if args.emit_estimates:
        out["estimates"] = est
    io.write_json(args.out, out)


def cmd_check_rdd(args) -> None:
    phi = ScreeningMatrix(io.read_matrix(args.phi), args.shift)
    fn = rdd_brute_force if args.brute_force else rdd_check
    report = fn(phi, args.s, args.c0).to_dict()
    report["params"] = {"phi": args.phi, "s": args.s, "c0": args.c0, "shift": args.shift,
                        "brute_force": args.brute_force}
    io.write_json(args.out, report)


def _parse_indices(text: str) -> list:
    try:
        idx = [int(t) - 1 for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse index list {text!r}") from None
    if any(i < 0 for i in idx):
        raise ValidationError("indices are 1-based")
    return idx


def _parse_signs(text: str) -> list:
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    try:
        return [table[t.strip()] for t in text.split(",")]
    except KeyError as exc:
        raise ValidationError(f"bad sign {exc.args[0]!r}; use + or -") from None


def cmd_check_ic(args) -> None:
    gram = io.read_matrix(args.gram)
    support = _parse_indices(args.support)
    if args.worst_case:
        report = ic_worst_case(gram, support, args.theta)
    else:
        report = ic_check(gram, support, _parse_signs(args.signs), args.theta)
    out = report.to_dict()
    out["params"] = {"gram": args.gram, "support": args.support, "signs": args.signs,
                     "worst_case": args.worst_case, "theta": args.theta}
    io.write_json(args.out, out)


def cmd_bounds(args) -> None:
    params = io.read_json(args.params)
    if not isinstance(params, dict):
        raise ValidationError("params file must hold a JSON object")
    print(repr(bound_from_params(args.method, params)))


def _load_config(args) -> ExperimentConfig:
    d = io.read_json(args.config)
    if not isinstance(d, dict):
        raise ValidationError("config file must hold a JSON object")
    if args.seed is not None:
        d["seed"] = args.seed
    if "seed" not in d:
        raise ValidationError("an explicit seed is required (config 'seed' or --seed)")
    return ExperimentConfig.from_dict(d)


def _write_meta(path, config: ExperimentConfig, extra=None) -> None:
    meta = {"config": config.to_dict(), "generator": GENERATOR}
    meta.update(extra or {})
    io.write_json(f"{path}.meta.json", meta)


def cmd_simulate(args) -> None:
    config = _load_config(args)
    trials = run_trials(config, args.threads)
    write_trials_jsonl(trials, args.out)
    _write_meta(args.out, config)


def cmd_sweep(args) -> None:
    config = _load_config(args)
    trials = run_trials(config, args.threads)
    summary = summarize(config, trials, materialize(config.covariance_spec()))
    write_summary_csv(summary, args.out)
    _write_meta(args.out, config, {"summary": summary.to_dict()})
    if args.trials:
        write_trials_jsonl(trials, args.trials)
        _write_meta(args.trials, config)
    if args.emit_gnuplot:
        with open(args.emit_gnuplot, "w") as fh:
            fh.write(gnuplot_script(summary, args.out))


def cmd_theorems(args) -> None:
    from .experiments import theorem_suite

    sizes = io.read_json(args.sizes) if args.sizes else None
    report = theorem_suite(args.seed, sizes)
    io.write_json(args.out, report)
    if not report["ok"]:
        log.warning("some theorem checks failed; see %s", args.out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linscreen", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1, help="worker threads for simulate/sweep (0 = auto)")
    ap.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a Gaussian regression instance")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cov", default="identity", help="identity | equi:R | ar1:R | custom:file.csv")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("screen", help="run SIS or HOLP and select a submodel")
    p.add_argument("--x", required=True, help="design CSV (n rows, p columns)")
    p.add_argument("--y", required=True, help="response CSV (one value per line)")
    p.add_argument("--method", choices=("sis", "holp"), required=True)
    p.add_argument("--standardize", action="store_true")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--top-d", type=int)
    g.add_argument("--gamma", type=float)
    p.add_argument("--emit-estimates", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("check-rdd", help="test restricted diagonal dominance of a matrix")
    p.add_argument("--phi", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--shift", type=float, default=0.0, help="subtract SHIFT from the diagonal first")
    p.add_argument("--brute-force", action="store_true", help="enumerate every subset (small p only)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_check_rdd)

    p = sub.add_parser("check-ic", help="evaluate the irrepresentable condition")
    p.add_argument("--gram", required=True)
    p.add_argument("--support", required=True, help="1-based indices, e.g. 1,4,7")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--signs", help="signs matching --support, e.g. +,-,+")
    g.add_argument("--worst-case", action="store_true")
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_check_ic)

    p = sub.add_parser("bounds", help="print a sample-size bound")
    p.add_argument("--method", choices=("sis", "holp"), required=True)
    p.add_argument("--params", required=True, help="JSON object of bound parameters")
    p.set_defaults(func=cmd_bounds)

    for name, func, help_ in (("simulate", cmd_simulate, "run trials, one JSON line each"),
                              ("sweep", cmd_sweep, "run trials and write a summary table")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=_seed, default=None, help="override the config seed")
        p.add_argument("--out", required=True)
        if name == "sweep":
            p.add_argument("--emit-gnuplot", default=None, metavar="FILE")
            p.add_argument("--trials", default=None, metavar="FILE", help="also write per-trial JSON lines")
        p.set_defaults(func=func)

    p = sub.add_parser("theorems", help="run the property checks on seeded random matrices")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--sizes", default=None, help="JSON overrides of per-check sizes")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_theorems)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except NumericalError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 3
    except (ValidationError, OSError, json.JSONDecodeError, TypeError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2
    except np.linalg.LinAlgError as exc:
        log.error("LinAlgError: %s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
