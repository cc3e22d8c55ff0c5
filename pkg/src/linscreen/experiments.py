"""Monte Carlo harness for SIS and HOLP screening consistency.

A trial is fully determined by ``(config, n, trial_index)``: the design, the
coefficients and the noise come from the seed paths
``(seed, (n, trial_index, 0|1|2))``. Sweeps fold results in
``(n, trial_index)`` order whatever the worker count, and pin BLAS to one
thread so every reduction runs in a fixed order.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import bounds as _bounds
from .conditions import (
    adversarial_beta,
    consistency_check,
    dom_necessary_check,
    ic_sign_enumeration,
    ic_worst_case,
    rdd_brute_force,
    rdd_check,
    rdd_max_c0,
    signed_rdd_margin,
    sparse_riesz,
)
from .errors import HypothesisViolated, SingularGram, ValidationError
from .model import assemble, standardize
from .randomdesign import (
    GENERATOR,
    CovarianceSpec,
    SeedPath,
    materialize,
    sample_beta,
    sample_design,
    sample_noise,
)
from .screeners import Method, build, estimate, noise_shift, screening_matrix

STREAM_DESIGN, STREAM_BETA, STREAM_NOISE = 0, 1, 2

DEFAULT_BOUND_CONSTANTS = {"K": 1.0, "Cprime": 1.0, "C": 1.0, "c0": 2.0, "delta": 0.05}


@dataclass(frozen=True)
class ExperimentConfig:
    p: int
    n_grid: tuple
    s: int
    tau: float = 1.0
    rho: float = 2.0
    sigma: float = 0.0
    covariance: str = "identity"
    replications: int = 100
    seed: int = 0
    methods: tuple = ("sis", "holp")
    check_rdd: bool = False
    rdd_p_limit: int = 500
    standardize: bool = False
    bound_constants: dict = field(default_factory=lambda: dict(DEFAULT_BOUND_CONSTANTS))

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "methods", tuple(Method(m).value for m in self.methods))
        consts = dict(DEFAULT_BOUND_CONSTANTS)
        consts.update(self.bound_constants or {})
        object.__setattr__(self, "bound_constants", consts)
        if self.replications < 1:
            raise ValidationError("replications must be at least 1")
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValidationError("n_grid must be non-empty and strictly increasing")
        if self.n_grid[0] < 1:
            raise ValidationError("sample sizes must be positive")
        if not self.methods:
            raise ValidationError("at least one method is required")
        if "holp" in self.methods and self.n_grid[-1] > self.p:
            raise ValidationError("HOLP needs n <= p for every n in the grid")
        if not (0 <= self.s <= self.p) or not self.tau > 0 or not self.rho >= 1 or self.sigma < 0:
            raise ValidationError("need 0 <= s <= p, tau > 0, rho >= 1, sigma >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_grid"] = list(self.n_grid)
        d["methods"] = list(self.methods)
        return d

    def covariance_spec(self) -> CovarianceSpec:
        return CovarianceSpec.parse(self.covariance, self.p)


@dataclass(frozen=True)
class MethodOutcome:
    strong: bool
    ordering_ok: bool
    signs_ok: bool
    separation: float
    error: str | None = None
    rdd: dict | None = None


@dataclass(frozen=True)
class TrialResult:
    trial: int
    n: int
    seed: dict
    methods: dict
    timing: float = field(default=0.0, compare=False)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "trial": self.trial,
            "n": self.n,
            "seed": self.seed,
            "methods": {m: asdict(o) for m, o in self.methods.items()},
        }
        if include_timing:
            d["timing"] = self.timing
        return d


def _failed(reason: str) -> MethodOutcome:
    return MethodOutcome(False, False, False, -math.inf, reason)


def run_trial(config: ExperimentConfig, n: int, trial_index: int, cov=None) -> TrialResult:
    """Sample one ``(X, beta, eps)`` and screen it with every configured method.

    A singular Gram matrix marks that method's trial as failed with the
    reason recorded instead of aborting.
    """
    start = time.perf_counter()
    cov = materialize(cov if cov is not None else config.covariance_spec())
    root = SeedPath(config.seed, (n, trial_index))
    x = sample_design(cov, n, root.child(STREAM_DESIGN))
    if config.standardize:
        x = standardize(x)
    beta = sample_beta(config.p, config.s, config.tau, config.rho, root.child(STREAM_BETA))
    eps = sample_noise(n, config.sigma, root.child(STREAM_NOISE))
    inst = assemble(x, beta, eps)

    outcomes = {}
    for method in config.methods:
        try:
            a = build(method, x)
        except SingularGram as exc:
            outcomes[method] = _failed(f"SingularGram: {exc}")
            continue
        verdict = consistency_check(estimate(a, inst.response), beta)
        rdd = None
        if config.check_rdd and config.p <= config.rdd_p_limit and 1 <= config.s <= config.p - 1:
            shift = noise_shift(a, eps, config.tau)
            phi = screening_matrix(a, x, shift)
            rdd = rdd_check(phi, config.s, config.rho).to_dict()
            rdd["shift"] = shift
        outcomes[method] = MethodOutcome(
            verdict.strong, verdict.ordering_ok, verdict.signs_ok, verdict.separation, None, rdd
        )
    return TrialResult(trial_index, n, root.to_dict(), outcomes, time.perf_counter() - start)


@dataclass(frozen=True)
class CellSummary:
    n: int
    method: str
    successes: int
    trials: int
    errors: int
    rate: float
    se: float
    rdd_checked: int = 0
    rdd_holds: int = 0
    rdd_margin_mean: float | None = None
    rdd_margin_median: float | None = None
    shifted_rdd_violations: int = 0


@dataclass(frozen=True)
class SweepSummary:
    config: ExperimentConfig
    cells: tuple
    bound_sis: float | None
    bound_holp: float | None
    bound_inputs: dict

    def cell(self, n: int, method: str) -> CellSummary:
        for c in self.cells:
            if c.n == n and c.method == method:
                return c
        raise KeyError((n, method))

    def rates(self, method: str) -> list:
        return [self.cell(n, method).rate for n in self.config.n_grid]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "generator": GENERATOR,
            "beta_distribution": "support uniform without replacement; |beta_i| ~ U[tau, rho*tau]; fair signs",
            "bound_sis": self.bound_sis,
            "bound_holp": self.bound_holp,
            "bound_inputs": self.bound_inputs,
            "cells": [asdict(c) for c in self.cells],
        }


def binomial_se(successes: int, trials: int) -> float:
    rate = successes / trials
    return math.sqrt(rate * (1.0 - rate) / trials)


def bound_values(config: ExperimentConfig, cov) -> tuple:
    """Evaluate both sample-size bounds at the configured constants.

    A bound whose hypothesis fails (for SIS, ``r >= 1/(2 rho s)``) is ``None``.
    """
    consts = config.bound_constants
    r = float(np.max(np.abs(cov.sigma - np.eye(cov.p))))
    inputs = dict(consts, r=r, kappa=cov.kappa, rho=config.rho, s=config.s,
                  sigma=config.sigma, tau=config.tau, p=config.p)
    try:
        sis = _bounds.sis_sample_bound(consts["K"], config.rho, config.s, config.sigma, config.tau,
                                       r, config.p, consts["delta"])
    except HypothesisViolated:
        sis = None
    try:
        holp = _bounds.holp_sample_bound(consts["Cprime"], cov.kappa, config.rho, config.s, config.sigma,
                                         config.tau, config.p, consts["delta"], consts["c0"], consts["C"])
    except ValidationError:
        holp = None
    return sis, holp, inputs


def summarize(config: ExperimentConfig, trials, cov) -> SweepSummary:
    by_cell = {}
    for t in trials:
        for method, outcome in t.methods.items():
            by_cell.setdefault((t.n, method), []).append(outcome)
    cells = []
    for n in config.n_grid:
        for method in config.methods:
            outs = by_cell.get((n, method), [])
            k = sum(o.strong for o in outs)
            margins = [o.rdd["margin"] for o in outs if o.rdd is not None]
            holds = [o for o in outs if o.rdd is not None and o.rdd["holds"]]
            cells.append(CellSummary(
                n=n,
                method=method,
                successes=k,
                trials=len(outs),
                errors=sum(o.error is not None for o in outs),
                rate=k / len(outs),
                se=binomial_se(k, len(outs)),
                rdd_checked=len(margins),
                rdd_holds=len(holds),
                rdd_margin_mean=float(np.mean(margins)) if margins else None,
                rdd_margin_median=float(np.median(margins)) if margins else None,
                shifted_rdd_violations=sum(not o.strong for o in holds),
            ))
    sis, holp, inputs = bound_values(config, cov)
    return SweepSummary(config, tuple(cells), sis, holp, inputs)


def run_trials(config: ExperimentConfig, threads: int = 1) -> list:
    """All trials of a sweep, in ``(n, trial_index)`` order."""
    cov = materialize(config.covariance_spec())
    cells = [(n, t) for n in config.n_grid for t in range(config.replications)]
    workers = threads if threads and threads > 0 else None
    with threadpool_limits(limits=1):
        if workers == 1:
            return [run_trial(config, n, t, cov) for n, t in cells]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda c: run_trial(config, c[0], c[1], cov), cells))


def sweep(config: ExperimentConfig, threads: int = 1):
    """Run every ``(n, trial)`` cell and aggregate. Returns ``(summary, trials)``."""
    trials = run_trials(config, threads)
    cov = materialize(config.covariance_spec())
    return summarize(config, trials, cov), trials


SUMMARY_COLUMNS = ("n", "method", "successes", "trials", "rate", "se", "bound_sis", "bound_holp")


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_summary_csv(summary: SweepSummary, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(SUMMARY_COLUMNS) + "\n")
        for c in summary.cells:
            row = (c.n, c.method, c.successes, c.trials, c.rate, c.se, summary.bound_sis, summary.bound_holp)
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_trials_jsonl(trials, path) -> None:
    from .io import dumps

    with open(path, "w") as fh:
        for t in trials:
            fh.write(dumps(t.to_dict()) + "\n")


def gnuplot_script(summary: SweepSummary, csv_name: str) -> str:
    lines = [
        "# success rate of strong screening consistency against sample size",
        f"# config: p={summary.config.p} s={summary.config.s} rho={summary.config.rho!r} "
        f"tau={summary.config.tau!r} sigma={summary.config.sigma!r} cov={summary.config.covariance} "
        f"reps={summary.config.replications} seed={summary.config.seed}",
        'set datafile separator ","',
        "set key top left",
        "set logscale x 2",
        'set xlabel "n"',
        'set ylabel "P(strong screening consistency)"',
        "set yrange [0:1.05]",
    ]
    plots = [
        f"'{csv_name}' every ::1 using 1:(strcol(2) eq \"{m}\" ? $5 : 1/0):6 with yerrorlines title \"{m.upper()}\""
        for m in summary.config.methods
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def concentration_probe(cov, n_list, replications: int, seed: int, sigma: float = 1.0) -> list:
    """Empirical entry sizes of the SIS and HOLP screening matrices.

    Per ``n`` (medians over replications): ``sis_max_dev`` = max |Phi - Sigma|
    for SIS; ``holp_diag``/``holp_offdiag`` = median diagonal and median
    absolute off-diagonal of the HOLP ``Phi`` (only when ``n < p``);
    ``sis_eta_max``/``holp_eta_max`` = max |A eps|.
    """
    cov = materialize(cov)
    p = cov.p
    upper = np.triu_indices(p, 1)
    rows = []
    with threadpool_limits(limits=1):
        for n in n_list:
            acc = {k: [] for k in ("sis_max_dev", "sis_eta_max", "holp_diag", "holp_offdiag", "holp_eta_max")}
            for rep in range(replications):
                root = SeedPath(seed, (n, rep))
                x = sample_design(cov, n, root.child(STREAM_DESIGN))
                eps = sample_noise(n, sigma, root.child(STREAM_NOISE))
                a = build("sis", x)
                phi = screening_matrix(a, x).values
                acc["sis_max_dev"].append(float(np.max(np.abs(phi - cov.sigma))))
                acc["sis_eta_max"].append(float(np.max(np.abs(a.values @ eps))))
                if n < p:
                    a = build("holp", x)
                    phi = screening_matrix(a, x).values
                    acc["holp_diag"].append(float(np.median(np.diag(phi))))
                    acc["holp_offdiag"].append(float(np.median(np.abs(phi[upper]))))
                    acc["holp_eta_max"].append(float(np.max(np.abs(a.values @ eps))))
            row = {"n": n, "p": p}
            row.update({k: float(np.median(v)) if v else None for k, v in acc.items()})
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# matrix constructions and checks used by the theorem suite


def random_offdiag(rng: np.random.Generator, p: int) -> np.ndarray:
    """Symmetric matrix with zero diagonal and U[-1, 1] upper-triangle entries."""
    b = np.triu(rng.uniform(-1.0, 1.0, (p, p)), 1)
    return b + b.T


def random_symmetric(rng: np.random.Generator, p: int) -> np.ndarray:
    """Symmetric U[-1, 1] entries with the diagonal shifted by +1."""
    b = np.triu(rng.uniform(-1.0, 1.0, (p, p)))
    return b + np.triu(b, 1).T + np.eye(p)


def rdd_threshold_scale(offdiag: np.ndarray, s: int, c0: float, iters: int = 60) -> float:
    """Supremum of ``t`` for which ``I + t * offdiag`` is RDD, by bisection."""
    p = offdiag.shape[0]
    eye = np.eye(p)
    hi = 1.0
    while rdd_check(eye + hi * offdiag, s, c0).holds:
        hi *= 2.0
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if rdd_check(eye + mid * offdiag, s, c0).holds:
            lo = mid
        else:
            hi = mid
    return lo


def passing_rdd_matrix(rng, p: int, s: int, c0: float) -> np.ndarray:
    """Unit-diagonal matrix whose off-diagonals are halved until RDD holds."""
    b = random_offdiag(rng, p)
    t = 1.0
    while not rdd_check(np.eye(p) + t * b, s, c0).holds:
        t *= 0.5
    return np.eye(p) + t * b


def failing_rdd_matrix(rng, p: int, s: int, c0: float, factor: float = 2.0) -> np.ndarray:
    """Unit-diagonal matrix with off-diagonals at ``factor`` times the RDD threshold."""
    b = random_offdiag(rng, p)
    return np.eye(p) + factor * rdd_threshold_scale(b, s, c0) * b


def sample_beta_ball(rng, p: int, s: int, rho: float, tau: float = 1.0):
    """Coefficients with sparsity drawn from 1..s, to cover the whole class."""
    k = int(rng.integers(1, s + 1))
    return sample_beta(p, k, tau, rho, rng)


def check_rdd_oracle(rng, matrices=200, p=12, sparsities=(2, 3, 4), c0s=(1.0, 1.5, 2.0)) -> dict:
    cells = agree = 0
    bad = []
    for m_idx in range(matrices):
        phi = random_symmetric(rng, p)
        for s in sparsities:
            fast_c0 = rdd_max_c0(phi, s)
            for c0 in c0s:
                fast = rdd_check(phi, s, c0)
                slow = rdd_brute_force(phi, s, c0)
                ok = fast.holds == slow.holds and _c0_close(fast.c0_max, slow.c0_max) and _c0_close(
                    fast_c0, slow.c0_max
                )
                cells += 1
                agree += ok
                if not ok and len(bad) < 5:
                    bad.append({"matrix": m_idx, "s": s, "c0": c0, "fast": fast.to_dict(), "brute": slow.to_dict()})
    return {"passed": agree, "total": cells, "counterexamples": bad}


def _c0_close(a: float, b: float, tol: float = 1e-9) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def check_noiseless_sufficiency(rng, matrices=50, p=12, s=3, rho=2.0, draws=1000) -> dict:
    failures = 0
    bad = []
    for m_idx in range(matrices):
        phi = passing_rdd_matrix(rng, p, s, rho)
        for _ in range(draws):
            beta = sample_beta_ball(rng, p, s, rho)
            if not consistency_check(phi @ beta.dense(), beta).strong:
                failures += 1
                if len(bad) < 5:
                    bad.append({"matrix": m_idx, "support": list(beta.support), "values": list(beta.values)})
    return {"passed": matrices * draws - failures, "total": matrices * draws, "counterexamples": bad}


def check_noiseless_necessity(rng, matrices=50, p=12, s=3, rho=2.0, factor=2.0) -> dict:
    broken = 0
    bad = []
    for m_idx in range(matrices):
        phi = failing_rdd_matrix(rng, p, s, rho, factor)
        rep = rdd_check(phi, s, rho)
        w = rep.witness
        hit = not rep.holds and any(
            not consistency_check(phi @ b.dense(), b).strong for b in adversarial_beta(phi, w.i, w.k, w.I, rho)
        )
        broken += hit
        if not hit and len(bad) < 5:
            bad.append({"matrix": m_idx, "report": rep.to_dict(), "signed_margin": signed_rdd_margin(phi, s, rho)})
    return {"passed": broken, "total": matrices, "counterexamples": bad}


def check_ic_enumeration(rng, matrices=100, p=10, sparsities=range(2, 9), n=30) -> dict:
    agree = total = 0
    worst_diff = 0.0
    for _ in range(matrices):
        z = rng.standard_normal((n, p))
        gram = z.T @ z / n
        for s in sparsities:
            support = tuple(sorted(rng.choice(p, s, replace=False).tolist()))
            diff = abs(ic_worst_case(gram, support).value - ic_sign_enumeration(gram, support))
            worst_diff = max(worst_diff, diff)
            agree += diff <= 1e-12
            total += 1
    return {"passed": agree, "total": total, "max_abs_diff": worst_diff, "counterexamples": []}


def check_rdd_implies_dom(rng, matrices=200, p=10, s=3, c0=1.5) -> dict:
    tested = ok = 0
    for _ in range(matrices):
        phi = np.eye(p) + rng.uniform(0.02, 0.6) * random_offdiag(rng, p)
        if rdd_check(phi, s, c0).holds:
            tested += 1
            ok += dom_necessary_check(phi, s, c0)
    return {"passed": ok, "total": tested, "counterexamples": []}


def check_shifted_sufficiency(rng, trials=20, p=10, n=2000, s=2, rho=1.5, tau=1.0, sigma=0.1, draws=200) -> dict:
    """Fixed noisy design: RDD on the shifted matrix implies consistency for all sampled beta."""
    tested = ok = 0
    bad = []
    for t in range(trials):
        x = sample_design(materialize(CovarianceSpec("identity", p)), n, rng)
        eps = sample_noise(n, sigma, rng)
        for method in ("sis", "holp") if n <= p else ("sis",):
            a = build(method, x)
            phi = screening_matrix(a, x, noise_shift(a, eps, tau))
            if not rdd_check(phi, s, rho).holds:
                continue
            tested += 1
            fails = 0
            for _ in range(draws):
                beta = sample_beta_ball(rng, p, s, rho, tau)
                y = assemble(x, beta, eps).response
                fails += not consistency_check(estimate(a, y), beta).strong
            ok += fails == 0
            if fails and len(bad) < 5:
                bad.append({"trial": t, "method": method, "failures": fails})
    return {"passed": ok, "total": tested, "counterexamples": bad}


def check_rdd_ic_link(rng, matrices=100, p=8, rhos=(1.0, 1.5, 2.0, 3.0)) -> dict:
    """RDD(2, rho) with unit diagonal bounds the sign-uniform IC by ``rho^-1 / (1 - r)``,
    and the IC margin bounds ``c0_max`` from below."""
    tested = ok = 0
    bad = []
    for m_idx in range(matrices):
        rho = float(rhos[m_idx % len(rhos)])
        phi = passing_rdd_matrix(rng, p, 2, rho)
        off = np.abs(phi - np.eye(p))
        r = float(np.max(off)) * (1.0 + 1e-12) + 1e-15
        supports = list(itertools.combinations(range(p), 2))
        values = [ic_worst_case(phi, S).value for S in supports]
        fwd = max(values) <= (1.0 / rho) / (1.0 - r) + 1e-9
        # converse: theta is the largest level at which the IC holds on every pair
        theta = 1.0 - max(values)
        conv = not 0.0 < theta < 1.0 or rdd_max_c0(phi, 2) >= (1.0 - r) / ((1.0 - theta) * (1.0 + r)) - 1e-12
        tested += 1
        ok += fwd and conv
        if not (fwd and conv) and len(bad) < 5:
            bad.append({"matrix": m_idx, "rho": rho, "ic_max": max(values), "forward": fwd, "converse": conv})
    return {"passed": ok, "total": tested, "counterexamples": bad}


def check_riesz_ic(rng, designs=40, n=400, p=8, s=2) -> dict:
    tested = ok = 0
    bad = []
    for d_idx in range(designs):
        x = standardize(rng.standard_normal((n, p)))
        mu = sparse_riesz(x, s)
        rho = max(1.0, 1.01 * math.sqrt(s) / mu)
        gram = x.values.T @ x.values / n
        if not rdd_check(gram, s + 1, rho).holds:
            continue
        tested += 1
        worst = max(ic_worst_case(gram, S).value for S in itertools.combinations(range(p), s))
        ok += worst < 1.0
        if worst >= 1.0 and len(bad) < 5:
            bad.append({"design": d_idx, "mu": mu, "rho": rho, "ic_max": worst})
    return {"passed": ok, "total": tested, "counterexamples": bad}


def theorem_suite(seed: int, sizes: dict | None = None) -> dict:
    """Run the deterministic-condition property checks on seeded random matrices.

    ``sizes`` overrides per-check counts, e.g. ``{"rdd_oracle": {"matrices": 20}}``.
    Each entry reports ``passed``/``total`` and up to five counterexamples.
    """
    sizes = sizes or {}
    checks = {
        "rdd_oracle": check_rdd_oracle,
        "noiseless_sufficiency": check_noiseless_sufficiency,
        "noiseless_necessity": check_noiseless_necessity,
        "ic_enumeration": check_ic_enumeration,
        "rdd_implies_dom": check_rdd_implies_dom,
        "shifted_sufficiency": check_shifted_sufficiency,
        "rdd_ic_link": check_rdd_ic_link,
        "riesz_ic": check_riesz_ic,
    }
    report = {"seed": seed, "generator": GENERATOR, "checks": {}}
    for k, (name, fn) in enumerate(checks.items()):
        rng = SeedPath(seed, (k,)).rng()
        result = fn(rng, **sizes.get(name, {}))
        result["ok"] = result["passed"] == result["total"]
        report["checks"][name] = result
    report["ok"] = all(c["ok"] for c in report["checks"].values())
    return report
