"""Experiment driver: sweeps over system parameters, CSV out.

Every subcommand shares one flat output schema so downstream tooling can
parse any result file the same way.  Rows are written in grid order, one
sum-rate (or MSE, ratio, power) observation per row, with per-user rows
alongside the aggregate where applicable.  A manifest file next to each CSV
records the resolved configuration, a hash of it, and wall time per grid
point.

Configuration is flat key=value, either in a file passed with --config or
as trailing command-line overrides (overrides win).  Any power accepts a
"dB" suffix and is converted to linear scale once at parse time:

    onebit-relay rate-vs-m M=64:512:64 K=10 p_R=10dB trials=500 out=results
"""
from __future__ import annotations

import csv
import hashlib
import sys
import time
from argparse import ArgumentParser
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .channel import SystemConfig, generate_channels
from .estimation import build_pilot, compare_pilots, estimate_from_pilots, estimation_stats
from .numerics import SingularMatrixError, complex_gaussian, make_rng
from .power_alloc import (
    GpConvergenceError,
    GpInfeasibleError,
    GpProblem,
    Posynomial,
    solve_gp,
    successive_approx,
    uniform_allocation,
)
from .quantizer import backend_name, one_bit_quantize, quantizer_stats
from .rate_closed import (
    ALL_CASES,
    IDEAL,
    ONE_BIT,
    ONE_BIT_ADC,
    ONE_BIT_DAC,
    HardwareCase,
    InfeasibleTargetError,
    closed_form_rate,
    rate_ordering_check,
    rate_ratios,
    required_antennas,
    required_power,
)
from .relay_mc import approx_rate_mc, exact_rate_mc, relay_chain_once

COLUMNS = [
    "experiment", "x_name", "x_value", "series", "hw_case", "method", "user",
    "value_name", "value", "std_err", "M", "K", "tau_c", "tau_p",
    "p_p", "p_S", "p_R", "P_T", "pilot", "trials", "seed",
]

CONFIG_KEYS = {
    "M", "K", "beta_SR", "beta_RD", "p_p", "p_S", "p_R", "tau_c", "tau_p", "pilot",
}
COMMON_KEYS = {"grid", "trials", "seed", "out", "workers", "beta"}

_CASES_BY_LABEL = {c.label: c for c in ALL_CASES}


class CliError(Exception):
    """Bad invocation or configuration; maps to exit code 1."""

    exit_code = 1


class NumericalError(Exception):
    """A computation failed to produce usable numbers; exit code 2."""

    exit_code = 2


# ---------------------------------------------------------------------------
# value parsing

def parse_scalar(text) -> float:
    """Parse a number, converting a trailing dB suffix to linear scale."""
    t = str(text).strip()
    if t.lower().endswith("db"):
        return float(10.0 ** (float(t[:-2]) / 10.0))
    return float(t)


def parse_vector(text) -> np.ndarray:
    return np.array([parse_scalar(p) for p in str(text).split(",") if p.strip()])


def parse_grid(text) -> list[float]:
    """Comma list or inclusive start:stop:step range, dB-aware.

    A range is expanded before dB conversion, so "0dB:30dB:5dB" yields seven
    logarithmically spaced powers.
    """
    t = str(text).strip()
    if ":" in t:
        parts = [p.strip() for p in t.split(":")]
        if len(parts) != 3:
            raise CliError(f"grid range must be start:stop:step, got {text!r}")
        in_db = any(p.lower().endswith("db") for p in parts)
        nums = [float(p[:-2]) if p.lower().endswith("db") else float(p) for p in parts]
        start, stop, step = nums
        if step <= 0 or stop < start:
            raise CliError(f"grid range {text!r} is empty")
        vals = np.arange(start, stop + 0.5 * step, step)
        if in_db:
            vals = 10.0 ** (vals / 10.0)
        return [float(v) for v in vals]
    vals = [parse_scalar(p) for p in t.split(",") if p.strip()]
    if not vals:
        raise CliError("grid is empty")
    return vals


def parse_case(label: str) -> HardwareCase:
    up = str(label).strip().upper()
    if up not in _CASES_BY_LABEL:
        raise CliError(f"unknown hardware case {label!r}; use I, II, III, or IV")
    return _CASES_BY_LABEL[up]


def read_config_file(path: str) -> dict:
    entries = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise CliError(f"cannot read config file {path}: {err}") from err
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


# ---------------------------------------------------------------------------
# experiment plumbing

@dataclass
class ExperimentSpec:
    """A resolved experiment: sweep grid, base system, bookkeeping."""

    experiment: str
    grid: list[float]
    base: SystemConfig
    trials: int
    seed: int
    out: Path
    workers: int
    options: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _merge_options(experiment: str, defaults: dict, config_file: str | None,
                   overrides: list[str]) -> dict:
    merged = dict(defaults)
    if config_file:
        merged.update(read_config_file(config_file))
    allowed = CONFIG_KEYS | COMMON_KEYS | set(defaults)
    for item in overrides:
        if "=" not in item:
            raise CliError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in allowed:
            raise CliError(
                f"unknown key {key!r} for {experiment}; "
                f"valid keys: {', '.join(sorted(allowed))}"
            )
        merged[key] = value.strip()
    return merged


def _resolve_spec(experiment: str, merged: dict) -> ExperimentSpec:
    grid = parse_grid(merged["grid"]) if "grid" in merged else [0.0]
    trials = int(merged.get("trials", 0))
    seed = int(merged.get("seed", 0))
    workers = int(merged.get("workers", 4))
    out = Path(str(merged.get("out", "results")))
    if trials < 0:
        raise CliError("trials must be nonnegative")
    if workers < 1:
        raise CliError("workers must be at least 1")
    base = _make_config(merged)
    options = {k: merged[k] for k in merged
               if k not in CONFIG_KEYS | COMMON_KEYS}
    return ExperimentSpec(
        experiment=experiment, grid=grid, base=base, trials=trials,
        seed=seed, out=out, workers=workers, options=options, raw=dict(merged),
    )


def _make_config(merged: dict, *, M: int | None = None, K: int | None = None) -> SystemConfig:
    """Build a system config from merged options, with optional sweeps.

    beta_SR/beta_RD default to a constant fill (the `beta` key) matching K,
    so sweeps over the user count stay well-formed.
    """
    K = int(parse_scalar(merged.get("K", 5))) if K is None else int(K)
    M = int(parse_scalar(merged.get("M", 128))) if M is None else int(M)
    fill = parse_scalar(merged.get("beta", 1.0))
    beta_SR = parse_vector(merged["beta_SR"]) if merged.get("beta_SR") else np.full(K, fill)
    beta_RD = parse_vector(merged["beta_RD"]) if merged.get("beta_RD") else np.full(K, fill)
    if beta_SR.size != K:
        raise CliError(f"beta_SR has {beta_SR.size} entries but K={K}")
    if beta_RD.size != K:
        raise CliError(f"beta_RD has {beta_RD.size} entries but K={K}")
    p_S = merged.get("p_S", 1.0)
    p_S = parse_vector(p_S) if "," in str(p_S) else parse_scalar(p_S)
    tau_p = merged.get("tau_p")
    try:
        return SystemConfig(
            M=M, K=K, beta_SR=beta_SR, beta_RD=beta_RD,
            p_p=parse_scalar(merged.get("p_p", 10.0)),
            p_S=p_S,
            p_R=parse_scalar(merged.get("p_R", 1.0)),
            tau_c=int(parse_scalar(merged.get("tau_c", 200))),
            tau_p=None if tau_p in (None, "") else int(parse_scalar(tau_p)),
            pilot_kind=str(merged.get("pilot", "identity")),
        )
    except ValueError as err:
        raise CliError(str(err)) from err


def _row(spec: ExperimentSpec, cfg: SystemConfig | None = None, **kw) -> dict:
    row = {c: "" for c in COLUMNS}
    row["experiment"] = spec.experiment
    if cfg is not None:
        p_S = np.atleast_1d(cfg.p_S)
        row.update(
            M=cfg.M, K=cfg.K, tau_c=cfg.tau_c, tau_p=cfg.tau_p,
            p_p=cfg.p_p, p_R=cfg.p_R, pilot=cfg.pilot_kind,
            p_S=float(p_S[0]) if np.all(p_S == p_S[0]) else "",
        )
    row.update(kw)
    return row


def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12g" % float(v)
    return str(v)


def _write_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in COLUMNS])


def _write_manifest(spec: ExperimentSpec, csv_name: str,
                    point_times: list[tuple[str, float]]) -> None:
    cfg_lines = [f"cfg_{k}={spec.raw[k]}" for k in sorted(spec.raw)]
    digest = hashlib.sha256("\n".join(cfg_lines).encode("utf-8")).hexdigest()
    lines = [
        f"experiment={spec.experiment}",
        f"version={__version__}",
        f"backend={backend_name()}",
        f"seed={spec.seed}",
        f"trials={spec.trials}",
        f"config_hash={digest}",
        f"csv={csv_name}",
        f"points={len(point_times)}",
    ]
    for i, (label, secs) in enumerate(point_times):
        lines.append(f"point_{i}_x={label}")
        lines.append(f"point_{i}_seconds={secs:.3f}")
    lines.append(f"total_seconds={sum(t for _, t in point_times):.3f}")
    lines.extend(cfg_lines)
    path = spec.out / f"{spec.experiment}.manifest.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _collect(spec: ExperimentSpec, worker) -> tuple[list[dict], list[tuple[str, float]]]:
    """Run the per-point worker over the grid, collecting in grid order."""

    def timed(i: int):
        t0 = time.perf_counter()
        rows = worker(i, spec.grid[i])
        return rows, time.perf_counter() - t0

    n = len(spec.grid)
    if spec.workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=min(spec.workers, n)) as pool:
            results = list(pool.map(timed, range(n)))
    else:
        results = [timed(i) for i in range(n)]
    rows = [row for point_rows, _ in results for row in point_rows]
    times = [("%.12g" % spec.grid[i], results[i][1]) for i in range(n)]
    for row in rows:
        v = row.get("value")
        if isinstance(v, (float, np.floating)) and not np.isfinite(v):
            raise NumericalError(
                f"non-finite value in {spec.experiment} at "
                f"{row['x_name']}={row['x_value']}"
            )
    return rows, times


def _finish(spec: ExperimentSpec, rows, times) -> int:
    spec.out.mkdir(parents=True, exist_ok=True)
    csv_name = f"{spec.experiment}.csv"
    _write_csv(spec.out / csv_name, rows)
    _write_manifest(spec, csv_name, times)
    print(f"{spec.experiment}: {len(rows)} rows over {len(times)} grid points "
          f"-> {spec.out / csv_name}")
    return 0


def _mc_rows(spec, cfg, report, *, x_name, x_value, method, series="") -> list[dict]:
    """Per-user and sum rows for one Monte-Carlo (or closed-form) report."""
    common = dict(x_name=x_name, x_value=x_value, series=series,
                  hw_case=report.hw_case.label, method=method,
                  value_name="rate", seed=spec.seed)
    if report.trials:
        common["trials"] = report.trials
    rows = []
    se = report.std_err if report.std_err is not None else np.zeros(cfg.K)
    for k in range(cfg.K):
        rows.append(_row(spec, cfg, **common, user=k + 1,
                         value=report.per_user_rate[k],
                         std_err=se[k] if report.trials else ""))
    total = dict(common, value_name="sum_rate", value=report.sum_rate,
                 std_err=float(np.sqrt(np.sum(se**2))) if report.trials else "")
    rows.append(_row(spec, cfg, **total))
    return rows


# ---------------------------------------------------------------------------
# experiments

def run_mse_vs_pp(spec: ExperimentSpec) -> int:
    cfg = spec.base
    kinds = ["identity"]
    if cfg.K & (cfg.K - 1) == 0:
        kinds.append("hadamard")

    def worker(i: int, p_p: float) -> list[dict]:
        rows = []
        for kind in kinds:
            stats = estimation_stats(kind, cfg.beta_SR, cfg.K, p_p)
            for k in range(cfg.K):
                rows.append(_row(
                    spec, cfg, x_name="p_p", x_value=p_p, p_p=p_p,
                    series=kind, method="closed", user=k + 1,
                    value_name="mse", value=stats.mse[k],
                ))
            if spec.trials:
                mse, se = _pipeline_mse(cfg, kind, p_p, spec.trials,
                                        make_rng(spec.seed, stream=i))
                for k in range(cfg.K):
                    rows.append(_row(
                        spec, cfg, x_name="p_p", x_value=p_p, p_p=p_p,
                        series=kind, method="mc", user=k + 1,
                        value_name="mse", value=mse[k], std_err=se[k],
                        trials=spec.trials, seed=spec.seed,
                    ))
        return rows

    rows, times = _collect(spec, worker)
    return _finish(spec, rows, times)


def _pipeline_mse(cfg, kind, p_p, trials, rng):
    """Empirical estimation MSE through the quantized pilot pipeline."""
    pilot = build_pilot(kind, cfg.K)
    scale = np.sqrt(cfg.beta_SR)
    per_trial = np.empty((trials, cfg.K))
    for t in range(trials):
        G = complex_gaussian(rng, (cfg.M, cfg.K)) * scale[np.newaxis, :]
        N = complex_gaussian(rng, (cfg.M, cfg.K))
        Y = np.sqrt(p_p) * G @ pilot.T + N
        Ghat = estimate_from_pilots(Y, pilot, cfg.beta_SR, p_p)
        per_trial[t] = np.mean(np.abs(Ghat - G) ** 2, axis=0)
    return per_trial.mean(axis=0), per_trial.std(axis=0, ddof=1) / np.sqrt(trials)


def _methods(spec: ExperimentSpec) -> list[str]:
    methods = [m.strip() for m in str(spec.options.get("methods", "")).split(",") if m.strip()]
    for m in methods:
        if m not in ("closed", "approx", "exact"):
            raise CliError(f"unknown method {m!r}; use closed, approx, exact")
    return methods


def run_rate_vs_k(spec: ExperimentSpec) -> int:
    case = parse_case(spec.options.get("case", "IV"))
    methods = _methods(spec)

    def worker(i: int, x: float) -> list[dict]:
        K = int(round(x))
        cfg = _make_config(spec.raw, K=K)
        rows = []
        if "closed" in methods:
            rep = closed_form_rate(cfg, case)
            rows += _mc_rows(spec, cfg, rep, x_name="K", x_value=K, method="closed")
        if "approx" in methods:
            rep = approx_rate_mc(cfg, spec.trials, make_rng(spec.seed, stream=4 * i + 1))
            rows += _mc_rows(spec, cfg, rep, x_name="K", x_value=K, method="approx")
        if "exact" in methods:
            rep = exact_rate_mc(cfg, spec.trials, make_rng(spec.seed, stream=4 * i + 2))
            rows += _mc_rows(spec, cfg, rep, x_name="K", x_value=K, method="exact")
        return rows

    rows, times = _collect(spec, worker)
    return _finish(spec, rows, times)


def run_rate_vs_m(spec: ExperimentSpec) -> int:
    case = parse_case(spec.options.get("case", "IV"))
    methods = _methods(spec)
    k_ratio = float(spec.options.get("k_ratio", 0.0))

    def worker(i: int, x: float) -> list[dict]:
        M = int(round(x))
        K = max(1, int(round(k_ratio * M))) if k_ratio > 0 else None
        cfg = _make_config(spec.raw, M=M, K=K)
        rows = []
        if "closed" in methods:
            rep = closed_form_rate(cfg, case)
            rows += _mc_rows(spec, cfg, rep, x_name="M", x_value=M, method="closed")
        if "approx" in methods:
            rep = approx_rate_mc(cfg, spec.trials, make_rng(spec.seed, stream=4 * i + 1))
            rows += _mc_rows(spec, cfg, rep, x_name="M", x_value=M, method="approx")
        if "exact" in methods:
            rep = exact_rate_mc(cfg, spec.trials, make_rng(spec.seed, stream=4 * i + 2))
            rows += _mc_rows(spec, cfg, rep, x_name="M", x_value=M, method="exact")
        return rows

    rows, times = _collect(spec, worker)
    return _finish(spec, rows, times)


def run_required_power(spec: ExperimentSpec) -> int:
    target = float(spec.options.get("target", 5.0))
    which = str(spec.options.get("which", "source"))
    if which not in ("source", "relay"):
        raise CliError(f"which must be source or relay, got {which!r}")

    def worker(i: int, x: float) -> list[dict]:
        M = int(round(x))
        cfg = _make_config(spec.raw, M=M)
        rows = []
        for case in ALL_CASES:
            p = required_power(cfg, case, target, which=which)
            rows.append(_row(
                spec, cfg, x_name="M", x_value=M, series=which,
                hw_case=case.label, method="closed",
                value_name="required_power", value=p,
            ))
        return rows

    rows, times = _collect(spec, worker)
    return _finish(spec, rows, times)


def run_rate_ratio(spec: ExperimentSpec) -> int:
    scaling = str(spec.options.get("scaling", "source"))
    mode = str(spec.options.get("mode", "fixed"))
    E = parse_scalar(spec.options.get("E", 1e-3))
    if scaling not in ("source", "relay"):
        raise CliError(f"scaling must be source or relay, got {scaling!r}")
    if mode not in ("fixed", "scaled"):
        raise CliError(f"mode must be fixed or scaled, got {mode!r}")
    series = {"II/I": ONE_BIT_DAC, "III/I": ONE_BIT_ADC, "IV/I": ONE_BIT}

    def worker(i: int, x: float) -> list[dict]:
        M = int(round(x))
        cfg = _make_config(spec.raw, M=M)
        rows = []
        if mode == "scaled":
            ratios = rate_ratios(cfg, scaling, E, M=M)
            swept = {"p_S" if scaling == "source" else "p_R": E / M}
        else:
            base = closed_form_rate(cfg, IDEAL).sum_rate
            if base == 0.0:
                raise NumericalError(f"reference rate is zero at M={M}")
            ratios = [closed_form_rate(cfg, series[s]).sum_rate / base
                      for s in series]
            swept = {}
        for (name, case), ratio in zip(series.items(), ratios):
            rows.append(_row(
                spec, cfg, x_name="M", x_value=M, series=name,
                hw_case=case.label, method="closed",
                value_name="rate_ratio", value=ratio, **swept,
            ))
        return rows

    rows, times = _collect(spec, worker)
    return _finish(spec, rows, times)


def run_power_alloc(spec: ExperimentSpec) -> int:
    sweep = str(spec.options.get("sweep", "M"))
    if sweep not in ("M", "P_T"):
        raise CliError(f"sweep must be M or P_T, got {sweep!r}")
    P_T = parse_scalar(spec.options.get("P_T", "10dB"))
    theta = float(spec.options.get("theta", 1.1))
    epsilon = float(spec.options.get("epsilon", 1e-3))

    def worker(i: int, x: float) -> list[dict]:
        if sweep == "M":
            cfg, budget, x_value = _make_config(spec.raw, M=int(round(x))), P_T, int(round(x))
        else:
            cfg, budget, x_value = _make_config(spec.raw), x, x
        res = successive_approx(cfg, budget, epsilon=epsilon, theta=theta)
        if not res.converged:
            raise NumericalError(
                f"power allocation did not converge at {sweep}={x_value}"
            )
        rows = [_row(spec, cfg, x_name=sweep, x_value=x_value, P_T=budget,
                     series="optimized", hw_case="IV", method="closed",
                     value_name="sum_rate", value=res.sum_rate, p_S="", p_R="")]
        for k in range(cfg.K):
            rows.append(_row(spec, cfg, x_name=sweep, x_value=x_value, P_T=budget,
                             series="optimized", hw_case="IV", method="closed",
                             user=k + 1, value_name="source_power",
                             value=res.p_S[k], p_S="", p_R=""))
        rows.append(_row(spec, cfg, x_name=sweep, x_value=x_value, P_T=budget,
                         series="optimized", hw_case="IV", method="closed",
                         value_name="relay_power", value=res.p_R, p_S="", p_R=""))
        for case in ALL_CASES:
            uni = uniform_allocation(cfg, budget, case)
            rows.append(_row(spec, cfg, x_name=sweep, x_value=x_value, P_T=budget,
                             series="uniform", hw_case=case.label, method="closed",
                             value_name="sum_rate", value=uni.sum_rate,
                             p_S=uni.p_S[0], p_R=uni.p_R))
        return rows

    rows, times = _collect(spec, worker)
    return _finish(spec, rows, times)


# ---------------------------------------------------------------------------
# validate

def run_validate(spec: ExperimentSpec) -> int:
    checks: list[tuple[str, bool, str, float]] = []

    def check(name, fn):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as err:  # surface, do not abort the suite
            ok, detail = False, f"{type(err).__name__}: {err}"
        checks.append((name, bool(ok), detail, time.perf_counter() - t0))

    rng = make_rng(spec.seed, stream=997)

    def backend_agreement():
        from . import _kernels_np
        A = complex_gaussian(rng, (6, 48))
        R = A @ A.conj().T / 48 + np.eye(6)
        got = quantizer_stats(R)
        ref = _kernels_np.arcsine_stats(np.ascontiguousarray(R), 1e-9)
        diff = max(
            np.abs(got.gain - ref[0]).max(),
            np.abs(got.output_cov - ref[1]).max(),
            np.abs(got.noise_cov - ref[2]).max(),
        )
        return diff < 1e-12, f"backend={backend_name()}, max deviation {diff:.2e}"

    def arcsine_diagonal():
        A = complex_gaussian(rng, (5, 40))
        R = A @ A.conj().T / 40 + 0.5 * np.eye(5)
        st = quantizer_stats(R)
        d1 = np.abs(np.diag(st.output_cov) - 1.0).max()
        d2 = np.abs(np.diag(st.noise_cov) - (1.0 - 2.0 / np.pi)).max()
        worst = max(d1, d2)
        return worst < 1e-14, f"output/noise diagonals off by {worst:.2e}"

    def quantize_power():
        x = one_bit_quantize(complex_gaussian(rng, (64, 400)))
        err = np.abs((np.abs(x) ** 2).sum(axis=0) - 64.0).max()
        return err < 1e-12, f"per-symbol power off by {err:.2e}"

    def estimation_closed_forms():
        from .estimation import lmmse_cov_general
        betas = rng.uniform(0.05, 1.0, 4)
        gen = np.diag(lmmse_cov_general(build_pilot("identity", 4), betas, 2.3)).real
        closed = estimation_stats("identity", betas, 4, 2.3).est_var
        exact = np.abs(gen / closed - 1.0).max()
        # the orthogonal-pilot variance uses a white-noise approximation,
        # tight only at low pilot power
        gen_h = np.diag(lmmse_cov_general(build_pilot("hadamard", 4), betas, 0.1)).real
        closed_h = estimation_stats("hadamard", betas, 4, 0.1).est_var
        approx = np.abs(gen_h / closed_h - 1.0).max()
        ok = exact < 1e-10 and approx < 0.02
        return ok, f"identity off by {exact:.2e}, orthogonal by {approx:.2%}"

    def pilot_rule():
        hits = 0
        for _ in range(20):
            betas = rng.uniform(0.05, 1.0, 8)
            pred = ["identity" if b < betas.mean() else "hadamard" for b in betas]
            hits += sum(p == c for p, c in zip(pred, compare_pilots(betas, 8, 0.5)))
        return hits == 160, f"{hits}/160 users match the below-average rule"

    def hardware_ordering():
        cfg = SystemConfig(M=512, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                           p_p=10.0, p_S=10.0, p_R=10.0)
        rep = rate_ordering_check(cfg)
        return rep.holds, "sum rates " + " > ".join(
            f"{case}={rep.sum_rates[case]:.3f}" for case in rep.ordering)

    def ratio_limits():
        cfg = SystemConfig(M=10000, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                           p_p=10.0, p_S=10.0, p_R=10.0)
        src = rate_ratios(cfg, "source", 1e-3)
        rel = rate_ratios(cfg, "relay", 1e-3)
        tgt_s = (1.0, 4.0 / np.pi**2, 4.0 / np.pi**2)
        tgt_r = (2.0 / np.pi, 2.0 / np.pi, 4.0 / np.pi**2)
        worst = max(max(abs(a / b - 1.0) for a, b in zip(src, tgt_s)),
                    max(abs(a / b - 1.0) for a, b in zip(rel, tgt_r)))
        return worst < 0.02, f"worst deviation from scaling limits: {worst:.4f}"

    def antenna_landmarks():
        marks = {"I": 208, "II": 314, "III": 345, "IV": 512}
        matched, detail = None, []
        for tau_c in (100, 200, 400):
            cfg = SystemConfig(M=64, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                               p_p=10.0, p_S=10.0, p_R=0.1, tau_c=tau_c)
            counts = {case.label: required_antennas(cfg, case, 5.0)
                      for case in ALL_CASES}
            if counts == marks:
                matched = tau_c
                detail = [f"{lab}={n}" for lab, n in counts.items()]
        if matched is None:
            return False, "no tau_c in (100, 200, 400) reproduces the reference counts"
        return True, f"tau_c={matched} matches exactly: " + ", ".join(detail)

    def norm_moment():
        M, n, beta = 64, 20000, 1.7
        g = complex_gaussian(rng, (n, M), variance=beta)
        q = (np.abs(g) ** 2).sum(axis=1) ** 2
        target = M * (M + 1) * beta**2
        dev = abs(q.mean() - target) / (q.std(ddof=1) / np.sqrt(n))
        return dev < 3.0, f"fourth moment off by {dev:.2f} standard errors"

    def gp_corner():
        sol = solve_gp(GpProblem(
            objective=Posynomial(np.array([1.0]), np.array([[-1.0, -1.0]])),
            constraints=[Posynomial(np.array([1.0, 1.0]), np.eye(2))],
            start=np.array([0.3, 0.3])))
        ok = (np.allclose(sol.variables, 0.5, rtol=1e-6)
              and sol.stationarity < 1e-6
              and sol.constraint_values.max() <= 1.0 + 1e-8)
        return ok, (f"box corner at {sol.variables.round(8)}, "
                    f"stationarity {sol.stationarity:.1e}")

    def allocation_budget():
        cfg = SystemConfig(M=64, K=2, beta_SR=[0.85, 0.32], beta_RD=[0.6, 0.2],
                           p_p=10.0)
        res = successive_approx(cfg, 10.0)
        gap = abs(res.p_S.sum() + res.p_R - 10.0) / 10.0
        objs = [ob for _, ob in res.trace]
        monotone = all(b >= a - 1e-10 for a, b in zip(objs, objs[1:]))
        ok = res.converged and gap < 1e-6 and monotone
        return ok, (f"budget gap {gap:.1e}, monotone={monotone}, "
                    f"outer iterations {len(res.trace) - 1}")

    def mc_agreement():
        cfg = SystemConfig(M=64, K=5, beta_SR=np.ones(5), beta_RD=np.ones(5),
                           p_p=10.0, p_S=10.0, p_R=10.0)
        rep = approx_rate_mc(cfg, 400, make_rng(spec.seed, stream=41))
        closed = closed_form_rate(cfg, ONE_BIT)
        dev = np.abs(rep.per_user_rate - closed.per_user_rate) / rep.std_err
        return dev.max() < 3.0, f"max deviation {dev.max():.2f} standard errors"

    def relay_output_power():
        cfg = SystemConfig(M=16, K=2, beta_SR=np.ones(2), beta_RD=np.ones(2),
                           p_p=10.0, p_S=10.0, p_R=4.0)
        ch = generate_channels(cfg, make_rng(spec.seed, stream=42))
        st = relay_chain_once(ch, cfg, rng=make_rng(spec.seed, stream=43),
                              n_symbols=200)
        err = abs(st.dac_output_power - 16.0)
        return err < 1e-12, f"mean squared output norm off by {err:.2e}"

    def config_roundtrip():
        cfg = SystemConfig(M=96, K=3, beta_SR=[0.6, 0.3, 0.1],
                           beta_RD=[0.2, 0.9, 0.4], p_p=3.16, p_S=[1.0, 2.0, 0.5],
                           p_R=2.0, tau_c=240, pilot_kind="identity")
        text = cfg.to_text()
        ok = SystemConfig.from_text(text).to_text() == text
        return ok, "serialized config survives a parse cycle"

    check("backend agreement", backend_agreement)
    check("arcsine diagonals", arcsine_diagonal)
    check("quantizer output power", quantize_power)
    check("estimation closed forms", estimation_closed_forms)
    check("pilot preference rule", pilot_rule)
    check("hardware case ordering", hardware_ordering)
    check("rate ratio limits", ratio_limits)
    check("antenna landmarks", antenna_landmarks)
    check("channel norm moment", norm_moment)
    check("gp corner solution", gp_corner)
    check("allocation budget", allocation_budget)
    check("monte carlo agreement", mc_agreement)
    check("relay output power", relay_output_power)
    check("config roundtrip", config_roundtrip)

    width = max(len(name) for name, *_ in checks)
    failures = 0
    for name, ok, detail, secs in checks:
        status = "PASS" if ok else "FAIL"
        failures += not ok
        print(f"{status}  {name:<{width}}  {detail}  ({secs:.2f}s)")
    print(f"{len(checks) - failures}/{len(checks)} checks passed")

    rows = [_row(spec, None, x_name="check", x_value=i, series=name,
                 value_name="pass", value=int(ok))
            for i, (name, ok, _, _) in enumerate(checks)]
    times = [(name, secs) for name, _, _, secs in checks]
    _finish(spec, rows, times)
    return 0 if failures == 0 else 2


# ---------------------------------------------------------------------------
# entry point

_FIG8_BETA_SR = "0.2688,0.0368,0.00025,0.1398,0.0047"
_FIG8_BETA_RD = "0.0003,0.00025,0.0050,0.0794,0.0001"

EXPERIMENTS = {
    "mse-vs-pp": (
        run_mse_vs_pp,
        dict(M=128, K=4, beta_SR="0.6,0.3,0.1,0.9", beta_RD="0.6,0.3,0.1,0.9",
             grid="-10dB:20dB:2dB", trials=0),
        "estimation MSE against pilot power, identity and Hadamard pilots",
    ),
    "rate-vs-k": (
        run_rate_vs_k,
        dict(M=128, beta=1.0, p_p="10dB", p_S="10dB", p_R="10dB",
             grid="2:20:2", trials=1000, case="IV",
             methods="closed,approx,exact"),
        "sum rate against the number of user pairs",
    ),
    "rate-vs-m": (
        run_rate_vs_m,
        dict(K=10, beta=1.0, p_p="10dB", p_S="10dB", p_R="10dB",
             grid="64:512:64", trials=1000, case="IV",
             methods="closed,approx,exact", k_ratio=0.0),
        "sum rate against the antenna count (k_ratio > 0 scales K with M)",
    ),
    "required-power": (
        run_required_power,
        dict(K=5, beta=1.0, p_p="10dB", p_S="10dB", p_R="10dB",
             grid="200:520:20", target=5.0, which="source"),
        "power needed for a target sum rate, all hardware cases",
    ),
    "rate-ratio": (
        run_rate_ratio,
        dict(K=5, beta=1.0, p_p="10dB", p_S="-50dB", p_R="10dB",
             grid="50:500:50", scaling="source", mode="fixed", E=1e-3),
        "quantized-to-ideal sum-rate ratios against the antenna count",
    ),
    "power-alloc": (
        run_power_alloc,
        dict(M=128, K=5, beta_SR=_FIG8_BETA_SR, beta_RD=_FIG8_BETA_RD,
             p_p="10dB", grid="64:512:64", sweep="M", P_T="10dB",
             theta=1.1, epsilon=1e-3),
        "optimized power split against uniform, all hardware cases",
    ),
    "validate": (
        run_validate,
        dict(),
        "run the invariant suite and report pass/fail per check",
    ),
}


class _Parser(ArgumentParser):
    """Argument parser that reports usage problems as configuration errors."""

    def error(self, message):
        raise CliError(message)


def _build_parser() -> ArgumentParser:
    parser = _Parser(
        prog="onebit-relay",
        description="Link-level experiments for one-bit quantized relaying.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, (_, defaults, help_text) in EXPERIMENTS.items():
        defaults_text = ", ".join(f"{k}={v}" for k, v in sorted(defaults.items()))
        p = sub.add_parser(
            name, help=help_text,
            description=f"{help_text}. Defaults: {defaults_text or 'none'}",
        )
        p.add_argument("--config", help="flat key=value file applied before overrides")
        p.add_argument("overrides", nargs="*", metavar="key=value",
                       help="configuration overrides, e.g. M=256 p_R=10dB")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        runner, defaults, _ = EXPERIMENTS[args.experiment]
        merged = _merge_options(args.experiment, defaults, args.config,
                                args.overrides)
        spec = _resolve_spec(args.experiment, merged)
        return runner(spec)
    except (InfeasibleTargetError, GpInfeasibleError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (NumericalError, GpConvergenceError, SingularMatrixError,
            np.linalg.LinAlgError, FloatingPointError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (CliError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
