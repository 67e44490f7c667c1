"""Config-driven Monte-Carlo sweeps, CSV emission, and the CLI entry point.

A sweep varies one jammer parameter (antenna count, power, or arrival angle)
over its grid; the other two are drawn uniformly from their grids once per
trial, so every grid point of a sweep sees the same scenario draws and the
series differences come from the swept parameter alone.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import (
    ConfigurationError,
    ScenarioConfig,
    receiver_knowledge,
    sample_scenario,
)
from .jammer import worst_case_covariance
from .metrics import rate_report, signal_vectors, sinr_a_all
from .txrx import (
    DegenerateScenarioError,
    FilterBank,
    QosTarget,
    analytic_receiver,
    minsinr_receiver,
    pad_angles,
    zf_receiver,
)

SWEEP_KINDS = ("antennas", "power", "aoa")
METHODS = ("no_jammer", "no_protection", "analytic", "minsinr", "zf")
CSV_HEADER = ("sweep", "value", "method", "mean_rate", "std_rate", "trials", "fallbacks")


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: which parameter varies, over which grids, how many trials."""

    kind: str = "antennas"
    antenna_grid: tuple[int, ...] = tuple(range(16, 129, 8))
    power_grid_db: tuple[float, ...] = (5.0, 20.0, 35.0, 50.0, 65.0)
    aoa_grid_deg: tuple[float, ...] = tuple(float(t) for t in range(-35, 31, 5))
    trials: int = 100
    base_seed: int = 0
    methods: tuple[str, ...] = METHODS
    eta: float = 1.0
    gamma0_db: float = 20.0
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    no_protection_filter: str = "matched"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.kind not in SWEEP_KINDS:
            raise ConfigurationError(f"unknown sweep kind {self.kind!r}")
        for grid in (self.antenna_grid, self.power_grid_db, self.aoa_grid_deg):
            if len(grid) == 0:
                raise ConfigurationError("sweep grids must be non-empty")
        if self.trials < 1:
            raise ConfigurationError("need at least one trial")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ConfigurationError(f"unknown methods {sorted(unknown)}")
        if self.no_protection_filter not in ("mmse", "matched"):
            raise ConfigurationError(
                f"unknown no_protection_filter {self.no_protection_filter!r}"
            )

    @property
    def grid(self) -> tuple[float, ...]:
        if self.kind == "antennas":
            return tuple(float(v) for v in self.antenna_grid)
        if self.kind == "power":
            return tuple(self.power_grid_db)
        return tuple(self.aoa_grid_deg)


@dataclass(frozen=True)
class SweepRow:
    sweep: str
    value: float
    method: str
    mean_rate: float
    std_rate: float
    trials: int
    fallbacks: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]


def _trial_jammer_params(cfg: SweepConfig, trial: int) -> tuple[int, float, float]:
    """Non-swept jammer parameters for one trial, drawn from the same grids
    used for sweeping; independent of the swept grid value."""
    rng = np.random.default_rng((cfg.base_seed + trial, 911))
    n_j = int(rng.choice(cfg.antenna_grid))
    p_db = float(rng.choice(cfg.power_grid_db))
    theta = float(rng.choice(cfg.aoa_grid_deg))
    return n_j, p_db, theta


def _scenario_for(cfg: SweepConfig, value: float, trial: int) -> ScenarioConfig:
    n_j, p_db, theta = _trial_jammer_params(cfg, trial)
    if cfg.kind == "antennas":
        n_j = int(value)
    elif cfg.kind == "power":
        p_db = value
    else:
        theta = value
    return replace(
        cfg.scenario,
        jammer_antennas=n_j,
        jammer_power_dbm=p_db,
        jammer_aoa_deg=theta,
    )


def _build_filters(cfg: SweepConfig, kn) -> dict[str, object]:
    """All configured filter banks for one ReceiverKnowledge."""
    banks: dict[str, object] = {}
    padded = None
    if "zf" in cfg.methods or "minsinr" in cfg.methods:
        padded = pad_angles(
            kn.jammer_aoas, kn.bs_antennas, np.deg2rad(cfg.scenario.user_aoa_deg)
        )
    for method in cfg.methods:
        if method == "no_jammer":
            continue
        if method == "no_protection":
            if cfg.no_protection_filter == "mmse":
                banks[method] = analytic_receiver(kn, eta=0.0)
            else:
                banks[method] = FilterBank(vectors=signal_vectors(kn))
        elif method == "analytic":
            banks[method] = analytic_receiver(kn, eta=cfg.eta)
        elif method == "minsinr":
            banks[method] = minsinr_receiver(
                kn, padded, QosTarget.from_db(cfg.gamma0_db)
            )
        elif method == "zf":
            banks[method] = zf_receiver(kn, padded)
        else:  # pragma: no cover - guarded by SweepConfig validation
            raise ConfigurationError(f"unknown method {method!r}")
    return banks


def _evaluate_methods(cfg: SweepConfig, sc, banks) -> dict[str, tuple[float, int]]:
    q = None
    if any(m != "no_jammer" for m in cfg.methods):
        q = worst_case_covariance(sc, sc.jammer_power).covariance
    out: dict[str, tuple[float, int]] = {}
    for method in cfg.methods:
        if method == "no_jammer":
            out[method] = (float(np.log2(1.0 + sinr_a_all(sc, None)).sum()), 0)
            continue
        filters = banks[method]
        fallbacks = len(getattr(filters, "fallback_users", ()))
        out[method] = (rate_report(sc, q, filters).sum_rate_b, fallbacks)
    return out


def run_trial(cfg: SweepConfig, value: float, trial: int) -> dict[str, tuple[float, int]]:
    """One scenario draw evaluated under every configured method; returns
    method -> (sum rate in bits/s/Hz, fallback count)."""
    last_error: Exception | None = None
    for attempt in range(5):
        seed = cfg.base_seed + trial + 1_000_003 * attempt
        sc = sample_scenario(_scenario_for(cfg, value, trial), seed)
        try:
            return _evaluate_methods(cfg, sc, _build_filters(cfg, receiver_knowledge(sc)))
        except DegenerateScenarioError as err:  # pragma: no cover - rare resample
            last_error = err
    raise RuntimeError(f"could not draw a usable scenario: {last_error}")


def _run_trial_all_values(cfg: SweepConfig, trial: int) -> list[dict[str, tuple[float, int]]]:
    """One trial evaluated at every grid value.

    For the antennas and power sweeps the swept parameter never enters
    ReceiverKnowledge, so the filter banks are computed once per trial and
    reused across the grid (identical results, one SDP pass instead of one
    per grid point)."""
    last_error: Exception | None = None
    for attempt in range(5):
        seed = cfg.base_seed + trial + 1_000_003 * attempt
        try:
            shared_banks = None
            if cfg.kind in ("antennas", "power"):
                sc0 = sample_scenario(_scenario_for(cfg, cfg.grid[0], trial), seed)
                shared_banks = _build_filters(cfg, receiver_knowledge(sc0))
            results = []
            for value in cfg.grid:
                sc = sample_scenario(_scenario_for(cfg, value, trial), seed)
                banks = shared_banks
                if banks is None:
                    banks = _build_filters(cfg, receiver_knowledge(sc))
                results.append(_evaluate_methods(cfg, sc, banks))
            return results
        except DegenerateScenarioError as err:  # pragma: no cover - rare resample
            last_error = err
    raise RuntimeError(f"could not draw a usable scenario: {last_error}")


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Run the configured sweep; fully deterministic given the base seed,
    regardless of the worker count."""
    trials = list(range(cfg.trials))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            per_trial = list(pool.map(_run_trial_all_values, [cfg] * len(trials), trials))
    else:
        per_trial = [_run_trial_all_values(cfg, t) for t in trials]

    rows: list[SweepRow] = []
    for vi, value in enumerate(cfg.grid):
        sums = {m: 0.0 for m in cfg.methods}
        sumsq = {m: 0.0 for m in cfg.methods}
        falls = {m: 0 for m in cfg.methods}
        for trial in trials:
            for m, (rate, fb) in per_trial[trial][vi].items():
                sums[m] += rate
                sumsq[m] += rate * rate
                falls[m] += fb
        for m in cfg.methods:
            mean = sums[m] / cfg.trials
            var = max(sumsq[m] / cfg.trials - mean * mean, 0.0)
            rows.append(
                SweepRow(
                    cfg.kind, value, m, mean, float(np.sqrt(var)), cfg.trials, falls[m]
                )
            )
    return SweepResult(rows=tuple(rows))


def emit_csv(result: SweepResult, path) -> None:
    """Write the sweep table; floats carry 6 significant digits, LF endings."""
    try:
        with open(path, "w", newline="\n") as f:
            f.write(",".join(CSV_HEADER) + "\n")
            for r in result.rows:
                f.write(
                    f"{r.sweep},{r.value:.6g},{r.method},{r.mean_rate:.6g},"
                    f"{r.std_rate:.6g},{r.trials},{r.fallbacks}\n"
                )
    except OSError as err:
        raise RuntimeError(f"could not write CSV to {path}: {err}") from err


def read_csv(path) -> SweepResult:
    """Parse a file produced by emit_csv (round-trip of the sweep table)."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        rows = tuple(
            SweepRow(
                sweep=rec[0],
                value=float(rec[1]),
                method=rec[2],
                mean_rate=float(rec[3]),
                std_rate=float(rec[4]),
                trials=int(rec[5]),
                fallbacks=int(rec[6]),
            )
            for rec in reader
        )
    return SweepResult(rows=rows)


# ---------------------------------------------------------------------------
# self test: run the independent-oracle cross-checks


def run_selftest(verbose: bool = True) -> int:
    """Cross-check the fast paths against the reference implementations in
    jamsim.oracles; prints one line per check."""
    from . import oracles
    from .channel import ArrayGeometry, beamspace_channel
    from .jammer import jammer_objective
    from .metrics import compute_eta, sinr_a, sinr_b, sinr_lower_bound
    from .numerics import psd_project_trace, solve_small_sdp
    from .txrx import beampattern, svd_precoder, _zf_filters, zf_metric

    rng = np.random.default_rng(42)
    checks: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        checks.append((name, bool(ok), detail))

    sc = sample_scenario(ScenarioConfig(), seed=1)
    kn = receiver_knowledge(sc)

    h_bs = beamspace_channel(
        sc.user_paths[0], ArrayGeometry(sc.bs_antennas), ArrayGeometry(8)
    )
    naive = oracles.beamspace_naive(
        sc.user_paths[0], ArrayGeometry(sc.bs_antennas), ArrayGeometry(8)
    )
    err = np.abs(h_bs - naive).max()
    check("beamspace vs naive triple loop", err < 1e-12, f"max err {err:.2e}")

    q_uni = (sc.jammer_power / sc.jammer_antennas) * np.eye(sc.jammer_antennas)
    err = max(
        abs(sinr_a(sc, q_uni, k) - oracles.sinr_a_naive(sc, q_uni, k))
        / abs(oracles.sinr_a_naive(sc, q_uni, k))
        for k in range(sc.num_users)
    )
    check("sinr_a vs naive evaluation", err < 1e-10, f"max rel err {err:.2e}")

    ref = oracles.jammer_objective_naive(q_uni, sc)
    err = abs(jammer_objective(q_uni, sc) - ref) / abs(ref)
    check("jammer objective vs naive", err < 1e-10, f"rel err {err:.2e}")

    h = rng.standard_normal((16, 8)) + 1j * rng.standard_normal((16, 8))
    w = svd_precoder(h, 1.0)
    gain = np.linalg.norm(h @ w) / np.linalg.norm(w)
    err = abs(gain - oracles.largest_singular_value(h))
    check("svd precoder vs power iteration", err < 1e-8, f"err {err:.2e}")

    from .channel import jammer_manifold
    from .metrics import interference_matrices, signal_vectors

    a_b = jammer_manifold(kn.jammer_aoas, kn.bs_geometry)
    x_g = a_b @ a_b.conj().T
    hvec = signal_vectors(kn)
    bmats = interference_matrices(kn)
    bank = analytic_receiver(kn, eta=1.0)
    worst = 0.0
    for k in range(kn.num_users):
        v = bank.vectors[k]
        num = abs(np.vdot(v, hvec[k])) ** 2
        den = np.vdot(v, (bmats[k] + x_g) @ v).real
        opt = oracles.rayleigh_quotient_max(
            np.outer(hvec[k], hvec[k].conj()), bmats[k] + x_g
        )
        worst = max(worst, abs(num / den - opt) / opt)
    check("analytic filter vs generalized eigen max", worst < 1e-6, f"rel {worst:.2e}")

    padded = pad_angles(kn.jammer_aoas, kn.bs_antennas, np.deg2rad((-10, 0, 10)))
    x_pad = zf_metric(kn, padded)
    p = hvec.T
    zf = _zf_filters(p, x_pad)
    obj = sum((zf[k].conj() @ x_pad @ zf[k]).real for k in range(kn.num_users))
    _, obj_oracle = oracles.zf_min_beampattern(p, x_pad)
    resid = max(
        np.abs(p.conj().T @ zf[k] - np.eye(kn.num_users)[k]).max()
        for k in range(kn.num_users)
    )
    # the optimum is orders of magnitude below the metric scale; relative
    # agreement is judged against the beampattern an unoptimized (minimum
    # norm) ZF bank would have
    v0 = np.linalg.solve(p.conj().T @ p, p.conj().T).conj().T
    baseline = sum((v0[:, k].conj() @ x_pad @ v0[:, k]).real
                   for k in range(kn.num_users))
    rel = abs(obj - obj_oracle) / max(obj, obj_oracle, baseline)
    check(
        "zf closed form vs null-space QP",
        rel < 1e-6 and resid < 1e-8,
        f"rel {rel:.2e} resid {resid:.2e}",
    )

    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    m = m + m.conj().T
    proj = psd_project_trace(m, 2.5)
    eigs = np.linalg.eigvalsh(m)
    ref = oracles.capped_simplex_bisect(eigs, 2.5)
    err = abs(np.sort(np.linalg.eigvalsh(proj)) - np.sort(ref)).max()
    check("psd projection vs bisection water level", err < 1e-9, f"err {err:.2e}")

    c2 = np.array([[1.0, 0.3 + 0.2j], [0.3 - 0.2j, 2.0]])
    a2 = np.array([[0.5, -0.1j], [0.1j, 1.5]])
    v2 = solve_small_sdp(c2, [(a2, 0.9, ">="), (np.eye(2), 1.0, "==")], dim=2)
    sdp_obj = np.vdot(c2, v2).real
    grid_obj = oracles.sdp_bloch_grid(c2, a2, 0.9, resolution=121)
    err = abs(sdp_obj - grid_obj)
    check("small SDP vs Bloch-ball grid", err < 1e-3, f"err {err:.2e}")

    toy_cfg = ScenarioConfig(
        users=2,
        user_antennas=2,
        bs_antennas=3,
        jammer_antennas=1,
        user_paths=2,
        jammer_paths=2,
        user_aoa_deg=(-12.0, 14.0),
        jammer_power_dbm=10.0,
    )
    toy = sample_scenario(toy_cfg, seed=5)
    strat = worst_case_covariance(toy, toy.jammer_power)
    _, grid_val = oracles.jammer_grid_1d(toy, toy.jammer_power)
    rel = abs(strat.achieved_objective - grid_val) / grid_val
    q_rel = abs(strat.covariance[0, 0].real - toy.jammer_power) / toy.jammer_power
    check(
        "1-antenna jammer vs 1-D grid",
        rel < 1e-3 and q_rel < 1e-3,
        f"rel {rel:.2e} q_rel {q_rel:.2e}",
    )

    eta = compute_eta(
        sc.jammer_power, sc.jammer_antennas, len(sc.jammer_paths), sc.jammer_gains
    )
    ok = True
    worst_gap = -np.inf
    for _ in range(50):
        v = rng.standard_normal(sc.bs_antennas) + 1j * rng.standard_normal(sc.bs_antennas)
        raw = rng.standard_normal((sc.jammer_antennas, 3)) + 1j * rng.standard_normal(
            (sc.jammer_antennas, 3)
        )
        q = raw @ raw.conj().T
        q *= sc.jammer_power * rng.uniform(0, 1) / np.trace(q).real
        k = int(rng.integers(sc.num_users))
        gap = sinr_lower_bound(kn, v, k, eta) - sinr_b(sc, q, v, k)
        worst_gap = max(worst_gap, gap)
        ok = ok and gap <= 1e-9
    check("SINR lower bound dominance", ok, f"worst gap {worst_gap:.2e}")

    failed = [c for c in checks if not c[1]]
    if verbose:
        for name, passed, detail in checks:
            print(f"{'PASS' if passed else 'FAIL'}  {name}  ({detail})")
        print(f"{len(checks) - len(failed)}/{len(checks)} oracle checks passed")
    return 0 if not failed else 2


# ---------------------------------------------------------------------------
# command line


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


_SCENARIO_INT_KEYS = ("users", "user_antennas", "bs_antennas", "user_paths", "jammer_paths")
_SCENARIO_FLOAT_KEYS = (
    "user_power_dbm",
    "noise_power_db",
    "angle_spread_deg",
    "spacing",
)


def parse_config_file(path) -> dict[str, str]:
    """Plain-text ``key = value`` pairs; '#' starts a comment."""
    values: dict[str, str] = {}
    try:
        with open(path) as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigurationError(
                        f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}"
                    )
                key, value = (part.strip() for part in line.split("=", 1))
                values[key] = value
    except OSError as err:
        raise ConfigurationError(f"could not read config file {path}: {err}") from err
    return values


def _build_sweep_config(file_values: dict[str, str], args) -> tuple[SweepConfig, str]:
    kw: dict = {}
    sc_kw: dict = {}
    out = "sweep.csv"
    for key, value in file_values.items():
        try:
            if key == "kind":
                kw["kind"] = value
            elif key == "trials":
                kw["trials"] = int(value)
            elif key == "seed":
                kw["base_seed"] = int(value)
            elif key == "eta":
                kw["eta"] = float(value)
            elif key == "gamma0_db":
                kw["gamma0_db"] = float(value)
            elif key == "workers":
                kw["workers"] = int(value)
            elif key == "out":
                out = value
            elif key == "methods":
                kw["methods"] = tuple(v.strip() for v in value.split(",") if v.strip())
            elif key == "no_protection_filter":
                kw["no_protection_filter"] = value
            elif key == "antenna_grid":
                kw["antenna_grid"] = tuple(int(v) for v in value.split(","))
            elif key == "power_grid_db":
                kw["power_grid_db"] = tuple(float(v) for v in value.split(","))
            elif key == "aoa_grid_deg":
                kw["aoa_grid_deg"] = tuple(float(v) for v in value.split(","))
            elif key == "user_aoa_deg":
                sc_kw["user_aoa_deg"] = tuple(float(v) for v in value.split(","))
            elif key in _SCENARIO_INT_KEYS:
                sc_kw[key] = int(value)
            elif key in _SCENARIO_FLOAT_KEYS:
                sc_kw[key] = float(value)
            else:
                raise ConfigurationError(f"unknown config key {key!r}")
        except ValueError as err:
            raise ConfigurationError(f"bad value for {key!r}: {err}") from err

    if args.kind is not None:
        kw["kind"] = args.kind
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.seed is not None:
        kw["base_seed"] = args.seed
    if args.eta is not None:
        kw["eta"] = args.eta
    if args.gamma0_db is not None:
        kw["gamma0_db"] = args.gamma0_db
    if args.workers is not None:
        kw["workers"] = args.workers
    if args.methods is not None:
        kw["methods"] = tuple(v.strip() for v in args.methods.split(",") if v.strip())
    if args.out is not None:
        out = args.out
    kw["scenario"] = ScenarioConfig(**sc_kw)
    return SweepConfig(**kw), out


def _run_demo(seed: int, eta: float) -> None:
    cfg = ScenarioConfig()
    sc = sample_scenario(cfg, seed=seed)
    strat = worst_case_covariance(sc, sc.jammer_power)
    kn = receiver_knowledge(sc)
    report = rate_report(sc, strat.covariance, analytic_receiver(kn, eta))
    print(
        f"scenario seed={seed}: K={sc.num_users} users, N_B={sc.bs_antennas}, "
        f"N_J={sc.jammer_antennas}, P_J={sc.jammer_power:.6g}"
    )
    print(
        f"worst-case jammer: objective={strat.achieved_objective:.6f} "
        f"iterations={strat.iterations} converged={strat.converged}"
    )
    for k in range(sc.num_users):
        print(
            f"user {k}: sinr_a={report.per_user_sinr_a[k]:.6f} "
            f"rate_a={report.per_user_rate_a[k]:.6f} "
            f"sinr_b={report.per_user_sinr_b[k]:.6f} "
            f"rate_b={report.per_user_rate_b[k]:.6f}"
        )
    print(f"sum rate (matched bound): {report.sum_rate_a:.6f} bits/s/Hz")
    print(f"sum rate (equalized):     {report.sum_rate_b:.6f} bits/s/Hz")


def cli_main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="jamsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a Monte-Carlo sweep and write CSV")
    p_sweep.add_argument("--kind", choices=SWEEP_KINDS, default=None)
    p_sweep.add_argument("--trials", type=int, default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--eta", type=float, default=None)
    p_sweep.add_argument("--gamma0-db", dest="gamma0_db", type=float, default=None)
    p_sweep.add_argument("--methods", default=None)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--config", default=None)

    p_demo = sub.add_parser("demo", help="evaluate one scenario and print rates")
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.add_argument("--eta", type=float, default=1.0)

    sub.add_parser("selftest", help="run the independent-oracle cross checks")

    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1

    try:
        if args.command == "sweep":
            file_values = parse_config_file(args.config) if args.config else {}
            cfg, out = _build_sweep_config(file_values, args)
            start = time.perf_counter()
            result = run_sweep(cfg)
            emit_csv(result, out)
            print(
                f"wrote {len(result.rows)} rows to {out} "
                f"({time.perf_counter() - start:.1f}s)"
            )
            return 0
        if args.command == "demo":
            _run_demo(args.seed, args.eta)
            return 0
        if args.command == "selftest":
            return run_selftest()
        raise ConfigurationError(f"unknown command {args.command!r}")
    except ConfigurationError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
