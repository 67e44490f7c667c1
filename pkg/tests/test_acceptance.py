"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The sweep-based criteria run the full Monte-Carlo harness at 100 trials per
grid point with the default configuration (base seed 0); the sweeps are
shared across criteria through module-scoped fixtures.
"""

import time

import numpy as np
import pytest

from jamsim.channel import (
    ScenarioConfig,
    jammer_manifold,
    receiver_knowledge,
    sample_scenario,
)
from jamsim.harness import SweepConfig, cli_main, run_sweep
from jamsim.jammer import worst_case_covariance
from jamsim.metrics import (
    compute_eta,
    interference_matrices,
    signal_vectors,
    sinr_b,
    sinr_lower_bound,
)
from jamsim.numerics import solve_small_sdp, symmetrize
from jamsim.oracles import (
    jammer_grid_1d,
    jammer_grid_2x2,
    min_beampattern_rank1_search,
    rayleigh_quotient_max,
    zf_min_beampattern,
)
from jamsim.txrx import (
    QosTarget,
    analytic_receiver,
    beampattern,
    pad_angles,
    zf_metric,
    zf_receiver,
)

TRIALS = 100
SEED = 0
WORKERS = 2


def report(name: str, ok: bool, detail: str) -> None:
    print(f"{name} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"{name}: {detail}"


def series(result, method):
    return np.array([r.mean_rate for r in result.rows if r.method == method])


def grid_of(result, method):
    return np.array([r.value for r in result.rows if r.method == method])


@pytest.fixture(scope="module")
def antennas_sweep():
    cfg = SweepConfig(kind="antennas", trials=TRIALS, base_seed=SEED, workers=WORKERS)
    return run_sweep(cfg)


@pytest.fixture(scope="module")
def power_sweep():
    cfg = SweepConfig(kind="power", trials=TRIALS, base_seed=SEED, workers=WORKERS)
    return run_sweep(cfg)


@pytest.fixture(scope="module")
def aoa_sweep():
    # +35 degrees appended so every symmetry pair of A5 exists in the grid
    cfg = SweepConfig(
        kind="aoa",
        trials=TRIALS,
        base_seed=SEED,
        workers=WORKERS,
        aoa_grid_deg=tuple(float(t) for t in range(-35, 36, 5)),
    )
    return run_sweep(cfg)


def test_a1_jammer_free_level():
    start = time.perf_counter()
    cfg = SweepConfig(
        kind="antennas",
        antenna_grid=(16,),
        methods=("no_jammer",),
        trials=500,
        base_seed=SEED,
    )
    mean = run_sweep(cfg).rows[0].mean_rate
    elapsed = time.perf_counter() - start
    ok = 42.34 * 0.8 <= mean <= 42.34 * 1.2 and elapsed < 300.0
    report("A1", ok, f"no-jammer mean {mean:.2f} bits/s/Hz (target 42.34 +-20%), "
                     f"{elapsed:.1f}s runtime")


def test_a2_antenna_count_flatness(antennas_sweep):
    details = []
    ok = True
    for method in ("no_jammer", "no_protection", "analytic", "minsinr", "zf"):
        vals = series(antennas_sweep, method)
        rel = vals.std() / vals.mean()
        details.append(f"{method} {100 * rel:.2f}%")
        ok = ok and rel < 0.05
    report("A2", ok, "relative std across N_J: " + ", ".join(details))


def test_a3_method_ordering(antennas_sweep):
    means = {
        m: series(antennas_sweep, m).mean()
        for m in ("no_protection", "analytic", "minsinr", "zf")
    }
    gap = means["zf"] - means["no_protection"]
    ok = (
        means["zf"] > means["analytic"] > means["minsinr"] > means["no_protection"]
        and gap >= 10.0
    )
    report(
        "A3",
        ok,
        f"zf {means['zf']:.2f} > analytic {means['analytic']:.2f} > "
        f"minsinr {means['minsinr']:.2f} > no_protection "
        f"{means['no_protection']:.2f}; zf gain {gap:.2f} bits/s/Hz",
    )


def test_a4_power_collapse_and_resilience(power_sweep):
    grid = grid_of(power_sweep, "zf")
    zf = series(power_sweep, "zf")
    noprot = series(power_sweep, "no_protection")
    at = {v: i for i, v in enumerate(grid)}
    zf_decline = (zf[at[5.0]] - zf[at[35.0]]) / zf[at[5.0]]
    ok = (
        noprot[at[65.0]] < 0.5
        and zf[at[65.0]] >= 15.0
        and zf_decline < 0.10
    )
    report(
        "A4",
        ok,
        f"no_protection@65dB {noprot[at[65.0]]:.3f} (<0.5), "
        f"zf@65dB {zf[at[65.0]]:.2f} (>=15), "
        f"zf decline 5->35dB {100 * zf_decline:.2f}% (<10%)",
    )


def test_a5_aoa_behavior(aoa_sweep):
    grid = grid_of(aoa_sweep, "zf")
    ok = True
    details = []
    for method in ("analytic", "minsinr", "zf"):
        vals = series(aoa_sweep, method)
        argmin = grid[int(np.argmin(vals))]
        in_band = -15.0 <= argmin <= 15.0
        above_floor = bool(np.all(vals > 0.5))
        sym_ok = True
        for theta in (15.0, 25.0, 35.0):
            lo = vals[list(grid).index(-theta)]
            hi = vals[list(grid).index(theta)]
            sym = abs(hi - lo) / (0.5 * (hi + lo))
            sym_ok = sym_ok and sym < 0.15
        ok = ok and in_band and above_floor and sym_ok
        details.append(f"{method}: min@{argmin:g}deg floor {vals.min():.2f} "
                       f"sym_ok={sym_ok}")
    report("A5", ok, "; ".join(details))


def test_a6_jammer_optimizer_oracle():
    # single-antenna jammer: full power, matching the 1-D grid
    cfg1 = ScenarioConfig(
        users=2, user_antennas=2, bs_antennas=3, jammer_antennas=1,
        user_paths=2, jammer_paths=2, user_aoa_deg=(-12.0, 14.0),
        jammer_power_dbm=10.0,
    )
    sc1 = sample_scenario(cfg1, seed=5)
    strat1 = worst_case_covariance(sc1, sc1.jammer_power)
    _, grid_obj = jammer_grid_1d(sc1, sc1.jammer_power, points=1000)
    one_ok = (
        abs(strat1.covariance[0, 0].real - sc1.jammer_power)
        < 1e-3 * sc1.jammer_power
        and abs(strat1.achieved_objective - grid_obj) < 1e-3 * grid_obj
    )

    # two-antenna toy: min-max value against the 4-parameter grid oracle
    cfg2 = ScenarioConfig(
        users=2, user_antennas=2, bs_antennas=3, jammer_antennas=2,
        user_paths=2, jammer_paths=2, user_aoa_deg=(-12.0, 14.0),
        jammer_power_dbm=10.0, jammer_aoa_deg=0.0,
    )
    toy_rel = 0.0
    for seed in (5, 6, 7):
        sc2 = sample_scenario(cfg2, seed=seed)
        strat2 = worst_case_covariance(sc2, sc2.jammer_power, method="dense")
        oracle = jammer_grid_2x2(sc2, sc2.jammer_power)
        toy_rel = max(toy_rel, abs(strat2.achieved_objective - oracle) / oracle)
    toy_ok = toy_rel <= 0.02

    # best objective is monotone along the deterministic trajectory
    short = worst_case_covariance(sc2, sc2.jammer_power, max_iter=100, method="dense")
    long = worst_case_covariance(sc2, sc2.jammer_power, max_iter=600, method="dense")
    monotone_ok = long.achieved_objective <= short.achieved_objective + 1e-9

    # feasibility invariants over 1000 randomized runs
    rng = np.random.default_rng(11)
    feas_ok = True
    for _ in range(1000):
        users = int(rng.integers(1, 4))
        cfg = ScenarioConfig(
            users=users,
            user_antennas=int(rng.integers(2, 5)),
            bs_antennas=int(rng.integers(users + 1, 9)),
            jammer_antennas=int(rng.integers(1, 6)),
            user_paths=2,
            jammer_paths=2,
            user_aoa_deg=tuple(np.linspace(-15, 15, users)),
            jammer_power_dbm=float(rng.uniform(0, 40)),
            jammer_aoa_deg=float(rng.uniform(-30, 30)),
        )
        sc = sample_scenario(cfg, seed=int(rng.integers(0, 1_000_000)))
        q = worst_case_covariance(sc, sc.jammer_power, max_iter=30).covariance
        w = np.linalg.eigvalsh(q)
        feas_ok = feas_ok and (
            np.trace(q).real <= sc.jammer_power + 1e-6
            and w[0] >= -1e-8 * max(w[-1], 1.0)
        )
    ok = one_ok and toy_ok and monotone_ok and feas_ok
    report(
        "A6",
        ok,
        f"1-antenna exact={one_ok}, toy grid rel {100 * toy_rel:.2f}% (<=2%), "
        f"monotone={monotone_ok}, feasibility(1000 runs)={feas_ok}",
    )


def test_a7_receiver_oracles():
    zf_rel_worst = 0.0
    zf_resid_worst = 0.0
    an_rel_worst = 0.0
    for seed in range(6):
        sc = sample_scenario(ScenarioConfig(), seed=seed)
        kn = receiver_knowledge(sc)
        padded = pad_angles(kn.jammer_aoas, kn.bs_antennas, np.deg2rad((-10, 0, 10)))
        p = signal_vectors(kn).T
        x = zf_metric(kn, padded)
        bank = zf_receiver(kn, padded)
        obj = sum(
            (bank.vectors[k].conj() @ x @ bank.vectors[k]).real for k in range(3)
        )
        _, obj_oracle = zf_min_beampattern(p, x)
        v0 = np.linalg.solve(p.conj().T @ p, p.conj().T).conj().T
        baseline = sum((v0[:, k].conj() @ x @ v0[:, k]).real for k in range(3))
        zf_rel_worst = max(
            zf_rel_worst,
            abs(obj - obj_oracle) / max(obj, obj_oracle, baseline),
        )
        zf_resid_worst = max(
            zf_resid_worst,
            max(
                np.abs(p.conj().T @ bank.vectors[k] - np.eye(3)[k]).max()
                for k in range(3)
            ),
        )

        a_b = jammer_manifold(kn.jammer_aoas, kn.bs_geometry)
        x_res = a_b @ a_b.conj().T
        h = signal_vectors(kn)
        b = interference_matrices(kn)
        an = analytic_receiver(kn, eta=1.0)
        for k in range(3):
            v = an.vectors[k]
            denom = b[k] + x_res
            quot = abs(np.vdot(v, h[k])) ** 2 / np.vdot(v, denom @ v).real
            opt = rayleigh_quotient_max(np.outer(h[k], h[k].conj()), denom)
            an_rel_worst = max(an_rel_worst, abs(quot - opt) / opt)

    # SDR gap on small receive arrays
    gap_worst = 0.0
    lower_ok = True
    checked = 0
    for seed in range(10):
        sc = sample_scenario(
            ScenarioConfig(users=2, bs_antennas=8, user_aoa_deg=(-10.0, 10.0)),
            seed=seed,
        )
        kn = receiver_knowledge(sc)
        padded = pad_angles(kn.jammer_aoas, 8, np.deg2rad((-10.0, 10.0)))
        a_pad = jammer_manifold(padded, kn.bs_geometry)
        cost = symmetrize(a_pad @ a_pad.conj().T)
        h = signal_vectors(kn)
        b = interference_matrices(kn)
        gamma0 = 10 ** 2.0
        for k in range(2):
            gamma_max = np.vdot(h[k], np.linalg.solve(b[k], h[k])).real
            if gamma0 > 0.8 * gamma_max:
                continue
            a_k = np.outer(h[k], h[k].conj())
            v_sdp = solve_small_sdp(
                cost,
                [(a_k - gamma0 * b[k], 0.0, ">="), (np.eye(8), 1.0, "==")],
                dim=8,
            )
            sdp_obj = np.vdot(cost, v_sdp).real
            _, u = np.linalg.eigh(v_sdp)
            recovered = beampattern(u[:, -1], a_pad)
            lower_ok = lower_ok and sdp_obj <= recovered + 1e-6 * max(recovered, 1.0)
            gap_worst = max(gap_worst, (recovered - sdp_obj) / max(sdp_obj, 1e-12))
            sampled = min_beampattern_rank1_search(
                cost, a_k, b[k], gamma0, samples=4000, seed=seed
            )
            lower_ok = lower_ok and sdp_obj <= sampled + 1e-6 * max(sampled, 1.0)
            checked += 1

    ok = (
        zf_rel_worst < 1e-6
        and zf_resid_worst < 1e-8
        and an_rel_worst < 1e-6
        and lower_ok
        and gap_worst <= 0.05
        and checked >= 4
    )
    report(
        "A7",
        ok,
        f"zf objective rel {zf_rel_worst:.2e} (<1e-6), zf residual "
        f"{zf_resid_worst:.2e} (<1e-8), analytic quotient rel {an_rel_worst:.2e} "
        f"(<1e-6), SDR gap {100 * gap_worst:.2f}% (<=5%) over {checked} instances",
    )


def test_a8_bound_validity():
    rng = np.random.default_rng(8)
    worst_gap = -np.inf
    triples = 0
    for seed in range(20):
        sc = sample_scenario(ScenarioConfig(), seed=seed)
        kn = receiver_knowledge(sc)
        eta = compute_eta(
            sc.jammer_power, sc.jammer_antennas, len(sc.jammer_paths), sc.jammer_gains
        )
        for _ in range(50):
            raw = rng.standard_normal((sc.jammer_antennas, 4)) + 1j * rng.standard_normal(
                (sc.jammer_antennas, 4)
            )
            q = raw @ raw.conj().T
            q *= sc.jammer_power * rng.uniform(0.05, 1.0) / np.trace(q).real
            v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
            k = int(rng.integers(sc.num_users))
            gap = sinr_lower_bound(kn, v, k, eta) - sinr_b(sc, q, v, k)
            worst_gap = max(worst_gap, gap)
            triples += 1
    dominance_ok = worst_gap <= 1e-9

    # equality when the jammer is off
    eq_worst = 0.0
    sc = sample_scenario(ScenarioConfig(), seed=99)
    kn = receiver_knowledge(sc)
    for _ in range(100):
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        k = int(rng.integers(sc.num_users))
        truth = sinr_b(sc, None, v, k)
        rel = abs(sinr_lower_bound(kn, v, k, 0.0) - truth) / max(truth, 1.0)
        eq_worst = max(eq_worst, rel)
    ok = dominance_ok and eq_worst <= 1e-9 and triples == 1000
    report(
        "A8",
        ok,
        f"bound dominated truth on {triples} triples (worst gap {worst_gap:.2e}); "
        f"no-jammer equality within {eq_worst:.2e}",
    )


def test_a9_csv_determinism(tmp_path):
    out1 = tmp_path / "run1.csv"
    out2 = tmp_path / "run2.csv"
    args = ["sweep", "--kind", "power", "--trials", "2", "--seed", "7"]
    assert cli_main(args + ["--out", str(out1)]) == 0
    assert cli_main(args + ["--out", str(out2)]) == 0
    identical = out1.read_bytes() == out2.read_bytes()
    report("A9", identical, f"two runs produced byte-identical CSV ({out1.stat().st_size} bytes)")
