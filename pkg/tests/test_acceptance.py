"""Acceptance suite: every structural guarantee at its stated tolerance.

Each test prints one PASS/FAIL line so the suite doubles as a checklist:

    pytest tests/test_acceptance.py -v -s
"""

import time

import numpy as np
import pytest

from cranopt import (
    ChannelInstance,
    MajorizationProbe,
    SolverOptions,
    check_downlink_bounds,
    check_power_lower_bound,
    check_uplink_rate_bound,
    duality_gap,
    grid_oracle_scalar,
    perturbation_search,
    random_channel,
    random_unitary,
    solve_instance,
    solve_scalar_allocation,
    subchannel_rate,
    svd,
    waterfilling_capacity,
)
from cranopt.cli import EXIT_CHECK_FAILED, ExperimentConfig, run


def _verdict(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def _rand_psd(n, rng):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (X @ X.conj().T) / n


def test_criterion_1_duality():
    """Uplink and downlink optimal rates agree within 1e-5 bits."""
    t0 = time.perf_counter()
    worst = 0.0
    P_cycle = (0.5, 1.0, 4.0)
    C_cycle = (0.5, 2.0, 8.0)
    for k in range(200):
        n_r = 1 + k % 4
        n_u = 1 + (k // 4) % 4
        inst = ChannelInstance(
            H=random_channel(n_r, n_u, seed=10_000 + k),
            P=P_cycle[k % 3],
            C=C_cycle[(k // 3) % 3],
            sigma2=1.0,
        )
        out = duality_gap(inst)
        assert out["uplink_report"].feasible and out["downlink_report"].feasible, k
        worst = max(worst, out["gap"])
    dt = time.perf_counter() - t0
    ok = worst <= 1e-5
    assert _verdict(
        "criterion 1 (duality, 200 instances)", ok, f"worst gap {worst:.3e} <= 1e-5, {dt:.1f}s"
    )


def test_criterion_2_diagonalization_optimality():
    """Random perturbations never beat the diagonal design by > 1e-6 bits."""
    t0 = time.perf_counter()
    worst = np.inf
    for k in range(50):
        n_r = 1 + k % 3
        n_u = 1 + (k // 3) % 3
        inst = ChannelInstance(
            H=random_channel(n_r, n_u, seed=20_000 + k),
            P=(0.5, 1.0, 4.0)[k % 3],
            C=(0.5, 2.0, 8.0)[(k // 5) % 3],
            sigma2=1.0,
        )
        for direction in ("uplink", "downlink"):
            design, _, _ = solve_instance(inst, direction)
            report = perturbation_search(inst, direction, design, trials=1000, seed=k)
            assert report.verdict, (k, direction, report.margin)
            worst = min(worst, report.margin)
    dt = time.perf_counter() - t0
    ok = worst >= -1e-6
    assert _verdict(
        "criterion 2 (diagonalization, 50 x 2 x 1000 trials)",
        ok,
        f"worst margin {worst:.3e} >= -1e-6, {dt:.1f}s",
    )


def test_criterion_3_single_subchannel_closed_form():
    """D = 1: solver matches log2((h^2 P + s2) / (s2 + 2^-C h^2 P)) to 1e-9."""
    h = 1.3
    worst_solver = 0.0
    worst_oracle = 0.0
    for P in np.linspace(0.25, 4.0, 10):
        for C in np.linspace(0.25, 6.0, 10):
            closed = np.log2((h**2 * P + 1.0) / (1.0 + 2.0**-C * h**2 * P))
            for direction in ("uplink", "downlink"):
                a = solve_scalar_allocation(np.array([h]), P, C, 1.0, direction)
                worst_solver = max(worst_solver, abs(a.diagnostics["rate"] - closed))
            g = grid_oracle_scalar(np.array([h]), P, C, 1.0, "uplink", resolution=101)
            worst_oracle = max(worst_oracle, abs(g.diagnostics["rate"] - closed))
    ok = worst_solver <= 1e-9 and worst_oracle <= 1e-9
    assert _verdict(
        "criterion 3 (D=1 closed form, 10x10 grid)",
        ok,
        f"solver dev {worst_solver:.3e} <= 1e-9, oracle dev {worst_oracle:.3e}",
    )


def test_criterion_4_budget_limits():
    """C = 0 gives rate exactly 0; C = 60 recovers waterfilling to 1e-3."""
    worst = 0.0
    zero_ok = True
    for k in range(50):
        n_r = 1 + k % 3
        n_u = 1 + (k // 3) % 3
        H = random_channel(n_r, n_u, seed=30_000 + k)
        gains = svd(H).singular_values
        for direction in ("uplink", "downlink"):
            a0 = solve_scalar_allocation(gains, 2.0, 0.0, 1.0, direction)
            zero_ok = zero_ok and a0.diagnostics["rate"] == 0.0
            a60 = solve_scalar_allocation(gains, 2.0, 60.0, 1.0, direction)
            _, cap = waterfilling_capacity(gains, 2.0, 1.0)
            worst = max(worst, abs(a60.diagnostics["rate"] - cap))
    ok = zero_ok and worst <= 1e-3
    assert _verdict(
        "criterion 4 (C=0 and C=60 limits, 50 instances)",
        ok,
        f"zero-C exact: {zero_ok}, C=60 vs waterfilling dev {worst:.3e} <= 1e-3",
    )


def test_criterion_5_majorization_suite():
    """All four spectral bounds hold (slack >= -1e-9); equalities to 1e-9."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    worst = np.inf
    for k in range(1000):
        n = 2 + k % 3
        sigma2 = 0.5 + (k % 4) * 0.25
        probe = MajorizationProbe(
            sigma2=sigma2,
            signal=_rand_psd(n, rng),
            noise=_rand_psd(n, rng) + 1e-3 * np.eye(n),
        )
        lhs, rhs, _ = check_uplink_rate_bound(probe)
        worst = min(worst, rhs - lhs)

        H = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
        power, bound, _ = check_power_lower_bound(H, _rand_psd(n, rng))
        worst = min(worst, power - bound)

        M = _rand_psd(n, rng) + 1e-6 * np.eye(n)
        lhs_s, rhs_s, _ = check_downlink_bounds(H, M, "signal", sigma2)
        worst = min(worst, rhs_s - lhs_s)
        lhs_q, rhs_q, _ = check_downlink_bounds(H, M, "quantizer", sigma2)
        worst = min(worst, lhs_q - rhs_q)

    # equality cases: aligned bases within 1e-9
    eq_dev = 0.0
    for k in range(50):
        n = 3
        U = random_unitary(n, 600 + k)
        phi = np.sort(rng.uniform(0.5, 4.0, n))[::-1]
        qs = np.sort(rng.uniform(0.1, 2.0, n))
        lhs, rhs, equal = check_uplink_rate_bound(
            MajorizationProbe(sigma2=1.0, signal=U @ np.diag(phi) @ U.conj().T, noise=U @ np.diag(qs) @ U.conj().T)
        )
        assert equal
        eq_dev = max(eq_dev, abs(lhs - rhs))

        g = np.sort(rng.uniform(0.5, 3.0, n))[::-1]
        p = np.sort(rng.uniform(0.1, 2.0, n))[::-1]
        power, bound, equal = check_power_lower_bound(np.diag(g), np.diag(p).astype(complex))
        assert equal
        eq_dev = max(eq_dev, abs(power - bound))

        lam = np.sort(rng.uniform(0.2, 2.0, n))[::-1]
        H_eq = U @ np.diag(g)
        lhs, rhs, equal = check_downlink_bounds(H_eq, U @ np.diag(lam) @ U.conj().T, "signal", 1.0)
        assert equal
        eq_dev = max(eq_dev, abs(lhs - rhs))
        lhs, rhs, equal = check_downlink_bounds(H_eq, U @ np.diag(lam[::-1]) @ U.conj().T, "quantizer", 1.0)
        assert equal
        eq_dev = max(eq_dev, abs(lhs - rhs))
    dt = time.perf_counter() - t0
    ok = worst >= -1e-9 and eq_dev <= 1e-9
    assert _verdict(
        "criterion 5 (majorization suite, 1000 probes x 4 bounds)",
        ok,
        f"worst slack {worst:.3e} >= -1e-9, equality dev {eq_dev:.3e} <= 1e-9, {dt:.1f}s",
    )


def test_criterion_6_rate_ceilings():
    """Every solver output obeys rate <= C and rate <= waterfilling capacity."""
    worst_c = np.inf
    worst_wf = np.inf
    for k in range(40):
        n_r = 1 + k % 3
        n_u = 1 + (k // 3) % 3
        inst = ChannelInstance(
            H=random_channel(n_r, n_u, seed=40_000 + k),
            P=(0.5, 2.0)[k % 2],
            C=(0.5, 2.0, 8.0)[k % 3],
            sigma2=1.0,
        )
        gains = svd(inst.H).singular_values
        _, cap = waterfilling_capacity(gains, inst.P, inst.sigma2)
        for direction in ("uplink", "downlink"):
            _, report, _ = solve_instance(inst, direction)
            worst_c = min(worst_c, inst.C - report.rate)
            worst_wf = min(worst_wf, cap - report.rate)
    ok = worst_c >= -1e-9 and worst_wf >= -1e-9
    assert _verdict(
        "criterion 6 (rate ceilings, 40 instances x 2 directions)",
        ok,
        f"min C slack {worst_c:.3e}, min waterfilling slack {worst_wf:.3e}, both >= -1e-9",
    )


def test_criterion_7_solver_vs_grid_oracle():
    """Scalar solver is never worse than the exhaustive grid by > 1e-3."""
    rng = np.random.default_rng(777)
    worst = np.inf
    for k in range(20):
        D = 2 + k % 2
        gains = np.sort(rng.uniform(0.3, 2.5, D))[::-1]
        P = rng.uniform(0.5, 4.0)
        C = rng.uniform(0.5, 8.0)
        direction = ("uplink", "downlink")[k % 2]
        a = solve_scalar_allocation(gains, P, C, 1.0, direction)
        g = grid_oracle_scalar(gains, P, C, 1.0, direction, resolution=61)
        worst = min(worst, a.diagnostics["rate"] - g.diagnostics["rate"])
    ok = worst >= -1e-3
    assert _verdict(
        "criterion 7 (solver vs grid oracle, 20 gain vectors)",
        ok,
        f"worst solver - oracle {worst:.3e} >= -1e-3",
    )


def test_criterion_8_harness_self_test(monkeypatch, tmp_path):
    """A planted half-power base is flagged and the CLI exits nonzero."""
    inst = ChannelInstance(H=random_channel(2, 2, 999), P=2.0, C=4.0, sigma2=1.0)
    worst_margin = -np.inf
    for direction in ("uplink", "downlink"):
        design, _, _ = solve_instance(inst, direction)
        weak = type(design)(S=0.5 * design.S, Q=design.Q, active_basis=design.active_basis)
        report = perturbation_search(inst, direction, weak, trials=200, seed=8)
        assert not report.verdict, direction
        worst_margin = max(worst_margin, report.margin)

    # CLI leg: plant the same defect behind the certify mode
    import cranopt.cli as cli_mod

    real = cli_mod.solve_instance

    def planted(inst_, direction_, opts=None):
        design_, report_, alloc_ = real(inst_, direction_, opts)
        half = type(design_)(S=0.5 * design_.S, Q=design_.Q, active_basis=design_.active_basis)
        return half, report_, alloc_

    monkeypatch.setattr(cli_mod, "solve_instance", planted)
    cfg = ExperimentConfig(mode="certify", random_spec=(2, 2, 1), seed=12, trials=120)
    rows, status = run(cfg)
    cli_ok = status == EXIT_CHECK_FAILED and all(not r.passed for r in rows)
    ok = worst_margin < -0.01 and cli_ok
    assert _verdict(
        "criterion 8 (planted-defect self-test)",
        ok,
        f"planted margin {worst_margin:.3f} < -0.01, certify exit status {status} != 0",
    )
