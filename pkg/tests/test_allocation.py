"""Per-subchannel allocation: closed forms, solver, direction mapping."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cranopt import (
    C_MAX_DEFAULT,
    InvalidInputError,
    SolverOptions,
    SubchannelAllocation,
    allocation_rate,
    realize_allocation,
    solve_scalar_allocation,
    subchannel_rate,
    tight_quantizer_downlink,
    tight_quantizer_uplink,
    uplink_to_downlink,
    waterfilling_capacity,
)

RATE_3_2_1 = 1.1926450779423958       # 4 - log2(7) = subchannel_rate(3, 2, 1)
WF_CAP_4_1 = 2.3398500028846247       # log2(81/16), gains^2 = [4, 1], P = 1
DUALITY_EXAMPLE = 0.41503749927884376  # log2(4/3)


def test_subchannel_rate_frozen_value():
    assert np.isclose(subchannel_rate(3.0, 2.0, 1.0), RATE_3_2_1, rtol=1e-14)


def test_subchannel_rate_limits():
    assert subchannel_rate(5.0, 0.0, 1.0) == 0.0
    assert subchannel_rate(0.0, 3.0, 1.0) == 0.0
    # c -> inf recovers the interference-free capacity
    assert np.isclose(subchannel_rate(3.0, 60.0, 1.0), np.log2(4.0), atol=1e-15)


def test_subchannel_rate_vectorized():
    s = np.array([3.0, 0.0])
    c = np.array([2.0, 2.0])
    r = subchannel_rate(s, c, 1.0)
    assert r.shape == (2,)
    assert np.isclose(r[0], RATE_3_2_1)
    assert r[1] == 0.0


def test_tight_quantizer_uplink_meets_budget():
    # q = (h^2 p + sigma2) / (2^c - 1) makes the per-subchannel fronthaul
    # log2((h^2 p + sigma2 + q) / q) equal c exactly
    h2, p, c, sigma2 = 4.0, 1.5, 2.5, 0.8
    q = tight_quantizer_uplink(h2, p, c, sigma2)
    used = np.log2((h2 * p + sigma2 + q) / q)
    assert np.isclose(used, c, rtol=1e-14)


def test_tight_quantizer_downlink_splits_budget():
    x, c = 2.0, 3.0
    q, p_tilde = tight_quantizer_downlink(x, c)
    assert np.isclose(q, x * 2.0**-c, rtol=1e-15)
    assert np.isclose(p_tilde + q, x, rtol=1e-15)
    assert np.isclose(np.log2((p_tilde + q) / q), c, rtol=1e-14)


def test_tight_quantizer_downlink_rejects_zero_share():
    import cranopt

    with pytest.raises(cranopt.DomainError):
        tight_quantizer_downlink(1.0, 0.0)


def test_waterfilling_frozen_value():
    p, cap = waterfilling_capacity(np.array([2.0, 1.0]), 1.0, 1.0)
    assert np.allclose(p, [0.875, 0.125], atol=1e-12)
    assert np.isclose(cap, WF_CAP_4_1, rtol=1e-12)


def test_waterfilling_shuts_weak_channel():
    p, cap = waterfilling_capacity(np.array([2.0, 0.1]), 0.5, 1.0)
    assert p[1] == 0.0
    assert np.isclose(p[0], 0.5)
    assert np.isclose(cap, np.log2(1.0 + 4.0 * 0.5), rtol=1e-14)


def test_waterfilling_exhausts_power():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = rng.uniform(0.1, 3.0, rng.integers(1, 5))
        P = rng.uniform(0.1, 5.0)
        p, cap = waterfilling_capacity(g, P, 1.0)
        assert np.isclose(p.sum(), P, rtol=1e-12)
        assert np.all(p >= 0)
        assert cap >= 0


def test_solver_concentrates_at_small_budgets():
    # equal gains, tight fronthaul: all budget on one subchannel beats the
    # symmetric split (1.0 bit vs log2(3/1.5 * ...) for the spread)
    a = solve_scalar_allocation(np.array([1.0, 1.0]), 2.0, 2.0, 1.0, "uplink")
    assert np.isclose(a.diagnostics["rate"], 1.0, atol=1e-12)
    assert np.allclose(a.power, [0.0, 2.0], atol=1e-9)
    assert np.allclose(a.share, [0.0, 2.0], atol=1e-9)


def test_solver_zero_budgets():
    for P, C in [(0.0, 2.0), (2.0, 0.0), (0.0, 0.0)]:
        a = solve_scalar_allocation(np.array([1.0, 2.0]), P, C, 1.0, "uplink")
        assert a.diagnostics["rate"] == 0.0
        assert np.all(a.power == 0)
        assert np.all(a.share == 0)


def test_solver_respects_budgets():
    rng = np.random.default_rng(7)
    for direction in ("uplink", "downlink"):
        for _ in range(10):
            g = rng.uniform(0.2, 2.5, rng.integers(1, 5))
            P = rng.uniform(0.2, 4.0)
            C = rng.uniform(0.2, 8.0)
            a = solve_scalar_allocation(g, P, C, 1.0, direction)
            assert a.power.sum() <= P + 1e-9
            assert a.share.sum() <= C + 1e-9
            assert np.all(a.power >= 0)
            assert np.all(a.share >= 0)


def test_solver_deterministic():
    g = np.array([1.7, 0.9, 0.4])
    a1 = solve_scalar_allocation(g, 2.0, 3.0, 1.0, "uplink", SolverOptions(seed=5))
    a2 = solve_scalar_allocation(g, 2.0, 3.0, 1.0, "uplink", SolverOptions(seed=5))
    assert np.array_equal(a1.power, a2.power)
    assert np.array_equal(a1.share, a2.share)
    assert a1.diagnostics["rate"] == a2.diagnostics["rate"]


def test_solver_rejects_bad_inputs():
    with pytest.raises(InvalidInputError):
        solve_scalar_allocation(np.array([-1.0]), 1.0, 1.0, 1.0, "uplink")
    with pytest.raises(InvalidInputError):
        solve_scalar_allocation(np.array([1.0]), -1.0, 1.0, 1.0, "uplink")
    with pytest.raises(InvalidInputError):
        solve_scalar_allocation(np.array([1.0]), 1.0, -1.0, 1.0, "uplink")
    with pytest.raises(InvalidInputError):
        solve_scalar_allocation(np.array([1.0]), 1.0, 1.0, 1.0, "sideways")
    with pytest.raises(InvalidInputError):
        solve_scalar_allocation(np.array([1.0]), 1.0, 1.0, -1.0, "uplink")


def test_allocation_container_validation():
    with pytest.raises(InvalidInputError):
        SubchannelAllocation(
            direction="uplink",
            power=np.array([1.0]),
            share=np.array([1.0]),
            quantizer=np.array([1.0]),
            signal_power=np.array([1.0]),  # uplink carries no split
        )
    with pytest.raises(InvalidInputError):
        SubchannelAllocation(
            direction="downlink",
            power=np.array([1.0]),
            share=np.array([1.0]),
            quantizer=np.array([1.0]),
            signal_power=None,  # downlink requires the split
        )


def test_realize_allocation_round_trip():
    g = np.array([2.0, 1.0])
    for direction in ("uplink", "downlink"):
        a = realize_allocation(direction, g, np.array([1.5, 0.5]), np.array([2.0, 1.0]), 1.0)
        r = allocation_rate(g, a, 1.0)
        expect = np.sum(subchannel_rate(g**2 * np.array([1.5, 0.5]), np.array([2.0, 1.0]), 1.0))
        assert np.isclose(r, expect, rtol=1e-12)


def test_uplink_to_downlink_preserves_rates():
    g = np.array([2.0, 1.0, 0.5])
    ul = realize_allocation("uplink", g, np.array([1.0, 0.8, 0.2]), np.array([3.0, 2.0, 1.0]), 1.0)
    dl = uplink_to_downlink(ul)
    assert dl.direction == "downlink"
    assert np.isclose(allocation_rate(g, dl, 1.0), allocation_rate(g, ul, 1.0), rtol=1e-12)
    assert np.isclose(dl.power.sum(), ul.power.sum(), rtol=1e-12)
    assert np.array_equal(dl.share, ul.share)


def test_uplink_to_downlink_drops_dead_power():
    # power parked on a c=0 subchannel contributes no rate either way and has
    # no finite downlink representation; the map zeroes it
    g = np.array([1.0, 1.0])
    ul = realize_allocation("uplink", g, np.array([1.0, 1.0]), np.array([2.0, 0.0]), 1.0)
    dl = uplink_to_downlink(ul)
    assert dl.power[1] == 0.0
    assert np.isclose(allocation_rate(g, dl, 1.0), allocation_rate(g, ul, 1.0), rtol=1e-12)


def test_duality_example_single_subchannel():
    # h = 1, P = 1, C = 1: r = log2(2 / 1.5) = log2(4/3) on both sides
    for direction in ("uplink", "downlink"):
        a = solve_scalar_allocation(np.array([1.0]), 1.0, 1.0, 1.0, direction)
        assert np.isclose(a.diagnostics["rate"], DUALITY_EXAMPLE, atol=1e-12)


def test_share_cap_default():
    assert C_MAX_DEFAULT == 60.0
    a = solve_scalar_allocation(np.array([1.0]), 1.0, 200.0, 1.0, "uplink")
    assert a.share.max() <= 60.0 + 1e-12


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=0.05, max_value=4.0),
    st.floats(min_value=0.05, max_value=4.0),
    st.floats(min_value=0.1, max_value=8.0),
)
def test_rate_monotone_in_budgets(g1, g2, P):
    gains = np.array([g1, g2])
    opts = SolverOptions(multistart=4, seed=1)
    r_small = solve_scalar_allocation(gains, P, 1.0, 1.0, "uplink", opts).diagnostics["rate"]
    r_big = solve_scalar_allocation(gains, P, 2.0, 1.0, "uplink", opts).diagnostics["rate"]
    r_power = solve_scalar_allocation(gains, 2.0 * P, 2.0, 1.0, "uplink", opts).diagnostics["rate"]
    assert r_big >= r_small - 1e-9
    assert r_power >= r_big - 1e-9
