"""Downlink compression functionals and design assembly."""

import numpy as np
import pytest

from cranopt import (
    ChannelInstance,
    DomainError,
    DownlinkDesign,
    assemble_downlink,
    check_downlink_feasible,
    downlink_fronthaul,
    downlink_rate,
    realize_allocation,
    solve_scalar_allocation,
    svd,
)

TWO_LOG2_3_2 = 1.1699250014423124  # 2*log2(3/2)


def _identity_instance(P=4.0, C=4.0):
    return ChannelInstance(H=np.eye(2), P=P, C=C, sigma2=1.0)


def test_rate_identity_channel():
    inst = _identity_instance()
    d = DownlinkDesign(S=np.eye(2), Q=np.eye(2))
    assert np.isclose(downlink_rate(inst, d), TWO_LOG2_3_2, rtol=1e-14)


def test_fronthaul_is_design_only():
    d = DownlinkDesign(S=np.eye(2), Q=np.eye(2))
    assert np.isclose(downlink_fronthaul(d), 2.0, rtol=1e-14)  # log2|2I| - log2|I|


def test_zero_signal_zero_everything():
    inst = _identity_instance()
    d = DownlinkDesign(S=np.zeros((2, 2)), Q=np.eye(2))
    assert downlink_rate(inst, d) == 0.0
    assert np.isclose(downlink_fronthaul(d), 0.0)


def test_power_is_trace_of_sum():
    inst = _identity_instance(P=10.0)
    d = DownlinkDesign(S=2.0 * np.eye(2), Q=np.eye(2))
    rep = check_downlink_feasible(inst, d)
    assert np.isclose(rep.power_used, 6.0)
    assert rep.feasible


def test_assemble_matches_scalar_objective():
    rng = np.random.default_rng(21)
    for _ in range(5):
        H = (rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))) / np.sqrt(2)
        inst = ChannelInstance(H=H, P=2.0, C=3.5, sigma2=1.0)
        spec = svd(inst.H)
        a = solve_scalar_allocation(spec.singular_values, inst.P, inst.C, inst.sigma2, "downlink")
        d = assemble_downlink(spec, a)
        rep = check_downlink_feasible(inst, d)
        assert rep.feasible, rep.diagnostics
        assert np.isclose(rep.rate, a.diagnostics["rate"], rtol=1e-10, atol=1e-12)


def test_off_subchannels_are_excluded():
    spec = svd(np.diag([2.0, 1.0]))
    a = realize_allocation("downlink", spec.singular_values, np.array([2.0, 0.0]), np.array([3.0, 0.0]), 1.0)
    d = assemble_downlink(spec, a)
    assert d.active_basis is not None
    assert d.active_basis.shape == (2, 1)
    assert np.isclose(downlink_fronthaul(d), 3.0, rtol=1e-10)


def test_assemble_rejects_signal_without_quantizer():
    # p_tilde > 0 with q = 0 has unbounded fronthaul cost
    spec = svd(np.eye(2))
    from cranopt import SubchannelAllocation

    a = SubchannelAllocation(
        direction="downlink",
        power=np.array([1.0, 0.0]),
        share=np.array([2.0, 0.0]),
        quantizer=np.array([0.0, 0.0]),
        signal_power=np.array([1.0, 0.0]),
    )
    with pytest.raises(DomainError):
        assemble_downlink(spec, a)


def test_check_flags_fronthaul_violation():
    inst = _identity_instance(C=1.0)
    d = DownlinkDesign(S=np.eye(2), Q=np.eye(2))
    rep = check_downlink_feasible(inst, d)
    assert not rep.feasible
    assert rep.slack_fronthaul < 0


def test_rate_uses_full_space_even_with_active_basis():
    # restriction applies to the fronthaul determinant only; the user hears
    # everything the RRH radiates
    spec = svd(np.diag([2.0, 1.0]))
    a = realize_allocation("downlink", spec.singular_values, np.array([2.0, 0.0]), np.array([3.0, 0.0]), 1.0)
    d = assemble_downlink(spec, a)
    inst = ChannelInstance(H=np.diag([2.0, 1.0]), P=2.0, C=3.0, sigma2=1.0)
    full = DownlinkDesign(S=d.S, Q=d.Q + 1e-30 * np.eye(2))
    assert np.isclose(downlink_rate(inst, d), downlink_rate(inst, full), rtol=1e-9)
