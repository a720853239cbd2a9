"""Uplink functionals: achievable rate and fronthaul cost of a covariance
pair, assembly of diagonal designs from scalar allocations, and the
feasibility report.

The remote radio head observes y = H x + z (z with covariance sigma2 I),
compresses y with quantization-noise covariance Q and forwards the
description to the central processor.  For a transmit covariance S the
achievable rate and the fronthaul cost are

    rate      = log2 |H S H^H + Q + sigma2 I| - log2 |Q + sigma2 I|
    fronthaul = log2 |H S H^H + Q + sigma2 I| - log2 |Q|

in bits, both restricted to the forwarded subspace when the design carries
an ``active_basis`` (dimensions the RRH never forwards cost zero bits).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .kernels import LN2, ChannelSpectrum, logdet_ratio
from .problem import ChannelInstance, RateReport, UplinkDesign, restrict


def _check_dims(inst: ChannelInstance, d: UplinkDesign) -> None:
    if d.S.shape != (inst.n_u, inst.n_u):
        raise InvalidInputError(f"S must be {inst.n_u}x{inst.n_u}, got {d.S.shape}")
    if d.Q.shape != (inst.n_r, inst.n_r):
        raise InvalidInputError(f"Q must be {inst.n_r}x{inst.n_r}, got {d.Q.shape}")


def uplink_rate(inst: ChannelInstance, d: UplinkDesign) -> float:
    """Achievable uplink rate in bits per channel use.  Always >= 0 and
    never exceeds uplink_fronthaul for the same design."""
    _check_dims(inst, d)
    W = d.active_basis
    if W is not None and W.shape[1] == 0:
        return 0.0
    Phi = inst.H @ d.S @ inst.H.conj().T
    base = d.Q + inst.sigma2 * np.eye(inst.n_r)
    return logdet_ratio(restrict(Phi, W), restrict(base, W)) / LN2


def uplink_fronthaul(inst: ChannelInstance, d: UplinkDesign) -> float:
    """Bits per channel use the RRH needs to forward its observation.

    Requires Q positive definite on the active subspace; a singular Q there
    would cost infinitely many bits and raises DomainError.
    """
    _check_dims(inst, d)
    W = d.active_basis
    if W is not None and W.shape[1] == 0:
        return 0.0
    M = inst.H @ d.S @ inst.H.conj().T + inst.sigma2 * np.eye(inst.n_r)
    return logdet_ratio(restrict(M, W), restrict(d.Q, W)) / LN2


def assemble_uplink(spec: ChannelSpectrum, a) -> UplinkDesign:
    """Build the diagonal design S = V diag(p) V^H, Q = U diag(q) U^H from a
    scalar uplink allocation.

    Subchannels with zero fronthaul share (quantizer +inf) and receive
    dimensions beyond the channel rank are left out of the forwarded
    subspace, so their fronthaul cost is exactly zero.
    """
    if a.direction != "uplink":
        raise InvalidInputError(f"expected an uplink allocation, got {a.direction!r}")
    D = spec.rank
    if len(a.power) != D:
        raise InvalidInputError(f"allocation length {len(a.power)} != rank {D}")
    p_full = np.zeros(spec.n_u)
    p_full[:D] = a.power
    V = spec.right_basis
    S = (V * p_full) @ V.conj().T

    q_full = np.zeros(spec.n_r)
    active = np.zeros(spec.n_r, dtype=bool)
    finite = np.isfinite(a.quantizer) & (a.share > 0)
    q_full[:D][finite] = a.quantizer[finite]
    active[:D][finite] = True
    U = spec.left_basis
    Q = (U * q_full) @ U.conj().T

    basis = None if active.all() else U[:, active]
    return UplinkDesign(S=S, Q=Q, active_basis=basis)


def check_uplink_feasible(
    inst: ChannelInstance, d: UplinkDesign, tol: float = 1e-9
) -> RateReport:
    """Evaluate both functionals and the power/fronthaul slacks."""
    rate = uplink_rate(inst, d)
    fh = uplink_fronthaul(inst, d)
    power = float(np.trace(d.S).real)
    slack_p = inst.P - power
    slack_f = inst.C - fh
    return RateReport(
        rate=rate,
        fronthaul_used=fh,
        power_used=power,
        slack_power=slack_p,
        slack_fronthaul=slack_f,
        feasible=bool(slack_p >= -tol and slack_f >= -tol),
    )
