"""Downlink functionals: the central processor precodes, compresses the
precoded signal over the fronthaul, and the RRH transmits the sum of the
described signal and the compression noise.

For precoded-signal covariance S and compression covariance Q (both
n_r x n_r; the transmitted covariance is S + Q),

    rate      = log2 |H^H (S + Q) H + sigma2 I| - log2 |H^H Q H + sigma2 I|
    fronthaul = log2 |S + Q| - log2 |Q|
    power     = trace(S + Q)

in bits.  The fronthaul ratio is restricted to the described subspace when
the design carries an ``active_basis``: dimensions carrying nothing
(S and Q both zero there) cost zero bits.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, InvalidInputError
from .kernels import LN2, ChannelSpectrum, logdet_ratio
from .problem import ChannelInstance, DownlinkDesign, RateReport, restrict


def _check_dims(inst: ChannelInstance, d: DownlinkDesign) -> None:
    if d.S.shape != (inst.n_r, inst.n_r):
        raise InvalidInputError(f"S must be {inst.n_r}x{inst.n_r}, got {d.S.shape}")


def downlink_rate(inst: ChannelInstance, d: DownlinkDesign) -> float:
    """Achievable downlink rate in bits per channel use."""
    _check_dims(inst, d)
    Hh = inst.H.conj().T
    signal = Hh @ d.S @ inst.H
    base = Hh @ d.Q @ inst.H + inst.sigma2 * np.eye(inst.n_u)
    return logdet_ratio(signal, base) / LN2


def downlink_fronthaul(d: DownlinkDesign) -> float:
    """Bits per channel use needed to describe the precoded signal; depends
    only on the design, not on the channel.

    Requires Q positive definite on the described subspace (DomainError
    otherwise: a noiseless description would take infinitely many bits).
    """
    W = d.active_basis
    if W is not None and W.shape[1] == 0:
        return 0.0
    return logdet_ratio(restrict(d.S, W), restrict(d.Q, W)) / LN2


def assemble_downlink(spec: ChannelSpectrum, a) -> DownlinkDesign:
    """Build the diagonal design S = U diag(p~) U^H, Q = U diag(q) U^H from
    a scalar downlink allocation.

    Off subchannels (share 0, hence signal and quantizer both 0) and
    dimensions beyond the channel rank are excluded from the described
    subspace.  A zero quantizer under nonzero signal power on the same
    subchannel is rejected: its description would cost infinitely many bits.
    """
    if a.direction != "downlink":
        raise InvalidInputError(f"expected a downlink allocation, got {a.direction!r}")
    D = spec.rank
    if len(a.power) != D:
        raise InvalidInputError(f"allocation length {len(a.power)} != rank {D}")
    q = np.asarray(a.quantizer, dtype=float)
    pt = np.asarray(a.signal_power, dtype=float)
    bad = (q == 0) & (pt > 0)
    if bad.any():
        raise DomainError(
            f"zero quantizer with nonzero signal power on subchannel {int(np.argmax(bad))}"
        )
    U = spec.left_basis
    pt_full = np.zeros(spec.n_r)
    q_full = np.zeros(spec.n_r)
    pt_full[:D] = pt
    q_full[:D] = q
    S = (U * pt_full) @ U.conj().T
    Q = (U * q_full) @ U.conj().T

    active = np.zeros(spec.n_r, dtype=bool)
    active[:D] = q > 0
    basis = None if active.all() else U[:, active]
    return DownlinkDesign(S=S, Q=Q, active_basis=basis)


def check_downlink_feasible(
    inst: ChannelInstance, d: DownlinkDesign, tol: float = 1e-9
) -> RateReport:
    """Evaluate the functionals and slacks; power counts signal plus
    compression noise, trace(S + Q).

    diagnostics["fronthaul_reduced"] recomputes the fronthaul from the
    transmitted covariance S + Q via an independent LU-based determinant
    (log2|S+Q| - log2|Q| on the described subspace) as a cross-check.
    """
    rate = downlink_rate(inst, d)
    fh = downlink_fronthaul(d)
    power = float(np.trace(d.S + d.Q).real)
    W = d.active_basis
    if W is not None and W.shape[1] == 0:
        reduced = 0.0
    else:
        total = restrict(d.S + d.Q, W)
        base = restrict(d.Q, W)
        sign_t, ld_t = np.linalg.slogdet(total)
        sign_b, ld_b = np.linalg.slogdet(base)
        if sign_t.real <= 0 or sign_b.real <= 0:
            raise DomainError("transmitted or quantization covariance is singular")
        reduced = float((ld_t - ld_b) / LN2)
    slack_p = inst.P - power
    slack_f = inst.C - fh
    return RateReport(
        rate=rate,
        fronthaul_used=fh,
        power_used=power,
        slack_power=slack_p,
        slack_fronthaul=slack_f,
        feasible=bool(slack_p >= -tol and slack_f >= -tol),
        diagnostics={"fronthaul_reduced": reduced},
    )
