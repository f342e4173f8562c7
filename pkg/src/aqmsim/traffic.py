"""Load models: packet-level Reno-like AIMD flows and their fluid counterpart.

The packet-level ``FlowState`` closes the loop with the AQM inside the
simulator.  The fluid side (``reno_steady_rate`` / ``solve_equilibrium``)
predicts the steady-state operating point independently of the simulator
and serves as the oracle the simulation is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from aqmsim.aqm import SoftTargetCurve

__all__ = [
    "FlowState",
    "FluidLoad",
    "reno_steady_rate",
    "solve_equilibrium",
]

INITIAL_CWND_SEGMENTS = 10.0

# Bisection bracket for the equilibrium loss probability.
P_BRACKET_LO = 1e-9
P_BRACKET_HI = 1.0


@dataclass
class FlowState:
    """Congestion state of one Reno-like AIMD flow.

    cwnd and ssthresh are in segments (fractional during congestion
    avoidance).  The recovery latch guarantees at most one halving per
    round trip: after a congestion signal the flow ignores further signals
    until a segment sent after the halving is acknowledged.
    """

    rtt_base: float
    mss: int = 1500
    cwnd: float = INITIAL_CWND_SEGMENTS
    ssthresh: float = math.inf
    in_recovery: bool = False
    ecn_capable: bool = True
    # sequence bookkeeping for the recovery latch
    next_seq: int = 0
    recovery_exit_seq: int = field(default=0, repr=False)

    @property
    def cwnd_bytes(self) -> float:
        return self.cwnd * self.mss

    def on_ack(self, acked: int) -> None:
        """Grow the window for ``acked`` bytes of newly acknowledged data.

        Slow start adds one segment per ACKed segment while below ssthresh;
        congestion avoidance adds 1/cwnd segments per ACKed segment.
        """
        if acked <= 0:
            raise ValueError(f"acked must be > 0, got {acked}")
        segments = acked / self.mss
        if self.cwnd < self.ssthresh:
            self.cwnd += segments
        else:
            self.cwnd += segments / self.cwnd

    def on_congestion(self) -> bool:
        """React to a loss or classic-ECN mark.

        Halves the window and arms the recovery latch; inside recovery the
        signal is ignored.  Returns True if the window was actually halved.
        """
        if self.in_recovery:
            return False
        self.cwnd = max(1.0, self.cwnd / 2.0)
        self.ssthresh = self.cwnd
        self.in_recovery = True
        self.recovery_exit_seq = self.next_seq
        return True

    def note_sent(self) -> int:
        """Record one segment handed to the network; returns its sequence number."""
        seq = self.next_seq
        self.next_seq += 1
        return seq

    def note_feedback_seq(self, seq: int) -> None:
        """Release the recovery latch once a post-halving segment is acknowledged."""
        if self.in_recovery and seq >= self.recovery_exit_seq:
            self.in_recovery = False


@dataclass(frozen=True)
class FluidLoad:
    """Aggregate long-lived load description for the fluid model."""

    n_flows: int
    rtt_base: float
    mss: int = 1500

    def __post_init__(self) -> None:
        if self.n_flows < 1:
            raise ValueError(f"n_flows must be >= 1, got {self.n_flows}")
        if not (self.rtt_base > 0.0):
            raise ValueError(f"rtt_base must be > 0, got {self.rtt_base}")
        if self.mss <= 0:
            raise ValueError(f"mss must be > 0, got {self.mss}")


def reno_steady_rate(p: float, rtt: float, mss: int) -> float:
    """Steady-state Reno throughput in bytes/second: (mss/rtt) * sqrt(3/(2p)).

    The square-root response function; the reason a fixed delay target
    forces the loss probability to grow quadratically with flow count.
    """
    if p <= 0.0:
        raise ValueError("loss probability must be > 0 (rate is unbounded at p = 0)")
    if p > 1.0:
        raise ValueError(f"loss probability must be <= 1, got {p}")
    if not (rtt > 0.0):
        raise ValueError(f"rtt must be > 0, got {rtt}")
    return (mss / rtt) * math.sqrt(3.0 / (2.0 * p))


def _rate_balance_residual(
    p: float, load: FluidLoad, link_rate: float, curve: SoftTargetCurve
) -> float:
    """Offered aggregate rate minus link rate at loss probability p.

    The queue is assumed to sit at the target delay q(p) = q0 + q1*sqrt(p),
    so the effective RTT is rtt_base + q(p).  Strictly decreasing in p.
    """
    q = curve.target_from_p(p)
    rate = reno_steady_rate(p, load.rtt_base + q, load.mss)
    return load.n_flows * rate - link_rate


def solve_equilibrium(
    load: FluidLoad, link_rate: float, curve: SoftTargetCurve
) -> tuple[float, float]:
    """Fluid-model operating point (p*, q*) for a long-lived AIMD load.

    Solves, by bisection on p over [1e-9, 1], the pair

        q* = q0 + q1 * sqrt(p*)
        n_flows * reno_steady_rate(p*, rtt_base + q*, mss) = link_rate

    ``link_rate`` is in bytes/second.  Raises ValueError when no root lies
    in the bracket: either the flows cannot fill the link even at the
    minimum loss probability, or they exceed it even at p = 1.
    """
    if not (link_rate > 0.0):
        raise ValueError(f"link_rate must be > 0, got {link_rate}")
    lo, hi = P_BRACKET_LO, P_BRACKET_HI
    f_lo = _rate_balance_residual(lo, load, link_rate, curve)
    f_hi = _rate_balance_residual(hi, load, link_rate, curve)
    if f_lo < 0.0:
        raise ValueError(
            "load infeasible: flows cannot fill the link even at minimal loss "
            f"(residual {f_lo:.3g} B/s at p = {lo:g})"
        )
    if f_hi > 0.0:
        raise ValueError(
            "load infeasible: aggregate minimum-rate exceeds the link even at p = 1 "
            f"(residual {f_hi:.3g} B/s)"
        )
    # the residual changes sign exactly once (strictly decreasing in p)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _rate_balance_residual(mid, load, link_rate, curve) > 0.0:
            lo = mid
        else:
            hi = mid
        if (hi - lo) < 1e-15 * hi:
            break
    p_star = 0.5 * (lo + hi)
    return p_star, curve.target_from_p(p_star)
