"""Controller math for the AQM family.

Everything here is plain value-state arithmetic: the PI update law, the
squaring that maps the internal signal p' to the applied probability p,
the soft (load-dependent) delay-target curve, a convex-RED baseline, and
the per-packet drop/mark decision.

Probabilities are plain floats in [0, 1]; durations are seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Decision",
    "MarkingMode",
    "SoftTargetCurve",
    "PiController",
    "ConvexRedController",
    "clamp01",
    "square_probability",
    "decide",
]


def clamp01(x: float) -> float:
    """Clamp a scalar to the unit interval."""
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


def square_probability(p_prime: float) -> float:
    """Map the internal controller signal p' to the applied probability p = p'^2."""
    return p_prime * p_prime


@dataclass(frozen=True)
class SoftTargetCurve:
    """Delay-target curve: the target grows linearly with the signal p'.

    q0 is the minimum target (seconds), reached at p' = 0.  q1 is the span
    added as p' rises to 1, so the target at p' = 1 is q0 + q1.  q1 = 0
    degenerates to a fixed target, recovering a plain fixed-target
    controller.
    """

    q0: float
    q1: float = 0.0

    def __post_init__(self) -> None:
        if not (self.q0 > 0.0):
            raise ValueError(f"q0 must be > 0, got {self.q0}")
        if self.q1 < 0.0:
            raise ValueError(f"q1 must be >= 0, got {self.q1}")

    def target_from_pprime(self, p_prime: float) -> float:
        """Target delay as a function of the internal signal: q0 + q1 * p'."""
        return self.q0 + self.q1 * p_prime

    def target_from_p(self, p: float) -> float:
        """Target delay as a function of the applied probability: q0 + q1 * sqrt(p).

        Equivalent to ``target_from_pprime(sqrt(p))``; concave in p.
        """
        return self.q0 + self.q1 * math.sqrt(p)


class MarkingMode(Enum):
    """How the congestion signal is applied to a packet.

    In ``CLASSIC_ECN_MARK`` mode the signal probability is identical to
    ``DROP`` mode; an ECN-capable packet is marked where a drop would have
    happened, and a non-ECN packet is still dropped.
    """

    DROP = "drop"
    CLASSIC_ECN_MARK = "classic_ecn_mark"


class Decision(Enum):
    """Per-packet outcome of the AQM signal."""

    FORWARD = "forward"
    DROP = "drop"
    MARK = "mark"


class PiController:
    """PI controller on queuing delay with an optional softened target.

    Once per sampling period the controller nudges its internal signal p'
    by alpha times the distance from the delay target plus beta times the
    delay change since the previous sample, then clamps p' to [0, 1].  The
    target is evaluated on the p' output in the *previous* period, which
    breaks the circular dependency between target and probability.

    With ``square=True`` the applied probability is p = p'^2 (the PI2
    scheme, matched to TCP's square-root response); with ``square=False``
    the signal is applied directly (plain PI).
    """

    def __init__(
        self,
        curve: SoftTargetCurve,
        alpha: float,
        beta: float,
        period: float,
        square: bool = True,
        p_prime: float = 0.0,
        q_prev: float = 0.0,
    ) -> None:
        if not (period > 0.0):
            raise ValueError(f"period must be > 0, got {period}")
        if not (alpha > 0.0):
            raise ValueError(f"alpha must be > 0, got {alpha}")
        if not (beta > 0.0):
            raise ValueError(f"beta must be > 0, got {beta}")
        if not 0.0 <= p_prime <= 1.0:
            raise ValueError(f"p_prime must be in [0,1], got {p_prime}")
        self.curve = curve
        self.alpha = alpha
        self.beta = beta
        self.period = period
        self.square = square
        self.p_prime = p_prime
        self.q_prev = q_prev

    @property
    def p(self) -> float:
        """Currently applied probability."""
        return square_probability(self.p_prime) if self.square else self.p_prime

    @property
    def target(self) -> float:
        """Delay target in effect for the next update (uses the last p' output)."""
        return self.curve.target_from_pprime(self.p_prime)

    def update(self, q_now: float) -> float:
        """Advance one sampling period with the measured delay ``q_now``.

        Returns the applied probability p.  Raises ValueError on a
        non-finite delay sample (corrupted queue measurement).
        """
        if not math.isfinite(q_now):
            raise ValueError(f"queue delay sample must be finite, got {q_now}")
        target = self.curve.target_from_pprime(self.p_prime)
        p_prime = self.p_prime + self.alpha * (q_now - target) + self.beta * (q_now - self.q_prev)
        self.p_prime = clamp01(p_prime)
        self.q_prev = q_now
        return self.p


class ConvexRedController:
    """Clamped power-law drop curve on instantaneous queuing delay.

    A stand-in baseline for RED variants that make the drop probability a
    convex function of delay: p = clamp01((q / q_max) ** exponent).
    exponent = 1 is linear RED-on-delay; exponent >= 2 is convex.  The
    controller is stateless between packets.
    """

    def __init__(self, q_max: float, exponent: float = 2.0) -> None:
        if not (q_max > 0.0):
            raise ValueError(f"q_max must be > 0, got {q_max}")
        if exponent < 1.0:
            raise ValueError(f"exponent must be >= 1, got {exponent}")
        self.q_max = q_max
        self.exponent = exponent

    def probability(self, q_now: float) -> float:
        """Drop probability for the given instantaneous delay (seconds)."""
        if q_now <= 0.0:
            return 0.0
        return clamp01((q_now / self.q_max) ** self.exponent)


def decide(p: float, mode: MarkingMode, rng, ecn_capable: bool = True) -> Decision:
    """Draw the per-packet signal outcome.

    With probability ``p`` the packet is signalled: dropped in DROP mode,
    marked in CLASSIC_ECN_MARK mode if it is ECN-capable, and dropped
    otherwise.  Exactly one uniform variate is consumed from ``rng`` per
    call regardless of mode, so the decision stream is identical across
    modes for the same seed.
    """
    if rng.random() < p:
        if mode is MarkingMode.CLASSIC_ECN_MARK and ecn_capable:
            return Decision.MARK
        return Decision.DROP
    return Decision.FORWARD
