"""CoDel with a drop-rate-dependent delay target.

Standard CoDel state machine (first-above-time detection, drop scheduling
at interval/sqrt(count)) operating on per-packet sojourn times, except the
target is not a constant: it is softened by the recent drop rate,

    target = base_target + span * (drops_in_window / packets_in_window)

estimated over a sliding window of dequeued packets.  span = 0 reduces the
controller to classic fixed-target CoDel decision-for-decision.
"""

from __future__ import annotations

import math
from collections import deque

from aqmsim.aqm import Decision

__all__ = ["CodelController"]

# Classic CoDel re-entry heuristic: resume from the previous drop count if
# the queue re-congests within this many intervals of the last schedule.
REENTRY_MEMORY_INTERVALS = 16.0


class CodelController:
    """Per-packet CoDel decisions with a soft (drop-rate-driven) target."""

    def __init__(
        self,
        base_target: float,
        span: float = 0.0,
        interval: float = 0.1,
        window: float = 1.0,
    ) -> None:
        if not (base_target > 0.0):
            raise ValueError(f"base_target must be > 0, got {base_target}")
        if span < 0.0:
            raise ValueError(f"span must be >= 0, got {span}")
        if not (interval > 0.0):
            raise ValueError(f"interval must be > 0, got {interval}")
        if not (window > 0.0):
            raise ValueError(f"window must be > 0, got {window}")
        self.base_target = base_target
        self.span = span
        self.interval = interval
        self.window = window
        # sliding window of (dequeue time, was dropped) per packet
        self._events: deque[tuple[float, bool]] = deque()
        self.drops_in_window = 0
        self.packets_in_window = 0
        # classic CoDel state
        self.dropping = False
        self.first_above_time = 0.0
        self.drop_next = 0.0
        self.count = 0
        self.lastcount = 0

    def drop_rate_estimate(self) -> float:
        """Drop probability estimate from the sliding window."""
        return self.drops_in_window / max(1, self.packets_in_window)

    def target(self) -> float:
        """Effective delay target; lies in [base_target, base_target + span]."""
        return self.base_target + self.span * self.drop_rate_estimate()

    def evict_expired(self, now: float) -> None:
        """Drop window entries older than ``now - window`` from the counters."""
        horizon = now - self.window
        events = self._events
        while events and events[0][0] < horizon:
            _, was_drop = events.popleft()
            self.packets_in_window -= 1
            if was_drop:
                self.drops_in_window -= 1

    def step(self, sojourn: float, now: float) -> Decision:
        """Decide the fate of one dequeued packet with the given sojourn time.

        Must be called in nondecreasing ``now`` order.  Window counters are
        refreshed before the target is evaluated and the packet's own
        outcome is appended after the decision.
        """
        self.evict_expired(now)
        target = self.target()

        if sojourn < target:
            self.first_above_time = 0.0
            self.dropping = False
            decision = Decision.FORWARD
        elif self.first_above_time == 0.0:
            # first packet at/above target: arm the detection timer
            self.first_above_time = now + self.interval
            decision = Decision.FORWARD
        elif self.dropping:
            if now >= self.drop_next:
                self.count += 1
                self.drop_next += self.interval / math.sqrt(self.count)
                decision = Decision.DROP
            else:
                decision = Decision.FORWARD
        elif now >= self.first_above_time:
            # sojourn stayed above target for a full interval: start dropping
            self.dropping = True
            delta = self.count - self.lastcount
            if delta > 1 and now - self.drop_next < REENTRY_MEMORY_INTERVALS * self.interval:
                self.count = delta
            else:
                self.count = 1
            self.lastcount = self.count
            self.drop_next = now + self.interval / math.sqrt(self.count)
            decision = Decision.DROP
        else:
            decision = Decision.FORWARD

        self._events.append((now, decision is Decision.DROP))
        self.packets_in_window += 1
        if decision is Decision.DROP:
            self.drops_in_window += 1
        return decision
