"""CoDel soft-target controller: window estimator, state machine, span=0 reduction."""

from __future__ import annotations

import math

import numpy as np
import pytest

from aqmsim.aqm import Decision
from aqmsim.codel import CodelController

MS = 1e-3


class FixedTargetCodel:
    """Reference fixed-target CoDel, written straight from the classic
    dequeue pseudocode (first-above-time detection, control law
    drop_next += interval/sqrt(count), re-entry memory of 16 intervals).

    One call per dequeued packet; the caller linearizes the multi-drop
    while-loop by re-calling at the same timestamp for the next packet.
    """

    def __init__(self, target: float, interval: float = 0.1) -> None:
        self.target = target
        self.interval = interval
        self.first_above_time = 0.0
        self.drop_next = 0.0
        self.count = 0
        self.lastcount = 0
        self.dropping = False

    def _ok_to_drop(self, sojourn: float, now: float) -> bool:
        if sojourn < self.target:
            self.first_above_time = 0.0
            return False
        if self.first_above_time == 0.0:
            self.first_above_time = now + self.interval
            return False
        return now >= self.first_above_time

    def dequeue(self, sojourn: float, now: float) -> bool:
        """True if this packet is dropped."""
        ok = self._ok_to_drop(sojourn, now)
        if self.dropping:
            if not ok:
                self.dropping = False
                return False
            if now >= self.drop_next:
                self.count += 1
                self.drop_next += self.interval / math.sqrt(self.count)
                return True
            return False
        if ok:
            self.dropping = True
            delta = self.count - self.lastcount
            if delta > 1 and now - self.drop_next < 16.0 * self.interval:
                self.count = delta
            else:
                self.count = 1
            self.lastcount = self.count
            self.drop_next = now + self.interval / math.sqrt(self.count)
            return True
        return False


class TestSoftTarget:
    def test_zero_drop_rate_gives_base_target(self):
        c = CodelController(base_target=5 * MS, span=95 * MS)
        c.packets_in_window = 1000
        c.drops_in_window = 0
        assert c.target() == 5 * MS

    def test_all_dropped_saturates_at_base_plus_span(self):
        c = CodelController(base_target=5 * MS, span=95 * MS)
        c.packets_in_window = 400
        c.drops_in_window = 400
        assert c.target() == pytest.approx(100 * MS, abs=1e-15)

    def test_hand_value(self):
        # 5ms + 95ms * 50/1000 = 9.75ms
        c = CodelController(base_target=5 * MS, span=95 * MS)
        c.packets_in_window = 1000
        c.drops_in_window = 50
        assert c.target() == pytest.approx(9.75 * MS, abs=1e-15)

    def test_empty_window_defaults_to_base(self):
        c = CodelController(base_target=5 * MS, span=95 * MS)
        assert c.drop_rate_estimate() == 0.0
        assert c.target() == 5 * MS

    def test_window_eviction_keeps_counters_consistent(self):
        c = CodelController(base_target=5 * MS, span=95 * MS, window=1.0)
        rng = np.random.default_rng(5)
        now = 0.0
        for _ in range(5000):
            now += rng.uniform(0.0, 0.01)
            c.step(rng.uniform(0.0, 0.02), now)
            assert 0 <= c.drops_in_window <= c.packets_in_window
            assert c.base_target <= c.target() <= c.base_target + c.span
        # after a long quiet gap everything ages out
        c.evict_expired(now + 10.0)
        assert c.packets_in_window == 0
        assert c.drops_in_window == 0

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            CodelController(base_target=0.0)
        with pytest.raises(ValueError):
            CodelController(base_target=5 * MS, span=-0.01)
        with pytest.raises(ValueError):
            CodelController(base_target=5 * MS, interval=0.0)
        with pytest.raises(ValueError):
            CodelController(base_target=5 * MS, window=0.0)


class TestStateMachine:
    def test_quiescent_below_target_never_drops(self):
        c = CodelController(base_target=5 * MS, span=0.0, interval=0.1)
        now = 0.0
        for _ in range(2000):
            now += 0.001
            assert c.step(2 * MS, now) is Decision.FORWARD
        assert not c.dropping

    def test_persistent_excursion_enters_dropping(self):
        c = CodelController(base_target=5 * MS, span=0.0, interval=0.1)
        decisions = []
        now = 0.0
        for _ in range(300):
            now += 0.001
            decisions.append(c.step(20 * MS, now))
        # nothing for the first interval, then dropping starts
        first_drop = decisions.index(Decision.DROP)
        assert decisions[:first_drop] == [Decision.FORWARD] * first_drop
        assert 0.1 <= (first_drop + 1) * 0.001 <= 0.11
        assert c.dropping
        assert c.count >= 1

    def test_drop_spacing_shrinks_with_count(self):
        c = CodelController(base_target=5 * MS, span=0.0, interval=0.1)
        now = 0.0
        drop_times = []
        for _ in range(3000):
            now += 0.001
            if c.step(20 * MS, now) is Decision.DROP:
                drop_times.append(now)
        gaps = np.diff(drop_times)
        assert len(gaps) >= 20
        # control law: gap k is interval/sqrt(k), up to the 1 ms call grid
        for k, gap in enumerate(gaps[:10], start=1):
            assert gap == pytest.approx(0.1 / math.sqrt(k), abs=0.002)
        assert gaps[19] < gaps[0] / 3

    def test_recovery_resets_dropping_state(self):
        c = CodelController(base_target=5 * MS, span=0.0, interval=0.1)
        now = 0.0
        for _ in range(500):
            now += 0.001
            c.step(20 * MS, now)
        assert c.dropping
        now += 0.001
        assert c.step(1 * MS, now) is Decision.FORWARD
        assert not c.dropping
        assert c.first_above_time == 0.0


def _synthetic_sojourn_stream(n: int, seed: int):
    """Bursty sojourn trace swinging above and below a 5 ms target."""
    rng = np.random.default_rng(seed)
    now = 0.0
    level = 2 * MS
    for _ in range(n):
        now += rng.uniform(0.0002, 0.002)
        # occasional regime flips between congested and idle-ish
        if rng.random() < 0.002:
            level = rng.choice([1 * MS, 4 * MS, 8 * MS, 20 * MS])
        sojourn = max(0.0, level + rng.normal(0.0, 1 * MS))
        yield sojourn, now


class TestSpanZeroReduction:
    def test_identical_decisions_on_long_replay(self):
        soft = CodelController(base_target=5 * MS, span=0.0, interval=0.1)
        ref = FixedTargetCodel(target=5 * MS, interval=0.1)
        mismatches = 0
        drops = 0
        for sojourn, now in _synthetic_sojourn_stream(100_000, seed=11):
            got = soft.step(sojourn, now) is Decision.DROP
            want = ref.dequeue(sojourn, now)
            mismatches += got != want
            drops += want
        assert mismatches == 0
        assert drops > 100  # the stream must actually exercise the drop law

    def test_positive_span_raises_target_under_drops(self):
        soft = CodelController(base_target=5 * MS, span=95 * MS, interval=0.1)
        now = 0.0
        for _ in range(3000):
            now += 0.001
            soft.step(20 * MS, now)
        assert soft.drops_in_window > 0
        assert soft.target() > soft.base_target
