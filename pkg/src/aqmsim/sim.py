"""Deterministic discrete-event simulation of a single bottleneck queue.

Topology: n AIMD flows inject MSS-sized packets straight into a FIFO byte
queue draining at the link rate; the full base RTT sits on the feedback
path, so a packet's round trip is rtt_base + queueing + transmission.
The AQM draws one per-packet decision at enqueue and the controller state
advances once per sampling period.

Congestion signals are applied at the queue egress: a signalled packet is
carried through the queue and link like any other and then either marked
(delivered with CE) or discarded (counted as a drop, bytes never
delivered).  Drop and mark therefore produce bit-identical queue dynamics
for the same seed, which is exactly the classic-ECN "mark is equivalent
to loss" regime; only the delivered-bytes and drop/mark counters differ.

Determinism: one 64-bit PCG per run, with fixed-offset jumped substreams
per consumer (the AQM decision stream, then one per flow), so adding a
flow never perturbs another consumer's draws.  Events at equal timestamps
execute in fixed type priority (departure, tick, arrival, flow timer) and
then insertion order.
"""

from __future__ import annotations

import math
from collections import deque
from heapq import heappop, heappush

from numpy.random import PCG64, Generator

from aqmsim.aqm import (
    ConvexRedController,
    Decision,
    MarkingMode,
    PiController,
    SoftTargetCurve,
    decide,
)
from aqmsim.codel import CodelController
from aqmsim.metrics import TraceRecord, TraceSet
from aqmsim.scenario import ScenarioConfig
from aqmsim.traffic import FlowState

__all__ = ["run", "BottleneckQueue", "Packet", "substream"]

# event type priorities at equal timestamps (fixed for determinism)
PRIO_DEPARTURE = 0
PRIO_TICK = 1
PRIO_ARRIVAL = 2
PRIO_FLOW_TIMER = 3

# controller kinds, resolved once per run
_PI, _RED, _CODEL, _NONE = range(4)

_CONTROLLER_KINDS = {
    "pi_fixed": _PI,
    "pi2_fixed": _PI,
    "curvy_pi2": _PI,
    "convex_red": _RED,
    "codel_fixed": _CODEL,
    "codel_soft": _CODEL,
    "none": _NONE,
}


def substream(seed: int, offset: int) -> Generator:
    """Independent deterministic RNG substream at a fixed consumer offset."""
    return Generator(PCG64(seed).jumped(offset))


class Packet:
    """One MSS-sized segment in flight."""

    __slots__ = ("flow", "seq", "size", "enqueue_time", "ecn_capable", "verdict")

    def __init__(self, flow: "_SimFlow", seq: int, size: int, enqueue_time: float, ecn_capable: bool):
        self.flow = flow
        self.seq = seq
        self.size = size
        self.enqueue_time = enqueue_time
        self.ecn_capable = ecn_capable
        self.verdict = Decision.FORWARD  # latched at enqueue, applied at egress


class BottleneckQueue:
    """FIFO byte queue with a hard tail-drop limit, drained at the link rate.

    ``backlog`` counts every byte not yet fully transmitted (including the
    packet on the wire), so queue delay is backlog / link_rate.
    """

    def __init__(self, link_rate: float, capacity: int):
        if not (link_rate > 0.0):
            raise ValueError(f"link_rate must be > 0, got {link_rate}")
        self.link_rate = link_rate
        self.capacity = capacity
        self.fifo: deque[Packet] = deque()
        self.in_service: Packet | None = None
        self.backlog = 0

    def delay(self) -> float:
        """Instantaneous queuing delay q(t) = backlog / link_rate."""
        return self.backlog / self.link_rate

    def has_room(self, size: int) -> bool:
        return self.backlog + size <= self.capacity

    def append(self, pkt: Packet) -> None:
        self.backlog += pkt.size
        self.fifo.append(pkt)

    def occupants(self):
        if self.in_service is not None:
            yield self.in_service
        yield from self.fifo


class _SimFlow:
    """Runtime wrapper around FlowState: in-flight accounting and injection."""

    __slots__ = ("fid", "fs", "in_flight", "started")

    def __init__(self, fid: int, fs: FlowState):
        self.fid = fid
        self.fs = fs
        self.in_flight = 0
        self.started = False


class _Simulation:
    def __init__(self, cfg: ScenarioConfig, seed: int):
        self.cfg = cfg
        self.seed = seed
        self.now = 0.0
        self.heap: list = []
        self._event_seq = 0

        self.queue = BottleneckQueue(cfg.link_rate_bytes, cfg.capacity)
        self.mode = MarkingMode(cfg.marking)
        self.kind = _CONTROLLER_KINDS[cfg.controller]
        self.pi: PiController | None = None
        self.red: ConvexRedController | None = None
        self.codel: CodelController | None = None
        if self.kind == _PI:
            q1 = cfg.q1_s if cfg.controller == "curvy_pi2" else 0.0
            self.pi = PiController(
                SoftTargetCurve(cfg.q0_s, q1),
                alpha=cfg.alpha,
                beta=cfg.beta,
                period=cfg.period_s,
                square=cfg.controller != "pi_fixed",
            )
        elif self.kind == _RED:
            self.red = ConvexRedController(cfg.q_max_s, cfg.exponent)
        elif self.kind == _CODEL:
            span = cfg.span_s if cfg.controller == "codel_soft" else 0.0
            self.codel = CodelController(
                base_target=cfg.q0_s, span=span, interval=cfg.interval_s, window=cfg.window_s
            )

        self.aqm_rng = substream(seed, 0)
        self.flows = []
        for i in range(cfg.n_flows):
            fs = FlowState(rtt_base=cfg.rtt_base_s, mss=cfg.mss_bytes, ecn_capable=cfg.ecn_capable)
            self.flows.append(_SimFlow(i, fs))

        self.trace = TraceSet(
            n_flows=cfg.n_flows,
            mss=cfg.mss_bytes,
            link_rate=cfg.link_rate_bytes,
            duration=cfg.duration_s,
        )
        self.drops_cum = 0
        self.marks_cum = 0
        self.delivered_bytes_cum = 0
        self.tick_count = 0

    # -- event plumbing ----------------------------------------------------

    def _push(self, time: float, prio: int, handler, payload) -> None:
        self._event_seq += 1
        heappush(self.heap, (time, prio, self._event_seq, handler, payload))

    # -- flow side ---------------------------------------------------------

    def _try_send(self, flow: _SimFlow) -> None:
        fs = flow.fs
        mss = fs.mss
        while flow.in_flight + mss <= fs.cwnd_bytes:
            seq = fs.note_sent()
            flow.in_flight += mss
            pkt = Packet(flow, seq, mss, self.now, fs.ecn_capable)
            self._push(self.now, PRIO_ARRIVAL, self._on_arrival, pkt)

    def _on_flow_start(self, flow: _SimFlow) -> None:
        flow.started = True
        self._try_send(flow)

    def _on_feedback(self, payload) -> None:
        pkt, signal = payload
        flow = pkt.flow
        flow.in_flight -= pkt.size
        flow.fs.note_feedback_seq(pkt.seq)
        if signal:
            if flow.fs.on_congestion():
                self.trace.recovery_times.append(self.now)
        else:
            flow.fs.on_ack(pkt.size)
        self._try_send(flow)

    def _schedule_feedback(self, pkt: Packet, signal: bool) -> None:
        self._push(self.now + self.cfg.rtt_base_s, PRIO_FLOW_TIMER, self._on_feedback, (pkt, signal))

    # -- queue side ----------------------------------------------------------

    def _on_arrival(self, pkt: Packet) -> None:
        self.trace.packets_generated += 1
        self.trace.per_flow_generated[pkt.flow.fid] = (
            self.trace.per_flow_generated.get(pkt.flow.fid, 0) + 1
        )

        # one decision draw per arriving packet, every mode, every controller
        if self.kind == _PI:
            p = self.pi.p
        elif self.kind == _RED:
            p = self.red.probability(self.queue.delay())
        else:
            p = 0.0
        verdict = decide(p, self.mode, self.aqm_rng, pkt.ecn_capable)

        if not self.queue.has_room(pkt.size):
            # hard buffer limit overrides the AQM outcome
            self._finalize_drop(pkt)
            self._schedule_feedback(pkt, signal=True)
            return

        pkt.verdict = verdict
        self.queue.append(pkt)
        if self.queue.in_service is None:
            self._start_next_transmission()

    def _start_next_transmission(self) -> None:
        """Pick the next packet for the wire; CoDel examines heads here."""
        queue = self.queue
        while queue.fifo:
            pkt = queue.fifo.popleft()
            if self.codel is not None:
                sojourn = self.now - pkt.enqueue_time
                d = self.codel.step(sojourn, self.now)
                if d is Decision.DROP:
                    if self.mode is MarkingMode.CLASSIC_ECN_MARK and pkt.ecn_capable:
                        pkt.verdict = Decision.MARK
                    else:
                        # head drop: frees the buffer without spending link time
                        queue.backlog -= pkt.size
                        self._finalize_drop(pkt)
                        self._schedule_feedback(pkt, signal=True)
                        continue
            queue.in_service = pkt
            self._push(
                self.now + pkt.size / queue.link_rate, PRIO_DEPARTURE, self._on_departure, pkt
            )
            return

    def _on_departure(self, pkt: Packet) -> None:
        queue = self.queue
        queue.backlog -= pkt.size
        queue.in_service = None
        if pkt.verdict is Decision.DROP:
            # signalled loss, applied at egress so queue dynamics match marking
            self._finalize_drop(pkt)
            self._schedule_feedback(pkt, signal=True)
        elif pkt.verdict is Decision.MARK:
            self.marks_cum += 1
            self.trace.packets_marked += 1
            self._finalize_delivery(pkt)
            self._schedule_feedback(pkt, signal=True)
        else:
            self._finalize_delivery(pkt)
            self._schedule_feedback(pkt, signal=False)
        self._start_next_transmission()

    def _finalize_drop(self, pkt: Packet) -> None:
        self.drops_cum += 1
        self.trace.packets_dropped += 1
        self.trace.per_flow_dropped[pkt.flow.fid] = (
            self.trace.per_flow_dropped.get(pkt.flow.fid, 0) + 1
        )

    def _finalize_delivery(self, pkt: Packet) -> None:
        self.delivered_bytes_cum += pkt.size
        self.trace.packets_delivered += 1
        self.trace.per_flow_delivered[pkt.flow.fid] = (
            self.trace.per_flow_delivered.get(pkt.flow.fid, 0) + 1
        )

    # -- controller tick -----------------------------------------------------

    def _on_tick(self, k: int) -> None:
        q = self.queue.delay()
        if self.kind == _PI:
            target = self.pi.target
            p = self.pi.update(q)
            p_prime = self.pi.p_prime
        elif self.kind == _RED:
            p_prime = p = self.red.probability(q)
            target = 0.0
        elif self.kind == _CODEL:
            self.codel.evict_expired(self.now)
            p_prime = p = self.codel.drop_rate_estimate()
            target = self.codel.target()
        else:
            p_prime = p = 0.0
            target = 0.0
        self.tick_count += 1
        self.trace.record(
            TraceRecord(
                time_s=self.now,
                queue_delay_s=q,
                p_prime=p_prime,
                p=p,
                target_s=target,
                backlog_bytes=self.queue.backlog,
                drops_cum=self.drops_cum,
                marks_cum=self.marks_cum,
                delivered_bytes_cum=self.delivered_bytes_cum,
            )
        )
        next_time = (k + 1) * self.cfg.period_s
        if next_time <= self.cfg.duration_s:
            self._push(next_time, PRIO_TICK, self._on_tick, k + 1)

    # -- main loop -----------------------------------------------------------

    def run(self) -> TraceSet:
        cfg = self.cfg
        if cfg.period_s <= cfg.duration_s:
            self._push(cfg.period_s, PRIO_TICK, self._on_tick, 1)
        for flow in self.flows:
            jitter = substream(self.seed, 1 + flow.fid).random() * cfg.rtt_base_s
            self._push(jitter, PRIO_FLOW_TIMER, self._on_flow_start, flow)

        heap = self.heap
        duration = cfg.duration_s
        while heap and heap[0][0] <= duration:
            time, _prio, _seq, handler, payload = heappop(heap)
            self.now = time
            handler(payload)

        self._finish()
        return self.trace

    def _finish(self) -> None:
        trace = self.trace
        for pkt in self.queue.occupants():
            trace.packets_in_queue += 1
            trace.per_flow_in_queue[pkt.flow.fid] = (
                trace.per_flow_in_queue.get(pkt.flow.fid, 0) + 1
            )
        if not trace.conservation_holds():
            raise RuntimeError(
                "packet conservation violated: "
                f"generated={trace.packets_generated} delivered={trace.packets_delivered} "
                f"dropped={trace.packets_dropped} in_queue={trace.packets_in_queue}"
            )


def run(cfg: ScenarioConfig, seed: int | None = None) -> TraceSet:
    """Simulate one scenario; deterministic in (scenario, seed).

    ``seed`` overrides the scenario's seed when given.  Returns the full
    trace set; packet conservation is verified before returning.
    """
    if not math.isfinite(cfg.link_rate_bps) or cfg.link_rate_bps <= 0:
        raise ValueError(f"infeasible scenario: link_rate_bps={cfg.link_rate_bps}")
    if cfg.duration_s <= 0:
        raise ValueError(f"infeasible scenario: duration_s={cfg.duration_s}")
    sim = _Simulation(cfg, cfg.seed if seed is None else seed)
    return sim.run()
