"""Single-bottleneck queue simulator for AQM controllers with soft delay targets.

The package couples a deterministic discrete-event FIFO bottleneck with a
family of AQM controllers (PI/PI2 with fixed and load-softened delay targets,
a convex-RED baseline, and a CoDel variant whose target tracks the recent
drop rate) and Reno-like AIMD flows, so the steady-state trade-off between
loss probability and queuing delay can be measured and reproduced.
"""

from aqmsim.aqm import (
    ConvexRedController,
    Decision,
    MarkingMode,
    PiController,
    SoftTargetCurve,
    clamp01,
    decide,
    square_probability,
)
from aqmsim.codel import CodelController
from aqmsim.metrics import RunSummary, TraceRecord, TraceSet, summarize
from aqmsim.scenario import ScenarioConfig, SweepSpec, parse_scenario
from aqmsim.sim import run
from aqmsim.traffic import FlowState, FluidLoad, reno_steady_rate, solve_equilibrium

__all__ = [
    "CodelController",
    "ConvexRedController",
    "Decision",
    "FlowState",
    "FluidLoad",
    "MarkingMode",
    "PiController",
    "RunSummary",
    "ScenarioConfig",
    "SoftTargetCurve",
    "SweepSpec",
    "TraceRecord",
    "TraceSet",
    "clamp01",
    "decide",
    "parse_scenario",
    "reno_steady_rate",
    "run",
    "solve_equilibrium",
    "square_probability",
    "summarize",
]
