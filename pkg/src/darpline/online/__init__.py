"""Online algorithms and the simulation kernel."""

from .algorithms import (
    GreedyReplan,
    Ignore,
    Mirrored,
    SmarterStart,
    Smartstart,
    make_ignore,
    make_replan,
    make_smarterstart,
    make_smartstart,
    schedule_plan,
    smarterstart_start_time,
    smartstart_start_time,
)
from .eager import Eagerized, eagerize
from .kernel import (
    AlgorithmStalled,
    HorizonExceeded,
    InfeasiblePlan,
    Kernel,
    Leg,
    OnlineAlgorithm,
    Plan,
    ScheduleRecord,
    ServerView,
    SimulationError,
    SimulationResult,
    simulate,
)

__all__ = [
    "AlgorithmStalled",
    "Eagerized",
    "GreedyReplan",
    "HorizonExceeded",
    "Ignore",
    "InfeasiblePlan",
    "Kernel",
    "Leg",
    "Mirrored",
    "OnlineAlgorithm",
    "Plan",
    "ScheduleRecord",
    "ServerView",
    "SimulationError",
    "SimulationResult",
    "SmarterStart",
    "Smartstart",
    "eagerize",
    "make_ignore",
    "make_replan",
    "make_smarterstart",
    "make_smartstart",
    "schedule_plan",
    "simulate",
    "smarterstart_start_time",
    "smartstart_start_time",
]
