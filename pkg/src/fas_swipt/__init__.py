"""Joint covariance and fluid-antenna position optimization for MISO SWIPT."""
from .channel import AntennaLayout, ChannelGeometry, PathAngles, Region
from .covariance import QSolution, Status, solve_covariance
from .driver import InfeasibleError, RunOptions, ScenarioConfig, Solution, run

__all__ = [
    "AntennaLayout",
    "ChannelGeometry",
    "InfeasibleError",
    "PathAngles",
    "QSolution",
    "Region",
    "RunOptions",
    "ScenarioConfig",
    "Solution",
    "Status",
    "run",
    "solve_covariance",
]
