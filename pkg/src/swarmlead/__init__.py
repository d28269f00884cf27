"""Leader-follower detection in simulated collective motion."""

from .trajectory import (
    TrajectorySet,
    derive_kinematics,
    extract_window,
    read_trajectory_csv,
    unwrap_heading,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "TrajectorySet",
    "derive_kinematics",
    "extract_window",
    "read_trajectory_csv",
    "unwrap_heading",
    "write_trajectory_csv",
]
