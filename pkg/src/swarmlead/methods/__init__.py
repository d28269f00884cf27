"""Leader-follower detection methods.

Every method maps a :class:`~swarmlead.trajectory.TrajectorySet` and its
config to an :class:`InfluenceMatrix` with leaders on rows.
"""

from .matrix import InfluenceMatrix, centrality, window_starts
from .netinfer import NetInferConfig, infer, lagged_pearson, window_influence
from .te import TEConfig, ksg_cmi, te_infer, transfer_entropy
from .tlmi import TLMIConfig, binned_mi, lag_scan, tlmi_infer

METHODS = {
    "netinfer": (NetInferConfig, infer),
    "te": (TEConfig, te_infer),
    "tlmi": (TLMIConfig, tlmi_infer),
}

__all__ = [
    "METHODS",
    "InfluenceMatrix",
    "NetInferConfig",
    "TEConfig",
    "TLMIConfig",
    "binned_mi",
    "centrality",
    "infer",
    "ksg_cmi",
    "lag_scan",
    "lagged_pearson",
    "te_infer",
    "tlmi_infer",
    "transfer_entropy",
    "window_influence",
    "window_starts",
]
