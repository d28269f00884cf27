"""Agent-based simulators producing trajectory sets."""

from . import vicsek, wolfsheep
from .vicsek import VicsekConfig
from .wolfsheep import WolfSheepConfig

MODELS = {
    "vicsek": (VicsekConfig, vicsek.run),
    "wolfsheep": (WolfSheepConfig, wolfsheep.run),
}

__all__ = ["MODELS", "VicsekConfig", "WolfSheepConfig", "vicsek", "wolfsheep"]
