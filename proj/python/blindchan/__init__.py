"""Blind OFDM channel estimation with nearby-channel initialization."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
