"""Gaussian skin detection and triangle-based face localization."""

from ._core import *  # noqa: F401,F403
from ._core import SkinprobError, __version__  # noqa: F401
