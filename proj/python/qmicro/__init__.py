"""Microcanonical density of states and thermodynamics of finite quantum spectra."""

from ._qmicro import *  # noqa: F401,F403
from ._qmicro import __version__  # noqa: F401
