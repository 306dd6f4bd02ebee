"""Simulation lab for extended oracle algorithms, backdated reduction and the
POR constraint machine."""

from .errors import *  # noqa: F401,F403
from .qsim import RegisterLayout, StateVector, Circuit  # noqa: F401

__version__ = "0.1.0"
