"""Homology-based obstructions to dynamic feedback stabilization on fibre bundles."""

from ._fibrestab import *  # noqa: F401,F403
from ._fibrestab import __doc__  # noqa: F401

__version__ = "0.1.0"
