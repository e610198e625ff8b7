"""Floquet spectra and Hamiltonian-Hopf points of Klein-Gordon periodic traveling waves."""

from ._kghopf import *  # noqa: F401,F403
from ._kghopf import __doc__  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
