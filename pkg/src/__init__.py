#!/usr/bin/env python3
"""
fhclab - Frequent hypercyclicity laboratory.

Numerical experiments on translation semigroups acting on weighted L^p
and C_0 spaces over the half-line: classification of weights, explicit
construction of frequently hypercyclic vectors, orbit hit densities and
near-periodic points.
"""

__version__ = "0.1.0"
__author__ = "fhclab"
__description__ = "Frequent hypercyclicity laboratory for weighted translation semigroups"

from .core.base import ExperimentStatus, Verdict
from .core.config import ConfigManager, LabConfig
from .core.orchestrator import ExperimentResult, Laboratory

__all__ = [
    "ConfigManager",
    "LabConfig",
    "Laboratory",
    "ExperimentResult",
    "ExperimentStatus",
    "Verdict",
]
