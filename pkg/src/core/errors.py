#!/usr/bin/env python3
"""
Exception hierarchy for fhclab.

Every error raised by the numerical modules derives from ``LabError`` so the
orchestrator can map it to an experiment status.
"""

from typing import Optional


class LabError(Exception):
    """Base class for all laboratory errors."""


class WeightDomainError(LabError):
    """A weight was evaluated outside its representable range."""


class AdmissibilityError(LabError):
    """A weight is not admissible, or no certificate could be obtained."""


class GridAlignmentError(LabError):
    """A time or length is not a multiple of the grid step."""


class DensityError(LabError):
    """A hit set or integer sequence violates its invariants."""


class FamilyError(LabError):
    """A separated family could not be built or failed verification."""


class HypothesisViolation(LabError):
    """A hypothesis of the criterion does not hold (e.g. divergent weight)."""


class ConstructionError(LabError):
    """The frequently hypercyclic vector could not be constructed."""


class ClassificationError(LabError):
    """Verdicts contradict each other; signals an internal inconsistency."""


class ConfigError(LabError):
    """Invalid configuration, with field and line diagnostics when known."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = ""
        if field:
            location += f"field '{field}'"
        if line is not None:
            location += f"{', ' if location else ''}line {line}"
        super().__init__(f"{location}: {message}" if location else message)
