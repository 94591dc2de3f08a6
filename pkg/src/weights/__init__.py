"""
Weight kinds.

Each module implements ``WeightProfile`` for one family of weights; the
registry below maps descriptor kinds to constructors.
"""

from typing import Any, Callable, Dict, Mapping

from ..core.base import WeightProfile
from ..core.errors import ConfigError
from .constant import ConstantProfile
from .exponential import ExponentialProfile
from .rational import RationalProfile
from .sampled import SampledProfile
from .sinlog import SinLogProfile

SAMPLED_TAIL_KINDS = ("exponential", "rational", "constant")


def _params(descriptor: Mapping[str, Any]) -> list:
    params = descriptor.get("params", [])
    if isinstance(params, (int, float)):
        params = [params]
    return list(params)


def _exponential(descriptor: Mapping[str, Any]) -> WeightProfile:
    params = _params(descriptor)
    return ExponentialProfile(float(descriptor.get("a", params[0] if params else 1.0)))


def _constant(descriptor: Mapping[str, Any]) -> WeightProfile:
    params = _params(descriptor)
    return ConstantProfile(float(descriptor.get("c", params[0] if params else 1.0)))


def _sampled(descriptor: Mapping[str, Any]) -> WeightProfile:
    for key in ("step", "values"):
        if key not in descriptor:
            raise ConfigError("sampled weight requires 'step' and 'values'", field=f"weight.{key}")
    tail = descriptor.get("tail")
    tail_profile = profile_from_descriptor(tail) if tail else None
    if tail_profile is not None and tail_profile.kind not in SAMPLED_TAIL_KINDS:
        raise ConfigError("sampled tail must be exponential, rational or constant", field="weight.tail")
    return SampledProfile(float(descriptor["step"]), descriptor["values"], tail_profile)


PROFILE_BUILDERS: Dict[str, Callable[[Mapping[str, Any]], WeightProfile]] = {
    "exponential": _exponential,
    "rational": lambda d: RationalProfile(),
    "constant": _constant,
    "sinlog": lambda d: SinLogProfile(),
    "sampled": _sampled,
}


def profile_from_descriptor(descriptor: Mapping[str, Any]) -> WeightProfile:
    """
    Build a weight profile from a descriptor mapping.

    Args:
        descriptor: Mapping with at least a ``kind`` key

    Returns:
        The matching WeightProfile
    """
    kind = descriptor.get("kind")
    if kind not in PROFILE_BUILDERS:
        raise ConfigError(f"unknown weight kind {kind!r}; expected one of {sorted(PROFILE_BUILDERS)}",
                          field="weight.kind")
    try:
        return PROFILE_BUILDERS[kind](descriptor)
    except (TypeError, ValueError, IndexError) as e:
        raise ConfigError(str(e), field="weight") from e


__all__ = [
    "SAMPLED_TAIL_KINDS",
    "ConstantProfile",
    "ExponentialProfile",
    "RationalProfile",
    "SampledProfile",
    "SinLogProfile",
    "profile_from_descriptor",
]
