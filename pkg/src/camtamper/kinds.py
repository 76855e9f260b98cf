"""Tamper event kinds."""

from enum import Enum


class Kind(str, Enum):
    OCCLUSION = "occlusion"
    DEFOCUS = "defocus"
    MOTION = "motion"
    # emitted by detectors that see a tamper but cannot tell which
    GENERIC = "generic"


TAMPER_KINDS = (Kind.OCCLUSION, Kind.DEFOCUS, Kind.MOTION)
