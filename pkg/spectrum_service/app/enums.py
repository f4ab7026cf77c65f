"""
Shared enums for the spectrum service
Used by both the pydantic schemas and the CLI commands
"""
from enum import Enum


class KernelFamilyTag(str, Enum):
    """Kernel families that can be instantiated"""

    finite_list = "finite-list"
    power_law = "power-law"
    logarithmic = "logarithmic"


class GapVerdict(str, Enum):
    """Verdict on sup_k b_k (b_{k+1} - b_k) = infinity"""

    unbounded = "unbounded"
    bounded = "bounded"
    undetermined = "undetermined"


class PairMethod(str, Enum):
    """How the complex pair was located"""

    newton = "newton"
    box_bisection = "box_bisection"
    real_pair = "real_pair"


class ClaimStatus(str, Enum):
    """Outcome of a verification claim"""

    passed = "pass"
    failed = "fail"
    not_applicable = "not_applicable"


class OutputFormat(str, Enum):
    """Result file formats"""

    csv = "csv"
    json = "json"
