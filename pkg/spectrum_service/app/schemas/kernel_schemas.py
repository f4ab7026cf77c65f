import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    model_validator,
)

from ..enums import GapVerdict, KernelFamilyTag


class KernelParams(BaseModel):
    """Parameters of the analytic families a_k = A k^-gamma"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    c: float = Field(1.0, gt=0, description="Scale of the decay rates")
    beta: float = Field(1.0, gt=0, description="Exponent of b_k = c k^beta")
    gamma: float = Field(2.0, description="Exponent of a_k = A k^-gamma")
    A: float = Field(1.0, gt=0, description="Amplitude scale")


class KernelFamily(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    family: KernelFamilyTag = Field(..., description="Family tag")
    params: Optional[KernelParams] = Field(
        None, description="Analytic family parameters"
    )
    a: Optional[List[float]] = Field(None, description="Explicit a_k")
    b: Optional[List[float]] = Field(None, description="Explicit b_k")

    @model_validator(mode="before")
    @classmethod
    def default_params(cls, data):
        if (
            isinstance(data, dict)
            and data.get("family") != KernelFamilyTag.finite_list.value
            and data.get("family") != KernelFamilyTag.finite_list
            and data.get("params") is None
            and data.get("a") is None
            and data.get("b") is None
        ):
            data = {**data, "params": {}}
        return data

    @model_validator(mode="after")
    def check_family(self):
        if self.family == KernelFamilyTag.finite_list:
            if self.a is None or self.b is None:
                raise ValueError("finite-list kernels need both a and b")
            if len(self.a) != len(self.b) or not self.a:
                raise ValueError("a and b must be non-empty and same length")
            if self.params is not None:
                raise ValueError("finite-list kernels take no params")
        else:
            if self.a is not None or self.b is not None:
                raise ValueError(
                    f"{self.family.value} kernels take params, not lists"
                )
            if self.params is None:
                raise ValueError(f"{self.family.value} kernels need params")
            if self.params.gamma <= 1:
                raise ValueError(
                    "alpha_sq diverges: gamma must exceed 1 so that "
                    "sum a_k is finite"
                )
        return self

    @property
    def is_analytic(self) -> bool:
        return self.family != KernelFamilyTag.finite_list

    def a_at(self, k: int) -> float:
        """Amplitude a_k, 1-based"""
        if not self.is_analytic:
            return self.a[k - 1]
        return self.params.A * k ** (-self.params.gamma)

    def b_at(self, k: int) -> float:
        """Decay rate b_k, 1-based"""
        if not self.is_analytic:
            return self.b[k - 1]
        if self.family == KernelFamilyTag.power_law:
            return self.params.c * k**self.params.beta
        # log log k for k >= 3, shifted to start at k = 1
        return self.params.c * math.log(math.log(k + 2))

    def tail_mass(self, M: int) -> float:
        """Certified bound on sum_{k > M} a_k"""
        if not self.is_analytic:
            return math.fsum(self.a[M:])
        gamma = self.params.gamma
        return self.params.A * M ** (1 - gamma) / (gamma - 1)


class ExponentialSumKernel(BaseModel):
    """
    Stored prefix of k(t) = sum a_k exp(-b_k t), with an analytic bound on
    the mass of the omitted tail.
    """

    model_config = ConfigDict(frozen=True)

    a: Tuple[float, ...] = Field(..., description="Amplitudes a_k > 0")
    b: Tuple[float, ...] = Field(..., description="Decay rates b_k >= 0")
    tail_mass: float = Field(
        0.0, ge=0, description="Certified bound on sum_{k>M} a_k"
    )
    b_next: Optional[float] = Field(
        None, description="b_{M+1} when the kernel continues"
    )
    family: Optional[KernelFamily] = Field(
        None, description="Family the prefix was instantiated from"
    )

    _a: np.ndarray = PrivateAttr()
    _b: np.ndarray = PrivateAttr()

    @model_validator(mode="after")
    def check_invariants(self):
        if not self.a or len(self.a) != len(self.b):
            raise ValueError("a and b must be non-empty and same length")
        if any(not math.isfinite(x) or x <= 0 for x in self.a):
            raise ValueError("all a_k must be positive and finite")
        if not math.isfinite(self.b[0]) or self.b[0] < 0:
            raise ValueError("b_1 must be nonnegative")
        for k in range(1, len(self.b)):
            if not self.b[k] > self.b[k - 1]:
                raise ValueError(
                    f"b must be strictly increasing (b_{k} >= b_{k + 1})"
                )
        if self.b_next is not None and not self.b_next > self.b[-1]:
            raise ValueError("b_next must exceed the last stored b_k")
        return self

    def model_post_init(self, __context) -> None:
        self._a = np.asarray(self.a, dtype=float)
        self._b = np.asarray(self.b, dtype=float)

    @property
    def M(self) -> int:
        return len(self.a)

    @property
    def alpha_sq_prefix(self) -> float:
        return math.fsum(self.a)

    @property
    def alpha_sq(self) -> float:
        return self.alpha_sq_prefix + self.tail_mass

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha_sq)

    @property
    def alpha_prefix(self) -> float:
        return math.sqrt(self.alpha_sq_prefix)

    @property
    def is_constant(self) -> bool:
        """k(t) = alpha^2, i.e. the wave equation"""
        return self.M == 1 and self.b[0] == 0 and self.tail_mass == 0

    @property
    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._a, self._b

    def delta(self, k: int) -> float:
        """Gap b_{k+1} - b_k, 1-based"""
        if k < self.M:
            return self.b[k] - self.b[k - 1]
        if k == self.M and self.b_next is not None:
            return self.b_next - self.b[-1]
        raise IndexError(f"delta_{k} needs b_{k + 1}, not stored")

    def tail_bound(self, m: int) -> float:
        """Bound on sum_{k>m} a_k for a truncation m <= M"""
        return math.fsum(self.a[m:]) + self.tail_mass

    def next_rate(self, m: int) -> Optional[float]:
        """b_{m+1}, or None past the end of a finite kernel"""
        if m < self.M:
            return self.b[m]
        return self.b_next


class LaplaceValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    z: complex = Field(..., description="Evaluation point")
    value: complex = Field(..., description="Truncated K(z)")
    truncation_bound: float = Field(
        0.0, description="Bound on |K(z) - K_M(z)|"
    )


class GapConditionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    satisfied_empirically: bool
    sup_so_far: float
    witness_index: int
    probe_depth: int
    verdict: GapVerdict
    closed_form: bool = Field(
        False, description="Verdict comes from the family's closed form"
    )
