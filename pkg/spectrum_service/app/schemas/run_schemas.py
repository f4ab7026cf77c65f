from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .. import config
from ..enums import ClaimStatus, OutputFormat
from .kernel_schemas import KernelFamily


class KernelConfig(KernelFamily):
    M: Optional[int] = Field(
        None, ge=1, description="Truncation length (lists: defaults to len)"
    )

    @model_validator(mode="after")
    def check_length(self):
        if not self.is_analytic:
            if self.M is not None and self.M > len(self.a):
                raise ValueError("M exceeds the number of listed terms")
        elif self.M is None:
            raise ValueError(f"{self.family.value} kernels need M")
        return self

    def as_family(self) -> KernelFamily:
        return KernelFamily(
            family=self.family, params=self.params, a=self.a, b=self.b
        )

    @property
    def length(self) -> int:
        return self.M if self.M is not None else len(self.a)


class ModesConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_min: int = Field(1, ge=1, description="First mode index")
    n_max: int = Field(..., ge=1, description="Last mode index")

    @model_validator(mode="after")
    def check_range(self):
        if self.n_max < self.n_min:
            raise ValueError("n_max must not be below n_min")
        return self

    @property
    def values(self) -> List[int]:
        return list(range(self.n_min, self.n_max + 1))


class SpectrumConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    J: Optional[int] = Field(
        None, ge=0, description="Real branches per mode (default M - 1)"
    )
    eps: float = Field(
        config.PAIR_BOX_EPS, gt=0, lt=1, description="Pair box half-size"
    )


class TolerancesConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    root: float = Field(config.ROOT_TOLERANCE, gt=0)
    integrator: float = Field(config.INTEGRATOR_TOLERANCE, gt=0)


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    xi: List[float] = Field(..., min_length=1, description="xi_1..xi_nmax")
    t_end: float = Field(..., gt=0)
    t_samples: int = Field(201, ge=2)
    x_samples: Optional[List[float]] = Field(
        None, description="Points in (0, pi) for field reconstruction"
    )
    xi_tail_l2: float = Field(
        0.0, ge=0, description="(sum_{n>n_max} xi_n^2)^(1/2)"
    )

    @model_validator(mode="after")
    def check_samples(self):
        if self.x_samples and not all(
            0 < x < 3.141592653589793 for x in self.x_samples
        ):
            raise ValueError("x_samples must lie in (0, pi)")
        return self


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_values: Optional[List[int]] = Field(
        None, description="Mode indices (default: doublings of n_min)"
    )
    j: int = Field(1, ge=1, description="Branch followed by the sweep")


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "results"
    format: OutputFormat = OutputFormat.csv


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kernel: KernelConfig
    modes: ModesConfig
    spectrum: SpectrumConfig = Field(default_factory=SpectrumConfig)
    tolerances: TolerancesConfig = Field(default_factory=TolerancesConfig)
    simulation: Optional[SimulationConfig] = None
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)


class SpectrumRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    branch: str = Field(..., description='j, "+" or "-"')
    re: float
    im: float
    residual: float
    bracket_lo: float
    bracket_hi: float
    oracle_dist: Optional[float] = None

    @property
    def sort_key(self):
        if self.branch == "+":
            return (self.n, 1, 0)
        if self.branch == "-":
            return (self.n, 1, 1)
        return (self.n, 0, int(self.branch))


class SweepRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    pair_rel_gap: float = Field(..., description="| |lambda+|/(alpha n) - 1 |")
    branch_gap: Optional[float] = Field(
        None, description="|lambda_nj + mu_j|"
    )


class ClaimResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    status: ClaimStatus
    margin: Optional[float] = None
    witness: Optional[str] = None
    detail: str = ""


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    claims: List[ClaimResult]

    @property
    def passed(self) -> bool:
        return all(c.status != ClaimStatus.failed for c in self.claims)

    @property
    def failures(self) -> List[ClaimResult]:
        return [c for c in self.claims if c.status == ClaimStatus.failed]
