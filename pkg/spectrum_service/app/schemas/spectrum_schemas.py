from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..enums import PairMethod


class RealZeroLadder(BaseModel):
    """Zeros -mu_j of K, one per pole gap (b_j, b_{j+1})"""

    model_config = ConfigDict(frozen=True)

    mu: Tuple[float, ...] = Field(..., description="mu_1..mu_J")
    brackets: Tuple[Tuple[float, float], ...] = Field(
        ..., description="(b_j, b_{j+1}) per j"
    )
    residuals: Tuple[float, ...] = Field(..., description="|K(-mu_j)|")

    @property
    def J(self) -> int:
        return len(self.mu)

    def interlaces(self) -> bool:
        return all(
            lo < mu < hi for mu, (lo, hi) in zip(self.mu, self.brackets)
        )


class RealBranch(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Mode index")
    j: int = Field(..., ge=1, description="Branch index")
    eigenvalue: float = Field(..., description="lambda_nj")
    bracket: Tuple[float, float] = Field(
        ..., description="(-b_{j+1}, -mu_j)"
    )
    residual: float = Field(..., description="|G_n(lambda_nj)|")
    truncation_sensitive: bool = Field(
        False, description="Top branch of a truncated infinite kernel"
    )

    def contained(self) -> bool:
        lo, hi = self.bracket
        return lo < self.eigenvalue < hi


class MonotoneReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    j: int
    n_values: List[int]
    eigenvalues: List[float]
    gaps: List[float] = Field(..., description="|lambda_nj + mu_j|")
    increasing: bool
    gaps_decreasing: bool

    @property
    def monotone(self) -> bool:
        return self.increasing and self.gaps_decreasing


class Rectangle(BaseModel):
    """Axis-aligned rectangle, boundary traversed counterclockwise"""

    model_config = ConfigDict(frozen=True)

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @model_validator(mode="after")
    def check_extent(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("rectangle must have positive width and height")
        return self

    @classmethod
    def centered_square(cls, half_width: float) -> "Rectangle":
        return cls(
            x_min=-half_width,
            x_max=half_width,
            y_min=-half_width,
            y_max=half_width,
        )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> complex:
        return complex(
            (self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2
        )

    @property
    def half_diagonal(self) -> float:
        return abs(complex(self.width, self.height)) / 2

    def vertices(self) -> List[complex]:
        """Counterclockwise, starting at the lower-left corner"""
        return [
            complex(self.x_min, self.y_min),
            complex(self.x_max, self.y_min),
            complex(self.x_max, self.y_max),
            complex(self.x_min, self.y_max),
        ]

    def contains(self, z: complex) -> bool:
        return (
            self.x_min < z.real < self.x_max
            and self.y_min < z.imag < self.y_max
        )

    def boundary_distance(self, z: complex) -> float:
        x, y = z.real, z.imag
        if self.contains(z):
            return min(
                x - self.x_min,
                self.x_max - x,
                y - self.y_min,
                self.y_max - y,
            )
        dx = max(self.x_min - x, 0.0, x - self.x_max)
        dy = max(self.y_min - y, 0.0, y - self.y_max)
        return abs(complex(dx, dy))

    def split(self, fraction: float = 0.5) -> Tuple["Rectangle", "Rectangle"]:
        """Split across the longer side"""
        if self.width >= self.height:
            mid = self.x_min + fraction * self.width
            return (
                self.model_copy(update={"x_max": mid}),
                self.model_copy(update={"x_min": mid}),
            )
        mid = self.y_min + fraction * self.height
        return (
            self.model_copy(update={"y_max": mid}),
            self.model_copy(update={"y_min": mid}),
        )


class WindingResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    winding: int
    quality: float = Field(..., description="Distance to nearest integer")
    evaluations: int


class BoundChecks(BaseModel):
    model_config = ConfigDict(frozen=True)

    n1_satisfied: Optional[bool] = Field(
        None,
        description="1/n^2 > 2 alpha^2 / (b_N delta_N); None off-contour",
    )
    x_exceeds_n_alpha: bool
    y_exceeds_n_alpha: bool
    gap_quantity: Optional[float] = Field(
        None, description="q(X_N) / X_N, measured"
    )
    gap_bound: Optional[float] = Field(
        None, description="2 alpha^2 / (b_N delta_N)"
    )
    horizontal_bound: float = Field(..., description="alpha^2 / Y")
    right_bound: float = Field(..., description="alpha^2 / X")
    side_margins: Dict[str, float] = Field(
        default_factory=dict,
        description="max |K| n^2 / |z| sampled on each side",
    )

    @property
    def rouche_margin(self) -> float:
        return max(self.side_margins.values(), default=float("nan"))


class GapContour(BaseModel):
    model_config = ConfigDict(frozen=True)

    rect: Rectangle
    N_used: int
    checks: BoundChecks


class ContourReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    rect: Rectangle
    winding: int
    poles_inside: int
    zeros_inside: int
    bound_checks: BoundChecks
    N_used: Optional[int] = None
    quality: float = 0.0


class ComplexPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    lambda_plus: complex
    lambda_minus: complex
    box_radius: float = Field(
        ..., description="Half-diagonal of the localization box"
    )
    relative_offset: float = Field(
        ..., description="|lambda_plus - i alpha n| / n"
    )
    residual: float
    method: PairMethod
    is_real: bool = Field(
        False, description="Overdamped mode: both members real"
    )

    def members(self) -> List[complex]:
        return [self.lambda_plus, self.lambda_minus]


class PairBoxReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    eps: float
    rect: Rectangle
    winding: int
    margin: float = Field(
        ..., description="max |K - alpha^2/z| / |z/n^2 + alpha^2/z|"
    )
    contains_pair: bool


class SpectrumSlice(BaseModel):
    """All zeros of G_n found for one mode index"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    branches: List[RealBranch] = Field(default_factory=list)
    pair: Optional[ComplexPair] = None
    constant_kernel: bool = False

    def eigenvalues(self) -> List[complex]:
        values = [complex(branch.eigenvalue) for branch in self.branches]
        if self.pair is not None:
            values.extend(self.pair.members())
        return values

    @property
    def max_real_part(self) -> float:
        return max((z.real for z in self.eigenvalues()), default=-1.0)
