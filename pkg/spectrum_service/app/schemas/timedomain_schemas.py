from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class OdeReduction(BaseModel):
    """
    State (theta_n, y_1..y_M) with
    theta_n' = -n^2 sum a_k y_k and y_k' = theta_n - b_k y_k.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(..., ge=1)
    M: int = Field(..., ge=1)
    matrix: np.ndarray = Field(..., description="(M+1) x (M+1) matrix A")
    eigenvalues: List[complex] = Field(..., description="Spectrum of A")


class SimulationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_grid: List[float]
    theta_n: Dict[int, List[float]] = Field(
        ..., description="theta_n(t) on t_grid per mode"
    )
    x_samples: Optional[List[float]] = None
    theta_xt: Optional[List[List[float]]] = Field(
        None, description="theta(x_i, t_j), indexed [i][j]"
    )
    error_estimate: Dict[int, List[float]] = Field(
        default_factory=dict,
        description="Local error norm of each accepted step per mode",
    )
    step_times: Dict[int, List[float]] = Field(default_factory=dict)
    initial_derivative: Dict[int, float] = Field(default_factory=dict)
    tail_bound: float = Field(
        0.0,
        description="Estimated L2 size of the omitted modes n > n_max",
    )

    @property
    def modes(self) -> List[int]:
        return sorted(self.theta_n)
