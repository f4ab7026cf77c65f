import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.integrate import RK45

from .. import config
from ..exceptions import ConfigurationError, StepSizeUnderflowError
from ..schemas.kernel_schemas import ExponentialSumKernel
from ..schemas.timedomain_schemas import OdeReduction, SimulationResult
from .kernel_service import kernel_service

logger = logging.getLogger(__name__)

SQRT_2_OVER_PI = math.sqrt(2 / math.pi)


def _simulate_job(args) -> SimulationResult:
    kernel, n, xi_n, t_grid, tol = args
    return timedomain_service.simulate_mode(
        kernel, n, xi_n, t_grid[-1], tol, t_eval=t_grid
    )


class TimeDomainService:
    """Mode-by-mode time evolution through the finite ODE reduction"""

    @staticmethod
    def reduce_to_ode(kernel: ExponentialSumKernel, n: int) -> OdeReduction:
        """
        y_k(t) = int_0^t exp(-b_k (t - s)) theta_n(s) ds turns the memory
        term into M linear ODEs; A acts on (theta_n, y_1..y_M).
        """
        if n < 1:
            raise ConfigurationError(f"mode index must be >= 1, got {n}")
        a, b = kernel.arrays
        M = kernel.M
        matrix = np.zeros((M + 1, M + 1))
        matrix[0, 1:] = -(n * n) * a
        matrix[1:, 0] = 1.0
        matrix[np.arange(1, M + 1), np.arange(1, M + 1)] = -b
        eigenvalues = linalg.eigvals(matrix)
        return OdeReduction(
            n=n,
            M=M,
            matrix=matrix,
            eigenvalues=[complex(z) for z in eigenvalues],
        )

    def spectrum_oracle(
        self, kernel: ExponentialSumKernel, n: int
    ) -> List[complex]:
        """Eigenvalues of A sorted by (Re, Im)"""
        values = self.reduce_to_ode(kernel, n).eigenvalues
        return sorted(values, key=lambda z: (z.real, z.imag))

    def simulate_mode(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        xi_n: float,
        t_end: float,
        tol: float = config.INTEGRATOR_TOLERANCE,
        t_eval: Optional[Sequence[float]] = None,
        max_steps: int = config.MAX_INTEGRATOR_STEPS,
    ) -> SimulationResult:
        """theta_n on t_eval from theta_n(0) = xi_n, y(0) = 0"""
        if t_end <= 0:
            raise ConfigurationError("t_end must be positive")
        t_eval = np.asarray(
            np.linspace(0.0, t_end, 201) if t_eval is None else t_eval,
            dtype=float,
        )
        A = self.reduce_to_ode(kernel, n).matrix
        y0 = np.zeros(kernel.M + 1)
        y0[0] = xi_n

        solver = RK45(
            lambda t, y: A @ y,
            0.0,
            y0,
            t_end,
            rtol=tol,
            atol=tol * max(abs(xi_n), 1.0),
        )
        theta = np.empty_like(t_eval)
        filled = t_eval <= 0.0
        theta[filled] = xi_n
        errors, times = [], []

        while solver.status == "running":
            if len(times) >= max_steps:
                raise StepSizeUnderflowError(
                    f"Mode n={n} exceeded {max_steps} steps at "
                    f"t={solver.t:.6g}",
                    solver.t,
                )
            message = solver.step()
            if solver.status == "failed":
                logger.error(f"Integrator failed for n={n}: {message}")
                raise StepSizeUnderflowError(
                    f"Mode n={n}: {message} at t={solver.t:.6g}", solver.t
                )
            h = solver.t - solver.t_old
            local_error = h * (solver.K.T @ solver.E)
            errors.append(float(np.max(np.abs(local_error))))
            times.append(solver.t)

            window = (t_eval > solver.t_old) & (t_eval <= solver.t)
            if window.any():
                theta[window] = solver.dense_output()(t_eval[window])[0]
                filled |= window

        if not filled.all():
            raise StepSizeUnderflowError(
                f"Mode n={n} stopped before covering t_eval", solver.t
            )
        logger.debug(
            f"Mode n={n}: {len(times)} steps, max local error "
            f"{max(errors, default=0.0):.3g}"
        )
        return SimulationResult(
            t_grid=t_eval.tolist(),
            theta_n={n: theta.tolist()},
            error_estimate={n: errors},
            step_times={n: times},
            initial_derivative={n: float((A @ y0)[0])},
        )

    def _simulate_all(
        self,
        kernel: ExponentialSumKernel,
        xi: Sequence[float],
        t_grid: np.ndarray,
        tol: float,
        jobs: int,
    ) -> Dict[int, SimulationResult]:
        tasks = [
            (kernel, n, xi_n, t_grid, tol)
            for n, xi_n in enumerate(xi, start=1)
            if xi_n != 0
        ]
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_simulate_job, tasks))
        else:
            results = [_simulate_job(task) for task in tasks]
        return {task[1]: result for task, result in zip(tasks, results)}

    def reconstruct_field(
        self,
        kernel: ExponentialSumKernel,
        xi: Sequence[float],
        x_samples: Optional[Sequence[float]],
        t_grid: Sequence[float],
        tol: float = config.INTEGRATOR_TOLERANCE,
        xi_tail_l2: float = 0.0,
        jobs: int = 1,
    ) -> SimulationResult:
        """
        theta(x, t) = sum_n theta_n(t) sqrt(2/pi) sin(n x) over the given
        modes. tail_bound estimates the L2 size of the modes left out as
        xi_tail_l2 times the largest |theta_n| / |xi_n| seen on the included
        modes; the omitted modes are not integrated, so it is not a bound.
        """
        t_grid = np.asarray(t_grid, dtype=float)
        if t_grid.size < 2 or t_grid[-1] <= 0:
            raise ConfigurationError("t_grid needs two points ending at t>0")
        per_mode = self._simulate_all(kernel, xi, t_grid, tol, jobs)

        theta_n, errors, steps, derivative = {}, {}, {}, {}
        amplification = 0.0
        for n, xi_n in enumerate(xi, start=1):
            if n in per_mode:
                result = per_mode[n]
                values = np.asarray(result.theta_n[n])
                errors[n] = result.error_estimate[n]
                steps[n] = result.step_times[n]
                derivative[n] = result.initial_derivative[n]
                amplification = max(
                    amplification, float(np.max(np.abs(values))) / abs(xi_n)
                )
            else:
                values = np.zeros_like(t_grid)
                derivative[n] = 0.0
            theta_n[n] = values.tolist()

        theta_xt = None
        if x_samples:
            x = np.asarray(x_samples, dtype=float)
            modes = np.arange(1, len(xi) + 1)
            basis = SQRT_2_OVER_PI * np.sin(np.outer(x, modes))
            coefficients = np.asarray([theta_n[n] for n in modes])
            theta_xt = (basis @ coefficients).tolist()

        return SimulationResult(
            t_grid=t_grid.tolist(),
            theta_n=theta_n,
            x_samples=list(x_samples) if x_samples else None,
            theta_xt=theta_xt,
            error_estimate=errors,
            step_times=steps,
            initial_derivative=derivative,
            tail_bound=xi_tail_l2 * (amplification or 1.0),
        )

    def residue_expansion(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        xi_n: float,
        t,
    ):
        """theta_n(t) = sum_lambda xi_n exp(lambda t) / G_n'(lambda)"""
        t = np.asarray(t, dtype=float)
        total = np.zeros(t.shape, dtype=complex)
        for lam in self.spectrum_oracle(kernel, n):
            weight = 1.0 + n * n * kernel_service.laplace_derivative(
                kernel, lam
            )
            total += xi_n * np.exp(lam * t) / weight
        return total.real if t.ndim else float(total.real)

    @staticmethod
    def closed_form_constant(
        kernel: ExponentialSumKernel, n: int, xi_n: float, t
    ):
        """xi_n cos(alpha n t), exact for k(t) = alpha^2"""
        if not kernel.is_constant:
            raise ConfigurationError("closed form needs a constant kernel")
        return xi_n * np.cos(kernel.alpha * n * np.asarray(t, dtype=float))


timedomain_service = TimeDomainService()
