import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np

from .. import config
from ..exceptions import (
    BracketFailureError,
    ConfigurationError,
    RootRefinementError,
)
from ..schemas.kernel_schemas import ExponentialSumKernel
from ..schemas.spectrum_schemas import (
    MonotoneReport,
    RealBranch,
    RealZeroLadder,
)

logger = logging.getLogger(__name__)

RealFn = Callable[[float], float]


def refine_bracketed(
    f: RealFn,
    df: RealFn,
    lo: float,
    hi: float,
    scale: RealFn,
    tol: float,
    label: str,
) -> Tuple[float, float]:
    """
    Zero of f in (lo, hi) given a sign change: bisection down to a fraction
    of the bracket, then Newton kept inside the bracket. Returns the root
    and |f| there.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo, 0.0
    if f_hi == 0:
        return hi, 0.0
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketFailureError(
            f"No sign change for {label} on ({lo:.17g}, {hi:.17g})",
            (lo, hi),
        )

    target = config.BISECTION_FRACTION * (hi - lo)
    while hi - lo > target:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0:
            return mid, 0.0
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    x = 0.5 * (lo + hi)
    stalled = 0
    for _ in range(200):
        fx = f(x)
        if abs(fx) <= tol * scale(x):
            return x, abs(fx)
        width = hi - lo
        if np.sign(fx) == np.sign(f_lo):
            lo, f_lo = x, fx
        else:
            hi, f_hi = x, fx
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            break

        stalled = stalled + 1 if hi - lo > 0.5 * width else 0
        d = df(x)
        x_new = x - fx / d if d != 0 and math.isfinite(d) else math.nan
        if not lo < x_new < hi or stalled >= 3:
            # Newton escaped or crawls: bisect
            x_new = 0.5 * (lo + hi)
            stalled = 0
        x = x_new

    # Bracket collapsed to adjacent floats: keep the better end
    x, fx = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
    if abs(fx) <= tol * scale(x):
        return x, abs(fx)
    if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
        logger.warning(
            f"{label}: residual {abs(fx):.3g} above tolerance at machine "
            f"resolution, accepting x={x:.17g}"
        )
        return x, abs(fx)
    raise RootRefinementError(f"{label} did not converge near {x:.17g}")


class RealSpectrumService:
    """Real zeros of K and the real branches of G_n(z) = z + n^2 K(z)"""

    @staticmethod
    def _K(kernel: ExponentialSumKernel) -> Tuple[RealFn, RealFn, RealFn]:
        a, b = kernel.arrays

        def value(x: float) -> float:
            return float(np.sum(a / (x + b)))

        def derivative(x: float) -> float:
            return float(-np.sum(a / (x + b) ** 2))

        def magnitude(x: float) -> float:
            return float(np.sum(a / np.abs(x + b)))

        return value, derivative, magnitude

    @classmethod
    def characteristic(
        cls, kernel: ExponentialSumKernel, n: int
    ) -> Tuple[RealFn, RealFn, RealFn]:
        """G_n on the real axis, its derivative and its local scale"""
        K, dK, mag = cls._K(kernel)
        n_sq = float(n * n)

        def value(x: float) -> float:
            return x + n_sq * K(x)

        def derivative(x: float) -> float:
            return 1.0 + n_sq * dK(x)

        def scale(x: float) -> float:
            return max(1.0, abs(x), n_sq * mag(x))

        return value, derivative, scale

    @staticmethod
    def _margin(kernel: ExponentialSumKernel, j: int) -> float:
        return config.BRACKET_MARGIN * kernel.delta(j)

    def find_mu(
        self,
        kernel: ExponentialSumKernel,
        J: int,
        tol_root: float = config.ROOT_TOLERANCE,
    ) -> RealZeroLadder:
        """mu_j in (b_j, b_{j+1}) with K(-mu_j) = 0, j = 1..J"""
        if J < 0 or J > kernel.M - 1:
            raise ConfigurationError(
                f"J={J} real zeros need J+1 stored terms, kernel has "
                f"{kernel.M}"
            )
        K, dK, mag = self._K(kernel)
        mu, brackets, residuals = [], [], []
        for j in range(1, J + 1):
            b_j, b_next = kernel.b[j - 1], kernel.b[j]
            margin = self._margin(kernel, j)
            root, residual = refine_bracketed(
                K,
                dK,
                -b_next + margin,
                -b_j - margin,
                lambda x: max(1.0, mag(x)),
                tol_root,
                f"mu_{j}",
            )
            mu.append(-root)
            brackets.append((b_j, b_next))
            residuals.append(residual)

        ladder = RealZeroLadder(
            mu=tuple(mu), brackets=tuple(brackets), residuals=tuple(residuals)
        )
        logger.debug(f"Certified {J} real zeros of K: {ladder.mu}")
        return ladder

    def _branch(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        j: int,
        mu_j: float,
        tol_root: float,
    ) -> RealBranch:
        G, dG, scale = self.characteristic(kernel, n)
        lo = -kernel.b[j] + self._margin(kernel, j)
        hi = -mu_j
        root, residual = refine_bracketed(
            G, dG, lo, hi, scale, tol_root, f"lambda_{n},{j}"
        )
        return RealBranch(
            n=n,
            j=j,
            eigenvalue=root,
            bracket=(-kernel.b[j], -mu_j),
            residual=residual,
            truncation_sensitive=(
                j == kernel.M - 1 and kernel.tail_mass > 0
            ),
        )

    def find_lambda_real(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        J: Optional[int] = None,
        ladder: Optional[RealZeroLadder] = None,
        tol_root: float = config.ROOT_TOLERANCE,
    ) -> List[RealBranch]:
        """Real zeros lambda_nj in (-b_{j+1}, -mu_j), j = 1..J"""
        if n < 1:
            raise ConfigurationError(f"mode index must be >= 1, got {n}")
        J = kernel.M - 1 if J is None else J
        if ladder is None or ladder.J < J:
            ladder = self.find_mu(kernel, J, tol_root)
        return [
            self._branch(kernel, n, j, ladder.mu[j - 1], tol_root)
            for j in range(1, J + 1)
        ]

    def verify_monotone_in_n(
        self,
        kernel: ExponentialSumKernel,
        j: int,
        n_max: int,
        ladder: Optional[RealZeroLadder] = None,
        tol_root: float = config.ROOT_TOLERANCE,
    ) -> MonotoneReport:
        """lambda_nj increases to -mu_j as n runs over 1..n_max"""
        if n_max < 1:
            raise ConfigurationError("n_max must be >= 1")
        if ladder is None or ladder.J < j:
            ladder = self.find_mu(kernel, j, tol_root)
        mu_j = ladder.mu[j - 1]

        n_values = list(range(1, n_max + 1))
        values = [
            self._branch(kernel, n, j, mu_j, tol_root).eigenvalue
            for n in n_values
        ]
        gaps = [abs(value + mu_j) for value in values]
        return MonotoneReport(
            j=j,
            n_values=n_values,
            eigenvalues=values,
            gaps=gaps,
            increasing=all(y > x for x, y in zip(values, values[1:])),
            gaps_decreasing=all(y < x for x, y in zip(gaps, gaps[1:])),
        )


real_spectrum_service = RealSpectrumService()
