import cmath
import logging
import math
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError
from scipy.special import zeta

from .. import config
from ..enums import GapVerdict, KernelFamilyTag
from ..exceptions import (
    ConfigurationError,
    KernelValidationError,
    PoleHitError,
)
from ..schemas.kernel_schemas import (
    ExponentialSumKernel,
    GapConditionReport,
    KernelFamily,
    LaplaceValue,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[complex, float, np.ndarray]


class KernelService:
    """Construction, evaluation and checks of exponential-sum kernels"""

    @staticmethod
    def instantiate(family: KernelFamily, M: int) -> ExponentialSumKernel:
        """Materialize the first M terms of a family with its tail bound"""
        if M < 1:
            raise KernelValidationError("truncation length M must be >= 1")

        if family.is_analytic:
            a = [family.a_at(k) for k in range(1, M + 1)]
            b = [family.b_at(k) for k in range(1, M + 1)]
            b_next = family.b_at(M + 1)
        else:
            if M > len(family.a):
                raise KernelValidationError(
                    f"M={M} exceeds the {len(family.a)} listed terms"
                )
            a, b = family.a[:M], family.b[:M]
            b_next = family.b[M] if M < len(family.b) else None

        try:
            kernel = ExponentialSumKernel(
                a=tuple(a),
                b=tuple(b),
                tail_mass=family.tail_mass(M),
                b_next=b_next,
                family=family,
            )
        except ValidationError as e:
            raise KernelValidationError(f"Invalid kernel: {e}")

        logger.debug(
            f"Instantiated {family.family.value} kernel with M={M}, "
            f"alpha^2={kernel.alpha_sq:.6g}, tail={kernel.tail_mass:.3g}"
        )
        return kernel

    @staticmethod
    def from_lists(a: Sequence[float], b: Sequence[float]):
        """Finite-list kernel holding every listed term"""
        try:
            family = KernelFamily(
                family=KernelFamilyTag.finite_list, a=list(a), b=list(b)
            )
        except ValidationError as e:
            raise KernelValidationError(f"Invalid kernel: {e}")
        return KernelService.instantiate(family, len(family.a))

    @staticmethod
    def _truncation(kernel: ExponentialSumKernel, M: Optional[int]) -> int:
        if M is None:
            return kernel.M
        if M < 1:
            raise ConfigurationError("truncation length M must be >= 1")
        if M > kernel.M:
            raise ConfigurationError(
                f"M={M} exceeds the stored length {kernel.M}"
            )
        return M

    def eval_k(
        self, kernel: ExponentialSumKernel, t: float, M: Optional[int] = None
    ) -> float:
        """k(t) = sum_{k<=M} a_k exp(-b_k t), error <= tail_bound(M)"""
        M = self._truncation(kernel, M)
        if t < 0:
            raise ConfigurationError(f"k(t) needs t >= 0, got {t}")
        return math.fsum(
            a * math.exp(-b * t) for a, b in zip(kernel.a[:M], kernel.b[:M])
        )

    def eval_K(
        self,
        kernel: ExponentialSumKernel,
        z: complex,
        M: Optional[int] = None,
        pole_tolerance: float = config.POLE_TOLERANCE,
    ) -> LaplaceValue:
        """K(z) = sum_{k<=M} a_k / (z + b_k) with its truncation bound"""
        M = self._truncation(kernel, M)
        z = complex(z)
        guard = pole_tolerance * (1 + abs(z))
        terms = []
        for a, b in zip(kernel.a[:M], kernel.b[:M]):
            if abs(z + b) < guard:
                raise PoleHitError(z, b)
            terms.append(a / (z + b))

        value = complex(
            math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms)
        )
        return LaplaceValue(
            z=z,
            value=value,
            truncation_bound=self.truncation_bound(kernel, z, M),
        )

    @staticmethod
    def truncation_bound(
        kernel: ExponentialSumKernel, z: complex, M: int
    ) -> float:
        tail = kernel.tail_bound(M)
        if tail == 0:
            return 0.0
        b_next = kernel.next_rate(M)
        if z.real <= -b_next:
            distance = abs(z.imag)
        else:
            distance = abs(z + b_next)
        return tail / distance if distance > 0 else math.inf

    @staticmethod
    def laplace(
        kernel: ExponentialSumKernel, z: ArrayLike, M: Optional[int] = None
    ) -> ArrayLike:
        """Vectorized K(z), summed in ascending k"""
        a, b = kernel.arrays
        M = kernel.M if M is None else M
        z_arr = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = a[:M, None] / (z_arr.reshape(1, -1) + b[:M, None])
        value = terms.sum(axis=0).reshape(z_arr.shape)
        return value if z_arr.ndim else complex(value)

    @staticmethod
    def laplace_derivative(
        kernel: ExponentialSumKernel, z: ArrayLike, M: Optional[int] = None
    ) -> ArrayLike:
        """K'(z) = -sum a_k / (z + b_k)^2"""
        a, b = kernel.arrays
        M = kernel.M if M is None else M
        z_arr = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = a[:M, None] / (z_arr.reshape(1, -1) + b[:M, None]) ** 2
        value = -terms.sum(axis=0).reshape(z_arr.shape)
        return value if z_arr.ndim else complex(value)

    @staticmethod
    def term_magnitude(kernel: ExponentialSumKernel, z: complex) -> float:
        """sum |a_k / (z + b_k)|, the conditioning scale of K(z)"""
        a, b = kernel.arrays
        return float(np.sum(a / np.abs(z + b)))

    @staticmethod
    def exact_alpha_sq(family: KernelFamily) -> float:
        """sum_k a_k in closed form: A zeta(gamma) for analytic families"""
        if not family.is_analytic:
            return math.fsum(family.a)
        return family.params.A * float(zeta(family.params.gamma))

    @staticmethod
    def _rates(family: KernelFamily, count: int) -> np.ndarray:
        if not family.is_analytic:
            return np.asarray(family.b[:count], dtype=float)
        k = np.arange(1, count + 1, dtype=float)
        if family.family == KernelFamilyTag.power_law:
            return family.params.c * k**family.params.beta
        return family.params.c * np.log(np.log(k + 2))

    def check_gap_condition(
        self, family: KernelFamily, probe_depth: int
    ) -> GapConditionReport:
        """Probe sup_k b_k (b_{k+1} - b_k) up to probe_depth"""
        if probe_depth < 2:
            raise ConfigurationError("probe_depth must be at least 2")

        b = self._rates(family, probe_depth + 1)
        depth = len(b) - 1
        if depth < 1:
            # a single rate has no gap
            return GapConditionReport(
                satisfied_empirically=False,
                sup_so_far=0.0,
                witness_index=0,
                probe_depth=0,
                verdict=GapVerdict.undetermined,
            )
        products = b[:-1] * np.diff(b)
        witness = int(np.argmax(products))
        half = max(depth // 2, 1)
        growing = depth >= 2 and products[half:].max() > products[:half].max()

        if family.family == KernelFamilyTag.power_law:
            verdict = (
                GapVerdict.unbounded
                if family.params.beta > 0.5
                else GapVerdict.bounded
            )
            closed_form = True
        elif family.family == KernelFamilyTag.logarithmic:
            verdict, closed_form = GapVerdict.bounded, True
        else:
            verdict, closed_form = GapVerdict.undetermined, False

        return GapConditionReport(
            satisfied_empirically=bool(growing),
            sup_so_far=float(products[witness]),
            witness_index=witness + 1,
            probe_depth=depth,
            verdict=verdict,
            closed_form=closed_form,
        )

    @staticmethod
    def check_sector_comparability(
        z: complex, x: float, delta: float = 0.1
    ) -> bool:
        """(1 - cos d)(|z|^2 + x^2) <= |z + x|^2 <= 2(|z|^2 + x^2)"""
        if x < 0 or abs(cmath.phase(z)) > math.pi - delta:
            raise ConfigurationError(
                "sector bound needs x >= 0 and |arg z| <= pi - delta"
            )
        scale = abs(z) ** 2 + x**2
        value = abs(z + x) ** 2
        slack = 1e-12 * scale
        return (1 - math.cos(delta)) * scale - slack <= value <= (
            2 * scale + slack
        )


kernel_service = KernelService()
