import logging
import math
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np

from .. import config
from ..enums import PairMethod
from ..exceptions import (
    ConfigurationError,
    GapConditionExhaustedError,
    PairNotFoundError,
    PhaseJumpError,
    RoucheViolationError,
    SpectrumError,
    WindingQualityError,
)
from ..schemas.kernel_schemas import ExponentialSumKernel
from ..schemas.spectrum_schemas import (
    BoundChecks,
    ComplexPair,
    ContourReport,
    GapContour,
    PairBoxReport,
    Rectangle,
    SpectrumSlice,
    WindingResult,
)
from .kernel_service import kernel_service
from .realspec_service import RealSpectrumService, refine_bracketed

logger = logging.getLogger(__name__)

ComplexFn = Callable[[np.ndarray], np.ndarray]

SIDE_SAMPLES = 257
SPLIT_FRACTIONS = (0.5, 0.5173, 0.4791)


def winding_number(
    fn: ComplexFn,
    rect: Rectangle,
    samples: int = config.WINDING_MIN_SAMPLES,
    max_depth: int = config.WINDING_MAX_DEPTH,
) -> WindingResult:
    """
    Change of arg fn around the counterclockwise boundary of rect over 2 pi.
    Each side is refined until every consecutive phase increment is below
    pi/2, so the summed increments track the continuous argument.
    """
    samples = max(samples, config.WINDING_MIN_SAMPLES)
    vertices = rect.vertices()
    total = 0.0
    evaluations = 0

    for start, end in zip(vertices, vertices[1:] + vertices[:1]):
        t = np.linspace(0.0, 1.0, samples + 1)
        values = np.asarray(fn(start + t * (end - start)), dtype=complex)
        evaluations += len(t)
        for depth in range(max_depth + 1):
            if not np.all(np.isfinite(values)) or np.any(values == 0):
                raise PhaseJumpError(
                    f"Zero or pole on the boundary of {rect.vertices()}"
                )
            increments = np.angle(values[1:] / values[:-1])
            bad = np.abs(increments) >= np.pi / 2
            if not bad.any():
                break
            if depth == max_depth:
                raise PhaseJumpError(
                    f"Phase jump unresolved after {max_depth} subdivisions "
                    f"between {start} and {end}: a zero or pole is too "
                    f"close to the boundary"
                )
            where = np.nonzero(bad)[0]
            mids = 0.5 * (t[where] + t[where + 1])
            mid_values = np.asarray(
                fn(start + mids * (end - start)), dtype=complex
            )
            evaluations += len(mids)
            t = np.insert(t, where + 1, mids)
            values = np.insert(values, where + 1, mid_values)
        total += float(np.sum(increments))

    turns = total / (2 * np.pi)
    winding = int(round(turns))
    quality = abs(turns - winding)
    if quality >= 0.25:
        raise WindingQualityError(
            f"Winding {turns:.4f} is not close to an integer", quality
        )
    return WindingResult(
        winding=winding, quality=quality, evaluations=evaluations
    )


class ComplexSpectrumService:
    """Argument-principle counts and the complex pair of G_n"""

    @staticmethod
    def characteristic_fn(kernel: ExponentialSumKernel, n: int) -> ComplexFn:
        n_sq = float(n * n)

        def value(z):
            return z + n_sq * kernel_service.laplace(kernel, z)

        return value

    @staticmethod
    def residual_scale(
        kernel: ExponentialSumKernel, n: int, z: complex
    ) -> float:
        return max(
            1.0, abs(z), n * n * kernel_service.term_magnitude(kernel, z)
        )

    @staticmethod
    def _side_samples(rect: Rectangle) -> Dict[str, np.ndarray]:
        t = np.linspace(0.0, 1.0, SIDE_SAMPLES)
        lower_left, lower_right, upper_right, upper_left = rect.vertices()
        return {
            "bottom": lower_left + t * (lower_right - lower_left),
            "right": lower_right + t * (upper_right - lower_right),
            "top": upper_right + t * (upper_left - upper_right),
            "left": upper_left + t * (lower_left - upper_left),
        }

    @staticmethod
    def gap_quantity(kernel: ExponentialSumKernel, X: float) -> float:
        """q(X) / X with q(X) = sum a_k / |b_k - X|, tail included"""
        a, b = kernel.arrays
        q = float(np.sum(a / np.abs(b - X)))
        if kernel.tail_mass > 0 and kernel.b_next is not None:
            q += kernel.tail_mass / abs(kernel.b_next - X)
        return q / X

    def bound_checks(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        rect: Rectangle,
        N: Optional[int] = None,
    ) -> BoundChecks:
        """Analytic side bounds plus the sampled Rouche margins"""
        alpha_sq = kernel.alpha_sq
        n_alpha = n * kernel.alpha
        X = min(-rect.x_min, rect.x_max)
        Y = min(-rect.y_min, rect.y_max)

        n1_satisfied = gap_bound = gap_quantity = None
        if N is not None:
            b_N = kernel.b[N - 1]
            gap_bound = 2 * alpha_sq / (b_N * kernel.delta(N))
            n1_satisfied = 1.0 / (n * n) > gap_bound
            gap_quantity = self.gap_quantity(kernel, -rect.x_min)

        margins = {}
        for side, z in self._side_samples(rect).items():
            K = kernel_service.laplace(kernel, z)
            margins[side] = float(np.max(np.abs(K) * n * n / np.abs(z)))

        return BoundChecks(
            n1_satisfied=n1_satisfied,
            x_exceeds_n_alpha=X > n_alpha,
            y_exceeds_n_alpha=Y > n_alpha,
            gap_quantity=gap_quantity,
            gap_bound=gap_bound,
            horizontal_bound=alpha_sq / Y if Y > 0 else math.inf,
            right_bound=alpha_sq / X if X > 0 else math.inf,
            side_margins=margins,
        )

    @staticmethod
    def _guard(kernel: ExponentialSumKernel, n: int) -> float:
        return config.GUARD_FACTOR * max(1.0, n * kernel.alpha)

    def build_gap_contour(
        self, kernel: ExponentialSumKernel, n: int
    ) -> GapContour:
        """
        Square of half-width X_N = (b_N + b_{N+1}) / 2 for the smallest N
        with 1/n^2 > 2 alpha^2 / (b_N delta_N) and X_N > n alpha.
        """
        n_alpha = n * kernel.alpha
        guard = self._guard(kernel, n)
        last = kernel.M if kernel.b_next is not None else kernel.M - 1

        for N in range(1, last + 1):
            b_N = kernel.b[N - 1]
            if b_N <= 0:
                continue
            if not 1.0 / (n * n) > 2 * kernel.alpha_sq / (
                b_N * kernel.delta(N)
            ):
                continue
            X = (b_N + kernel.next_rate(N)) / 2
            if X <= n_alpha:
                continue
            rect = Rectangle.centered_square(X)
            if any(rect.boundary_distance(-b) < guard for b in kernel.b):
                continue
            checks = self.bound_checks(kernel, n, rect, N)
            logger.debug(f"Gap contour for n={n}: N={N}, X={X:.6g}")
            return GapContour(rect=rect, N_used=N, checks=checks)

        raise GapConditionExhaustedError(
            f"No admissible N within the stored prefix (M={kernel.M}) "
            f"for n={n}: gap condition unmet at this depth"
        )

    def count_spectrum_in_contour(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        rect: Optional[Rectangle] = None,
        enforce_rouche: bool = True,
    ) -> ContourReport:
        """Zeros of G_n inside the gap contour, or inside rect"""
        N_used = None
        if rect is None:
            contour = self.build_gap_contour(kernel, n)
            rect, N_used, checks = contour.rect, contour.N_used, contour.checks
        else:
            checks = self.bound_checks(kernel, n, rect)

        guard = self._guard(kernel, n)
        for b in kernel.b:
            if rect.boundary_distance(complex(-b)) < guard:
                raise PhaseJumpError(
                    f"Pole {-b} lies within {guard:.3g} of the contour"
                )

        if enforce_rouche and checks.rouche_margin >= 1:
            worst = max(checks.side_margins, key=checks.side_margins.get)
            raise RoucheViolationError(
                f"|K| < |z|/n^2 fails on the {worst} side for n={n}: "
                f"margin {checks.rouche_margin:.6g}",
                checks.rouche_margin,
            )

        result = winding_number(self.characteristic_fn(kernel, n), rect)
        poles_inside = sum(rect.contains(complex(-b)) for b in kernel.b)
        return ContourReport(
            rect=rect,
            winding=result.winding,
            poles_inside=poles_inside,
            zeros_inside=result.winding + poles_inside,
            bound_checks=checks,
            N_used=N_used,
            quality=result.quality,
        )

    @staticmethod
    def pair_box(
        kernel: ExponentialSumKernel, n: int, eps: float
    ) -> Rectangle:
        """Box with vertices (+-eps alpha n, i alpha n (1 -+ eps))"""
        n_alpha = n * kernel.alpha_prefix
        return Rectangle(
            x_min=-eps * n_alpha,
            x_max=eps * n_alpha,
            y_min=n_alpha * (1 - eps),
            y_max=n_alpha * (1 + eps),
        )

    def _newton(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        z: complex,
        tol_root: float,
        max_iter: int = 100,
    ) -> Tuple[Optional[complex], float]:
        """Damped Newton on G_n; (None, inf) when it fails"""
        n_sq = float(n * n)

        def G(w: complex) -> complex:
            return w + n_sq * kernel_service.laplace(kernel, w)

        g = G(z)
        for _ in range(max_iter):
            residual = abs(g)
            if not math.isfinite(residual):
                return None, math.inf
            if residual <= tol_root * self.residual_scale(kernel, n, z):
                return z, residual
            d = 1.0 + n_sq * kernel_service.laplace_derivative(kernel, z)
            if d == 0 or not np.isfinite(d):
                return None, math.inf
            step = g / d
            damping = 1.0
            for _ in range(30):
                z_new = z - damping * step
                g_new = G(z_new)
                if np.isfinite(g_new) and abs(g_new) < residual:
                    break
                damping *= 0.5
            else:
                return None, math.inf
            z, g = z_new, g_new
        return None, math.inf

    def _real_pair(
        self, kernel: ExponentialSumKernel, n: int, tol_root: float
    ) -> Optional[Tuple[float, float, float]]:
        """
        For b_1 > 0, G_n is convex on (-b_1, inf). A negative minimum
        there means both remaining zeros are real.
        """
        b_1 = kernel.b[0]
        if b_1 <= 0:
            return None
        a, b = kernel.arrays
        n_sq = float(n * n)
        G, dG, scale = RealSpectrumService.characteristic(kernel, n)

        def d2G(x: float) -> float:
            return float(n_sq * np.sum(2 * a / (x + b) ** 3))

        def dG_scale(x: float) -> float:
            return max(1.0, float(n_sq * np.sum(a / (x + b) ** 2)))

        lo = -b_1 + config.BRACKET_MARGIN * max(1.0, b_1)
        hi = -b_1 + n * kernel.alpha_prefix + 1.0
        x_star, _ = refine_bracketed(
            dG, d2G, lo, hi, dG_scale, tol_root, f"argmin G_{n}"
        )
        if G(x_star) >= 0:
            return None

        left, r_left = refine_bracketed(
            G, dG, lo, x_star, scale, tol_root, f"overdamped lambda_{n}-"
        )
        right, r_right = refine_bracketed(
            G, dG, x_star, 0.0, scale, tol_root, f"overdamped lambda_{n}+"
        )
        logger.warning(
            f"Mode n={n} is overdamped: pair is real ({left:.6g}, {right:.6g})"
        )
        return left, right, max(r_left, r_right)

    def _box_bisection(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        box: Rectangle,
        tol_root: float,
        max_depth: int = 60,
    ) -> Tuple[complex, float]:
        fn = self.characteristic_fn(kernel, n)
        try:
            count = winding_number(fn, box).winding
        except SpectrumError as e:
            raise PairNotFoundError(f"Pair box for n={n} unusable: {e.detail}")
        if count < 1:
            raise PairNotFoundError(
                f"No zero of G_{n} in the box {box.vertices()}"
            )

        rect = box
        resolution = 1e-12 * max(1.0, n * kernel.alpha_prefix)
        for _ in range(max_depth):
            if rect.half_diagonal < 0.05 * box.half_diagonal:
                z, residual = self._newton(kernel, n, rect.center, tol_root)
                if z is not None and rect.boundary_distance(z) >= 0 and (
                    rect.contains(z) or rect.boundary_distance(z) < resolution
                ):
                    return z, residual
            if rect.half_diagonal < resolution:
                break

            for fraction in SPLIT_FRACTIONS:
                first, second = rect.split(fraction)
                try:
                    first_count = winding_number(fn, first).winding
                    break
                except SpectrumError:
                    continue
            else:
                raise PairNotFoundError(
                    f"Could not split {rect.vertices()} cleanly for n={n}"
                )
            if first_count >= 1:
                rect, count = first, first_count
            else:
                rect, count = second, count - first_count

        z = rect.center
        return z, abs(fn(np.asarray([z]))[0])

    def find_complex_pair(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        eps: float = config.PAIR_BOX_EPS,
        tol_root: float = config.ROOT_TOLERANCE,
    ) -> ComplexPair:
        """lambda_n+ near i alpha n, and its conjugate"""
        if n < 1 or not 0 < eps < 1:
            raise ConfigurationError(
                f"Need n >= 1 and eps in (0, 1), got n={n}, eps={eps}"
            )
        target = 1j * kernel.alpha_prefix * n
        box = self.pair_box(kernel, n, eps)

        real_pair = self._real_pair(kernel, n, tol_root)
        if real_pair is not None:
            left, right, residual = real_pair
            return ComplexPair(
                n=n,
                lambda_plus=complex(right),
                lambda_minus=complex(left),
                box_radius=box.half_diagonal,
                relative_offset=abs(right - target) / n,
                residual=residual,
                method=PairMethod.real_pair,
                is_real=True,
            )

        z, residual = self._newton(kernel, n, target, tol_root)
        method = PairMethod.newton
        if z is None or z.imag <= self._guard(kernel, n):
            logger.warning(
                f"Newton from i alpha n failed for n={n}, bisecting the box"
            )
            z, residual = self._box_bisection(kernel, n, box, tol_root)
            method = PairMethod.box_bisection

        return ComplexPair(
            n=n,
            lambda_plus=z,
            lambda_minus=z.conjugate(),
            box_radius=box.half_diagonal,
            relative_offset=abs(z - target) / n,
            residual=residual,
            method=method,
        )

    @staticmethod
    def verify_left_half_plane(spectrum: SpectrumSlice) -> bool:
        """Re lambda < 0; Re lambda = 0 only for the constant kernel"""
        values = spectrum.eigenvalues()
        if spectrum.constant_kernel:
            return all(z.real <= 1e-12 * max(1.0, abs(z)) for z in values)
        return all(z.real < 0 for z in values)

    def verify_pair_box(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        eps: float = config.PAIR_BOX_EPS,
        pair: Optional[ComplexPair] = None,
    ) -> PairBoxReport:
        """
        Rouche on the eps-box: g = z/n^2 + alpha^2/z dominates
        f = K(z) - alpha^2/z, so the box holds exactly one zero.
        """
        rect = self.pair_box(kernel, n, eps)
        alpha_sq = kernel.alpha_sq_prefix
        margin = 0.0
        for z in self._side_samples(rect).values():
            g = z / (n * n) + alpha_sq / z
            f = kernel_service.laplace(kernel, z) - alpha_sq / z
            margin = max(margin, float(np.max(np.abs(f) / np.abs(g))))
        result = winding_number(self.characteristic_fn(kernel, n), rect)
        return PairBoxReport(
            n=n,
            eps=eps,
            rect=rect,
            winding=result.winding,
            margin=margin,
            contains_pair=pair is not None
            and rect.contains(pair.lambda_plus),
        )

    def imaginary_axis_clearance(
        self,
        kernel: ExponentialSumKernel,
        n: int,
        y_values: Iterable[float],
    ) -> float:
        """min Re G_n(iy) = n^2 sum a_k b_k / (b_k^2 + y^2) over y"""
        z = 1j * np.asarray(list(y_values), dtype=float)
        return float(np.min(self.characteristic_fn(kernel, n)(z).real))


complex_spectrum_service = ComplexSpectrumService()
