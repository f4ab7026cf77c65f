import logging
import math
from functools import partial
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .. import config
from ..enums import ClaimStatus
from ..exceptions import (
    ConfigurationError,
    GapConditionExhaustedError,
    SpectrumError,
)
from ..schemas.kernel_schemas import ExponentialSumKernel
from ..schemas.run_schemas import (
    ClaimResult,
    RunConfig,
    SweepRecord,
    VerificationReport,
)
from ..schemas.spectrum_schemas import (
    ContourReport,
    RealZeroLadder,
    SpectrumSlice,
)
from .complexspec_service import complex_spectrum_service
from .kernel_service import kernel_service
from .oracle_service import oracle_service
from .realspec_service import real_spectrum_service
from .slice_service import slice_service
from .timedomain_service import timedomain_service

logger = logging.getLogger(__name__)

HERGLOTZ_X = (-10.0, -1.0, 0.0, 1.0, 10.0)
HERGLOTZ_Y = (0.1, 1.0, 10.0, 100.0)
SECTOR_DELTA = 0.1
SECTOR_RADII = (0.1, 1.0, 10.0)
AXIS_Y = tuple(np.geomspace(1e-3, 1e3, 61))


def _upper_half_plane_grid() -> np.ndarray:
    return np.asarray([complex(x, y) for x in HERGLOTZ_X for y in HERGLOTZ_Y])


def _claim(
    name: str,
    passed: bool,
    margin: Optional[float] = None,
    witness: Optional[str] = None,
    detail: str = "",
) -> ClaimResult:
    return ClaimResult(
        name=name,
        status=ClaimStatus.passed if passed else ClaimStatus.failed,
        margin=margin,
        witness=witness,
        detail=detail,
    )


def _not_applicable(name: str, detail: str) -> ClaimResult:
    return ClaimResult(
        name=name, status=ClaimStatus.not_applicable, detail=detail
    )


def doublings(n_min: int, n_max: int) -> List[int]:
    values = [n_min]
    while values[-1] * 2 <= n_max:
        values.append(values[-1] * 2)
    return values


def _decreasing(values: List[float]) -> bool:
    return all(
        y < x or y <= config.SWEEP_ZERO_LEVEL
        for x, y in zip(values, values[1:])
    )


class VerificationService:
    """
    Runs every claim about the spectrum for one configuration. Each claim
    is measured independently; a solver error inside a claim fails that
    claim instead of aborting the run.
    """

    def verify(self, run: RunConfig) -> VerificationReport:
        kernel = kernel_service.instantiate(
            run.kernel.as_family(), run.kernel.length
        )
        tol_root = run.tolerances.root
        eps = run.spectrum.eps
        J = kernel.M - 1 if run.spectrum.J is None else run.spectrum.J
        J = min(J, kernel.M - 1)
        n_values = run.modes.values

        ladder = real_spectrum_service.find_mu(kernel, J, tol_root)
        slices = {
            n: slice_service.compute_slice(
                kernel, n, J, eps, ladder, tol_root
            )
            for n in n_values
        }
        contours = self._contours(kernel, n_values)

        checks: List[Tuple[str, Callable[[], ClaimResult]]] = [
            ("kernel_herglotz", partial(self.kernel_herglotz, kernel)),
            ("kernel_symmetry", partial(self.kernel_symmetry, kernel)),
            (
                "sector_comparability",
                partial(self.sector_comparability, kernel),
            ),
            ("gap_condition", partial(self.gap_condition, run)),
            ("tail_certificate", partial(self.tail_certificate, run, kernel)),
            ("interlacing", partial(self.interlacing, ladder)),
            ("containment", partial(self.containment, slices)),
            (
                "monotone_in_n",
                partial(
                    self.monotone_in_n, kernel, ladder, n_values, tol_root
                ),
            ),
            (
                "branch_convergence",
                partial(
                    self.branch_convergence,
                    kernel,
                    ladder,
                    n_values,
                    run.sweep.j,
                    tol_root,
                ),
            ),
            ("left_half_plane", partial(self.left_half_plane, slices)),
            (
                "conjugate_symmetry",
                partial(self.conjugate_symmetry, kernel, slices, tol_root),
            ),
            (
                "imaginary_axis_clearance",
                partial(self.imaginary_axis_clearance, kernel, n_values),
            ),
            ("winding_count", partial(self.winding_count, contours, slices)),
            ("rouche_margin", partial(self.rouche_margin, contours)),
            (
                "oracle_equality",
                partial(self.oracle_equality, kernel, slices),
            ),
            (
                "companion_shadow",
                partial(self.companion_shadow, kernel, slices),
            ),
            (
                "pair_asymptotics",
                partial(self.pair_asymptotics, kernel, run, tol_root),
            ),
            (
                "pair_box_isolation",
                partial(self.pair_box_isolation, kernel, slices, eps),
            ),
        ]

        claims = []
        for name, check in checks:
            try:
                claim = check()
            except SpectrumError as e:
                claim = _claim(name, False, detail=e.detail)
            log = logger.info
            if claim.status == ClaimStatus.failed:
                log = logger.error
            log(f"{claim.name}: {claim.status.value} {claim.detail}".rstrip())
            claims.append(claim)
        return VerificationReport(claims=claims)

    @staticmethod
    def _contours(kernel: ExponentialSumKernel, n_values: List[int]):
        """ContourReport per n, or the error that prevented it"""
        contours: Dict[int, object] = {}
        for n in n_values:
            try:
                contours[n] = (
                    complex_spectrum_service.count_spectrum_in_contour(
                        kernel, n, enforce_rouche=False
                    )
                )
            except SpectrumError as e:
                contours[n] = e
        return contours

    @staticmethod
    def kernel_herglotz(kernel: ExponentialSumKernel) -> ClaimResult:
        z = _upper_half_plane_grid()
        imag = np.imag(kernel_service.laplace(kernel, z))
        worst = int(np.argmax(imag))
        return _claim(
            "kernel_herglotz",
            bool(np.all(imag < 0)),
            float(imag[worst]),
            f"z={z[worst]}",
            "Im K < 0 on the upper half-plane",
        )

    @staticmethod
    def kernel_symmetry(kernel: ExponentialSumKernel) -> ClaimResult:
        z = _upper_half_plane_grid()
        values = kernel_service.laplace(kernel, z)
        mirrored = kernel_service.laplace(kernel, np.conj(z))
        error = np.abs(mirrored - np.conj(values)) / np.maximum(
            1.0, np.abs(values)
        )
        worst = int(np.argmax(error))
        return _claim(
            "kernel_symmetry",
            bool(error[worst] <= 1e-14),
            float(error[worst]),
            f"z={z[worst]}",
            "K(conj z) = conj K(z)",
        )

    @staticmethod
    def sector_comparability(kernel: ExponentialSumKernel) -> ClaimResult:
        edge = math.pi - SECTOR_DELTA
        angles = np.linspace(-edge, edge, 9) * (1 - 1e-9)
        for r in SECTOR_RADII:
            for theta in angles:
                z = r * complex(math.cos(theta), math.sin(theta))
                for x in kernel.b:
                    if not kernel_service.check_sector_comparability(
                        z, x, SECTOR_DELTA
                    ):
                        return _claim(
                            "sector_comparability",
                            False,
                            witness=f"z={z}, x={x}",
                        )
        return _claim(
            "sector_comparability",
            True,
            detail=f"|arg z| <= pi - {SECTOR_DELTA}",
        )

    @staticmethod
    def gap_condition(run: RunConfig) -> ClaimResult:
        family = run.kernel.as_family()
        if not family.is_analytic:
            return _not_applicable(
                "gap_condition", "finite kernel: no closed-form verdict"
            )
        report = kernel_service.check_gap_condition(
            family, config.GAP_PROBE_DEPTH
        )
        return _claim(
            "gap_condition",
            True,
            report.sup_so_far,
            f"k={report.witness_index}",
            f"verdict {report.verdict.value}, empirically "
            f"{'growing' if report.satisfied_empirically else 'flat'} "
            f"to depth {report.probe_depth}",
        )

    @staticmethod
    def tail_certificate(
        run: RunConfig, kernel: ExponentialSumKernel
    ) -> ClaimResult:
        family = run.kernel.as_family()
        if not family.is_analytic:
            return _not_applicable("tail_certificate", "no omitted tail")
        exact = kernel_service.exact_alpha_sq(family)
        slack = kernel.alpha_sq - exact
        return _claim(
            "tail_certificate",
            slack >= -1e-12 * exact,
            slack,
            f"M={kernel.M}",
            f"prefix + tail bound >= alpha^2 = {exact:.12g}",
        )

    @staticmethod
    def interlacing(ladder: RealZeroLadder) -> ClaimResult:
        if ladder.J == 0:
            return _not_applicable("interlacing", "K has no real zeros")
        margins = [
            min(mu - lo, hi - mu) / (hi - lo)
            for mu, (lo, hi) in zip(ladder.mu, ladder.brackets)
        ]
        worst = int(np.argmin(margins))
        return _claim(
            "interlacing",
            ladder.interlaces(),
            margins[worst],
            f"j={worst + 1}",
            "b_j < mu_j < b_{j+1}",
        )

    @staticmethod
    def containment(slices: Dict[int, SpectrumSlice]) -> ClaimResult:
        branches = [b for s in slices.values() for b in s.branches]
        if not branches:
            return _not_applicable("containment", "no real branches")
        for branch in branches:
            if not branch.contained():
                return _claim(
                    "containment",
                    False,
                    witness=f"n={branch.n},j={branch.j}",
                    detail=f"lambda={branch.eigenvalue!r}",
                )
        return _claim(
            "containment", True, detail="lambda_nj in (-b_{j+1}, -mu_j)"
        )

    @staticmethod
    def monotone_in_n(
        kernel: ExponentialSumKernel,
        ladder: RealZeroLadder,
        n_values: List[int],
        tol_root: float,
    ) -> ClaimResult:
        if ladder.J == 0:
            return _not_applicable("monotone_in_n", "no real branches")
        n_max = max(n_values)
        for j in range(1, ladder.J + 1):
            report = real_spectrum_service.verify_monotone_in_n(
                kernel, j, n_max, ladder, tol_root
            )
            if not report.monotone:
                return _claim(
                    "monotone_in_n", False, witness=f"j={j}", detail=(
                        f"increasing={report.increasing}, "
                        f"gaps_decreasing={report.gaps_decreasing}"
                    )
                )
        return _claim(
            "monotone_in_n", True, detail=f"n = 1..{n_max}, all j"
        )

    @staticmethod
    def branch_convergence(
        kernel: ExponentialSumKernel,
        ladder: RealZeroLadder,
        n_values: List[int],
        j: int,
        tol_root: float,
    ) -> ClaimResult:
        if ladder.J < j:
            return _not_applicable(
                "branch_convergence", f"branch j={j} not available"
            )
        mu_j = ladder.mu[j - 1]

        def gap(n: int) -> float:
            branch = real_spectrum_service.find_lambda_real(
                kernel, n, j, ladder, tol_root
            )[j - 1]
            return abs(branch.eigenvalue + mu_j)

        ratios = []
        for n in n_values:
            before, after = gap(n), gap(2 * n)
            ratios.append(after / before if before > 0 else 0.0)
            if not after < before:
                return _claim(
                    "branch_convergence",
                    False,
                    ratios[-1],
                    f"n={n}",
                    "gap(2n) >= gap(n)",
                )
        return _claim(
            "branch_convergence",
            True,
            max(ratios),
            detail="gap(2n) < gap(n)",
        )

    @staticmethod
    def left_half_plane(slices: Dict[int, SpectrumSlice]) -> ClaimResult:
        worst_n = max(slices, key=lambda n: slices[n].max_real_part)
        worst = slices[worst_n].max_real_part
        passed = all(
            complex_spectrum_service.verify_left_half_plane(s)
            for s in slices.values()
        )
        return _claim(
            "left_half_plane", passed, worst, f"n={worst_n}", "max Re lambda"
        )

    @staticmethod
    def conjugate_symmetry(
        kernel: ExponentialSumKernel,
        slices: Dict[int, SpectrumSlice],
        tol_root: float,
    ) -> ClaimResult:
        worst, witness = 0.0, None
        for n, spectrum in slices.items():
            pair = spectrum.pair
            if pair is None or pair.is_real:
                continue
            if pair.lambda_minus != pair.lambda_plus.conjugate():
                return _claim(
                    "conjugate_symmetry", False, witness=f"n={n}"
                )
            G = complex_spectrum_service.characteristic_fn(kernel, n)
            z = pair.lambda_minus
            scale = complex_spectrum_service.residual_scale(kernel, n, z)
            residual = abs(G(np.asarray([z]))[0]) / scale
            if residual >= worst:
                worst, witness = residual, f"n={n}"
        return _claim(
            "conjugate_symmetry",
            worst <= 10 * tol_root,
            worst,
            witness,
            "scaled |G_n(conj lambda+)|",
        )

    @staticmethod
    def imaginary_axis_clearance(
        kernel: ExponentialSumKernel, n_values: List[int]
    ) -> ClaimResult:
        clearance = {
            n: complex_spectrum_service.imaginary_axis_clearance(
                kernel, n, AXIS_Y
            )
            for n in n_values
        }
        worst_n = min(clearance, key=clearance.get)
        if kernel.is_constant:
            return _claim(
                "imaginary_axis_clearance",
                abs(clearance[worst_n]) <= 1e-12,
                clearance[worst_n],
                f"n={worst_n}",
                "constant kernel: Re G_n(iy) = 0",
            )
        return _claim(
            "imaginary_axis_clearance",
            clearance[worst_n] > 0,
            clearance[worst_n],
            f"n={worst_n}",
            "min Re G_n(iy)",
        )

    @staticmethod
    def _contour_claim_guard(name: str, contours: Dict[int, object]):
        usable = {
            n: c for n, c in contours.items() if isinstance(c, ContourReport)
        }
        if usable:
            return usable, None
        if all(
            isinstance(c, GapConditionExhaustedError)
            for c in contours.values()
        ):
            return None, _not_applicable(name, "gap condition unmet")
        error = next(iter(contours.values()))
        return None, _claim(name, False, detail=str(error))

    def winding_count(
        self,
        contours: Dict[int, object],
        slices: Dict[int, SpectrumSlice],
    ) -> ClaimResult:
        usable, outcome = self._contour_claim_guard("winding_count", contours)
        if outcome is not None:
            return outcome
        for n, c in contours.items():
            if isinstance(c, SpectrumError) and not isinstance(
                c, GapConditionExhaustedError
            ):
                return _claim(
                    "winding_count", False, witness=f"n={n}", detail=c.detail
                )
        for n, report in usable.items():
            located = slices[n].eigenvalues()
            found = sum(report.rect.contains(z) for z in located)
            expected = report.poles_inside + 1
            complete = len(slices[n].branches) >= report.poles_inside - 1
            if report.zeros_inside != expected or (
                complete and found != report.zeros_inside
            ):
                return _claim(
                    "winding_count",
                    False,
                    float(report.zeros_inside - expected),
                    f"n={n}",
                    f"zeros {report.zeros_inside}, poles "
                    f"{report.poles_inside}, located {found}",
                )
        return _claim(
            "winding_count",
            True,
            max(r.quality for r in usable.values()),
            detail=f"zeros = poles + 1 for n in {sorted(usable)}",
        )

    def rouche_margin(self, contours: Dict[int, object]) -> ClaimResult:
        usable, outcome = self._contour_claim_guard("rouche_margin", contours)
        if outcome is not None:
            return outcome
        worst_n = max(
            usable, key=lambda n: usable[n].bound_checks.rouche_margin
        )
        margin = usable[worst_n].bound_checks.rouche_margin
        return _claim(
            "rouche_margin",
            margin < 1,
            margin,
            f"n={worst_n},N={usable[worst_n].N_used}",
            "max |K| n^2 / |z| on the contour",
        )

    @staticmethod
    def oracle_equality(
        kernel: ExponentialSumKernel, slices: Dict[int, SpectrumSlice]
    ) -> ClaimResult:
        if kernel.M > config.COMPANION_ORACLE_MAX_TERMS:
            return _not_applicable(
                "oracle_equality", f"M={kernel.M} above the oracle limit"
            )
        worst, witness = 0.0, None
        for n, spectrum in slices.items():
            report = oracle_service.match_spectra(
                spectrum.eigenvalues(),
                timedomain_service.spectrum_oracle(kernel, n),
            )
            if not report.matches(config.ORACLE_MATCH_TOLERANCE):
                return _claim(
                    "oracle_equality",
                    False,
                    report.max_distance,
                    f"n={n}",
                    f"collisions {report.collisions}, size mismatch "
                    f"{report.size_mismatch}",
                )
            if report.max_distance >= worst:
                worst, witness = report.max_distance, f"n={n}"
        return _claim(
            "oracle_equality", True, worst, witness, "eig(A) within 1e-8"
        )

    @staticmethod
    def companion_shadow(
        kernel: ExponentialSumKernel, slices: Dict[int, SpectrumSlice]
    ) -> ClaimResult:
        if kernel.M > config.COMPANION_ORACLE_MAX_TERMS:
            return _not_applicable(
                "companion_shadow", f"M={kernel.M} above the oracle limit"
            )
        worst, witness = 0.0, None
        for n, spectrum in slices.items():
            report = oracle_service.match_spectra(
                spectrum.eigenvalues(),
                oracle_service.companion_spectrum(kernel, n),
            )
            if report.size_mismatch or report.max_distance >= worst:
                worst, witness = report.max_distance, f"n={n}"
            if not report.matches(config.COMPANION_MATCH_TOLERANCE):
                return _claim(
                    "companion_shadow", False, worst, witness,
                    "numerator roots disagree",
                )
        return _claim(
            "companion_shadow", True, worst, witness, "numerator roots"
        )

    @staticmethod
    def pair_asymptotics(
        kernel: ExponentialSumKernel, run: RunConfig, tol_root: float
    ) -> ClaimResult:
        n_values = doublings(run.modes.n_min, run.modes.n_max)
        if len(n_values) < 2:
            return _not_applicable(
                "pair_asymptotics", "n range holds no doubling"
            )
        gaps = []
        for n in n_values:
            pair = complex_spectrum_service.find_complex_pair(
                kernel, n, run.spectrum.eps, tol_root
            )
            gaps.append(
                abs(abs(pair.lambda_plus) / (kernel.alpha_prefix * n) - 1)
            )
        return _claim(
            "pair_asymptotics",
            _decreasing(gaps),
            gaps[-1],
            f"n={n_values[-1]}",
            f"| |lambda+| / (alpha n) - 1 | over n={n_values}",
        )

    @staticmethod
    def pair_box_isolation(
        kernel: ExponentialSumKernel,
        slices: Dict[int, SpectrumSlice],
        eps: float,
    ) -> ClaimResult:
        checked, worst, witness = [], 0.0, None
        for n, spectrum in slices.items():
            if spectrum.pair is None or spectrum.pair.is_real:
                continue
            report = complex_spectrum_service.verify_pair_box(
                kernel, n, eps, spectrum.pair
            )
            if report.margin >= 1:
                continue
            checked.append(n)
            if report.winding != 1 or not report.contains_pair:
                return _claim(
                    "pair_box_isolation",
                    False,
                    report.margin,
                    f"n={n}",
                    f"winding {report.winding} in the eps-box",
                )
            if report.margin >= worst:
                worst, witness = report.margin, f"n={n}"
        if not checked:
            return _not_applicable(
                "pair_box_isolation", "Rouche premise fails for every n"
            )
        return _claim(
            "pair_box_isolation",
            True,
            worst,
            witness,
            f"one zero in the eps-box for n in {checked}",
        )

    def sweep(self, run: RunConfig) -> List[SweepRecord]:
        """Pair and branch gaps over doubling n"""
        n_values = run.sweep.n_values or doublings(
            run.modes.n_min, run.modes.n_max
        )
        if len(n_values) < 4 or any(
            y <= x for x, y in zip(n_values, n_values[1:])
        ):
            raise ConfigurationError(
                f"insufficient doublings: need >= 3 increasing steps, got "
                f"n={n_values}"
            )
        kernel = kernel_service.instantiate(
            run.kernel.as_family(), run.kernel.length
        )
        tol_root = run.tolerances.root
        j = run.sweep.j
        ladder = None
        if kernel.M - 1 >= j:
            ladder = real_spectrum_service.find_mu(kernel, j, tol_root)

        records = []
        for n in n_values:
            pair = complex_spectrum_service.find_complex_pair(
                kernel, n, run.spectrum.eps, tol_root
            )
            branch_gap = None
            if ladder is not None:
                branch = real_spectrum_service.find_lambda_real(
                    kernel, n, j, ladder, tol_root
                )[j - 1]
                branch_gap = abs(branch.eigenvalue + ladder.mu[j - 1])
            records.append(
                SweepRecord(
                    n=n,
                    pair_rel_gap=abs(
                        abs(pair.lambda_plus) / (kernel.alpha_prefix * n) - 1
                    ),
                    branch_gap=branch_gap,
                )
            )
        return records

    @staticmethod
    def sweep_decreasing(records: List[SweepRecord]) -> Dict[str, bool]:
        gaps = [r.branch_gap for r in records]
        return {
            "pair_rel_gap": _decreasing([r.pair_rel_gap for r in records]),
            "branch_gap": None in gaps or _decreasing(gaps),
        }


verification_service = VerificationService()
