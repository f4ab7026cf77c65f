"""
Compute and write the spectrum of G_n for every configured mode
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

from ..exceptions import SpectrumError
from ..schemas.kernel_schemas import ExponentialSumKernel
from ..schemas.run_schemas import SpectrumRecord
from ..schemas.spectrum_schemas import RealZeroLadder
from ..services.realspec_service import real_spectrum_service
from ..services.slice_service import slice_service
from .base import SpectrumCommand

logger = logging.getLogger(__name__)

ModeResult = Tuple[int, List[SpectrumRecord], Optional[SpectrumError]]


def solve_mode(args) -> ModeResult:
    kernel, n, J, eps, ladder, tol_root = args
    try:
        spectrum = slice_service.compute_slice(
            kernel, n, J, eps, ladder, tol_root
        )
        return n, slice_service.to_records(kernel, spectrum, eps), None
    except SpectrumError as e:
        logger.error(f"Mode n={n} failed: {e.detail}")
        return n, [slice_service.failure_record(n)], e


def solve_modes(
    kernel: ExponentialSumKernel,
    n_values: List[int],
    J: int,
    eps: float,
    ladder: RealZeroLadder,
    tol_root: float,
    jobs: int = 1,
) -> List[ModeResult]:
    """Modes are independent; results come back in n order"""
    tasks = [(kernel, n, J, eps, ladder, tol_root) for n in n_values]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(solve_mode, tasks))
    return [solve_mode(task) for task in tasks]


class Command(SpectrumCommand):
    help = "Compute real branches and the complex pair for each mode"

    def handle(self, *args, **options):
        run = self.prepare(options)
        kernel = self.build_kernel(run)
        tol_root = run.tolerances.root
        J = kernel.M - 1 if run.spectrum.J is None else run.spectrum.J
        J = min(J, kernel.M - 1)

        ladder = real_spectrum_service.find_mu(kernel, J, tol_root)
        results = solve_modes(
            kernel,
            run.modes.values,
            J,
            run.spectrum.eps,
            ladder,
            tol_root,
            options.get("jobs", 1),
        )

        records = [record for _, rows, _ in results for record in rows]
        failures = [(n, error) for n, _, error in results if error]
        path = self.writer(run).write_spectrum(records)

        if failures:
            n, error = failures[0]
            self.stdout.write(
                self.style.ERROR(
                    f"❌ {len(failures)} of {len(results)} modes failed, "
                    f"first at n={n}: {error.detail}"
                )
            )
            raise error

        self.stdout.write(
            self.style.SUCCESS(
                f"✓ {len(records)} eigenvalues for n={run.modes.n_min}.."
                f"{run.modes.n_max} written to {path}"
            )
        )
