import logging
import math
from typing import List, Optional

from .. import config
from ..schemas.kernel_schemas import ExponentialSumKernel
from ..schemas.run_schemas import SpectrumRecord
from ..schemas.spectrum_schemas import RealZeroLadder, SpectrumSlice
from .complexspec_service import complex_spectrum_service
from .oracle_service import oracle_service
from .realspec_service import real_spectrum_service
from .timedomain_service import timedomain_service

logger = logging.getLogger(__name__)


class SliceService:
    """Assembles every zero of G_n for one mode into a SpectrumSlice"""

    @staticmethod
    def compute_slice(
        kernel: ExponentialSumKernel,
        n: int,
        J: Optional[int] = None,
        eps: float = config.PAIR_BOX_EPS,
        ladder: Optional[RealZeroLadder] = None,
        tol_root: float = config.ROOT_TOLERANCE,
    ) -> SpectrumSlice:
        J = kernel.M - 1 if J is None else min(J, kernel.M - 1)
        branches = real_spectrum_service.find_lambda_real(
            kernel, n, J, ladder, tol_root
        )
        pair = complex_spectrum_service.find_complex_pair(
            kernel, n, eps, tol_root
        )
        logger.info(
            f"n={n}: {len(branches)} real branches, pair "
            f"{pair.lambda_plus:.6g} ({pair.method.value})"
        )
        return SpectrumSlice(
            n=n,
            branches=branches,
            pair=pair,
            constant_kernel=kernel.is_constant,
        )

    @staticmethod
    def to_records(
        kernel: ExponentialSumKernel,
        spectrum: SpectrumSlice,
        eps: float = config.PAIR_BOX_EPS,
    ) -> List[SpectrumRecord]:
        """
        One row per zero. Pair rows carry the eps-box Im range as their
        bracket; oracle_dist is filled for kernels small enough for the
        dense eigen-solve to be a sharp reference.
        """
        n = spectrum.n
        oracle = None
        if kernel.M <= config.COMPANION_ORACLE_MAX_TERMS:
            oracle = timedomain_service.spectrum_oracle(kernel, n)

        def distance(z: complex) -> Optional[float]:
            if oracle is None:
                return None
            return min(abs(z - y) / max(1.0, abs(y)) for y in oracle)

        records = [
            SpectrumRecord(
                n=n,
                branch=str(branch.j),
                re=branch.eigenvalue,
                im=0.0,
                residual=branch.residual,
                bracket_lo=branch.bracket[0],
                bracket_hi=branch.bracket[1],
                oracle_dist=distance(complex(branch.eigenvalue)),
            )
            for branch in spectrum.branches
        ]

        pair = spectrum.pair
        if pair is not None:
            n_alpha = n * kernel.alpha_prefix
            lo, hi = n_alpha * (1 - eps), n_alpha * (1 + eps)
            for label, z, bracket in (
                ("+", pair.lambda_plus, (lo, hi)),
                ("-", pair.lambda_minus, (-hi, -lo)),
            ):
                records.append(
                    SpectrumRecord(
                        n=n,
                        branch=label,
                        re=z.real,
                        im=z.imag,
                        residual=pair.residual,
                        bracket_lo=bracket[0],
                        bracket_hi=bracket[1],
                        oracle_dist=distance(z),
                    )
                )
        return sorted(records, key=lambda record: record.sort_key)

    @staticmethod
    def failure_record(n: int) -> SpectrumRecord:
        """Diagnostic row for a mode whose solve failed"""
        return SpectrumRecord(
            n=n,
            branch="+",
            re=math.nan,
            im=math.nan,
            residual=math.nan,
            bracket_lo=math.nan,
            bracket_hi=math.nan,
        )


slice_service = SliceService()
