import logging
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .. import config
from ..schemas.kernel_schemas import ExponentialSumKernel
from ..schemas.oracle_schemas import MatchReport

logger = logging.getLogger(__name__)


class OracleService:
    """Polynomial shadow of G_n, independent of the rational solvers"""

    @staticmethod
    def numerator_of_K(kernel: ExponentialSumKernel) -> Polynomial:
        """sum_k a_k prod_{i != k} (z + b_i)"""
        numerator = Polynomial([0.0])
        for k, a_k in enumerate(kernel.a):
            others = [-b for i, b in enumerate(kernel.b) if i != k]
            numerator = numerator + a_k * Polynomial(
                np.polynomial.polynomial.polyfromroots(others)
            )
        return numerator

    def numerator_of_G(
        self, kernel: ExponentialSumKernel, n: int
    ) -> Polynomial:
        """z prod (z + b_i) + n^2 numerator_of_K, degree M + 1"""
        denominator = Polynomial.fromroots([-b for b in kernel.b])
        return Polynomial([0.0, 1.0]) * denominator + (
            n * n
        ) * self.numerator_of_K(kernel)

    @staticmethod
    def companion_roots(poly: Polynomial) -> np.ndarray:
        """Eigenvalues of the companion matrix, sorted by (Re, Im)"""
        roots = np.asarray(poly.roots(), dtype=complex)
        return roots[np.lexsort((roots.imag, roots.real))]

    def companion_spectrum(
        self, kernel: ExponentialSumKernel, n: int
    ) -> np.ndarray:
        if kernel.M > config.COMPANION_ORACLE_MAX_TERMS:
            logger.warning(
                f"Companion roots for M={kernel.M} are ill-conditioned"
            )
        return self.companion_roots(self.numerator_of_G(kernel, n))

    @staticmethod
    def match_spectra(
        computed: Sequence[complex],
        reference: Sequence[complex],
        rel_tol: float = config.ORACLE_MATCH_TOLERANCE,
    ) -> MatchReport:
        """
        Greedy nearest-neighbour pairing: the globally closest free pair is
        matched first. A collision is a computed root whose nearest
        reference is also nearest to another computed root.
        """
        x = np.asarray(list(computed), dtype=complex)
        y = np.asarray(list(reference), dtype=complex)
        if x.size == 0 or y.size == 0:
            return MatchReport(
                pairs=[], distances=[], size_mismatch=x.size != y.size
            )

        distance = np.abs(x[:, None] - y[None, :]) / np.maximum(
            1.0, np.abs(y)
        )[None, :]
        nearest = np.argmin(distance, axis=1)
        collisions = int(x.size - np.unique(nearest).size)

        order = np.argsort(distance, axis=None, kind="stable")
        used_x, used_y = set(), set()
        pairs, distances = [], []
        for flat in order:
            i, j = np.unravel_index(flat, distance.shape)
            if i in used_x or j in used_y:
                continue
            used_x.add(i)
            used_y.add(j)
            pairs.append((int(i), int(j)))
            distances.append(float(distance[i, j]))
            if len(pairs) == min(x.size, y.size):
                break

        report = MatchReport(
            pairs=sorted(pairs),
            distances=[d for _, d in sorted(zip(pairs, distances))],
            collisions=collisions,
            size_mismatch=x.size != y.size,
        )
        if not report.matches(rel_tol):
            logger.debug(
                f"Spectra disagree: max distance {report.max_distance:.3g}, "
                f"{collisions} collisions"
            )
        return report


oracle_service = OracleService()
