"""
Asymptotics table over doubling mode indices
"""

import logging

from ..exceptions import ClaimFailureError
from ..services.verification_service import verification_service
from .base import SpectrumCommand

logger = logging.getLogger(__name__)


class Command(SpectrumCommand):
    help = "Tabulate pair and branch gaps as n doubles"

    def handle(self, *args, **options):
        run = self.prepare(options)
        records = verification_service.sweep(run)
        path = self.writer(run).write_sweep(records)
        verdict = verification_service.sweep_decreasing(records)

        for record in records:
            gap = "-"
            if record.branch_gap is not None:
                gap = f"{record.branch_gap:.3e}"
            self.stdout.write(
                f"n={record.n:<6} pair_rel_gap={record.pair_rel_gap:.3e} "
                f"branch_gap={gap}"
            )
        self.stdout.write(f"Table: {path}")

        failing = [column for column, ok in verdict.items() if not ok]
        if failing:
            self.stdout.write(
                self.style.ERROR(f"❌ Not decreasing: {', '.join(failing)}")
            )
            raise ClaimFailureError(
                f"Sweep columns not decreasing: {', '.join(failing)}"
            )
        self.stdout.write(self.style.SUCCESS("✓ Both columns decrease"))
