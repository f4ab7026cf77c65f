"""
Run the verification suite and write one row per claim
"""

import logging

from ..enums import ClaimStatus
from ..exceptions import ClaimFailureError
from ..services.verification_service import verification_service
from .base import SpectrumCommand

logger = logging.getLogger(__name__)


class Command(SpectrumCommand):
    help = "Check every claim about the spectrum and report margins"

    def handle(self, *args, **options):
        run = self.prepare(options)
        report = verification_service.verify(run)
        path = self.writer(run).write_claims(report)

        for claim in report.claims:
            if claim.status == ClaimStatus.passed:
                line = self.style.SUCCESS(f"✓ {claim.name}")
            elif claim.status == ClaimStatus.failed:
                line = self.style.ERROR(f"❌ {claim.name}: {claim.detail}")
            else:
                line = self.style.WARNING(
                    f"⚠️  {claim.name}: not applicable ({claim.detail})"
                )
            self.stdout.write(line)
        self.stdout.write(f"Report: {path}")

        if not report.passed:
            names = ", ".join(c.name for c in report.failures)
            raise ClaimFailureError(f"Claims failed: {names}")
