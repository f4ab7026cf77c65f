"""
Time-domain simulation of theta_n(t) and of the field theta(x, t)
"""

import logging

import numpy as np

from ..exceptions import ConfigurationError
from ..services.timedomain_service import timedomain_service
from .base import SpectrumCommand

logger = logging.getLogger(__name__)


class Command(SpectrumCommand):
    help = "Integrate each mode and reconstruct theta(x, t)"

    def handle(self, *args, **options):
        run = self.prepare(options)
        simulation = run.simulation
        if simulation is None:
            raise ConfigurationError("simulate needs a [simulation] section")
        kernel = self.build_kernel(run)
        t_grid = np.linspace(0.0, simulation.t_end, simulation.t_samples)

        result = timedomain_service.reconstruct_field(
            kernel,
            simulation.xi,
            simulation.x_samples,
            t_grid,
            run.tolerances.integrator,
            simulation.xi_tail_l2,
            options.get("jobs", 1),
        )

        closed = None
        if kernel.is_constant:
            closed = {
                n: timedomain_service.closed_form_constant(
                    kernel, n, xi_n, t_grid
                ).tolist()
                for n, xi_n in enumerate(simulation.xi, start=1)
            }
        writer = self.writer(run)
        path = writer.write_trajectories(result, closed)
        self.stdout.write(
            self.style.SUCCESS(
                f"✓ {len(result.modes)} modes on {len(t_grid)} times "
                f"written to {path}"
            )
        )
        if result.theta_xt is not None:
            field = writer.write_field(result)
            self.stdout.write(
                self.style.SUCCESS(
                    f"✓ Field with tail estimate {result.tail_bound:.3e} "
                    f"written to {field}"
                )
            )
