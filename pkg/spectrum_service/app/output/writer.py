import csv
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from .. import config
from ..enums import OutputFormat
from ..schemas.run_schemas import (
    SpectrumRecord,
    SweepRecord,
    VerificationReport,
)
from ..schemas.timedomain_schemas import SimulationResult

logger = logging.getLogger(__name__)

SPECTRUM_COLUMNS = [
    "n",
    "branch",
    "re",
    "im",
    "residual",
    "bracket_lo",
    "bracket_hi",
    "oracle_dist",
]
SWEEP_COLUMNS = ["n", "pair_rel_gap", "branch_gap_j"]
CLAIM_COLUMNS = ["name", "status", "margin", "witness", "detail"]


def format_value(value: Any) -> str:
    """17 significant digits for floats, empty for missing values"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.16e}" if math.isfinite(value) else str(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ResultWriter:
    """
    Sink for result tables. Each table is written to a temporary file in
    the output directory and renamed over the target once complete.
    """

    def __init__(
        self,
        directory: os.PathLike,
        fmt: OutputFormat = OutputFormat.csv,
    ):
        self.directory = Path(directory)
        self.fmt = OutputFormat(fmt)

    def _serialize(
        self, handle, columns: List[str], rows: List[Dict[str, Any]]
    ):
        if self.fmt == OutputFormat.json:
            json.dump(
                {
                    "header": config.CSV_HEADER.lstrip("# "),
                    "columns": columns,
                    "rows": [
                        {c: _json_value(row.get(c)) for c in columns}
                        for row in rows
                    ],
                },
                handle,
                indent=2,
                allow_nan=False,
            )
            handle.write("\n")
            return
        handle.write(config.CSV_HEADER + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])

    def write_table(
        self,
        name: str,
        columns: List[str],
        rows: Iterable[Dict[str, Any]],
    ) -> Path:
        """
        Write one table as <name>.csv or <name>.json

        Returns:
            Path: the final file path
        """
        rows = list(rows)
        self.directory.mkdir(parents=True, exist_ok=True)
        target = self.directory / f"{name}.{self.fmt.value}"

        handle = tempfile.NamedTemporaryFile(
            "w",
            dir=self.directory,
            prefix=f".{name}.",
            suffix=".tmp",
            delete=False,
            encoding="utf-8",
        )
        try:
            with handle:
                self._serialize(handle, columns, rows)
            os.replace(handle.name, target)
        except Exception as e:
            logger.error(f"Failed to write {target}: {e}")
            Path(handle.name).unlink(missing_ok=True)
            raise

        logger.info(f"Wrote {len(rows)} rows to {target}")
        return target

    def write_spectrum(self, records: Sequence[SpectrumRecord]) -> Path:
        rows = [
            r.model_dump() for r in sorted(records, key=lambda r: r.sort_key)
        ]
        return self.write_table("spectrum", SPECTRUM_COLUMNS, rows)

    def write_sweep(self, records: Sequence[SweepRecord]) -> Path:
        rows = [
            {
                "n": r.n,
                "pair_rel_gap": r.pair_rel_gap,
                "branch_gap_j": r.branch_gap,
            }
            for r in records
        ]
        return self.write_table("sweep", SWEEP_COLUMNS, rows)

    def write_claims(self, report: VerificationReport) -> Path:
        rows = [
            {**c.model_dump(), "status": c.status.value}
            for c in report.claims
        ]
        return self.write_table("verify", CLAIM_COLUMNS, rows)

    def write_trajectories(
        self,
        result: SimulationResult,
        closed: Optional[Dict[int, List[float]]] = None,
    ) -> Path:
        """Columns t, theta_<n>... and closed_<n>... when given"""
        closed = closed or {}
        columns = ["t"] + [f"theta_{n}" for n in result.modes]
        columns += [f"closed_{n}" for n in sorted(closed)]
        rows = []
        for i, t in enumerate(result.t_grid):
            row = {"t": t}
            row.update(
                {f"theta_{n}": result.theta_n[n][i] for n in result.modes}
            )
            row.update({f"closed_{n}": closed[n][i] for n in closed})
            rows.append(row)
        return self.write_table("trajectories", columns, rows)

    def write_field(self, result: SimulationResult) -> Path:
        """Long format: one row per (x, t) sample"""
        rows = [
            {
                "x": x,
                "t": t,
                "theta": result.theta_xt[i][j],
                "tail_bound": result.tail_bound,
            }
            for i, x in enumerate(result.x_samples)
            for j, t in enumerate(result.t_grid)
        ]
        columns = ["x", "t", "theta", "tail_bound"]
        return self.write_table("field", columns, rows)
