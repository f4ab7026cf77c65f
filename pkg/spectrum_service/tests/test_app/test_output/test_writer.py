import json
import math

import pytest

from app.enums import ClaimStatus, OutputFormat
from app.output.writer import ResultWriter, format_value
from app.schemas.run_schemas import (
    ClaimResult,
    SpectrumRecord,
    VerificationReport,
)
from app.schemas.timedomain_schemas import SimulationResult


def record(n, branch, re=-1.0, im=0.0, oracle_dist=None):
    return SpectrumRecord(
        n=n,
        branch=branch,
        re=re,
        im=im,
        residual=1e-12,
        bracket_lo=-2.0,
        bracket_hi=-0.5,
        oracle_dist=oracle_dist,
    )


@pytest.mark.parametrize(
    "value,expected",
    [
        (0.1, "1.0000000000000001e-01"),
        (-2.0, "-2.0000000000000000e+00"),
        (math.nan, "nan"),
        (None, ""),
        (True, "true"),
        (7, "7"),
        ("+", "+"),
    ],
)
def test_format_value(value, expected):
    assert format_value(value) == expected


def test_write_spectrum_csv(tmp_path):
    writer = ResultWriter(tmp_path / "out")
    records = [
        record(2, "-", im=-3.0),
        record(2, "1"),
        record(1, "+", im=1.5, oracle_dist=1e-13),
        record(2, "+", im=3.0),
    ]
    path = writer.write_spectrum(records)

    assert path == tmp_path / "out" / "spectrum.csv"
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# gp-spectrum v1"
    assert lines[1] == (
        "n,branch,re,im,residual,bracket_lo,bracket_hi,oracle_dist"
    )
    assert [line.split(",")[:2] for line in lines[2:]] == [
        ["1", "+"],
        ["2", "1"],
        ["2", "+"],
        ["2", "-"],
    ]
    assert lines[2].endswith(",1.0000000000000000e-13")
    assert lines[3].endswith(",")


def test_write_spectrum_json(tmp_path):
    writer = ResultWriter(tmp_path, OutputFormat.json)
    nan_row = record(1, "+", re=math.nan)
    path = writer.write_spectrum([nan_row])

    document = json.loads(path.read_text(encoding="utf-8"))
    assert path.name == "spectrum.json"
    assert document["columns"][0] == "n"
    assert document["rows"][0]["re"] is None
    assert document["rows"][0]["branch"] == "+"


def test_write_claims(tmp_path):
    report = VerificationReport(
        claims=[
            ClaimResult(name="interlacing", status=ClaimStatus.passed),
            ClaimResult(
                name="winding_count",
                status=ClaimStatus.not_applicable,
                detail="gap condition unmet",
            ),
        ]
    )
    path = ResultWriter(tmp_path).write_claims(report)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert path.name == "verify.csv"
    assert lines[2] == "interlacing,pass,,,"
    assert lines[3] == "winding_count,not_applicable,,,gap condition unmet"


def test_write_trajectories_and_field(tmp_path):
    result = SimulationResult(
        t_grid=[0.0, 1.0],
        theta_n={1: [1.0, 0.5], 2: [0.0, 0.0]},
        x_samples=[1.0],
        theta_xt=[[0.7, 0.3]],
        tail_bound=0.25,
    )
    writer = ResultWriter(tmp_path)

    path = writer.write_trajectories(result, {1: [1.0, 0.54]})
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[1] == "t,theta_1,theta_2,closed_1"
    assert len(lines) == 4

    path = writer.write_field(result)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[1] == "x,t,theta,tail_bound"
    assert lines[3].split(",")[1] == format_value(1.0)
    assert lines[3].split(",")[3] == format_value(0.25)


def test_failed_write_leaves_no_file(tmp_path, mocker):
    writer = ResultWriter(tmp_path)
    writer.write_spectrum([record(1, "1")])
    before = (tmp_path / "spectrum.csv").read_text(encoding="utf-8")

    mocker.patch.object(
        writer, "_serialize", side_effect=OSError("disk full")
    )
    with pytest.raises(OSError):
        writer.write_spectrum([record(1, "1"), record(2, "1")])

    assert sorted(p.name for p in tmp_path.iterdir()) == ["spectrum.csv"]
    after = (tmp_path / "spectrum.csv").read_text(encoding="utf-8")
    assert after == before
