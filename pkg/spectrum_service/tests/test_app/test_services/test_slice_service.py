import math

import pytest

from app.services.slice_service import slice_service


def test_compute_slice(three_term_kernel):
    spectrum = slice_service.compute_slice(three_term_kernel, 2)
    assert spectrum.n == 2
    assert [b.j for b in spectrum.branches] == [1, 2]
    assert spectrum.pair is not None
    assert len(spectrum.eigenvalues()) == 4
    assert not spectrum.constant_kernel


def test_compute_slice_caps_J(three_term_kernel):
    spectrum = slice_service.compute_slice(three_term_kernel, 2, J=10)
    assert len(spectrum.branches) == 2
    spectrum = slice_service.compute_slice(three_term_kernel, 2, J=1)
    assert len(spectrum.branches) == 1


def test_to_records_order(two_term_kernel):
    spectrum = slice_service.compute_slice(two_term_kernel, 1)
    records = slice_service.to_records(two_term_kernel, spectrum)
    assert [r.branch for r in records] == ["1", "+", "-"]
    assert all(r.n == 1 for r in records)
    assert all(r.oracle_dist < 1e-8 for r in records)

    plus, minus = records[1], records[2]
    assert minus.im == -plus.im
    n_alpha = math.sqrt(3)
    assert (plus.bracket_lo, plus.bracket_hi) == pytest.approx(
        (0.75 * n_alpha, 1.25 * n_alpha)
    )
    assert (minus.bracket_lo, minus.bracket_hi) == pytest.approx(
        (-1.25 * n_alpha, -0.75 * n_alpha)
    )

    branch = records[0]
    assert branch.im == 0.0
    assert branch.bracket_lo == -1.0


def test_to_records_skips_oracle_for_long_kernels(power_law_kernel):
    spectrum = slice_service.compute_slice(power_law_kernel, 1, J=2)
    records = slice_service.to_records(power_law_kernel, spectrum)
    assert [r.branch for r in records] == ["1", "2", "+", "-"]
    assert all(r.oracle_dist is None for r in records)


def test_failure_record():
    record = slice_service.failure_record(7)
    assert record.n == 7
    assert math.isnan(record.re) and math.isnan(record.residual)
    assert record.oracle_dist is None
