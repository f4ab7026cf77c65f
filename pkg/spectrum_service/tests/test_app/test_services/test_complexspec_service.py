import math

import numpy as np
import pytest

from app.enums import PairMethod
from app.exceptions import (
    ConfigurationError,
    GapConditionExhaustedError,
    PhaseJumpError,
    RoucheViolationError,
)
from app.schemas.spectrum_schemas import Rectangle
from app.services.complexspec_service import (
    complex_spectrum_service,
    winding_number,
)
from app.services.kernel_service import kernel_service
from app.services.oracle_service import oracle_service
from app.services.slice_service import slice_service


def test_winding_number_identity():
    result = winding_number(lambda z: z, Rectangle.centered_square(1.0))
    assert result.winding == 1
    assert result.quality < 1e-12


def test_winding_number_pole():
    rect = Rectangle(x_min=-2.0, x_max=0.0, y_min=-1.0, y_max=1.0)
    assert winding_number(lambda z: 1 / (z + 1), rect).winding == -1


def test_winding_number_no_zeros():
    rect = Rectangle(x_min=1.0, x_max=3.0, y_min=-1.0, y_max=1.0)
    assert winding_number(lambda z: z, rect).winding == 0


def test_winding_number_zero_on_boundary():
    rect = Rectangle(x_min=0.0, x_max=1.0, y_min=-1.0, y_max=1.0)
    with pytest.raises(PhaseJumpError):
        winding_number(lambda z: z, rect)


def test_winding_number_refines_fast_phase():
    # z^12 winds twelve times, far more than the initial samples resolve
    result = winding_number(
        lambda z: z**12, Rectangle.centered_square(1.0), samples=4
    )
    assert result.winding == 12


def test_count_spectrum_in_explicit_rect(two_term_kernel):
    report = complex_spectrum_service.count_spectrum_in_contour(
        two_term_kernel, 1, Rectangle.centered_square(5.0)
    )
    assert report.poles_inside == 2
    assert report.zeros_inside == 3
    assert report.winding == 1
    assert report.N_used is None
    assert report.bound_checks.n1_satisfied is None
    assert report.bound_checks.rouche_margin < 1


def test_count_spectrum_constant_kernel():
    kernel = kernel_service.from_lists([3.0], [0.0])
    X = 2 * kernel.alpha
    report = complex_spectrum_service.count_spectrum_in_contour(
        kernel, 1, Rectangle.centered_square(X)
    )
    assert report.zeros_inside == 2
    assert report.poles_inside == 1


def test_count_spectrum_rouche_violation(two_term_kernel):
    with pytest.raises(RoucheViolationError) as e:
        complex_spectrum_service.count_spectrum_in_contour(
            two_term_kernel, 3, Rectangle.centered_square(1.5)
        )
    assert e.value.worst_margin >= 1

    report = complex_spectrum_service.count_spectrum_in_contour(
        two_term_kernel,
        3,
        Rectangle.centered_square(1.5),
        enforce_rouche=False,
    )
    assert report.bound_checks.rouche_margin >= 1


def test_count_spectrum_pole_on_contour(two_term_kernel):
    with pytest.raises(PhaseJumpError):
        complex_spectrum_service.count_spectrum_in_contour(
            two_term_kernel, 1, Rectangle.centered_square(1.0)
        )


@pytest.mark.parametrize("n,N,X", [(1, 3, 3.5), (3, 19, 19.5)])
def test_gap_contour_power_law(power_law_kernel, n, N, X):
    contour = complex_spectrum_service.build_gap_contour(
        power_law_kernel, n
    )
    assert contour.N_used == N
    assert contour.rect.x_max == pytest.approx(X)
    assert contour.checks.n1_satisfied is True
    assert contour.checks.x_exceeds_n_alpha
    assert contour.checks.y_exceeds_n_alpha
    assert contour.checks.gap_quantity < contour.checks.gap_bound


def test_count_spectrum_gap_contour(power_law_kernel):
    report = complex_spectrum_service.count_spectrum_in_contour(
        power_law_kernel, 2
    )
    assert report.N_used == 9
    assert report.zeros_inside - report.poles_inside == 1
    # eight real branches inside (-9.5, 0) plus the pair
    assert report.zeros_inside == 10


def test_gap_contour_exhausted(loglog_kernel):
    with pytest.raises(GapConditionExhaustedError):
        complex_spectrum_service.build_gap_contour(loglog_kernel, 1)
    with pytest.raises(GapConditionExhaustedError):
        complex_spectrum_service.count_spectrum_in_contour(loglog_kernel, 1)


def test_find_complex_pair_constant_kernel(constant_kernel):
    pair = complex_spectrum_service.find_complex_pair(constant_kernel, 4)
    assert pair.lambda_plus == pytest.approx(4j, abs=1e-12)
    assert pair.lambda_minus == pair.lambda_plus.conjugate()
    assert pair.method == PairMethod.newton
    assert not pair.is_real


def test_find_complex_pair_matches_companion(two_term_kernel):
    pair = complex_spectrum_service.find_complex_pair(two_term_kernel, 1)
    roots = oracle_service.companion_spectrum(two_term_kernel, 1)
    upper = roots[np.argmax(roots.imag)]
    assert pair.lambda_plus == pytest.approx(upper, abs=1e-9)
    assert pair.lambda_plus.real == pytest.approx(-0.142388, abs=1e-5)
    assert pair.lambda_plus.imag == pytest.approx(1.66615, abs=1e-5)


def test_find_complex_pair_asymptotics(two_term_kernel):
    offsets = [
        complex_spectrum_service.find_complex_pair(
            two_term_kernel, n
        ).relative_offset
        for n in (8, 16, 32, 64)
    ]
    assert offsets[-1] < 0.05
    assert all(b < a for a, b in zip(offsets, offsets[1:]))


def test_find_complex_pair_overdamped():
    kernel = kernel_service.from_lists([1.0], [10.0])

    pair = complex_spectrum_service.find_complex_pair(kernel, 1)
    assert pair.method == PairMethod.real_pair
    assert pair.is_real
    assert pair.lambda_plus.real == pytest.approx(-5 + math.sqrt(24))
    assert pair.lambda_minus.real == pytest.approx(-5 - math.sqrt(24))

    pair = complex_spectrum_service.find_complex_pair(kernel, 10)
    assert pair.method == PairMethod.newton
    assert pair.lambda_plus == pytest.approx(complex(-5, math.sqrt(75)))


def test_find_complex_pair_box_bisection_fallback(two_term_kernel, mocker):
    expected = complex_spectrum_service.find_complex_pair(two_term_kernel, 4)
    newton = complex_spectrum_service._newton
    calls = []

    def fail_first(kernel, n, z, tol_root, max_iter=100):
        calls.append(z)
        if len(calls) == 1:
            return None, math.inf
        return newton(kernel, n, z, tol_root, max_iter)

    mocker.patch.object(
        complex_spectrum_service, "_newton", side_effect=fail_first
    )
    pair = complex_spectrum_service.find_complex_pair(two_term_kernel, 4)
    assert pair.method == PairMethod.box_bisection
    assert pair.lambda_plus == pytest.approx(expected.lambda_plus, abs=1e-8)
    assert complex_spectrum_service.pair_box(
        two_term_kernel, 4, 0.25
    ).contains(pair.lambda_plus)


def test_find_complex_pair_rejects_bad_arguments(two_term_kernel):
    with pytest.raises(ConfigurationError):
        complex_spectrum_service.find_complex_pair(two_term_kernel, 0)
    with pytest.raises(ConfigurationError):
        complex_spectrum_service.find_complex_pair(
            two_term_kernel, 1, eps=1.0
        )


def test_verify_left_half_plane(two_term_kernel, constant_kernel):
    for n in range(1, 6):
        spectrum = slice_service.compute_slice(two_term_kernel, n)
        assert complex_spectrum_service.verify_left_half_plane(spectrum)
    spectrum = slice_service.compute_slice(constant_kernel, 3)
    assert complex_spectrum_service.verify_left_half_plane(spectrum)


def test_verify_pair_box(two_term_kernel):
    pair = complex_spectrum_service.find_complex_pair(two_term_kernel, 16)
    report = complex_spectrum_service.verify_pair_box(
        two_term_kernel, 16, pair=pair
    )
    assert report.margin < 1
    assert report.winding == 1
    assert report.contains_pair


def test_imaginary_axis_clearance(two_term_kernel, constant_kernel):
    y = np.geomspace(1e-3, 1e3, 61)
    assert (
        complex_spectrum_service.imaginary_axis_clearance(
            two_term_kernel, 1, y
        )
        > 0
    )
    assert complex_spectrum_service.imaginary_axis_clearance(
        constant_kernel, 1, y
    ) == pytest.approx(0.0, abs=1e-12)
