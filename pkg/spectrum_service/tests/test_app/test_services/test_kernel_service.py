import math

import mpmath
import pytest
from pydantic import ValidationError

from app.enums import GapVerdict, KernelFamilyTag
from app.exceptions import (
    ConfigurationError,
    KernelValidationError,
    PoleHitError,
)
from app.schemas.kernel_schemas import KernelFamily, KernelParams
from app.services.kernel_service import kernel_service


def power_law(beta=1.0, gamma=2.0, A=1.0, c=1.0):
    return KernelFamily(
        family=KernelFamilyTag.power_law,
        params=KernelParams(c=c, beta=beta, gamma=gamma, A=A),
    )


def test_eval_k_constant(constant_kernel):
    assert kernel_service.eval_k(constant_kernel, 5.0) == 1.0


def test_eval_k_two_terms_against_mpmath(symmetric_kernel):
    assert kernel_service.eval_k(symmetric_kernel, 0.0) == 2.0

    expected = mpmath.exp(-1) + mpmath.exp(-3)
    value = kernel_service.eval_k(symmetric_kernel, 1.0)
    assert abs(value - float(expected)) < 1e-15
    assert value == pytest.approx(0.4176665095, abs=1e-9)


def test_eval_k_rejects_bad_arguments(symmetric_kernel):
    with pytest.raises(ConfigurationError):
        kernel_service.eval_k(symmetric_kernel, -1.0)
    with pytest.raises(ConfigurationError):
        kernel_service.eval_k(symmetric_kernel, 1.0, M=0)
    with pytest.raises(ConfigurationError):
        kernel_service.eval_k(symmetric_kernel, 1.0, M=3)


def test_eval_k_truncation_error_within_tail_bound(power_law_kernel):
    full = kernel_service.eval_k(power_law_kernel, 0.5)
    for M in (5, 10, 25):
        partial = kernel_service.eval_k(power_law_kernel, 0.5, M=M)
        assert 0 <= full - partial <= power_law_kernel.tail_bound(M)


def test_eval_K_examples(constant_kernel, symmetric_kernel):
    assert kernel_service.eval_K(constant_kernel, 2).value == 0.5
    assert kernel_service.eval_K(symmetric_kernel, -2).value == 0

    z = 1e6j
    value = kernel_service.eval_K(symmetric_kernel, z).value
    assert abs(z * value - 2) < 1e-5


def test_eval_K_pole_hit(symmetric_kernel):
    with pytest.raises(PoleHitError) as e:
        kernel_service.eval_K(symmetric_kernel, -1.0)
    assert e.value.pole == 1.0
    assert e.value.exit_code == 2


def test_eval_K_truncation_bound(power_law_kernel):
    result = kernel_service.eval_K(power_law_kernel, 1j, M=10)
    assert result.truncation_bound > 0
    exact = kernel_service.eval_K(power_law_kernel, 1j).value
    assert abs(exact - result.value) <= result.truncation_bound

    assert kernel_service.eval_K(power_law_kernel, 1j).truncation_bound > 0


def test_laplace_matches_scalar_evaluation(three_term_kernel):
    points = [0.5 + 0.5j, -1.5 + 2j, 10j]
    vector = kernel_service.laplace(three_term_kernel, points)
    for z, value in zip(points, vector):
        scalar = kernel_service.eval_K(three_term_kernel, z).value
        assert abs(value - scalar) < 1e-15 * max(1, abs(scalar))


def test_laplace_derivative_finite_difference(two_term_kernel):
    z, h = 0.3 + 1.2j, 1e-6
    numeric = (
        kernel_service.laplace(two_term_kernel, z + h)
        - kernel_service.laplace(two_term_kernel, z - h)
    ) / (2 * h)
    exact = kernel_service.laplace_derivative(two_term_kernel, z)
    assert abs(numeric - exact) < 1e-8


def test_herglotz_and_conjugate_symmetry(power_law_kernel):
    for z in (1 + 1j, -3 + 0.1j, -40 + 5j, 1000j):
        value = kernel_service.laplace(power_law_kernel, z)
        assert value.imag < 0
        mirrored = kernel_service.laplace(power_law_kernel, z.conjugate())
        assert abs(mirrored - value.conjugate()) <= 1e-15 * abs(value)


def test_sector_asymptotics_decrease(power_law_kernel):
    alpha_sq = power_law_kernel.alpha_sq_prefix
    errors = [
        abs(z * kernel_service.laplace(power_law_kernel, z) - alpha_sq)
        for z in (10.0 ** k * (1 + 1j) for k in range(1, 6))
    ]
    assert all(b < a for a, b in zip(errors, errors[1:]))


def test_instantiate_finite_list():
    family = KernelFamily(
        family=KernelFamilyTag.finite_list, a=[1.0], b=[0.0]
    )
    kernel = kernel_service.instantiate(family, 1)
    assert kernel.alpha_sq == 1
    assert kernel.tail_mass == 0
    assert kernel.is_constant


def test_instantiate_power_law():
    kernel = kernel_service.instantiate(power_law(), 10)
    assert kernel.alpha_sq_prefix == pytest.approx(1.549768, abs=1e-6)
    assert kernel.tail_mass <= 0.1
    assert kernel.b_next == 11
    assert kernel.alpha_sq >= math.pi**2 / 6


def test_instantiate_truncated_list_keeps_tail():
    family = KernelFamily(
        family=KernelFamilyTag.finite_list, a=[1.0, 2.0, 3.0], b=[0, 1, 2]
    )
    kernel = kernel_service.instantiate(family, 2)
    assert kernel.tail_mass == 3.0
    assert kernel.b_next == 2
    assert kernel.alpha_sq == 6.0

    with pytest.raises(KernelValidationError):
        kernel_service.instantiate(family, 4)


def test_divergent_family_rejected():
    with pytest.raises(ValidationError, match="alpha_sq diverges"):
        power_law(gamma=1.0)


@pytest.mark.parametrize(
    "a, b",
    [
        ([1.0, 1.0], [1.0, 1.0]),
        ([1.0, 1.0], [2.0, 1.0]),
        ([-1.0], [0.0]),
        ([1.0], [-0.5]),
    ],
)
def test_invalid_lists_rejected(a, b):
    with pytest.raises(KernelValidationError):
        kernel_service.from_lists(a, b)


def test_tail_bound_nonincreasing(power_law_kernel):
    bounds = [power_law_kernel.tail_bound(m) for m in range(0, 51)]
    assert all(b <= a for a, b in zip(bounds, bounds[1:]))
    assert bounds[0] == pytest.approx(power_law_kernel.alpha_sq)


def test_exact_alpha_sq(basel_family, power_law_kernel):
    assert kernel_service.exact_alpha_sq(basel_family) == pytest.approx(
        1.0, abs=1e-12
    )
    assert power_law_kernel.alpha_sq >= 1.0


def test_gap_condition_linear_rates():
    report = kernel_service.check_gap_condition(power_law(beta=1.0), 100)
    assert report.sup_so_far == pytest.approx(100)
    assert report.witness_index == 100
    assert report.verdict == GapVerdict.unbounded
    assert report.satisfied_empirically
    assert report.closed_form


def test_gap_condition_slow_rates():
    report = kernel_service.check_gap_condition(power_law(beta=0.4), 100)
    assert report.verdict == GapVerdict.bounded
    assert not report.satisfied_empirically


def test_gap_condition_loglog():
    family = KernelFamily(family=KernelFamilyTag.logarithmic)
    report = kernel_service.check_gap_condition(family, 1000)
    assert report.verdict == GapVerdict.bounded
    assert not report.satisfied_empirically


def test_gap_condition_finite_list_undetermined():
    family = KernelFamily(
        family=KernelFamilyTag.finite_list, a=[1, 1, 1], b=[0, 1, 3]
    )
    report = kernel_service.check_gap_condition(family, 10)
    assert report.verdict == GapVerdict.undetermined
    assert report.probe_depth == 2
    assert report.sup_so_far == 2.0

    with pytest.raises(ConfigurationError):
        kernel_service.check_gap_condition(family, 1)


def test_gap_condition_single_rate(constant_kernel):
    report = kernel_service.check_gap_condition(constant_kernel.family, 10)
    assert report.verdict == GapVerdict.undetermined
    assert report.probe_depth == 0
    assert not report.satisfied_empirically


def test_sector_comparability():
    for z in (1 + 1j, -1 + 0.5j, 3j, 0.01 - 2j):
        for x in (0.0, 0.5, 10.0):
            assert kernel_service.check_sector_comparability(z, x)
    with pytest.raises(ConfigurationError):
        kernel_service.check_sector_comparability(-1 + 1e-3j, 1.0)
