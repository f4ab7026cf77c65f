import math
import os
import sys
from pathlib import Path
from typing import Any, Callable, Generator

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
# this is to include the service dir in sys.path
# so that we can import app without installing the package

from app.enums import KernelFamilyTag  # noqa: E402
from app.schemas.kernel_schemas import (  # noqa: E402
    ExponentialSumKernel,
    KernelFamily,
    KernelParams,
)
from app.services.kernel_service import kernel_service  # noqa: E402

BASEL_A = 6 / math.pi**2


@pytest.fixture(scope="function")
def constant_kernel() -> ExponentialSumKernel:
    """k(t) = 1, the wave equation with unit speed"""
    return kernel_service.from_lists([1.0], [0.0])


@pytest.fixture(scope="function")
def two_term_kernel() -> ExponentialSumKernel:
    """K(z) = 2/z + 1/(z + 1), alpha^2 = 3"""
    return kernel_service.from_lists([2.0, 1.0], [0.0, 1.0])


@pytest.fixture(scope="function")
def symmetric_kernel() -> ExponentialSumKernel:
    """K(z) = 1/(z + 1) + 1/(z + 3), zero at z = -2"""
    return kernel_service.from_lists([1.0, 1.0], [1.0, 3.0])


@pytest.fixture(scope="function")
def three_term_kernel() -> ExponentialSumKernel:
    return kernel_service.from_lists([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


@pytest.fixture(scope="function")
def basel_family() -> KernelFamily:
    """a_k = 6 / (pi^2 k^2), b_k = k: alpha^2 = 1"""
    return KernelFamily(
        family=KernelFamilyTag.power_law,
        params=KernelParams(c=1.0, beta=1.0, gamma=2.0, A=BASEL_A),
    )


@pytest.fixture(scope="function")
def power_law_kernel(basel_family: KernelFamily) -> ExponentialSumKernel:
    return kernel_service.instantiate(basel_family, 50)


@pytest.fixture(scope="function")
def loglog_kernel() -> ExponentialSumKernel:
    family = KernelFamily(
        family=KernelFamilyTag.logarithmic,
        params=KernelParams(c=1.0, gamma=2.0, A=1.0),
    )
    return kernel_service.instantiate(family, 50)


@pytest.fixture(scope="function")
def write_config(
    tmp_path: Path,
) -> Generator[Callable[..., Path], Any, None]:
    """
    Write a TOML run configuration into a fresh directory; outputs of the
    run go to tmp_path / "out".
    """
    written = []

    def _write(body: str, name: str = "run.toml") -> Path:
        path = tmp_path / name
        path.write_text(body.strip() + "\n", encoding="utf-8")
        written.append(path)
        return path

    yield _write
    for path in written:
        path.unlink(missing_ok=True)


@pytest.fixture(scope="function")
def out_dir(tmp_path: Path) -> Path:
    return tmp_path / "out"
