"""Shared fixtures for the test suite."""

import pathlib

import pytest

from cmutkit import CmutCell, LumpedParams, derive_lumped

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def reference_cell() -> CmutCell:
    # Defaults give the 85 um / 3 um / 0.7 um aluminium-on-silicon cell
    # that every frozen constant in the tests refers to.
    return CmutCell(
        vibrating_radius=85e-6,
        membrane_thickness=3e-6,
        gap=0.7e-6,
        electrode_thickness=2.07e-6,
    )


@pytest.fixture(scope="session")
def reference_params(reference_cell) -> LumpedParams:
    return derive_lumped(reference_cell)


@pytest.fixture(scope="session")
def design_path() -> pathlib.Path:
    return REPO_ROOT / "reference.design"


@pytest.fixture(scope="session")
def design_text(design_path) -> str:
    return design_path.read_text()
