import numpy as np
import pytest

from microlub import BearingGeometry, HorizontalGrid, ModelParams, VerticalGrid

# Constant parameters shared by all reference simulations.
REFERENCE_SETUP = dict(N=0.1, R_c=0.01, nu_b_bar=0.1, delta=0.01, s1=1.0)


def reference_params(N: float = 0.1, M: float = 0.0) -> ModelParams:
    kw = dict(REFERENCE_SETUP)
    kw["N"] = N
    return ModelParams.from_boundary_viscosity(M=M, **kw)


@pytest.fixture
def slider() -> BearingGeometry:
    return BearingGeometry(slope_m=-0.5)


@pytest.fixture
def grids() -> tuple[HorizontalGrid, VerticalGrid]:
    return HorizontalGrid(60), VerticalGrid(100)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(987651234)
