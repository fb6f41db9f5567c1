import pytest

from bhankel import derive_params, plan_transform, transform_grids


@pytest.fixture(scope="session")
def params310():
    return derive_params(3, 1.0, 0)


@pytest.fixture(scope="session")
def plan310(params310):
    pg, sg = transform_grids(1.0, r_max=12.0)
    return plan_transform(pg, sg, params310)
