from __future__ import annotations

import math

import pytest

SQRT3 = math.sqrt(3.0)


@pytest.fixture(scope="session")
def q_sqrt3() -> float:
    return SQRT3
