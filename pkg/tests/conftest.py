import pytest

from polywild import QQ, Ring


@pytest.fixture
def r2():
    return Ring(2, QQ)


@pytest.fixture
def r3():
    return Ring(3, QQ)
