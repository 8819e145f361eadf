import pytest

from tests.common import load_bundle


@pytest.fixture(scope="session")
def cart_bundle():
    return load_bundle("cart.tm")


@pytest.fixture(scope="session")
def flight_bundle():
    return load_bundle("flight.tm")


@pytest.fixture(scope="session")
def order_bundle():
    return load_bundle("order.tm")


@pytest.fixture(scope="session")
def edp_bundle():
    return load_bundle("edp.tm")
