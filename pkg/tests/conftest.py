import pytest


def pytest_addoption(parser):
    parser.addoption("--seed", action="store", type=int, default=0,
                     help="seed for the randomized batteries")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")
