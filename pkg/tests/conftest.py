import pytest

from gidkit import JointTable, gate, product_of_marginals


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def xor():
    return gate("xor")


@pytest.fixture(scope="session")
def uniform8(xor):
    # uniform over the (X1, X2, T) state space, as in the worked gate example
    return product_of_marginals(xor).rename("uniform8")


@pytest.fixture(scope="session")
def copied_pair():
    return JointTable(["X1", "X2"], [2, 2], {(0, 0): 0.5, (1, 1): 0.5}, name="copied_pair")
