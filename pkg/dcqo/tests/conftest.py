"""Pytest configuration file
"""
import os

import numpy as np
import pytest
import scipy

from dcqo.ising import IsingModel, qubo_to_ising, random_spin_glass
from dcqo.problems import TspInstance, tsp_to_qubo

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


def pytest_report_header(config):
    return "numpy: %s, scipy: %s" % (np.__version__, scipy.__version__)


@pytest.fixture(scope="session")
def tsp3():
    return TspInstance.from_json(os.path.join(DATA_DIR, "tsp3.json"))


@pytest.fixture(scope="session")
def tsp4():
    return TspInstance.from_json(os.path.join(DATA_DIR, "tsp4.json"))


@pytest.fixture(scope="session")
def tsp3_model(tsp3):
    return qubo_to_ising(tsp_to_qubo(tsp3))


@pytest.fixture(scope="session")
def tsp4_model(tsp4):
    return qubo_to_ising(tsp_to_qubo(tsp4))


@pytest.fixture(scope="session")
def glass10():
    return random_spin_glass(10, seed=7)


@pytest.fixture(scope="function", params=[1, 2, 3, 4])
def small_glass(request):
    return random_spin_glass(request.param, seed=100 + request.param)


@pytest.fixture(scope="session")
def pair_model():
    return IsingModel([0.4, -0.7], {(0, 1): 0.3})
