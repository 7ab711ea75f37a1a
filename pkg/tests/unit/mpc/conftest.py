import numpy as np

from stride.centroidal import ContactSchedule, build_reference, standing_configuration
from stride.kinematics import load_model
from stride.terrain import Terrain

import pytest


class State(object):
    def __init__(self, q, qd):
        self.q = q
        self.qd = qd


@pytest.fixture(scope="session")
def biped():
    return load_model("biped2d")


@pytest.fixture(scope="session")
def standing(biped):
    feet = np.array([[0.0, leg.r_c1[1], 0.0] for leg in biped.legs])
    q = standing_configuration(biped, np.array([0.0, 0.0, 0.38]), feet)
    return State(q, np.zeros(biped.nq))


@pytest.fixture
def schedule():
    return ContactSchedule.walking(h=10, h_swing=5, swing_leg=0)


@pytest.fixture
def bundle(biped, standing, schedule):
    return build_reference(standing, 0.3, schedule, 0.05, Terrain.flat(), biped)
