import numpy as np

from stride.qp import NonlinearProgram, SqpOptions, SqpStatus, solve_sqp

import pytest


class Rosenbrock(NonlinearProgram):
    def residual(self, z):
        return np.array([10.0 * (z[1] - z[0] ** 2), 1.0 - z[0]])


class Hyperbola(NonlinearProgram):
    lb = np.zeros(2)

    def residual(self, z):
        return np.array([z[0] - z[1]])

    def equality(self, z):
        return np.array([z[0] * z[1] - 1.0])


class Boxed(NonlinearProgram):
    ub = np.array([1.0, 3.0])

    def residual(self, z):
        return z - np.array([2.0, 2.0])


class Disk(NonlinearProgram):
    def residual(self, z):
        return z - np.array([2.0, 0.0])

    def inequality(self, z):
        return np.array([z[0]]), np.array([-np.inf]), np.array([0.5])


@pytest.mark.parametrize("z0", [[-1.2, 1.0], [0.0, 0.0], [2.0, 2.0]])
def test_rosenbrock(z0):
    result = solve_sqp(Rosenbrock(), z0, options=SqpOptions())
    assert result.status == SqpStatus.CONVERGED
    assert np.allclose(result.z, [1.0, 1.0], atol=1e-4)
    assert result.qp_count >= result.iterations


def test_equality_constrained():
    result = solve_sqp(Hyperbola(), [2.0, 0.3], options=SqpOptions())
    assert result.converged
    assert np.allclose(result.z, [1.0, 1.0], atol=1e-4)
    assert result.violation < 1e-6


def test_bounds():
    result = solve_sqp(Boxed(), [0.0, 0.0], options=SqpOptions())
    assert result.converged
    assert np.allclose(result.z, [1.0, 2.0], atol=1e-5)


def test_inequality():
    result = solve_sqp(Disk(), [0.0, 1.0], options=SqpOptions())
    assert result.converged
    assert np.allclose(result.z, [0.5, 0.0], atol=1e-5)


def test_max_iter():
    result = solve_sqp(Rosenbrock(), [-1.2, 1.0], options=SqpOptions(max_iter=1))
    assert result.status in (SqpStatus.MAX_ITER, SqpStatus.CONVERGED)
    assert result.qp_count == 1


def test_options_from_config():
    options = SqpOptions.from_config({"sqp": {"max_iter": 7}}, eta=1e-3)
    assert options.max_iter == 7
    assert options.eta == 1e-3
    assert options.merit_penalty == 10.0
