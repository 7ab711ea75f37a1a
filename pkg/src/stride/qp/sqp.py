"""
Gauss-Newton SQP driver.

Problems minimize 1/2 |r(z)|^2 + g0' z subject to c_eq(z) = 0,
l <= c_in(z) <= u and lb <= z <= ub. Each iteration solves the QP of the
linearized residuals and constraints, then backtracks on the l1 merit

    phi(z) = cost(z) + mu (|c_eq(z)|_1 + violation of c_in and bounds).

Jacobians missing from the problem are replaced by central differences.
"""

import enum
import logging

import numpy as np

from ..config import get_config_section, register_config
from ..utils import numerical_jacobian
from .admm import solve_qp
from .problem import QuadraticProgram

__all__ = [
    "NonlinearProgram",
    "SqpOptions",
    "SqpResult",
    "SqpStatus",
    "solve_sqp",
]

LOG = logging.getLogger(__name__)

register_config(
    name="sqp",
    default={
        "max_iter": 50,
        "eta": 1e-6,
        "max_halvings": 20,
        "merit_penalty": 10.0,
        "armijo": 1e-4,
        "regularization": 1e-8,
        "fd_step": 1e-6,
    })


class SqpStatus(enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    LINE_SEARCH_FAILED = "line_search_failed"
    QP_FAILED = "qp_failed"


class NonlinearProgram(object):
    """Callbacks of a least-squares NLP.

       Subclasses override ``residual`` and whichever constraint callbacks
       they need; Jacobians default to finite differences.
    """

    lb = None
    ub = None
    fd_step = 1e-6

    def residual(self, z):
        raise NotImplementedError

    def residual_jacobian(self, z):
        return numerical_jacobian(self.residual, z, self.fd_step)

    def linear_cost(self):
        return None

    def equality(self, z):
        return np.zeros(0)

    def equality_jacobian(self, z):
        return numerical_jacobian(self.equality, z, self.fd_step).reshape(-1, len(z))

    def inequality(self, z):
        """(values, lower, upper)"""
        return np.zeros(0), np.zeros(0), np.zeros(0)

    def inequality_jacobian(self, z):
        return numerical_jacobian(lambda x: self.inequality(x)[0], z, self.fd_step).reshape(-1, len(z))


class SqpOptions(object):
    def __init__(self, max_iter=50, eta=1e-6, max_halvings=20, merit_penalty=10.0, armijo=1e-4,
                 regularization=1e-8, fd_step=1e-6):
        self.max_iter = max_iter
        self.eta = eta
        self.max_halvings = max_halvings
        self.merit_penalty = merit_penalty
        self.armijo = armijo
        self.regularization = regularization
        self.fd_step = fd_step

    @classmethod
    def from_config(cls, config=None, **overrides):
        kwargs = get_config_section("sqp", config)
        kwargs.update(overrides)
        return cls(**kwargs)


class SqpResult(object):
    """Best iterate and per-iteration diagnostics"""

    def __init__(self, z, status, iterations, qp_count, step_norms, violation, cost, merit_steps):
        self.z = z
        self.status = status
        self.iterations = iterations
        self.qp_count = qp_count
        self.step_norms = step_norms
        self.violation = violation
        self.cost = cost
        self.merit_steps = merit_steps

    @property
    def converged(self):
        return self.status == SqpStatus.CONVERGED

    def __repr__(self):
        return "{}(status={}, iterations={}, cost={!r}, violation={!r})".format(
            type(self).__name__, self.status.value, self.iterations, self.cost, self.violation)


class _Evaluator(object):
    """Function values of an NLP with bound defaults filled in"""

    def __init__(self, nlp, n, fd_step):
        self.nlp = nlp
        self.n = n
        self.fd_step = fd_step
        self.g0 = None
        linear_cost = getattr(nlp, "linear_cost", None)
        if linear_cost is not None:
            self.g0 = linear_cost()
        lb = getattr(nlp, "lb", None)
        ub = getattr(nlp, "ub", None)
        self.lb = np.full(n, -np.inf) if lb is None else np.asarray(lb, dtype=float)
        self.ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float)

    def _jacobian(self, name, fun, z):
        method = getattr(self.nlp, name, None)
        if method is not None:
            return np.asarray(method(z), dtype=float).reshape(-1, self.n)
        return numerical_jacobian(fun, z, self.fd_step).reshape(-1, self.n)

    def residual(self, z):
        return np.atleast_1d(np.asarray(self.nlp.residual(z), dtype=float))

    def equality(self, z):
        method = getattr(self.nlp, "equality", None)
        return np.zeros(0) if method is None else np.atleast_1d(np.asarray(method(z), dtype=float))

    def inequality(self, z):
        method = getattr(self.nlp, "inequality", None)
        if method is None:
            return np.zeros(0), np.zeros(0), np.zeros(0)
        values, lower, upper = method(z)
        return (np.atleast_1d(np.asarray(values, dtype=float)), np.atleast_1d(np.asarray(lower, dtype=float)),
                np.atleast_1d(np.asarray(upper, dtype=float)))

    def cost(self, z):
        r = self.residual(z)
        value = 0.5 * r @ r
        if self.g0 is not None:
            value += self.g0 @ z
        return value

    def violation(self, z):
        total = float(np.sum(np.abs(self.equality(z))))
        values, lower, upper = self.inequality(z)
        if values.size:
            total += float(np.sum(np.maximum(lower - values, 0.0)) + np.sum(np.maximum(values - upper, 0.0)))
        total += float(np.sum(np.maximum(self.lb - z, 0.0)) + np.sum(np.maximum(z - self.ub, 0.0)))
        return total

    def max_violation(self, z):
        parts = [np.abs(self.equality(z))]
        values, lower, upper = self.inequality(z)
        parts.append(np.maximum(lower - values, 0.0))
        parts.append(np.maximum(values - upper, 0.0))
        parts.append(np.maximum(self.lb - z, 0.0))
        parts.append(np.maximum(z - self.ub, 0.0))
        parts = np.concatenate(parts)
        return float(np.max(parts)) if parts.size else 0.0

    def subproblem(self, z, regularization):
        r = self.residual(z)
        J = self._jacobian("residual_jacobian", self.residual, z)
        P = J.T @ J + regularization * np.eye(self.n)
        g = J.T @ r
        if self.g0 is not None:
            g = g + self.g0
        c_eq = self.equality(z)
        A_eq = self._jacobian("equality_jacobian", self.equality, z) if c_eq.size else None
        values, lower, upper = self.inequality(z)
        if values.size:
            A_in = self._jacobian("inequality_jacobian", lambda x: self.inequality(x)[0], z)
            l_in, u_in = lower - values, upper - values
        else:
            A_in, l_in, u_in = None, None, None
        return QuadraticProgram(0.5 * (P + P.T), g, A_eq=A_eq, b_eq=-c_eq if c_eq.size else None,
                                A_in=A_in, l_in=l_in, u_in=u_in, lb=self.lb - z, ub=self.ub - z), g


def solve_sqp(nlp, z0, options=None, qp_settings=None):
    """Gauss-Newton SQP with l1-merit backtracking.

       Parameters
       ----------
       nlp: NonlinearProgram or any object with the same callbacks
       z0: array
           initial iterate
       options: SqpOptions, optional

       Returns
       -------
       SqpResult
           the best iterate; never raises on non-convergence
    """
    if options is None:
        options = SqpOptions.from_config()
    z = np.array(z0, dtype=float)
    evaluator = _Evaluator(nlp, z.size, options.fd_step)
    mu = options.merit_penalty
    step_norms = []
    merit_steps = []
    qp_count = 0
    iterations = 0
    status = SqpStatus.MAX_ITER
    warm = None
    for _ in range(options.max_iter):
        qp, gradient = evaluator.subproblem(z, options.regularization)
        solution = solve_qp(qp, warm_start=warm, settings=qp_settings)
        qp_count += 1
        if not solution.solved:
            LOG.debug("sqp: subproblem %s at iteration %d", solution.status.value, iterations)
            status = SqpStatus.QP_FAILED
            break
        step = solution.z
        step_norm = float(np.max(np.abs(step))) if step.size else 0.0
        step_norms.append(step_norm)
        if step_norm <= options.eta:
            status = SqpStatus.CONVERGED
            break
        if solution.y.size:
            mu = max(mu, 2.0 * float(np.max(np.abs(solution.y))))
        violation = evaluator.violation(z)
        merit = evaluator.cost(z) + mu * violation
        slope = gradient @ step - mu * violation
        alpha = 1.0
        accepted = False
        for _ in range(options.max_halvings + 1):
            trial = z + alpha * step
            trial_merit = evaluator.cost(trial) + mu * evaluator.violation(trial)
            if trial_merit <= merit + options.armijo * alpha * min(slope, 0.0):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            LOG.debug("sqp: line search failed at iteration %d", iterations)
            status = SqpStatus.LINE_SEARCH_FAILED
            break
        merit_steps.append((merit, trial_merit))
        z = trial
        iterations += 1
        warm = (np.zeros_like(step), solution.y)
    cost = float(evaluator.cost(z))
    violation = evaluator.max_violation(z)
    LOG.debug("sqp: %s after %d iterations (%d QPs), cost %.3e, violation %.3e",
              status.value, iterations, qp_count, cost, violation)
    return SqpResult(z, status, iterations, qp_count, step_norms, violation, cost, merit_steps)
