"""
Dense convex quadratic programs.

    minimize    1/2 z' P z + g' z
    subject to  A_eq z = b_eq
                l_in <= A_in z <= u_in
                lb <= z <= ub

Solvers work on the stacked form l <= A z <= u, where the variable
bounds become identity rows (finite bounds only). Multipliers follow the
sign convention P z + g + A' y = 0, y > 0 on active upper bounds.
"""

import enum
import os

import numpy as np
import scipy.io

__all__ = [
    "QpStatus",
    "QuadraticProgram",
    "QpSolution",
]

SYMMETRY_TOLERANCE = 1e-12


class QpStatus(enum.Enum):
    SOLVED = "solved"
    MAX_ITER = "max_iter"
    INFEASIBLE = "infeasible"


def _matrix(value, n_cols, name):
    if value is None:
        return np.zeros((0, n_cols))
    value = np.atleast_2d(np.asarray(value, dtype=float))
    if value.size == 0:
        return np.zeros((0, n_cols))
    if value.shape[1] != n_cols:
        raise ValueError("{}: {} columns, expected {}".format(name, value.shape[1], n_cols))
    return value


def _vector(value, size, default, name):
    if value is None:
        return np.full(size, default)
    value = np.asarray(value, dtype=float).reshape(-1)
    if value.shape != (size,):
        raise ValueError("{}: shape {}, expected ({},)".format(name, value.shape, size))
    return value


class QuadraticProgram(object):
    def __init__(self, P, g, A_eq=None, b_eq=None, A_in=None, l_in=None, u_in=None, lb=None, ub=None):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        n = P.shape[0]
        if P.shape != (n, n):
            raise ValueError("P must be square, got {}".format(P.shape))
        asymmetry = np.max(np.abs(P - P.T)) if n else 0.0
        if asymmetry > SYMMETRY_TOLERANCE * max(1.0, np.max(np.abs(P)) if n else 1.0):
            raise ValueError("P is not symmetric (residual {:.3e})".format(asymmetry))
        self.P = 0.5 * (P + P.T)
        self.g = _vector(g, n, 0.0, "g")
        self.A_eq = _matrix(A_eq, n, "A_eq")
        self.b_eq = _vector(b_eq, self.A_eq.shape[0], 0.0, "b_eq")
        self.A_in = _matrix(A_in, n, "A_in")
        self.l_in = _vector(l_in, self.A_in.shape[0], -np.inf, "l_in")
        self.u_in = _vector(u_in, self.A_in.shape[0], np.inf, "u_in")
        self.lb = _vector(lb, n, -np.inf, "lb")
        self.ub = _vector(ub, n, np.inf, "ub")
        if np.any(self.l_in > self.u_in) or np.any(self.lb > self.ub):
            raise ValueError("lower bounds exceed upper bounds")

    @property
    def n(self):
        return self.P.shape[0]

    @property
    def m_eq(self):
        return self.A_eq.shape[0]

    @property
    def m_in(self):
        return self.A_in.shape[0]

    def box_rows(self):
        return np.flatnonzero(np.isfinite(self.lb) | np.isfinite(self.ub))

    def stacked(self):
        """(A, l, u) with equality, inequality and finite box rows in this order"""
        rows = self.box_rows()
        box = np.eye(self.n)[rows]
        A = np.vstack([self.A_eq, self.A_in, box])
        l = np.concatenate([self.b_eq, self.l_in, self.lb[rows]])
        u = np.concatenate([self.b_eq, self.u_in, self.ub[rows]])
        return A, l, u

    def objective(self, z):
        return 0.5 * z @ self.P @ z + self.g @ z

    def violation(self, z):
        """Largest constraint violation (inf-norm)"""
        A, l, u = self.stacked()
        if A.shape[0] == 0:
            return 0.0
        values = A @ z
        return float(max(0.0, np.max(l - values), np.max(values - u)))

    def dump(self, dirname, prefix="qp"):
        """Writes P, g, A, l, u as Matrix Market text files"""
        if not os.path.isdir(dirname):
            os.makedirs(dirname)
        A, l, u = self.stacked()
        files = []
        for name, value in (("P", self.P), ("g", self.g[:, None]), ("A", A),
                            ("l", l[:, None]), ("u", u[:, None])):
            filename = os.path.join(dirname, "{}_{}.mtx".format(prefix, name))
            scipy.io.mmwrite(filename, value)
            files.append(filename)
        return files

    def __repr__(self):
        return "{}(n={}, m_eq={}, m_in={})".format(type(self).__name__, self.n, self.m_eq, self.m_in)


class QpSolution(object):
    def __init__(self, z, y, objective, iterations, status, primal_residual=np.nan,
                 dual_residual=np.nan, polished=False, m_eq=0, m_in=0, certificate=None):
        self.z = z
        self.y = y
        self.objective = objective
        self.iterations = iterations
        self.status = status
        self.primal_residual = primal_residual
        self.dual_residual = dual_residual
        self.polished = polished
        self.m_eq = m_eq
        self.m_in = m_in
        self.certificate = certificate

    @property
    def solved(self):
        return self.status == QpStatus.SOLVED

    @property
    def y_eq(self):
        return self.y[:self.m_eq]

    @property
    def y_in(self):
        return self.y[self.m_eq:self.m_eq + self.m_in]

    @property
    def y_box(self):
        return self.y[self.m_eq + self.m_in:]

    def __repr__(self):
        return "{}(status={}, iterations={}, objective={!r})".format(
            type(self).__name__, self.status.value, self.iterations, self.objective)
