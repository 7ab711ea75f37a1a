"""
Operator-splitting QP solver.

Dense ADMM on the stacked program l <= A z <= u after Ruiz equilibration,
with a per-row penalty vector (stiff on equality rows, soft on free rows),
over-relaxation, adaptive penalty updates, a primal infeasibility
certificate, and solution polishing on the guessed active set.
"""

import logging

import numpy as np
import scipy.linalg

from ..config import get_config_section, register_config
from .problem import QpSolution, QpStatus

__all__ = [
    "QpSettings",
    "solve_qp",
]

LOG = logging.getLogger(__name__)

register_config(
    name="qp",
    default={
        "rho": 0.1,
        "sigma": 1e-6,
        "alpha": 1.6,
        "eps_abs": 1e-6,
        "eps_rel": 1e-6,
        "eps_pinf": 1e-7,
        "max_iter": 10000,
        "scaling_iter": 10,
        "polish": True,
        "polish_interval": 50,
        "polish_refine_iter": 3,
        "adaptive_rho": True,
        "adaptive_rho_interval": 25,
        "check_interval": 5,
        "check_psd": True,
        "dump_dir": None,
    })

RHO_MIN = 1e-6
RHO_MAX = 1e6
RHO_EQ_SCALE = 1e3
RHO_ADAPT_TOLERANCE = 5.0
SCALING_MIN = 1e-4
SCALING_MAX = 1e4
POLISH_DELTA = 1e-9
PSD_TOLERANCE = 1e-9


class QpSettings(object):
    def __init__(self, rho=0.1, sigma=1e-6, alpha=1.6, eps_abs=1e-6, eps_rel=1e-6, eps_pinf=1e-7,
                 max_iter=10000, scaling_iter=10, polish=True, polish_interval=50, polish_refine_iter=3,
                 adaptive_rho=True, adaptive_rho_interval=25, check_interval=5, check_psd=True, dump_dir=None):
        self.rho = rho
        self.sigma = sigma
        self.alpha = alpha
        self.eps_abs = eps_abs
        self.eps_rel = eps_rel
        self.eps_pinf = eps_pinf
        self.max_iter = max_iter
        self.scaling_iter = scaling_iter
        self.polish = polish
        self.polish_interval = polish_interval
        self.polish_refine_iter = polish_refine_iter
        self.adaptive_rho = adaptive_rho
        self.adaptive_rho_interval = adaptive_rho_interval
        self.check_interval = check_interval
        self.check_psd = check_psd
        self.dump_dir = dump_dir

    @classmethod
    def from_config(cls, config=None, **overrides):
        kwargs = get_config_section("qp", config)
        kwargs.update(overrides)
        return cls(**kwargs)


def _inf_norm(v):
    return float(np.max(np.abs(v))) if v.size else 0.0


def _equilibrate(P, g, A, iterations):
    """Ruiz scaling: returns scaled P, g, A and the D, E, c factors"""
    n, m = P.shape[0], A.shape[0]
    D = np.ones(n)
    E = np.ones(m)
    Ps, As = P.copy(), A.copy()
    for _ in range(iterations):
        col = np.abs(Ps).max(axis=0) if n else np.zeros(0)
        if m:
            col = np.maximum(col, np.abs(As).max(axis=0))
            row = np.abs(As).max(axis=1)
        else:
            row = np.zeros(0)
        d = np.where(col > 1e-8, 1.0 / np.sqrt(np.where(col > 1e-8, col, 1.0)), 1.0)
        e = np.where(row > 1e-8, 1.0 / np.sqrt(np.where(row > 1e-8, row, 1.0)), 1.0)
        d = np.clip(d, SCALING_MIN, SCALING_MAX)
        e = np.clip(e, SCALING_MIN, SCALING_MAX)
        Ps = d[:, None] * Ps * d[None, :]
        As = e[:, None] * As * d[None, :]
        D *= d
        E *= e
    gs = D * g
    cost_norm = max(float(np.mean(np.abs(Ps).max(axis=0))) if n else 0.0, _inf_norm(gs))
    c = 1.0 if cost_norm < 1e-8 else float(np.clip(1.0 / cost_norm, SCALING_MIN, SCALING_MAX))
    return c * Ps, c * gs, As, D, E, c


def _rho_vector(rho, l, u):
    rho_vec = np.full(l.size, rho)
    rho_vec[u - l < 1e-9] = min(RHO_MAX, rho * RHO_EQ_SCALE)
    rho_vec[np.isinf(l) & np.isinf(u)] = RHO_MIN
    return rho_vec


def _factor(Ps, As, sigma, rho_vec):
    n = Ps.shape[0]
    kkt = Ps + sigma * np.eye(n) + As.T @ (rho_vec[:, None] * As)
    return scipy.linalg.cho_factor(kkt)


def _polish(P, g, A, l, u, z, y, refine_iter):
    """Solves the equality-constrained QP on the guessed active set"""
    n = P.shape[0]
    equality = u - l < 1e-9
    lower = equality | (z - l < -y)
    upper = ~lower & (u - z < y)
    low_rows = np.flatnonzero(lower)
    upp_rows = np.flatnonzero(upper)
    rows = np.concatenate([low_rows, upp_rows])
    rhs_bounds = np.concatenate([l[low_rows], u[upp_rows]])
    A_act = A[rows]
    n_act = rows.size
    kkt = np.zeros((n + n_act, n + n_act))
    kkt[:n, :n] = P + POLISH_DELTA * np.eye(n)
    kkt[:n, n:] = A_act.T
    kkt[n:, :n] = A_act
    kkt[n:, n:] = -POLISH_DELTA * np.eye(n_act)
    exact = kkt.copy()
    exact[:n, :n] = P
    exact[n:, n:] = 0.0
    rhs = np.concatenate([-g, rhs_bounds])
    factor = scipy.linalg.lu_factor(kkt)
    solution = scipy.linalg.lu_solve(factor, rhs)
    for _ in range(refine_iter):
        solution = solution + scipy.linalg.lu_solve(factor, rhs - exact @ solution)
    x = solution[:n]
    y_pol = np.zeros(A.shape[0])
    y_pol[rows] = solution[n:]
    sign_ok = np.all(y_pol[low_rows[~equality[low_rows]]] <= 1e-9) and np.all(y_pol[upp_rows] >= -1e-9)
    return x, y_pol, bool(sign_ok)


def _residuals(P, g, A, l, u, x, y):
    """Primal violation and stationarity residual of a candidate (original space)"""
    Ax = A @ x
    primal = _inf_norm(Ax - np.clip(Ax, l, u))
    Px = P @ x
    Aty = A.T @ y
    dual = _inf_norm(Px + g + Aty)
    return primal, dual, Ax, Px, Aty


def _tolerances(settings, Ax, z, Px, Aty, g):
    eps_primal = settings.eps_abs + settings.eps_rel * max(_inf_norm(Ax), _inf_norm(z))
    eps_dual = settings.eps_abs + settings.eps_rel * max(_inf_norm(Px), _inf_norm(Aty), _inf_norm(g))
    return eps_primal, eps_dual


def _primal_infeasible(A, l, u, delta_y, eps):
    """Normalized certificate v (A^T v = 0, u^T v+ + l^T v- < 0) or None"""
    norm = _inf_norm(delta_y)
    if norm <= eps:
        return None
    v = delta_y / norm
    pos = v > 0.0
    neg = v < 0.0
    if np.any(np.isinf(u[pos])) or np.any(np.isinf(l[neg])):
        return None
    support = u[pos] @ v[pos] + l[neg] @ v[neg]
    if support < -eps and _inf_norm(A.T @ v) < eps:
        return v
    return None


def _check_convexity(P):
    if P.shape[0] == 0:
        return P
    smallest = float(scipy.linalg.eigvalsh(P, subset_by_index=[0, 0])[0])
    if smallest < -PSD_TOLERANCE * max(1.0, _inf_norm(P)):
        raise ValueError("P is not positive semidefinite (smallest eigenvalue {:.3e})".format(smallest))
    if smallest < 0.0:
        return P + PSD_TOLERANCE * np.eye(P.shape[0])
    return P


def _warm_values(warm_start, n, m):
    if warm_start is None:
        return None, None
    if isinstance(warm_start, QpSolution):
        z, y = warm_start.z, warm_start.y
    elif isinstance(warm_start, tuple):
        z, y = warm_start
    else:
        z, y = warm_start, None
    z = np.asarray(z, dtype=float) if z is not None and np.shape(z) == (n,) else None
    y = np.asarray(y, dtype=float) if y is not None and np.shape(y) == (m,) else None
    return z, y


def solve_qp(qp, warm_start=None, settings=None):
    """Solves a QuadraticProgram.

       Parameters
       ----------
       qp: QuadraticProgram
       warm_start: QpSolution, array or (z, y) tuple, optional
           starting primal (and dual) point; only the iteration count depends on it
       settings: QpSettings, optional

       Returns
       -------
       QpSolution
           never raises on infeasible or unconverged programs; see ``status``
    """
    if settings is None:
        settings = QpSettings.from_config()
    if settings.dump_dir:
        qp.dump(settings.dump_dir)
    P = _check_convexity(qp.P) if settings.check_psd else qp.P
    g = qp.g
    A, l, u = qp.stacked()
    n, m = P.shape[0], A.shape[0]
    Ps, gs, As, D, E, c = _equilibrate(P, g, A, settings.scaling_iter)
    ls, us = E * l, E * u
    rho = settings.rho
    rho_vec = _rho_vector(rho, ls, us)
    factor = _factor(Ps, As, settings.sigma, rho_vec)

    x = np.zeros(n)
    zs = np.zeros(m)
    ys = np.zeros(m)
    warm_z, warm_y = _warm_values(warm_start, n, m)
    if warm_z is not None:
        x = warm_z / D
        zs = np.clip(As @ x, ls, us)
    if warm_y is not None:
        ys = c * warm_y / E

    alpha = settings.alpha
    status = QpStatus.MAX_ITER
    iteration = 0
    certificate = None
    for iteration in range(1, settings.max_iter + 1):
        rhs = settings.sigma * x - gs + As.T @ (rho_vec * zs - ys)
        x_tilde = scipy.linalg.cho_solve(factor, rhs)
        z_tilde = As @ x_tilde
        x = alpha * x_tilde + (1.0 - alpha) * x
        z_relax = alpha * z_tilde + (1.0 - alpha) * zs
        z_new = np.clip(z_relax + ys / rho_vec, ls, us)
        y_new = ys + rho_vec * (z_relax - z_new)
        delta_y = y_new - ys
        zs, ys = z_new, y_new

        if iteration % settings.check_interval and iteration != settings.max_iter:
            continue
        Ax_s = As @ x
        Px_s = Ps @ x
        Aty_s = As.T @ ys
        primal = _inf_norm((Ax_s - zs) / E)
        dual = _inf_norm((Px_s + gs + Aty_s) / D) / c
        eps_primal, eps_dual = _tolerances(settings, Ax_s / E, zs / E, Px_s / D / c, Aty_s / D / c, gs / D / c)
        if primal <= eps_primal and dual <= eps_dual:
            status = QpStatus.SOLVED
            break
        if m:
            certificate = _primal_infeasible(A, l, u, E * delta_y / c, settings.eps_pinf)
            if certificate is not None:
                status = QpStatus.INFEASIBLE
                break
        if settings.polish and iteration % settings.polish_interval == 0:
            candidate = _try_polish(P, g, A, l, u, D * x, zs / E, E * ys / c, settings)
            if candidate is not None:
                LOG.debug("qp: early polish accepted at iteration %d", iteration)
                return _solution(qp, P, g, candidate[0], candidate[1], iteration, QpStatus.SOLVED, True,
                                 candidate[2], candidate[3])
        if settings.adaptive_rho and iteration % settings.adaptive_rho_interval == 0:
            primal_scale = max(_inf_norm(Ax_s), _inf_norm(zs), 1e-12)
            dual_scale = max(_inf_norm(Px_s), _inf_norm(Aty_s), _inf_norm(gs), 1e-12)
            ratio = np.sqrt((_inf_norm(Ax_s - zs) / primal_scale) /
                            max(_inf_norm(Px_s + gs + Aty_s) / dual_scale, 1e-30))
            new_rho = float(np.clip(rho * ratio, RHO_MIN, RHO_MAX))
            if new_rho > rho * RHO_ADAPT_TOLERANCE or new_rho < rho / RHO_ADAPT_TOLERANCE:
                LOG.debug("qp: rho %.3e -> %.3e at iteration %d", rho, new_rho, iteration)
                rho = new_rho
                rho_vec = _rho_vector(rho, ls, us)
                factor = _factor(Ps, As, settings.sigma, rho_vec)

    x_orig = D * x
    y_orig = E * ys / c
    z_orig = zs / E
    if status == QpStatus.INFEASIBLE:
        LOG.debug("qp: primal infeasibility certificate after %d iterations", iteration)
        return _solution(qp, P, g, x_orig, y_orig, iteration, status, False, certificate=certificate)
    if settings.polish:
        candidate = _try_polish(P, g, A, l, u, x_orig, z_orig, y_orig, settings, require_tolerance=False)
        if candidate is not None and (candidate[4] or status == QpStatus.SOLVED):
            return _solution(qp, P, g, candidate[0], candidate[1], iteration, QpStatus.SOLVED, True,
                             candidate[2], candidate[3])
    primal, dual = _residuals(P, g, A, l, u, x_orig, y_orig)[0:2]
    if status != QpStatus.SOLVED:
        LOG.debug("qp: no convergence in %d iterations (primal %.2e, dual %.2e)", iteration, primal, dual)
    return _solution(qp, P, g, x_orig, y_orig, iteration, status, False, primal, dual)


def _try_polish(P, g, A, l, u, x, z, y, settings, require_tolerance=True):
    primal, dual = _residuals(P, g, A, l, u, x, y)[0:2]
    try:
        x_pol, y_pol, sign_ok = _polish(P, g, A, l, u, z, y, settings.polish_refine_iter)
    except (np.linalg.LinAlgError, ValueError):
        return None
    if not sign_ok:
        return None
    primal_pol, dual_pol, Ax_pol, Px_pol, Aty_pol = _residuals(P, g, A, l, u, x_pol, y_pol)
    eps_primal, eps_dual = _tolerances(settings, Ax_pol, Ax_pol, Px_pol, Aty_pol, g)
    meets = primal_pol <= eps_primal and dual_pol <= eps_dual
    if require_tolerance:
        return (x_pol, y_pol, primal_pol, dual_pol, meets) if meets else None
    if meets or (primal_pol <= primal and dual_pol <= dual):
        return x_pol, y_pol, primal_pol, dual_pol, meets
    return None


def _solution(qp, P, g, x, y, iterations, status, polished, primal=np.nan, dual=np.nan, certificate=None):
    return QpSolution(z=x, y=y, objective=float(0.5 * x @ qp.P @ x + g @ x), iterations=iterations,
                      status=status, primal_residual=primal, dual_residual=dual, polished=polished,
                      m_eq=qp.m_eq, m_in=qp.m_in, certificate=certificate)
