"""Weight sequences over the window: MISE-optimal QP solution and baselines.

Index 0 is the oldest batch in the window, index -1 the current one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from swkde.mise import MiseComponents

MAX_ITER = 100_000
STEP_TOL = 1e-12
KKT_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Raised when the QP solver hits its iteration cap; carries the best iterate."""

    def __init__(self, message: str, report: "QpReport"):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class QpReport:
    alpha: np.ndarray
    objective: float
    iterations: int
    kkt_residual: float


def _check_size(T: int) -> int:
    if int(T) != T or T < 1:
        raise ValueError(f"window length must be a positive integer, got {T!r}")
    return int(T)


def current_weights(T: int) -> np.ndarray:
    a = np.zeros(_check_size(T))
    a[-1] = 1.0
    return a


def average_weights(T: int) -> np.ndarray:
    T = _check_size(T)
    return np.full(T, 1.0 / T)


def exponential_weights(T: int, beta: float = 0.1) -> np.ndarray:
    """alpha_1 = (1-beta)^(T-1), alpha_i = (1-beta)^(T-i) beta for i >= 2.

    Taken as written: the oldest batch absorbs the geometric tail, so with a
    small ``beta`` most of the mass sits on the oldest batch.
    """
    T = _check_size(T)
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must lie in (0, 1), got {beta!r}")
    powers = (1.0 - beta) ** np.arange(T - 1, -1, -1, dtype=float)
    a = powers * beta
    a[0] = powers[0]
    return a


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection onto {w : sum(w) = 1, w >= 0} (sort-based)."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-d vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(v - tau, 0.0)


def kkt_residual(lam: np.ndarray, theta: np.ndarray, alpha: np.ndarray) -> float:
    """Largest violation of the simplex-QP optimality conditions at ``alpha``.

    With g = 2 lam alpha - 2 theta, optimality needs g_i = nu on the support and
    g_i >= nu elsewhere for a common nu; nu is taken mid-range on the support.
    """
    g = 2.0 * (lam @ alpha) - 2.0 * theta
    on = alpha > 0.0
    if not np.any(on):
        return math.inf
    gs = g[on]
    nu = 0.5 * (gs.max() + gs.min())
    res = 0.5 * (gs.max() - gs.min())
    if not np.all(on):
        res = max(res, float(np.max(nu - g[~on], initial=0.0)))
    return float(res)


def _support_solve(lam: np.ndarray, theta: np.ndarray, support: np.ndarray):
    """Minimize over the affine hull of ``support``; None if singular or infeasible."""
    idx = np.flatnonzero(support)
    k = idx.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * lam[np.ix_(idx, idx)]
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.append(2.0 * theta[idx], 1.0)
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)) or np.any(sol[:k] < 0.0):
        return None
    alpha = np.zeros_like(theta)
    alpha[idx] = sol[:k]
    return alpha


def solve_optimal_weights(
    c: MiseComponents, *, max_iter: int = MAX_ITER, tol: float = KKT_TOL
) -> QpReport:
    """Minimize the exact MISE over the probability simplex.

    Accelerated projected gradient from uniform weights, step 1/(2 L) with L
    the max absolute row sum of Lambda. Whenever the support of the iterate
    is stable, the equality-constrained problem on that support is solved
    directly and accepted if it satisfies the KKT conditions to ``tol``.
    """
    lam = c.lam
    theta = c.theta
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(theta)) and math.isfinite(c.constant)):
        raise ValueError("MISE components contain non-finite entries")
    T = theta.size

    def objective(a):
        return float(a @ lam @ a - 2.0 * theta @ a + c.constant)

    def finish(a, iterations):
        a = np.clip(a, 0.0, 1.0)
        a = a / a.sum()
        return QpReport(a, objective(a), iterations, kkt_residual(lam, theta, a))

    def polished(a, iterations):
        cand = _support_solve(lam, theta, a > 0.0)
        if cand is not None and kkt_residual(lam, theta, cand) <= tol:
            return finish(cand, iterations)
        return None

    if T == 1:
        return finish(np.ones(1), 0)

    step = 1.0 / (2.0 * float(np.max(np.abs(lam).sum(axis=1))))
    x = average_weights(T)
    y = x.copy()
    t = 1.0
    f_x = objective(x)
    best, best_f = x, f_x
    prev_support = None
    stable = 0
    plain = True

    for it in range(1, max_iter + 1):
        grad = 2.0 * (lam @ y) - 2.0 * theta
        x_new = project_to_simplex(y - step * grad)
        f_new = objective(x_new)
        if f_new > f_x:
            if plain:
                # a plain projected step cannot ascend except by rounding
                return polished(x, it) or finish(best, it)
            # adaptive restart: drop momentum when the objective goes up
            t = 1.0
            y = x.copy()
            plain = True
            continue
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        change = float(np.max(np.abs(x_new - x)))
        x, f_x, t = x_new, f_new, t_new
        if f_x < best_f:
            best, best_f = x, f_x

        support = x > 0.0
        if prev_support is not None and np.array_equal(support, prev_support):
            stable += 1
        else:
            stable = 0
        prev_support = support
        if change < STEP_TOL and not plain:
            # momentum can overshoot a face and project back to the same point
            t = 1.0
            y = x.copy()
            plain = True
            continue
        stalled = change < STEP_TOL
        plain = False
        if stalled or stable == 5 or it % 20 == 0:
            report = polished(x, it)
            if report is not None:
                return report

        if stalled or kkt_residual(lam, theta, x) < tol:
            return finish(best, it)

    report = finish(best, max_iter)
    raise ConvergenceError(
        f"simplex QP did not converge in {max_iter} iterations "
        f"(kkt residual {report.kkt_residual:.3g})",
        report,
    )
