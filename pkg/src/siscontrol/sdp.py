"""Interior-point solver for the weight-reduction max-cut relaxation.

Solves, over reductions delta (boxed per edge, total at most `budget`) and a
diagonal dual certificate y:

    minimize  sum(y)
    s.t.      4*diag(y) + L(delta) - L(w)  is positive semidefinite,

which is the dual form of the max-cut semidefinite relaxation of the reduced
graph, minimized over admissible reductions.  The optimum upper-bounds the
true maximum cut of the reduced graph, within the relaxation's constant.

Method: log-det barrier with damped Newton centering and a geometric
schedule on the barrier parameter; the reported duality gap is the standard
barrier bound nu/tau at the final centered iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError

MU = 20.0                 # barrier parameter growth per outer step
CENTER_TOL = 1e-10        # squared Newton decrement / 2 at which we recentre
ARMIJO = 0.01
MAX_BACKTRACKS = 60


@dataclass
class SdpDiagnostics:
    iterations: int
    duality_gap: float
    residuals: dict = field(default_factory=dict)


def _laplacian(n, edges, weights):
    lap = np.zeros((n, n))
    for (u, v), w in zip(edges, weights):
        lap[u, u] += w
        lap[v, v] += w
        lap[u, v] -= w
        lap[v, u] -= w
    return lap


def solve_reduction_sdp(n: int, edges, weights, budget: float, *,
                        gap_tol: float = 1e-6, max_newton: int = 500):
    """Returns (delta, y, objective, SdpDiagnostics).

    `edges` is a list of (u, v) pairs over nodes 0..n-1 with positive
    `weights`; `budget` caps the total reduction.  Raises SolverError if the
    Newton iteration cap is hit before the gap tolerance.
    """
    edges = list(edges)
    weights = np.asarray([float(w) for w in weights])
    m = len(edges)
    if m == 0:
        return np.zeros(0), np.zeros(n), 0.0, SdpDiagnostics(0, 0.0)
    total_w = float(weights.sum())
    if budget >= total_w:
        return weights.copy(), np.zeros(n), 0.0, SdpDiagnostics(0, 0.0)

    # Nodes without incident edges contribute y_i = 0 and are dropped.
    active = sorted({u for e in edges for u in e})
    index = {u: i for i, u in enumerate(active)}
    sub_edges = [(index[u], index[v]) for u, v in edges]
    na = len(active)

    with_budget = budget > 0.0
    if with_budget:
        delta = np.minimum(weights / 2.0, budget / (2.0 * m))
    else:
        delta = np.zeros(m)
    lap0 = _laplacian(na, sub_edges, weights)

    def smat(y, d):
        s = _laplacian(na, sub_edges, d) - lap0
        s[np.diag_indices(na)] += 4.0 * y
        return s

    resid = _laplacian(na, sub_edges, weights - delta)
    y = resid.diagonal() / 2.0 + 1.0

    nu = na + (2 * m + 1 if with_budget else 0)
    tau = 1.0
    iterations = 0

    def barrier_value(y, d, chol):
        val = tau * y.sum() - 2.0 * np.log(chol.diagonal()).sum()
        if with_budget:
            val -= np.log(d).sum() + np.log(weights - d).sum()
            val -= math.log(budget - d.sum())
        return val

    def try_chol(y, d):
        s = smat(y, d)
        try:
            return np.linalg.cholesky(s)
        except np.linalg.LinAlgError:
            return None

    chol = try_chol(y, delta)
    assert chol is not None, "initial point must be strictly feasible"

    while True:
        # Newton centering at the current tau.
        while True:
            inv = np.linalg.inv(smat(y, delta))
            grad_y = tau - 4.0 * inv.diagonal()
            bmat = np.zeros((m, na))
            for e, (u, v) in enumerate(sub_edges):
                bmat[e, u] = 1.0
                bmat[e, v] = -1.0
            gcols = inv @ bmat.T                     # columns inv @ b_e
            q = np.einsum("ie,ie->e", bmat.T, gcols)  # b_e' inv b_e
            h_yy = 16.0 * inv ** 2
            h_yd = 4.0 * gcols ** 2
            p = bmat @ gcols
            h_dd = p ** 2
            if with_budget:
                slack = budget - delta.sum()
                grad_d = -q - 1.0 / delta + 1.0 / (weights - delta) + 1.0 / slack
                h_dd = h_dd + np.diag(1.0 / delta ** 2 + 1.0 / (weights - delta) ** 2)
                h_dd = h_dd + 1.0 / slack ** 2
                grad = np.concatenate([grad_y, grad_d])
                hess = np.block([[h_yy, h_yd], [h_yd.T, h_dd]])
                dim = na + m
            else:
                grad = grad_y
                hess = h_yy
                dim = na
            try:
                step = -np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                hess = hess + 1e-12 * np.trace(hess) / dim * np.eye(dim)
                step = -np.linalg.solve(hess, grad)
            lam2 = float(-grad @ step)
            if lam2 < 0:  # numerical loss of positive definiteness
                hess = hess + 1e-10 * np.trace(hess) / dim * np.eye(dim)
                step = -np.linalg.solve(hess, grad)
                lam2 = abs(float(-grad @ step))
            if lam2 / 2.0 <= CENTER_TOL:
                break
            iterations += 1
            if iterations > max_newton:
                raise SolverError(
                    "SDP barrier hit its Newton iteration cap",
                    {"iterations": iterations, "tau": tau, "gap_bound": nu / tau,
                     "newton_decrement_sq": lam2})
            dy = step[:na]
            dd = step[na:] if with_budget else np.zeros(0)
            base = barrier_value(y, delta, np.linalg.cholesky(smat(y, delta)))
            t = 1.0
            for _ in range(MAX_BACKTRACKS):
                ny = y + t * dy
                nd = delta + t * dd if with_budget else delta
                if with_budget and (
                        (nd <= 0).any() or (nd >= weights).any()
                        or nd.sum() >= budget):
                    t *= 0.5
                    continue
                c = try_chol(ny, nd)
                if c is None:
                    t *= 0.5
                    continue
                if barrier_value(ny, nd, c) <= base + ARMIJO * t * float(grad @ step):
                    break
                t *= 0.5
            else:
                raise SolverError("SDP line search failed to make progress",
                                  {"iterations": iterations, "tau": tau})
            y = ny
            delta = nd if with_budget else delta
        if nu / tau <= gap_tol:
            break
        tau *= MU

    s_final = smat(y, delta)
    min_eig = float(np.linalg.eigvalsh(s_final).min())
    full_y = np.zeros(n)
    for u, i in index.items():
        full_y[u] = y[i]
    diag = SdpDiagnostics(
        iterations=iterations,
        duality_gap=nu / tau,
        residuals={
            "min_eigenvalue": min_eig,
            "budget_slack": float(budget - delta.sum()) if with_budget else float(budget),
            "box_slack": float(min(delta.min(), (weights - delta).min())) if with_budget else 0.0,
        },
    )
    return delta.copy(), full_y, float(full_y.sum()), diag
