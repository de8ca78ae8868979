"""Exact minimum-cost conservative update for a single misclassified item.

Over the active subnetwork at the current biases, every rectifier is in its
linear regime, so node values are affine in the bias vector.  Driving the true
class's output to zero while keeping all active pre-activations non-negative
is therefore a convex QP:

    minimize    || b' - b ||_2^2
    subject to  b_minus >= 0,  b_minus <= b',
                y_e(b_minus) >= 0   for every active edge e,
                x_c(b_minus) = 0.

b' is eliminated analytically (the optimum is b' = max(b, b_minus)
componentwise), leaving a piecewise-quadratic objective in b_minus that cvxpy
handles directly.  Since node weights are positive and the y are constrained
non-negative, x_c = 0 forces every in-edge of c to carry exactly zero.

This is an analysis tool, not a training path: instances are capped at 5000
active edges and solved with a general-purpose interior point method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import evaluate, zero_eps
from .network import Network

MAX_ACTIVE_EDGES = 5000


@dataclass
class MpInstance:
    """Affine model of the active subnetwork: y = P beta + q on active edges
    (beta indexed like edge_index), x_c = xc_row . beta + xc_const."""

    edge_index: np.ndarray
    P: np.ndarray
    q: np.ndarray
    xc_row: np.ndarray
    xc_const: float
    b: np.ndarray


@dataclass
class OracleResult:
    b_minus: np.ndarray        # full-length counterfactual biases
    b_prime: np.ndarray        # full-length committed biases, >= original
    cost: float                # || b_prime - b ||_2
    status: str
    xc_after: float            # x_c re-evaluated on the full network at b_prime


def build_instance(network: Network, biases: np.ndarray, d: np.ndarray,
                   class_index: int, active: np.ndarray | None = None,
                   ) -> MpInstance:
    biases = np.asarray(biases, dtype=np.float64)
    state = evaluate(network, biases, d)
    if active is None:
        active = state.active
    cnode = network.layer_start[-2] + class_index
    if not 0 <= class_index < network.n_outputs:
        raise ValueError("class_index out of range")
    if state.x[cnode] <= zero_eps(d):
        raise ValueError("class output is already zero; nothing to solve")

    edge_index = np.flatnonzero(active)
    if len(edge_index) > MAX_ACTIVE_EDGES:
        raise ValueError(f"instance too large: {len(edge_index)} active edges")
    col = np.full(network.n_edges, -1, dtype=np.int64)
    col[edge_index] = np.arange(len(edge_index))

    n_nodes, n_beta = network.n_nodes, len(edge_index)
    V = np.zeros((n_nodes, n_beta))
    u = np.zeros(n_nodes)
    u[:network.n_inputs] = d
    w = network.weights
    for layer in range(1, len(network.layer_sizes)):
        sl = network.dst_layer_edges(layer)
        for e in range(sl.start, sl.stop):
            if not active[e]:
                continue
            j, s = network.dst[e], network.src[e]
            u[j] += w[j] * u[s]
            V[j] += w[j] * V[s]
            V[j, col[e]] -= w[j]

    P = V[network.src[edge_index]].copy()
    P[np.arange(n_beta), np.arange(n_beta)] -= 1.0
    q = u[network.src[edge_index]].copy()
    return MpInstance(edge_index, P, q, V[cnode].copy(), float(u[cnode]),
                      biases[edge_index].copy())


def _finish(network: Network, biases, d, class_index, inst: MpInstance,
            beta: np.ndarray, status: str) -> OracleResult:
    beta = np.maximum(beta, 0.0)
    b_minus = np.asarray(biases, dtype=np.float64).copy()
    b_minus[inst.edge_index] = beta
    b_prime = np.maximum(np.asarray(biases, dtype=np.float64), b_minus)
    state = evaluate(network, b_prime, d)
    xc = float(state.x[network.layer_start[-2] + class_index])
    cost = float(np.linalg.norm(b_prime - biases))
    return OracleResult(b_minus, b_prime, cost, status, xc)


def solve_conservative(network: Network, biases: np.ndarray, d: np.ndarray,
                       class_index: int, active: np.ndarray | None = None,
                       solver: str = "CLARABEL") -> OracleResult:
    """Solve the minimum-cost update QP; raises RuntimeError if the solver
    does not reach an optimal point."""
    import cvxpy as cp

    inst = build_instance(network, biases, d, class_index, active)
    beta = cp.Variable(len(inst.edge_index))
    cons = [beta >= 0,
            inst.P @ beta + inst.q >= 0,
            inst.xc_row @ beta + inst.xc_const == 0]
    prob = cp.Problem(cp.Minimize(cp.sum_squares(cp.pos(beta - inst.b))), cons)
    kwargs = {}
    if solver == "OSQP":
        kwargs = dict(eps_abs=1e-10, eps_rel=1e-10, max_iter=200000)
    prob.solve(solver=solver, **kwargs)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"QP solver failed: {prob.status}")
    return _finish(network, biases, d, class_index, inst, beta.value,
                   prob.status)


def solve_conservative_scipy(network: Network, biases: np.ndarray,
                             d: np.ndarray, class_index: int,
                             active: np.ndarray | None = None) -> OracleResult:
    """Same program solved with scipy's SLSQP from an always-feasible start
    (zero out the in-edges of c, leave everything else alone).  Slower and
    less accurate than the conic route; used to cross-check it."""
    from scipy.optimize import minimize

    inst = build_instance(network, biases, d, class_index, active)
    state = evaluate(network, biases, d)
    cnode = network.layer_start[-2] + class_index
    beta0 = inst.b.copy()
    into_c = network.dst[inst.edge_index] == cnode
    beta0[into_c] = state.x[network.src[inst.edge_index[into_c]]]

    def cost(beta):
        s = np.maximum(beta - inst.b, 0.0)
        return float(s @ s)

    def grad(beta):
        return 2.0 * np.maximum(beta - inst.b, 0.0)

    res = minimize(
        cost, beta0, jac=grad, method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": lambda v: v},
            {"type": "ineq", "fun": lambda v: inst.P @ v + inst.q},
            {"type": "eq",
             "fun": lambda v: inst.xc_row @ v + inst.xc_const},
        ],
        options={"maxiter": 500, "ftol": 1e-14})
    if not res.success:
        raise RuntimeError(f"SLSQP failed: {res.message}")
    return _finish(network, biases, d, class_index, inst, res.x, "optimal")


def update_cost(b_before: np.ndarray, b_after: np.ndarray) -> float:
    """Euclidean length of a bias update."""
    return float(np.linalg.norm(np.asarray(b_after) - np.asarray(b_before)))
