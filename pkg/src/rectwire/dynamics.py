"""Forward evaluation, counterfactual gradients, and edge velocities.

Per-edge transfer: y_ij = max(0, x_i - b_ij).  Per-node value: x_j = w_j * sum
of y over in-edges.  Classification is counterfactual: the predicted class is
the output node with the *smallest* value (a trained class output sits at 0).

All passes are layer-vectorized numpy; summation order is fixed by the
canonical edge order, so results are identical run to run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network


@dataclass
class ActivationState:
    """One forward pass: node values, edge outputs, active set (y > 0)."""

    x: np.ndarray
    y: np.ndarray
    active: np.ndarray

    def outputs(self, network: Network) -> np.ndarray:
        return self.x[network.layer_start[-2]:]


def zero_eps(d: np.ndarray) -> float:
    """Absolute tolerance for 'this value is zero' at input scale: 1e-12 * ||d||_1."""
    return 1e-12 * float(np.abs(d).sum())


def evaluate(network: Network, biases: np.ndarray, d: np.ndarray,
             active: np.ndarray | None = None) -> ActivationState:
    """Forward pass.  With `active` given, evaluates the subnetwork of those
    edges (others transmit 0) — used inside the update loop, where edges
    removed from the active set must stay removed even if roundoff leaves a
    denormal-sized positive y.

    Edge outputs at or below zero_eps(d) are clamped to exactly 0 and the
    edge counts as inactive.  An edge whose bias equals its source value in
    exact arithmetic can come out of the subtraction as a roundoff-sized
    positive number; left unclamped, it survives as a bogus active edge whose
    deactivation burns an update iteration on a step of size ~1e-16.
    """
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (network.n_inputs,):
        raise ValueError(f"input has {d.shape} values, network takes {network.n_inputs}")
    if (d < 0).any() or not np.isfinite(d).all():
        raise ValueError("input components must be finite and non-negative")
    if biases.shape != (network.n_edges,):
        raise ValueError("bias vector does not match network")

    eps = zero_eps(d)
    x = np.zeros(network.n_nodes, dtype=np.float64)
    x[: network.n_inputs] = d
    y = np.zeros(network.n_edges, dtype=np.float64)
    src, dst, w = network.src, network.dst, network.weights
    for layer in range(1, network.n_layers):
        sl = network.dst_layer_edges(layer)
        if sl.start == sl.stop:
            continue
        yv = x[src[sl]] - biases[sl]
        np.maximum(yv, 0.0, out=yv)
        if active is not None:
            yv *= active[sl]
        yv[yv <= eps] = 0.0
        y[sl] = yv
        lo, hi = network.layer_start[layer], network.layer_start[layer + 1]
        x[lo:hi] = w[lo:hi] * np.bincount(dst[sl] - lo, weights=yv, minlength=hi - lo)
    return ActivationState(x=x, y=y, active=y > 0)


def tie_window(d: np.ndarray) -> float:
    """Absolute window within which output values count as tied.

    Node values that are equal in exact arithmetic accumulate rounding of
    order ulp(||d||_1); comparing outputs exactly would turn such ties into
    arbitrary strict winners.  The same scale serves as the zero test."""
    return zero_eps(d)


def classify(network: Network, biases: np.ndarray, d: np.ndarray):
    """(argmin output indices, minimum value); outputs within tie_window(d)
    of the minimum count as tied winners."""
    state = evaluate(network, biases, d)
    outs = state.outputs(network)
    m = outs.min()
    return np.flatnonzero(outs <= m + tie_window(d)), float(m)


def gradient(network: Network, state: ActivationState, class_node: int) -> np.ndarray:
    """Backward pass: g_j = -(d x_c / d b_ij) for any active edge i->j.

    g is w_c on the class output, 0 on other outputs, and propagates down as
    g_i = w_i * sum of g_j over active out-edges i->j.  Values are assigned to
    input nodes too (harmless; nothing consumes them).
    """
    out_lo = network.layer_start[-2]
    if not out_lo <= class_node < network.n_nodes:
        raise ValueError(f"node {class_node} is not an output node")
    g = np.zeros(network.n_nodes, dtype=np.float64)
    g[class_node] = network.weights[class_node]
    src, dst = network.src, network.dst
    act = state.active
    for layer in range(network.n_layers - 2, -1, -1):
        e = network.src_layer_edges(layer)
        if len(e) == 0:
            continue
        e = e[act[e]]
        lo, hi = network.layer_start[layer], network.layer_start[layer + 1]
        total = np.bincount(src[e] - lo, weights=g[dst[e]], minlength=hi - lo)
        g[lo:hi] = network.weights[lo:hi] * total
    return g


def velocity(network: Network, state: ActivationState, g: np.ndarray) -> np.ndarray:
    """Forward pass for -dy/dt on active edges when biases evolve at rate g_dst.

    v_ij = g_j + w_i * (sum of v over active in-edges of i); the sum is absent
    when i is an input node.  Inactive edges get v = 0.
    """
    act = state.active
    if (state.y[act] <= 0).any():
        raise ValueError("active set inconsistent with eval (active edge with y <= 0)")
    v = np.zeros(network.n_edges, dtype=np.float64)
    s = np.zeros(network.n_nodes, dtype=np.float64)
    src, dst, w = network.src, network.dst, network.weights
    for layer in range(network.n_layers - 1):
        e = network.src_layer_edges(layer)
        if len(e) == 0:
            continue
        e = e[act[e]]
        if len(e) == 0:
            continue
        v[e] = g[dst[e]] + w[src[e]] * s[src[e]]
        s += np.bincount(dst[e], weights=v[e], minlength=network.n_nodes)
    return v
