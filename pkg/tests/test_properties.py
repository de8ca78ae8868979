"""Randomized property checks, 1000 cases per suite.

Each suite draws small random layered networks and verifies one structural
guarantee of the model.  The check functions take a case count so other
callers can re-run them with their own budget.
"""

import numpy as np
import pytest

from rectwire.builders import (complete_boolean_network, path_counts,
                               rescale_to_unit_weights)
from rectwire.dynamics import classify, evaluate, gradient, velocity
from rectwire.network import Network
from rectwire.sda import AGGRESSIVE, ULTRA, sda_update
from rectwire.synthdata import boolean_dataset
from rectwire.trainer import train_to_convergence

N_CASES = 1000


def random_net(rng, unit_weights=False, layer_uniform=False):
    n_in = int(rng.integers(2, 5))
    n_hidden = int(rng.integers(n_in, 8))
    n_out = int(rng.integers(2, 4))
    src, dst = [], []
    for j in range(n_hidden):
        # first source cycles through the inputs so none is left dangling
        first = j % n_in
        second = int(rng.choice([i for i in range(n_in) if i != first]))
        for i in (first, second):
            src.append(i)
            dst.append(n_in + j)
    for k in range(n_out):
        for j in range(n_hidden):
            src.append(n_in + j)
            dst.append(n_in + n_hidden + k)
    if unit_weights:
        w = np.ones(n_in + n_hidden + n_out)
    elif layer_uniform:
        u, v = rng.uniform(0.3, 2.0, 2)
        w = np.concatenate([np.ones(n_in), np.full(n_hidden, u),
                            np.full(n_out, v)])
    else:
        w = np.concatenate([np.ones(n_in),
                            rng.uniform(0.5, 2.0, n_hidden + n_out)])
    net = Network([n_in, n_hidden, n_out], src, dst, w)
    b = rng.uniform(0.0, 0.4, net.n_edges)
    d = rng.uniform(0.1, 1.0, n_in)
    return net, b, d


def check_bias_monotonicity(n_cases, seed0=0):
    # raising any set of biases can only lower node values
    for case in range(n_cases):
        rng = np.random.default_rng(seed0 + case)
        net, b, d = random_net(rng)
        before = evaluate(net, b, d).x
        bump = rng.uniform(0.0, 0.5, net.n_edges)
        bump *= rng.random(net.n_edges) < 0.5
        after = evaluate(net, b + bump, d).x
        assert (after <= before + 1e-12).all()


def check_convexity(n_cases, seed0=0):
    # every node value is convex in the bias vector
    for case in range(n_cases):
        rng = np.random.default_rng(10_000 + seed0 + case)
        net, b1, d = random_net(rng)
        b2 = rng.uniform(0.0, 0.6, net.n_edges)
        lam = rng.uniform(0.05, 0.95)
        mid = evaluate(net, lam * b1 + (1 - lam) * b2, d).x
        chord = lam * evaluate(net, b1, d).x + (1 - lam) * evaluate(net, b2, d).x
        assert (mid <= chord + 1e-9).all()


def check_gradient_finite_difference(n_cases, seed0=0):
    # -dx_c/db_e == g[dst(e)] on active edges, probed one edge per case;
    # draws that land too close to a kink are replaced, not skipped
    checked, attempt = 0, 0
    h = 1e-7
    while checked < n_cases:
        attempt += 1
        assert attempt < 4 * n_cases, "too many kink-adjacent draws"
        rng = np.random.default_rng(20_000 + seed0 + attempt)
        net, b, d = random_net(rng)
        state = evaluate(net, b, d)
        ok = np.flatnonzero(state.active & (state.y > 1e-4))
        if ok.size == 0:
            continue
        e = int(rng.choice(ok))
        cnode = net.n_nodes - int(rng.integers(1, net.n_outputs + 1))
        g = gradient(net, state, cnode)
        bp = b.copy()
        bp[e] += h
        fd = (evaluate(net, bp, d).x[cnode] - state.x[cnode]) / h
        assert abs(-fd - g[net.dst[e]]) < 1e-6 * max(1.0, abs(g[net.dst[e]]))
        checked += 1


def check_velocity_consistency(n_cases, seed0=0):
    # moving active biases at rate g[dst] makes each active y decay at its
    # velocity, up to the first deactivation
    t = 1e-7
    for case in range(n_cases):
        rng = np.random.default_rng(30_000 + seed0 + case)
        net, b, d = random_net(rng)
        state = evaluate(net, b, d)
        g = gradient(net, state, net.n_nodes - net.n_outputs)
        v = velocity(net, state, g)
        bt = b.copy()
        bt[state.active] += t * g[net.dst[state.active]]
        after = evaluate(net, bt, d, active=state.active)
        for e in np.flatnonzero(state.active):
            if state.y[e] < 10 * t * max(1.0, v[e]):
                continue
            drop = (state.y[e] - after.y[e]) / t
            assert abs(drop - v[e]) < 1e-5 * max(1.0, abs(v[e]))


def check_updates_never_decrease_biases(n_cases, seed0=0):
    for case in range(n_cases):
        rng = np.random.default_rng(40_000 + seed0 + case)
        net, b, d = random_net(rng)
        c = int(rng.integers(net.n_outputs))
        mode = ULTRA if case % 2 else AGGRESSIVE
        out = sda_update(net, b, d, c, mode=mode)
        assert (out.biases >= b - 1e-15).all()


def check_rescaling_preserves_classification(n_cases, seed0=0):
    for case in range(n_cases):
        rng = np.random.default_rng(50_000 + seed0 + case)
        net, b, d = random_net(rng, layer_uniform=True)
        unit, scaled = rescale_to_unit_weights(net, b)
        w0, _ = classify(net, b, d)
        w1, _ = classify(unit, scaled, d)
        assert list(w0) == list(w1)


def check_small_weight_training_hits_final_layer(n_cases, seed0=0):
    # with tiny hidden weights every deactivation lands on an edge into the
    # output layer (clause learning)
    for case in range(n_cases):
        rng = np.random.default_rng(60_000 + seed0 + case)
        n = 2 if case % 2 else 3
        net = complete_boolean_network(n, hidden_weight=1e-3)
        table = rng.integers(0, 2, 2**n)
        data = boolean_dataset(table)
        order = rng.permutation(len(data))
        t = train_to_convergence(net, net.zero_biases(),
                                 [data[i] for i in order], mode=ULTRA)
        assert t.success
        assert set(t.deactivated_layers) <= {net.n_layers - 1}


def check_zero_bias_path_count_identity(n_cases, seed0=0):
    # unit weights, zero biases: final-hidden values are integer path counts
    # applied to the input
    for case in range(n_cases):
        rng = np.random.default_rng(70_000 + seed0 + case)
        net, _, d = random_net(rng, unit_weights=True)
        a = path_counts(net)
        x = evaluate(net, net.zero_biases(), d).x
        lo, hi = net.layer_start[-3], net.layer_start[-2]
        assert np.allclose(x[lo:hi], a @ d, rtol=1e-12, atol=1e-12)


def test_bias_monotonicity():
    check_bias_monotonicity(N_CASES)


def test_node_values_convex_in_biases():
    check_convexity(N_CASES)


def test_gradient_matches_finite_difference():
    check_gradient_finite_difference(N_CASES)


def test_velocity_matches_y_decay():
    check_velocity_consistency(N_CASES)


def test_updates_never_decrease_biases():
    check_updates_never_decrease_biases(N_CASES)


def test_rescaling_preserves_classification():
    check_rescaling_preserves_classification(N_CASES)


def test_small_weight_training_deactivates_final_layer_only():
    check_small_weight_training_hits_final_layer(N_CASES)


def test_zero_bias_path_count_identity():
    check_zero_bias_path_count_identity(N_CASES)
