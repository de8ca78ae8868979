import numpy as np
import pytest

from rectwire.builders import fragment_biases, fragment_network
from rectwire.dynamics import (classify, evaluate, gradient, tie_window,
                               velocity, zero_eps)
from rectwire.network import Network

SEEDS = [0, 1, 2, 3, 4]


def two_class_net(bias5=0.0):
    # 2 inputs -> 2 hidden -> 2 outputs, fully connected, unit weights
    net = Network([2, 2, 2], [0, 1, 0, 1, 2, 3, 2, 3],
                  [2, 2, 3, 3, 4, 4, 5, 5], np.ones(6))
    b = np.zeros(8)
    b[6:] = bias5  # edges into output node 5
    return net, b


def random_net(rng, n_in=3, n_hidden=5, n_out=2):
    sizes = [n_in, n_hidden, n_out]
    src, dst = [], []
    for j in range(n_hidden):
        for i in rng.choice(n_in, size=2, replace=False):
            src.append(int(i))
            dst.append(n_in + j)
    for k in range(n_out):
        for j in range(n_hidden):
            src.append(n_in + j)
            dst.append(n_in + n_hidden + k)
    w = np.concatenate([np.ones(n_in), rng.uniform(0.5, 2.0, n_hidden + n_out)])
    return Network(sizes, src, dst, w)


def test_fragment_forward_values():
    net = fragment_network(w=1.0)
    state = evaluate(net, fragment_biases(0.0), np.array([1.0]))
    assert np.array_equal(state.x, [1.0, 1.0, 1.0, 2.0])
    assert np.array_equal(state.y, [1.0, 1.0, 1.0, 1.0])
    assert state.active.all()
    assert np.array_equal(state.outputs(net), [2.0])


def test_fragment_gradient_and_velocity():
    net = fragment_network(w=1.0)
    state = evaluate(net, fragment_biases(0.0), np.array([1.0]))
    g = gradient(net, state, 3)
    assert np.array_equal(g, [2.0, 2.0, 1.0, 1.0])
    v = velocity(net, state, g)
    # canonical edge order: 0->1, 1->2, 1->3, 2->3
    assert np.array_equal(v, [2.0, 3.0, 3.0, 4.0])


def test_weighted_fragment_forward():
    net = fragment_network(w=0.5)
    state = evaluate(net, fragment_biases(1.0), np.array([1.0]))
    assert np.array_equal(state.x, [1.0, 0.5, 0.5, 0.5])
    assert np.array_equal(state.active, [True, True, True, False])


def test_outputs_and_classify():
    net, b = two_class_net(bias5=1.0)
    winners, m = classify(net, b, np.array([1.0, 2.0]))
    # x4 = 3 + 3 = 6, x5 = 2 + 2 = 4
    assert list(winners) == [1] and m == 4.0
    winners, m = classify(net, np.zeros(8), np.array([1.0, 2.0]))
    assert list(winners) == [0, 1] and m == 6.0


def test_gradient_rejects_non_output():
    net = fragment_network()
    state = evaluate(net, fragment_biases(0.0), np.array([1.0]))
    with pytest.raises(ValueError, match="output"):
        gradient(net, state, 1)


def test_velocity_rejects_stale_active_set():
    net = fragment_network()
    state = evaluate(net, fragment_biases(0.0), np.array([1.0]))
    g = gradient(net, state, 3)
    state.y[0] = 0.0  # active flag still set
    with pytest.raises(ValueError, match="active"):
        velocity(net, state, g)


def test_input_validation():
    net = fragment_network()
    b = fragment_biases(0.0)
    with pytest.raises(ValueError, match="takes"):
        evaluate(net, b, np.array([1.0, 2.0]))
    with pytest.raises(ValueError, match="non-negative"):
        evaluate(net, b, np.array([-1.0]))
    with pytest.raises(ValueError, match="finite"):
        evaluate(net, b, np.array([np.inf]))
    with pytest.raises(ValueError, match="bias"):
        evaluate(net, np.zeros(3), np.array([1.0]))


def test_zero_eps_scales_with_input():
    assert zero_eps(np.array([1.0, 2.0, 3.0])) == 6e-12
    assert tie_window(np.array([0.5])) == 5e-13


def test_roundoff_edge_output_clamped():
    # 0.1 + 0.2 exceeds 0.3 by one rounding step; the edge must not survive
    # as active on that residue
    net = Network([2, 1, 1], [0, 1, 2], [2, 2, 3], np.ones(4))
    b = np.array([0.0, 0.3, 0.0])
    state = evaluate(net, b, np.array([0.1, 0.2]))
    assert 0.1 + 0.2 - 0.3 > 0
    assert state.y[1] == 0.0
    assert not state.active[1]


def test_active_mask_forces_edges_off():
    net = fragment_network(w=1.0)
    b = fragment_biases(0.0)
    d = np.array([1.0])
    mask = np.array([True, True, False, True])
    state = evaluate(net, b, d, active=mask)
    assert state.y[2] == 0.0
    # x3 loses the 1->3 contribution
    assert np.array_equal(state.x, [1.0, 1.0, 1.0, 1.0])


def test_evaluate_deterministic():
    rng = np.random.default_rng(11)
    net = random_net(rng)
    b = rng.uniform(0.0, 0.5, net.n_edges)
    d = rng.uniform(0.1, 1.0, 3)
    a = evaluate(net, b, d)
    c = evaluate(net, b, d)
    assert a.x.tobytes() == c.x.tobytes()
    assert a.y.tobytes() == c.y.tobytes()


@pytest.mark.parametrize("seed", SEEDS)
def test_gradient_matches_finite_difference(seed):
    rng = np.random.default_rng(seed)
    net = random_net(rng)
    b = rng.uniform(0.0, 0.3, net.n_edges)
    d = rng.uniform(0.2, 1.0, 3)
    state = evaluate(net, b, d)
    cnode = net.n_nodes - 2
    g = gradient(net, state, cnode)
    h = 1e-7
    for e in range(net.n_edges):
        if not state.active[e]:
            continue
        if state.y[e] < 10 * h:  # too close to the kink for a forward step
            continue
        bp = b.copy()
        bp[e] += h
        fd = (evaluate(net, bp, d).x[cnode] - state.x[cnode]) / h
        assert abs(-fd - g[net.dst[e]]) < 1e-5 * max(1.0, abs(g[net.dst[e]]))


@pytest.mark.parametrize("seed", SEEDS)
def test_velocity_matches_y_decay(seed):
    # move all active biases at rate g for a short time t; y should drop by
    # about t * v
    rng = np.random.default_rng(seed + 100)
    net = random_net(rng)
    b = rng.uniform(0.0, 0.3, net.n_edges)
    d = rng.uniform(0.2, 1.0, 3)
    state = evaluate(net, b, d)
    g = gradient(net, state, net.n_nodes - 2)
    v = velocity(net, state, g)
    t = 1e-7
    bt = b.copy()
    bt[state.active] += t * g[net.dst[state.active]]
    after = evaluate(net, bt, d, active=state.active)
    for e in np.flatnonzero(state.active):
        if state.y[e] < 10 * t * max(1.0, v[e]):
            continue
        drop = (state.y[e] - after.y[e]) / t
        assert abs(drop - v[e]) < 1e-5 * max(1.0, abs(v[e]))
