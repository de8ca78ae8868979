import numpy as np
import pytest

from rectwire.builders import (assign_balanced_weights, build_expander,
                               complete_boolean_network, expander_edge_count,
                               final_layer_bias_matrix, fragment_biases,
                               fragment_network, path_counts, q0_eval,
                               rescale_to_unit_weights, three_var_network)
from rectwire.dynamics import classify, evaluate
from rectwire.network import Network

EXPANDER_SEEDS = [1, 2, 3]


def in_out_degrees(net):
    ins = np.bincount(net.dst, minlength=net.n_nodes)
    outs = np.bincount(net.src, minlength=net.n_nodes)
    return ins, outs


@pytest.mark.parametrize("args,count", [
    ((60, 2, 6, 2), 9360),
    ((60, 2, 21, 2), 108360),
    ((60, 2, 14, 3), 683760),
    ((100, 10, 13, 2), 205400),
])
def test_edge_count_formula(args, count):
    assert expander_edge_count(*args) == count


def test_expander_sizes_and_count():
    net = build_expander(60, 2, 6, 2, seed=1)
    assert net.layer_sizes == [60, 360, 2160, 2]
    assert net.n_edges == expander_edge_count(60, 2, 6, 2) == 9360


@pytest.mark.parametrize("seed", EXPANDER_SEEDS)
def test_expander_degree_contract(seed):
    net = build_expander(12, 3, 2, 2, seed=seed)
    ins, outs = in_out_degrees(net)
    n_in, n_h1, n_h2 = 12, 24, 48
    assert (ins[:n_in] == 0).all()
    assert (ins[n_in:n_in + n_h1 + n_h2] == 2).all()
    assert (ins[-3:] == n_h2).all()
    # input and first-hidden out-degree exactly 2g; last hidden -> |C|
    assert (outs[:n_in] == 4).all()
    assert (outs[n_in:n_in + n_h1] == 4).all()
    assert (outs[n_in + n_h1:n_in + n_h1 + n_h2] == 3).all()
    assert (outs[-3:] == 0).all()


def test_expander_balanced_weights():
    net = build_expander(60, 2, 6, 2, seed=1, q=1.0)
    w = net.weights
    # hidden: 1/sqrt(in * out) with in=2; layer-1 out=12, layer-2 out=2
    assert np.allclose(w[60:420], 1 / np.sqrt(2 * 12))
    assert np.allclose(w[420:2580], 1 / np.sqrt(2 * 2))
    assert np.array_equal(w[2580:], [1.0, 1.0])
    half = build_expander(60, 2, 6, 2, seed=1, q=0.5)
    assert np.allclose(half.weights[60:420], 0.5 / np.sqrt(24))


@pytest.mark.parametrize("seed", EXPANDER_SEEDS)
def test_expander_reproducible(seed):
    a = build_expander(10, 2, 3, 2, seed=seed)
    b = build_expander(10, 2, 3, 2, seed=seed)
    assert a == b
    c = build_expander(10, 2, 3, 2, seed=seed + 17)
    assert c != a


def test_expander_argument_checks():
    with pytest.raises(ValueError):
        build_expander(10, 2, 0, 2, seed=1)
    with pytest.raises(ValueError):
        build_expander(10, 1, 3, 2, seed=1)
    with pytest.raises(ValueError):
        build_expander(0, 2, 3, 2, seed=1)


def test_balanced_weights_on_fixed_net():
    net = Network([2, 2, 2], [0, 1, 0, 1, 2, 3, 2, 3],
                  [2, 2, 3, 3, 4, 4, 5, 5], np.ones(6))
    bal = assign_balanced_weights(net, q=2.0)
    # hidden nodes: in=2, out=2 -> 2/sqrt(4) = 1
    assert np.allclose(bal.weights[2:4], 1.0)
    assert np.array_equal(bal.weights[4:], [1.0, 1.0])


def test_complete_boolean_network_shape():
    net = complete_boolean_network(2)
    # doubled inputs, one hidden layer, 2 outputs, fully connected
    assert net.layer_sizes[0] == 4 and net.layer_sizes[-1] == 2
    assert net.n_edges == 16


def test_three_var_network_shape():
    net = three_var_network(q=1.0)
    assert net.layer_sizes == [6, 12, 48, 2]
    # 12 * 2 + 48 * 2 + 48 * 2
    assert net.n_edges == 216
    ins, outs = in_out_degrees(net)
    assert (ins[6:66] == 2).all()
    assert (ins[66:] == 48).all()
    # every doubled input literal feeds 4 first-layer nodes
    assert (outs[:6] == 4).all()


def test_fragment_shape():
    net = fragment_network(2.0)
    assert net.layer_sizes == [1, 1, 1, 1]
    assert list(net.src) == [0, 1, 1, 2]
    assert list(net.dst) == [1, 2, 3, 3]
    assert net.weights[1] == 2.0
    assert not net.strictly_layered
    assert np.array_equal(fragment_biases(0.25), [0, 0, 0, 0.25])
    with pytest.raises(ValueError):
        fragment_network(0.0)
    with pytest.raises(ValueError):
        fragment_biases(-1.0)


def test_rescale_preserves_classification():
    rng = np.random.default_rng(3)
    net = build_expander(8, 2, 2, 2, seed=5, q=0.7)
    b = rng.uniform(0.0, 0.5, net.n_edges)
    unit, b2 = rescale_to_unit_weights(net, b)
    assert np.allclose(unit.weights[8:], 1.0)
    for _ in range(20):
        d = rng.uniform(0.0, 1.0, 8)
        w1, m1 = classify(net, b, d)
        w2, m2 = classify(unit, b2, d)
        assert np.array_equal(w1, w2)


def test_rescale_requires_uniform_layers():
    net = Network([2, 2, 2], [0, 1, 0, 1, 2, 3, 2, 3],
                  [2, 2, 3, 3, 4, 4, 5, 5],
                  [1, 1, 0.5, 0.25, 1.0, 1.0])
    with pytest.raises(ValueError, match="uniform"):
        rescale_to_unit_weights(net, np.zeros(8))


def test_path_counts_identity():
    # at zero bias and unit weights, x_j = sum_i a_ji d_i on the last
    # hidden layer
    net = build_expander(6, 2, 2, 2, seed=2, q=1.0)
    unit = net.with_weights(np.ones(net.n_nodes))
    a = path_counts(unit)
    rng = np.random.default_rng(0)
    d = rng.uniform(0.0, 1.0, 6)
    state = evaluate(unit, unit.zero_biases(), d)
    lo = unit.layer_start[-3]
    hi = unit.layer_start[-2]
    assert np.allclose(a @ d, state.x[lo:hi])


def test_q0_eval_matches_network_with_tiny_q():
    # with q -> 0, only final-layer edges carry bias; the reduced form
    # reproduces the full forward pass after rescaling
    net = build_expander(6, 2, 2, 2, seed=4, q=1.0)
    unit = net.with_weights(np.ones(net.n_nodes))
    a = path_counts(unit)
    rng = np.random.default_rng(1)
    b = unit.zero_biases()
    sl = unit.dst_layer_edges(unit.n_layers - 1)
    b[sl] = rng.uniform(0.0, 20.0, sl.stop - sl.start)
    bmat = final_layer_bias_matrix(unit, b)
    for _ in range(10):
        d = rng.uniform(0.0, 1.0, 6)
        outs = evaluate(unit, b, d).outputs(unit)
        assert np.allclose(q0_eval(a, bmat, d), outs)


def test_final_layer_bias_matrix_shape():
    net = build_expander(6, 2, 2, 2, seed=4, q=1.0)
    b = net.zero_biases()
    mat = final_layer_bias_matrix(net, b)
    assert mat.shape == (2, 24)
    assert (mat == 0).all()
