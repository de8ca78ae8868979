import numpy as np
import pytest

from rectwire.builders import fragment_biases, fragment_network
from rectwire.dynamics import classify, evaluate
from rectwire.network import Network
from rectwire.oracle import update_cost
from rectwire.sda import (AGGRESSIVE, ALREADY_CORRECT, IRREVERSIBLE_TIE,
                          MADE_STRICT_MIN, MADE_ZERO, ULTRA, sda_update)

SEEDS = [0, 1, 2, 3, 4, 5, 6, 7]


def two_class_net():
    net = Network([2, 2, 2], [0, 1, 0, 1, 2, 3, 2, 3],
                  [2, 2, 3, 3, 4, 4, 5, 5], np.ones(6))
    return net, np.zeros(8)


def random_case(seed, n_in=4, n_hidden=6, n_out=3):
    rng = np.random.default_rng(seed)
    src, dst = [], []
    for j in range(n_hidden):
        for i in rng.choice(n_in, size=2, replace=False):
            src.append(int(i))
            dst.append(n_in + j)
    for k in range(n_out):
        for j in range(n_hidden):
            src.append(n_in + j)
            dst.append(n_in + n_hidden + k)
    w = np.concatenate([np.ones(n_in),
                        rng.uniform(0.5, 1.5, n_hidden + n_out)])
    net = Network([n_in, n_hidden, n_out], src, dst, w)
    b = rng.uniform(0.0, 0.4, net.n_edges)
    d = rng.uniform(0.1, 1.0, n_in)
    outs = evaluate(net, b, d).outputs(net)
    c = int(np.argmax(outs))  # worst output: guarantees work to do
    return net, b, d, c


def test_fragment_two_iteration_trace():
    # w=1, b=0, d=1: first step t*=1/4 removes edge 2->3, second step
    # t*=1/8 removes 1->3 and zeroes the output.  All arithmetic is dyadic,
    # so the frozen bias vector is exact.
    net = fragment_network(w=1.0)
    out = sda_update(net, fragment_biases(0.0), np.array([1.0]), 0,
                     mode=AGGRESSIVE)
    assert out.iterations == 2
    assert out.terminal == MADE_ZERO
    assert np.array_equal(out.biases, [0.625, 0.25, 0.375, 0.125])
    assert update_cost(fragment_biases(0.0), out.biases) == np.sqrt(0.609375)


def test_fragment_small_weight_cost():
    # w=0.5 < b=1: single deactivation, cost sqrt(0.2), known optimal
    net = fragment_network(w=0.5)
    b = fragment_biases(1.0)
    out = sda_update(net, b, np.array([1.0]), 0, mode=AGGRESSIVE)
    assert out.iterations == 1
    assert out.terminal == MADE_ZERO
    assert abs(update_cost(b, out.biases) - 0.4472135954999579) < 1e-14


def test_fragment_large_weight_cost():
    # w=2 > b=0.5: the greedy path costs more than the optimum sqrt(0.8)
    net = fragment_network(w=2.0)
    b = fragment_biases(0.5)
    out = sda_update(net, b, np.array([1.0]), 0, mode=AGGRESSIVE)
    assert out.iterations == 2
    assert abs(update_cost(b, out.biases) - 0.9167878707749137) < 1e-12


def test_single_output_ultra_is_noop():
    # with one output node, "strictly smallest" holds vacuously
    net = fragment_network(w=1.0)
    b = fragment_biases(0.0)
    out = sda_update(net, b, np.array([1.0]), 0, mode=ULTRA)
    assert out.iterations == 0
    assert out.terminal == ALREADY_CORRECT
    assert not out.updated


def test_already_correct_leaves_biases_alone():
    net, b = two_class_net()
    b = b.copy()
    b[4:6] = 2.0  # kill output node 4: class 0 sits at 0, class 1 positive
    d = np.array([1.0, 1.0])
    out = sda_update(net, b, d, 0, mode=ULTRA)
    assert out.terminal == ALREADY_CORRECT
    assert np.array_equal(out.biases, b)


def test_ultra_fixes_misclassification():
    net, b = two_class_net()
    d = np.array([1.0, 2.0])
    out = sda_update(net, b, d, 0, mode=ULTRA)
    assert out.updated
    assert out.terminal in (MADE_STRICT_MIN, MADE_ZERO)
    winners, _ = classify(net, out.biases, d)
    assert list(winners) == [0]


def test_aggressive_zeroes_class_output():
    net, b = two_class_net()
    d = np.array([1.0, 2.0])
    out = sda_update(net, b, d, 1, mode=AGGRESSIVE)
    outs = evaluate(net, out.biases, d).outputs(net)
    assert outs[1] == 0.0
    assert out.terminal == MADE_ZERO


def test_irreversible_tie_label():
    net, b = two_class_net()
    b = b.copy()
    b[4:6] = 2.0  # output 4 already pinned at zero
    d = np.array([1.0, 1.0])
    out = sda_update(net, b, d, 1, mode=AGGRESSIVE)
    assert out.terminal == IRREVERSIBLE_TIE
    outs = evaluate(net, out.biases, d).outputs(net)
    assert outs[0] == 0.0 and outs[1] == 0.0


def test_in_place_flag():
    net, b = two_class_net()
    d = np.array([1.0, 2.0])
    out = sda_update(net, b, d, 0, mode=ULTRA, in_place=False)
    assert np.array_equal(b, np.zeros(8))
    assert out.updated
    b2 = np.zeros(8)
    out2 = sda_update(net, b2, d, 0, mode=ULTRA, in_place=True)
    assert out2.biases is b2
    assert np.array_equal(out.biases, b2)


def test_bad_arguments():
    net, b = two_class_net()
    d = np.array([1.0, 2.0])
    with pytest.raises(ValueError, match="mode"):
        sda_update(net, b, d, 0, mode="lazy")
    with pytest.raises(ValueError, match="class index"):
        sda_update(net, b, d, 2)


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("mode", [ULTRA, AGGRESSIVE])
def test_biases_never_decrease(seed, mode):
    net, b, d, c = random_case(seed)
    out = sda_update(net, b, d, c, mode=mode)
    assert (out.biases >= b - 1e-15).all()
    assert out.updated


@pytest.mark.parametrize("seed", SEEDS)
def test_ultra_postcondition(seed):
    net, b, d, c = random_case(seed)
    out = sda_update(net, b, d, c, mode=ULTRA)
    winners, m = classify(net, out.biases, d)
    assert c in winners
    if len(winners) > 1:
        assert m == 0.0  # a surviving tie is only allowed at zero


@pytest.mark.parametrize("seed", SEEDS)
def test_aggressive_postcondition(seed):
    net, b, d, c = random_case(seed)
    out = sda_update(net, b, d, c, mode=AGGRESSIVE)
    outs = evaluate(net, out.biases, d).outputs(net)
    assert outs[c] <= 1e-12 * d.sum()


@pytest.mark.parametrize("seed", SEEDS)
def test_update_is_deterministic(seed):
    net, b, d, c = random_case(seed)
    one = sda_update(net, b, d, c, mode=ULTRA)
    two = sda_update(net, b, d, c, mode=ULTRA)
    assert one.biases.tobytes() == two.biases.tobytes()
    assert one.iterations == two.iterations


def test_deactivation_counter_by_layer():
    net = fragment_network(w=1.0)
    out = sda_update(net, fragment_biases(0.0), np.array([1.0]), 0,
                     mode=AGGRESSIVE)
    # first hit lands on 2->3 (its dst sits in layer 3), second on 1->3
    assert sum(out.deactivated_layers.values()) == 2
    assert out.deactivated_layers[3] == 2


def test_monotone_updates_preserve_zero_outputs():
    # once an output is driven to zero, later updates on other classes
    # cannot lift it (bias increases only lower node values)
    net, b = two_class_net()
    d1 = np.array([1.0, 2.0])
    d2 = np.array([2.0, 1.0])
    out1 = sda_update(net, b, d1, 0, mode=AGGRESSIVE)
    x1 = evaluate(net, out1.biases, d1).outputs(net)[0]
    assert x1 == 0.0
    out2 = sda_update(net, out1.biases, d2, 1, mode=ULTRA)
    x1_after = evaluate(net, out2.biases, d1).outputs(net)[0]
    assert x1_after <= x1
