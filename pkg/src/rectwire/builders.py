"""Network constructors: sparse expanders, complete Boolean nets, the small
fixed nets used in the update analysis, plus weight assignment utilities.

All randomized construction uses the documented SplitMix64 stream (rng.py), so
a (spec, seed) pair identifies one graph exactly.
"""

from __future__ import annotations

import numpy as np

from .network import Network
from .rng import SplitMix64


def expander_edge_count(n_inputs: int, n_classes: int, growth: int, layers: int) -> int:
    """Edge count of build_expander: |D| * (2g + 2g^2 + ... + 2g^(h-1) + (2+|C|) g^h)."""
    g, h = growth, layers
    return n_inputs * (sum(2 * g**k for k in range(1, h)) + (2 + n_classes) * g**h)


def build_expander(n_inputs: int, n_classes: int, growth: int, layers: int,
                   seed: int, q: float = 1.0) -> Network:
    """Random sparse net: hidden layer k has |D|*g^k nodes with in-degree
    exactly 2; input and hidden out-degrees are exactly 2g, except the last
    hidden layer, which connects completely to the |C| outputs.

    Construction (the reproducibility contract): for each hidden layer, two
    passes over its nodes in ascending id order; each pass adds one in-edge
    per node, drawn uniformly from the lower-layer nodes that currently have
    the smaller out-degree.  The draw keeps a candidate pool, picks index
    rng.below(len(pool)), and removes it by swapping with the last entry; the
    pool refills with all lower-layer nodes when empty.  Parallel edges may
    occur and are kept (in-degree counts edges).

    Hidden weights are balanced: q / sqrt(in_degree * out_degree); outputs 1.
    """
    if growth < 1 or layers < 1:
        raise ValueError("growth and layers must be >= 1")
    if n_inputs < 1 or n_classes < 2:
        raise ValueError("need n_inputs >= 1 and n_classes >= 2")
    rng = SplitMix64(seed)
    sizes = [n_inputs] + [n_inputs * growth**k for k in range(1, layers + 1)] + [n_classes]
    offsets = np.cumsum([0] + sizes)
    src, dst = [], []
    for k in range(1, layers + 1):
        n_low, n_up = sizes[k - 1], sizes[k]
        lo_off, up_off = offsets[k - 1], offsets[k]
        for _pass in range(2):
            pool: list[int] = []
            for u in range(n_up):
                if not pool:
                    pool = list(range(n_low))
                i = rng.below(len(pool))
                partner = pool[i]
                pool[i] = pool[-1]
                pool.pop()
                src.append(lo_off + partner)
                dst.append(up_off + u)
    last_lo, last_hi = offsets[layers], offsets[layers + 1]
    for out in range(n_classes):
        for j in range(last_lo, last_hi):
            src.append(j)
            dst.append(last_hi + out)
    net = Network(sizes, src, dst, np.ones(sum(sizes)))
    return assign_balanced_weights(net, q)


def assign_balanced_weights(network: Network, q: float = 1.0) -> Network:
    """Hidden node weights q / sqrt(in_degree * out_degree); outputs (and
    inputs) get 1.  Returns a new network on the same structure."""
    if q <= 0:
        raise ValueError("q must be positive")
    w = np.ones(network.n_nodes, dtype=np.float64)
    lo, hi = network.n_inputs, int(network.layer_start[-2])
    deg = network.in_degree[lo:hi] * network.out_degree[lo:hi]
    w[lo:hi] = q / np.sqrt(deg.astype(np.float64))
    return network.with_weights(w)


def complete_boolean_network(n_vars: int, hidden_weight: float | None = None) -> Network:
    """The complete net for N Boolean variables: 2N doubled inputs, 2^N hidden
    nodes (one per full conjunction of literals), 2 outputs.  Hidden node m
    takes the positive literal of variable k when bit k-1 of m is 1, else the
    negated literal; both outputs see every hidden node.  Output 0 is the
    class node for function value 0, output 1 for value 1.

    hidden_weight None means balanced (1/sqrt(2N)); small explicit weights
    (say 1e-3) put the net in the regime where training only ever deactivates
    hidden-to-output edges, which suffices to learn any Boolean function.
    """
    if not 1 <= n_vars <= 16:
        raise ValueError("n_vars must be in 1..16")
    n_in, n_hidden = 2 * n_vars, 2**n_vars
    src, dst = [], []
    for m in range(n_hidden):
        h = n_in + m
        for k in range(n_vars):
            sign = (m >> k) & 1
            src.append(2 * k + (1 - sign))  # 2k = z_k, 2k+1 = negation
            dst.append(h)
        for out in range(2):
            src.append(h)
            dst.append(n_in + n_hidden + out)
    if hidden_weight is None:
        hidden_weight = 1.0 / np.sqrt(2.0 * n_vars)
    if hidden_weight <= 0:
        raise ValueError("hidden_weight must be positive")
    w = np.ones(n_in + n_hidden + 2)
    w[n_in:n_in + n_hidden] = hidden_weight
    return Network([n_in, n_hidden, 2], src, dst, w)


def three_var_network(q: float = 1.0) -> Network:
    """The 216-edge two-hidden-layer net on 3 doubled Boolean variables.

    First hidden layer: 12 nodes, one per way of sampling two distinct
    variables with signs (3 missing-variable choices x 4 sign patterns); the
    missing variable is the node's attribute.  Second hidden layer: 48 nodes,
    one per pair of first-layer nodes with different attributes (3 attribute
    pairs x 4 x 4 node choices).  48 nodes connect completely to 2 outputs.
    Weights are balanced with multiplier q.
    """
    n_in = 6
    first = []  # (missing_var, sign_a, sign_b) with vars sorted
    for missing in range(3):
        a, b = [v for v in range(3) if v != missing]
        for sa in range(2):
            for sb in range(2):
                first.append((missing, (a, sa), (b, sb)))
    src, dst = [], []
    for i, (_, (a, sa), (b, sb)) in enumerate(first):
        node = n_in + i
        src.append(2 * a + (1 - sa)); dst.append(node)
        src.append(2 * b + (1 - sb)); dst.append(node)
    by_attr = {m: [i for i, f in enumerate(first) if f[0] == m] for m in range(3)}
    second = []
    for m1 in range(3):
        for m2 in range(m1 + 1, 3):
            for i in by_attr[m1]:
                for j in by_attr[m2]:
                    second.append((i, j))
    assert len(second) == 48
    for k, (i, j) in enumerate(second):
        node = n_in + 12 + k
        src.append(n_in + i); dst.append(node)
        src.append(n_in + j); dst.append(node)
    for out in range(2):
        for k in range(48):
            src.append(n_in + 12 + k)
            dst.append(n_in + 12 + 48 + out)
    net = Network([6, 12, 48, 2], src, dst, np.ones(6 + 12 + 48 + 2))
    return assign_balanced_weights(net, q)


def fragment_network(w: float = 1.0) -> Network:
    """The 4-edge fragment where the conservative update can be suboptimal:
    input 1 -> node 2 -> {node 3, output c} and 3 -> c.  Node 2 has weight w;
    the 2->c edge skips a layer, which the in-memory type allows.  Drive it
    with input d = (1,) and bias vector (0, 0, 0, b) in canonical edge order
    (1->2, 2->3, 2->c, 3->c)."""
    if w <= 0:
        raise ValueError("w must be positive")
    weights = np.array([1.0, w, 1.0, 1.0])
    return Network([1, 1, 1, 1], src=[0, 1, 1, 2], dst=[1, 2, 3, 3], weights=weights)


def fragment_biases(b: float) -> np.ndarray:
    """Bias vector for fragment_network: only the 3->c edge gets bias b."""
    if b < 0:
        raise ValueError("bias must be non-negative")
    return np.array([0.0, 0.0, 0.0, float(b)])


def rescale_to_unit_weights(network: Network, biases: np.ndarray):
    """Fold layer-uniform weights into the biases: returns (unit-weight net,
    rescaled biases) with b~_ij = b_ij / W_l(i), W_l = product of weights up
    through layer l.  Node values rescale as x~ = x / W_l, so outputs divide
    by W_L and classification is unchanged.  Requires a strictly layered net
    with identical weights within each layer."""
    if not network.strictly_layered:
        raise ValueError("rescaling needs a strictly layered network")
    W = np.ones(network.n_layers)
    for layer in range(1, network.n_layers):
        lw = network.weights[network.layer_start[layer]:network.layer_start[layer + 1]]
        if not (lw == lw[0]).all():
            raise ValueError(f"layer {layer} weights are not uniform")
        W[layer] = W[layer - 1] * lw[0]
    scaled = np.asarray(biases, dtype=np.float64) / W[network.node_layer[network.src]]
    unit = network.with_weights(np.ones(network.n_nodes))
    return unit, scaled


def path_counts(network: Network) -> np.ndarray:
    """a[j, i] = number of directed paths from input i to final-hidden node j
    (row index local to the last hidden layer).  Strictly layered nets only.
    With zero biases and unit weights, x_j = sum_i a[j, i] d_i exactly."""
    if not network.strictly_layered:
        raise ValueError("path counts need a strictly layered network")
    counts = np.zeros((network.n_nodes, network.n_inputs), dtype=np.int64)
    counts[: network.n_inputs] = np.eye(network.n_inputs, dtype=np.int64)
    for layer in range(1, network.n_layers - 1):
        sl = network.dst_layer_edges(layer)
        np.add.at(counts, network.dst[sl], counts[network.src[sl]])
    lo, hi = network.layer_start[-3], network.layer_start[-2]
    return counts[lo:hi].copy()


def final_layer_bias_matrix(network: Network, biases: np.ndarray) -> np.ndarray:
    """Biases on last-hidden -> output edges as a (n_outputs, n_final_hidden)
    matrix; requires the final layers to be completely connected."""
    sl = network.dst_layer_edges(network.n_layers - 1)
    lo, hi = network.layer_start[-3], network.layer_start[-2]
    n_final, n_out = hi - lo, network.n_outputs
    if sl.stop - sl.start != n_final * n_out:
        raise ValueError("final layers are not completely connected")
    mat = np.empty((n_out, n_final))
    # canonical order: grouped by dst, then ascending src
    mat.flat[:] = biases[sl]
    return mat


def q0_eval(paths: np.ndarray, final_biases: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Vanishing-weight limit model: output k = sum_j max(0, a_j . d - b_jk),
    where a_j are path-count rows and b_jk the final-layer biases."""
    d = np.asarray(d, dtype=np.float64)
    s = paths.astype(np.float64) @ d
    return np.maximum(0.0, s[None, :] - final_biases).sum(axis=1)
