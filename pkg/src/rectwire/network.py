"""Layered rectified-wire network structure and its text serialization.

A network is a layered DAG.  Nodes get dense ids grouped by layer: layer 0 is
the input layer, the last layer is the output (class) layer.  Every edge goes
from a lower layer to a strictly higher layer; builders always produce
adjacent-layer edges, but the in-memory type tolerates layer skips (needed for
small hand-built nets used in the update analysis).  Edges carry the learned
biases; those live outside this type as a plain float64 vector aligned with
the canonical edge order.

Canonical edge order: sorted by (dst, src).  Node ids are layer-major, so this
equals (dst layer, dst, src) and is a pure function of the structure.
Parallel edges (same src and dst) are legal and occupy adjacent slots.
"""

from __future__ import annotations

import numpy as np


class FileFormatError(ValueError):
    """Malformed network/bias/dataset file."""


class Network:
    """Immutable network structure: layers, edges in canonical order, node weights.

    Parameters
    ----------
    layer_sizes : sizes of layers 0..L (layer 0 = inputs, layer L = outputs).
    src, dst : edge endpoint node ids (any order; canonicalized here).
    weights : per-node multiplier, length n_nodes.  Input-node entries are
        forced to 1.0 (they are never applied; inputs take the data values).
    """

    def __init__(self, layer_sizes, src, dst, weights):
        self.layer_sizes = [int(n) for n in layer_sizes]
        if len(self.layer_sizes) < 2:
            raise ValueError("need at least an input and an output layer")
        if any(n <= 0 for n in self.layer_sizes):
            raise ValueError("empty layer")
        self.n_nodes = sum(self.layer_sizes)
        self.n_layers = len(self.layer_sizes)  # L+1 node layers

        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape or src.ndim != 1:
            raise ValueError("src/dst must be 1-d arrays of equal length")
        order = np.lexsort((src, dst))
        self.src = src[order]
        self.dst = dst[order]
        self.n_edges = len(self.src)

        self.layer_start = np.zeros(self.n_layers + 1, dtype=np.int64)
        np.cumsum(self.layer_sizes, out=self.layer_start[1:])
        self.node_layer = np.repeat(np.arange(self.n_layers), self.layer_sizes)

        w = np.array(weights, dtype=np.float64)
        if w.shape != (self.n_nodes,):
            raise ValueError("weights must have one entry per node")
        w[: self.layer_sizes[0]] = 1.0
        self.weights = w

        self._validate()

        # edge groups by destination layer, contiguous in canonical order
        self._dst_group = np.searchsorted(self.node_layer[self.dst],
                                          np.arange(self.n_layers + 1))
        # edge permutation grouped by source layer (for backward/velocity passes)
        self._by_src_layer = np.argsort(self.node_layer[self.src], kind="stable")
        self._src_group = np.searchsorted(
            self.node_layer[self.src][self._by_src_layer],
            np.arange(self.n_layers + 1))

        self.in_degree = np.bincount(self.dst, minlength=self.n_nodes)
        self.out_degree = np.bincount(self.src, minlength=self.n_nodes)

    def _validate(self):
        if self.n_edges == 0:
            raise ValueError("network has no edges")
        if self.src.min() < 0 or self.dst.max() >= self.n_nodes:
            raise ValueError("edge endpoint out of range")
        ls, ld = self.node_layer[self.src], self.node_layer[self.dst]
        if not (ls < ld).all():
            raise ValueError("edge does not go to a strictly higher layer")
        if (self.weights[self.layer_sizes[0]:] <= 0).any():
            raise ValueError("non-input node weights must be positive")
        ind = np.bincount(self.dst, minlength=self.n_nodes)
        outd = np.bincount(self.src, minlength=self.n_nodes)
        if (ind[: self.layer_sizes[0]] != 0).any():
            raise ValueError("input node has an in-edge")
        if (ind[self.layer_sizes[0]:] == 0).any():
            raise ValueError("non-input node with no in-edges")
        out_lo = self.layer_start[-2]
        if (outd[out_lo:] != 0).any():
            raise ValueError("output node has an out-edge")
        if (outd[:out_lo] == 0).any():
            raise ValueError("non-output node with no out-edges")

    # -- structure queries ------------------------------------------------

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    @property
    def output_nodes(self) -> np.ndarray:
        return np.arange(self.layer_start[-2], self.layer_start[-1])

    @property
    def n_hidden_layers(self) -> int:
        return self.n_layers - 2

    @property
    def strictly_layered(self) -> bool:
        """True when every edge crosses exactly one layer boundary."""
        return bool((self.node_layer[self.dst] - self.node_layer[self.src] == 1).all())

    def layer_nodes(self, layer: int) -> np.ndarray:
        return np.arange(self.layer_start[layer], self.layer_start[layer + 1])

    def dst_layer_edges(self, layer: int) -> slice:
        """Canonical-order slice of edges whose destination is in `layer`."""
        return slice(self._dst_group[layer], self._dst_group[layer + 1])

    def src_layer_edges(self, layer: int) -> np.ndarray:
        """Edge indices (canonical ids) whose source is in `layer`."""
        return self._by_src_layer[self._src_group[layer]:self._src_group[layer + 1]]

    def degree(self, node: int) -> tuple[int, int]:
        """(in-degree, out-degree) of a node, counting parallel edges."""
        if not 0 <= node < self.n_nodes:
            raise ValueError(f"no node {node}")
        return int(self.in_degree[node]), int(self.out_degree[node])

    def edge_dst_layer(self) -> np.ndarray:
        """Per-edge destination layer index (1..L)."""
        return self.node_layer[self.dst]

    def with_weights(self, weights) -> "Network":
        return Network(self.layer_sizes, self.src, self.dst, weights)

    def zero_biases(self) -> np.ndarray:
        return np.zeros(self.n_edges, dtype=np.float64)

    def __eq__(self, other):
        return (isinstance(other, Network)
                and self.layer_sizes == other.layer_sizes
                and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.weights, other.weights))

    def __repr__(self):
        return (f"Network(layers={self.layer_sizes}, edges={self.n_edges})")


def validate_biases(network: Network, biases: np.ndarray) -> np.ndarray:
    """Check a bias vector against a network; returns it as float64."""
    b = np.asarray(biases, dtype=np.float64)
    if b.shape != (network.n_edges,):
        raise ValueError(f"bias vector has {b.shape} entries, "
                         f"network has {network.n_edges} edges")
    if not np.isfinite(b).all():
        raise ValueError("bias vector has non-finite entries")
    if (b < 0).any():
        raise ValueError("biases must be non-negative")
    return b


# -- text formats ----------------------------------------------------------
#
# Network file ("rwnet 1"):
#     rwnet 1
#     layers <L+1>
#     sizes n0 n1 ... nL
#     w <node> <weight>      one line per non-input node
#     e <src> <dst>          one line per edge
#
# Bias file ("rwbias 1 <count>"): one value per line, canonical edge order.
# Floats are written with 17 significant digits so round trips are bit exact.


def save_network(network: Network, path) -> None:
    with open(path, "w") as fh:
        fh.write("rwnet 1\n")
        fh.write(f"layers {network.n_layers}\n")
        fh.write("sizes " + " ".join(str(n) for n in network.layer_sizes) + "\n")
        for node in range(network.n_inputs, network.n_nodes):
            fh.write(f"w {node} {network.weights[node]:.17g}\n")
        for s, d in zip(network.src, network.dst):
            fh.write(f"e {s} {d}\n")


def load_network(path, allow_skips: bool = False) -> Network:
    """Parse an rwnet file.

    Layer-skipping edges are rejected unless allow_skips is set; builders never
    emit them, so a skip in a file is normally a corrupted or mislabeled net.
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "rwnet 1":
        raise FileFormatError("not an rwnet-1 file")
    try:
        tag, nlayers = lines[1].split()
        nlayers = int(nlayers)
        if tag != "layers":
            raise ValueError
        parts = lines[2].split()
        if parts[0] != "sizes" or len(parts) != nlayers + 1:
            raise ValueError
        sizes = [int(p) for p in parts[1:]]
    except (ValueError, IndexError):
        raise FileFormatError("bad layers/sizes header") from None
    n_nodes = sum(sizes)
    weights = np.ones(n_nodes, dtype=np.float64)
    seen_w = np.zeros(n_nodes, dtype=bool)
    src, dst = [], []
    for ln in lines[3:]:
        parts = ln.split()
        if parts[0] == "w" and len(parts) == 3:
            node = int(parts[1])
            if not 0 <= node < n_nodes:
                raise FileFormatError(f"weight for unknown node {node}")
            weights[node] = float(parts[2])
            seen_w[node] = True
        elif parts[0] == "e" and len(parts) == 3:
            src.append(int(parts[1]))
            dst.append(int(parts[2]))
        else:
            raise FileFormatError(f"unrecognized line: {ln!r}")
    if not seen_w[sizes[0]:].all():
        raise FileFormatError("missing weight line for a non-input node")
    try:
        net = Network(sizes, src, dst, weights)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from None
    if not allow_skips and not net.strictly_layered:
        raise FileFormatError("edge skips a layer (pass allow_skips to accept)")
    return net


def save_biases(biases: np.ndarray, path) -> None:
    b = np.asarray(biases, dtype=np.float64)
    with open(path, "w") as fh:
        fh.write(f"rwbias 1 {len(b)}\n")
        for v in b:
            fh.write(f"{v:.17g}\n")


def load_biases(path, network: Network | None = None) -> np.ndarray:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("rwbias 1"):
        raise FileFormatError("not an rwbias-1 file")
    parts = lines[0].split()
    if len(parts) != 3:
        raise FileFormatError("bad rwbias header")
    count = int(parts[2])
    if len(lines) - 1 != count:
        raise FileFormatError(f"bias count mismatch: header says {count}, "
                              f"file has {len(lines) - 1}")
    try:
        b = np.array([float(ln) for ln in lines[1:]], dtype=np.float64)
    except ValueError:
        raise FileFormatError("non-numeric bias line") from None
    if network is not None and count != network.n_edges:
        raise FileFormatError(f"bias file has {count} entries, "
                              f"network has {network.n_edges} edges")
    if (b < 0).any() or not np.isfinite(b).all():
        raise FileFormatError("biases must be finite and non-negative")
    return b
