"""Boolean circuits and their compilation to rectified wire networks.

A circuit is AND/OR binary gates plus NOT over n variables with one designated
output.  Compilation produces a unit-weight network with biases in {0, 1} on
doubled inputs (variable k becomes the node pair (z_k, not-z_k) at slots
2k, 2k+1): for every assignment the two network outputs take node values
(f, not-f), so the zero output names the function value.

Gadgets: every signal is carried as a pair of "forks" (node, tap_bias) whose
rectified tap max(0, x_node - tap_bias) is the signal and its complement.
A binary gate adds four sum nodes over operand taps (a+b, na+nb, na+b, a+nb)
and one collector node, five hidden nodes and five rectifier stages in all:

    AND:  y    = tap(a+b, 1)                        (fork: sum node, bias 1)
          not-y = R0( tap(na+nb,1) + tap(na+b,1) + tap(a+nb,1) )   (collector)
    OR:   y    = R0( tap(a+b,1) + tap(a+nb,1) + tap(na+b,1) )
          not-y = tap(na+nb, 1)

NOT swaps the forks and costs nothing.  The identities hold with values in
{0,1} even when both operands ride the same fork pair (y AND y, y AND not-y,
etc.), so no special cases are needed.  Sum-node values reach 2; every tap is
0/1.  Nodes whose signal goes unused get a ballast edge to an output with
bias tap_bias + 1, which transmits exactly 0 and keeps out-degrees positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network
from .rng import SplitMix64

AND, OR, NOT = "AND", "OR", "NOT"


@dataclass
class Circuit:
    """Gates reference operands by id: 0..n_vars-1 are variables, n_vars+i is
    gate i.  NOT gates use only the first operand."""

    n_vars: int
    gates: list[tuple[str, int, int]]
    output: int

    def __post_init__(self):
        if self.n_vars < 1:
            raise ValueError("circuit needs at least one variable")
        for i, (op, a, b) in enumerate(self.gates):
            limit = self.n_vars + i
            if op not in (AND, OR, NOT):
                raise ValueError(f"gate {i}: unknown op {op!r}")
            if not 0 <= a < limit or (op != NOT and not 0 <= b < limit):
                raise ValueError(f"gate {i}: operand not yet defined")
        if not 0 <= self.output < self.n_vars + len(self.gates):
            raise ValueError("output references an undefined operand")


def evaluate_circuit(circuit: Circuit, assignment) -> int:
    """Direct gate-by-gate evaluation; the reference semantics for compile()."""
    vals = [int(v) & 1 for v in assignment]
    if len(vals) != circuit.n_vars:
        raise ValueError("assignment length mismatch")
    for op, a, b in circuit.gates:
        if op == NOT:
            vals.append(1 - vals[a])
        elif op == AND:
            vals.append(vals[a] & vals[b])
        else:
            vals.append(vals[a] | vals[b])
    return vals[circuit.output]


def parse_circuit(text: str) -> Circuit:
    """Parse the circuit text format:

        in x1 x2 x3
        g1 = AND x1 x2
        g2 = NOT g1
        g3 = OR g2 x3
        out g3
    """
    names: dict[str, int] = {}
    gates: list[tuple[str, int, int]] = []
    n_vars = 0
    output = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "in":
            if names:
                raise ValueError(f"line {lineno}: duplicate or late 'in' line")
            if len(parts) < 2:
                raise ValueError(f"line {lineno}: 'in' line names no variables")
            for name in parts[1:]:
                if name in names:
                    raise ValueError(f"line {lineno}: duplicate name {name!r}")
                names[name] = len(names)
            n_vars = len(names)
        elif parts[0] == "out":
            if len(parts) != 2 or parts[1] not in names:
                raise ValueError(f"line {lineno}: bad out line")
            output = names[parts[1]]
        elif len(parts) >= 4 and parts[1] == "=":
            name, op = parts[0], parts[2]
            args = parts[3:]
            if n_vars == 0:
                raise ValueError(f"line {lineno}: gate before 'in' line")
            if name in names:
                raise ValueError(f"line {lineno}: duplicate name {name!r}")
            if op == NOT and len(args) == 1:
                a, b = args[0], None
            elif op in (AND, OR) and len(args) == 2:
                a, b = args
            else:
                raise ValueError(f"line {lineno}: bad gate {line!r}")
            if a not in names or (b is not None and b not in names):
                raise ValueError(f"line {lineno}: undefined operand")
            gates.append((op, names[a], names[b] if b is not None else 0))
            names[name] = n_vars + len(gates) - 1
        else:
            raise ValueError(f"line {lineno}: unrecognized line {line!r}")
    if output is None:
        raise ValueError("no 'out' line")
    return Circuit(n_vars, gates, output)


def format_circuit(circuit: Circuit) -> str:
    lines = ["in " + " ".join(f"x{k + 1}" for k in range(circuit.n_vars))]

    def ref(i):
        return f"x{i + 1}" if i < circuit.n_vars else f"g{i - circuit.n_vars + 1}"

    for i, (op, a, b) in enumerate(circuit.gates):
        rhs = f"{op} {ref(a)}" if op == NOT else f"{op} {ref(a)} {ref(b)}"
        lines.append(f"g{i + 1} = {rhs}")
    lines.append("out " + ref(circuit.output))
    return "\n".join(lines) + "\n"


@dataclass
class CompiledCircuit:
    network: Network
    biases: np.ndarray
    n_gates: int
    hidden_nodes: int
    rectifier_gates: int


def compile_circuit(circuit: Circuit) -> CompiledCircuit:
    """Compile to a network whose outputs take node values (f, not-f).

    Uses 5 hidden nodes and 5 rectifier stages per binary gate (NOT is free),
    within the 5M-gate / 7M-hidden-node construction bounds.
    """
    n_vars = circuit.n_vars
    n_hidden = 0
    edges: list[tuple[int, int, float]] = []   # (src, dst, bias) with temp ids
    layer_of = {i: 0 for i in range(2 * n_vars)}  # longest path from inputs

    def new_node(src_layers) -> int:
        nonlocal n_hidden
        node = 2 * n_vars + n_hidden
        n_hidden += 1
        layer_of[node] = 1 + max(src_layers)
        return node

    # fork pairs per operand: ((node, tap_bias) positive, (node, tap_bias) negated)
    forks: list[tuple[tuple[int, int], tuple[int, int]]] = [
        ((2 * k, 0), (2 * k + 1, 0)) for k in range(n_vars)]

    def sum_node(fa: tuple[int, int], fb: tuple[int, int]) -> int:
        node = new_node([layer_of[fa[0]], layer_of[fb[0]]])
        edges.append((fa[0], node, float(fa[1])))
        edges.append((fb[0], node, float(fb[1])))
        return node

    def collector(sums: list[int]) -> int:
        node = new_node([layer_of[s] for s in sums])
        for s in sums:
            edges.append((s, node, 1.0))
        return node

    n_binary = 0
    for op, a, b in circuit.gates:
        if op == NOT:
            pos, neg = forks[a]
            forks.append((neg, pos))
            continue
        n_binary += 1
        (pa, na), (pb, nb) = forks[a], forks[b]
        s_pp = sum_node(pa, pb)
        s_nn = sum_node(na, nb)
        s_np = sum_node(na, pb)
        s_pn = sum_node(pa, nb)
        if op == AND:
            pos = (s_pp, 1)
            neg = (collector([s_nn, s_np, s_pn]), 0)
        else:
            pos = (collector([s_pp, s_pn, s_np]), 0)
            neg = (s_nn, 1)
        forks.append((pos, neg))

    out_layer = max(layer_of.values()) + 1
    out_f, out_fbar = 2 * n_vars + n_hidden, 2 * n_vars + n_hidden + 1
    pos, neg = forks[circuit.output]
    edges.append((pos[0], out_f, float(pos[1])))
    edges.append((neg[0], out_fbar, float(neg[1])))

    # ballast: unused taps park on an output through a dead edge (bias one
    # above the tap transmits exactly 0, since tap values are 0/1)
    used = {s for s, _, _ in edges}
    tap_bias = {}
    for pair in forks:
        for node, bias in pair:
            tap_bias[node] = bias
    for node in range(2 * n_vars + n_hidden):
        if node not in used:
            edges.append((node, out_f, float(tap_bias.get(node, 1)) + 1.0))

    # dense renumbering by (longest-path layer, creation order)
    layer_of[out_f] = out_layer
    layer_of[out_fbar] = out_layer
    order = sorted(layer_of, key=lambda t: (layer_of[t], t))
    remap = {t: i for i, t in enumerate(order)}
    layer_sizes = np.bincount([layer_of[t] for t in order],
                              minlength=out_layer + 1).tolist()
    src = np.array([remap[s] for s, _, _ in edges])
    dst = np.array([remap[d] for _, d, _ in edges])
    n_total = 2 * n_vars + n_hidden + 2
    net = Network(layer_sizes, src, dst, np.ones(n_total))
    # biases follow the canonical edge resort
    order_idx = np.lexsort((src, dst))
    b = np.array([edges[i][2] for i in order_idx])
    return CompiledCircuit(network=net, biases=b, n_gates=len(circuit.gates),
                           hidden_nodes=n_hidden, rectifier_gates=5 * n_binary)


def random_circuit(n_vars: int, n_gates: int, seed: int) -> Circuit:
    """Seeded random circuit: ops uniform over AND/OR/NOT, operands uniform
    over everything defined so far, output = last gate."""
    if n_gates < 1:
        raise ValueError("need at least one gate")
    rng = SplitMix64(seed)
    gates = []
    for i in range(n_gates):
        limit = n_vars + i
        op = (AND, OR, NOT)[rng.below(3)]
        a = rng.below(limit)
        b = rng.below(limit) if op != NOT else 0
        gates.append((op, a, b))
    return Circuit(n_vars, gates, n_vars + n_gates - 1)
