"""
Compiling logic circuits into rectifier networks
================================================

Any AND/OR/NOT circuit maps onto a rectified wire network whose size is
linear in the gate count: each gate becomes a handful of hidden nodes, and
the circuit output becomes a two-class readout.  This script compiles XOR
written as (x1 OR x2) AND NOT (x1 AND x2), checks it against the truth
table, then stress-tests the compiler on random circuits.
"""

import numpy as np

from rectwire import (classify, compile_circuit, encode_boolean,
                      evaluate_circuit, format_circuit, parse_circuit,
                      random_circuit)

XOR_TEXT = """\
in x1 x2
g1 = OR x1 x2
g2 = AND x1 x2
g3 = NOT g2
g4 = AND g1 g3
out g4
"""

circuit = parse_circuit(XOR_TEXT)
comp = compile_circuit(circuit)
print(f"gates: {comp.n_gates}, hidden nodes: {comp.hidden_nodes}"
      f" (bound {7 * comp.n_gates}), rectifier gates: {comp.rectifier_gates}")

# the compiled network must agree with direct gate evaluation on all 4
# assignments; class 1 wins exactly when the circuit outputs 1
for m in range(4):
    bits = [m & 1, (m >> 1) & 1]
    want = evaluate_circuit(circuit, bits)
    got, scores = classify(comp.network, comp.biases, encode_boolean(bits))
    assert got == want, (bits, got, want)
    print(f"x={bits} -> {want}  (class scores {np.round(scores, 3)})")

# random circuits: draw structure and gate types, compile, compare the
# network's decision with the circuit on every assignment
rng_failures = 0
for seed in range(30):
    c = random_circuit(n_vars=4, n_gates=10, seed=seed)
    cc = compile_circuit(c)
    for m in range(16):
        bits = [(m >> k) & 1 for k in range(4)]
        got, _ = classify(cc.network, cc.biases, encode_boolean(bits))
        if got != evaluate_circuit(c, bits):
            rng_failures += 1
print(f"\nrandom circuits: 30 compiled, {rng_failures} mismatched assignments")

# round-trip: format and re-parse one of the random circuits
text = format_circuit(c)
assert format_circuit(parse_circuit(text)) == text
print("format/parse round-trip ok:")
print(text)
