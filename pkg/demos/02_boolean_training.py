"""
Learning Boolean functions by deactivation
==========================================

A complete two-variable network (4 doubled inputs, 4 hidden conjunction
nodes, 2 class outputs) can represent any Boolean function of two variables
by deactivating edges.  Training presents the 4 assignments over and over;
each time the network classifies one wrongly (or ties), the update loop
raises biases until the wrong class output stops winning.  Ultra mode stops
as soon as the correct class is the strict minimum; aggressive mode keeps
going until the wrong output is exactly zero.
"""

import numpy as np

from rectwire import (AGGRESSIVE, ULTRA, complete_boolean_network,
                      named_boolean_functions, boolean_dataset,
                      train_to_convergence)

net = complete_boolean_network(2)
print(f"network: layers {net.layer_sizes}, {net.n_edges} edges")

# the four benchmark functions: constant 0, dictator, parity, conjunction
for mode in (ULTRA, AGGRESSIVE):
    print(f"\nmode: {mode}")
    print(f"{'fn':>4} {'ok':>3} {'#err':>4} {'#iter':>5} {'passes':>6}")
    for name, table in named_boolean_functions(2).items():
        data = boolean_dataset(table)
        trial = train_to_convergence(net, net.zero_biases(), data, mode=mode)
        print(f"{name:>4} {str(trial.success):>3} {trial.err:>4}"
              f" {trial.iters:>5} {trial.passes:>6}")

# parity is the hard case: every assignment flips the label of its
# neighbours, so zero biases misclassify everything on the first pass
table = named_boolean_functions(2)["f+"]
trial = train_to_convergence(net, net.zero_biases(), boolean_dataset(table),
                             mode=ULTRA)
print("\nparity, ultra mode:")
print("final biases:", np.round(trial.biases, 3))
print("deactivations by destination layer:", dict(trial.deactivated_layers))

# contradictory labels can never converge; the trainer gives up after a few
# full passes without progress and reports failure honestly
bad = boolean_dataset(table)
bad = bad + [bad[0]._replace(label=1 - bad[0].label)]
trial = train_to_convergence(net, net.zero_biases(), bad, mode=ULTRA)
print(f"\ncontradictory data: success={trial.success}"
      f" after {trial.passes} passes")
