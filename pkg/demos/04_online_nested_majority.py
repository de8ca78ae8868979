"""
Online training on a nested majority stream
===========================================

The nested majority family is a synthetic two-class problem over p-1 binary
arguments: the label is a majority of three recursively defined sub-formulas,
each XORed with a fixed negation flag, with indices walked multiplicatively
mod p.  A randomly wired expander network trains on a one-pass stream of
labelled samples; the trainer only touches items the network currently gets
wrong, so the error count grows much slower than the item count.

This is a scaled-down run (p=5, twenty thousand items) that finishes in a
few seconds.  The full-size problem is available through the command line:

    rectwire experiment nmf1
"""

import numpy as np

from rectwire import (NmfSpec, build_expander, evaluate_dataset, nmf_dataset,
                      train_online)

spec = NmfSpec(p=5, w=2, arity=3, depth=1)
net = build_expander(n_inputs=2 * (spec.p - 1), n_classes=2, growth=3,
                     layers=2, seed=11)
print(f"network: layers {net.layer_sizes}, {net.n_edges} edges")

# held-out test set and a one-pass training stream, disjoint seeds
test = nmf_dataset(spec, 2000, seed=12)
stream = nmf_dataset(spec, 20000, seed=13)

biases = net.zero_biases()
result = train_online(net, biases, iter(stream), test_samples=test,
                      batch=2000, max_items=len(stream))

print(f"\nitems seen: {result.items}, wrong items: {result.err_total},"
      f" update iterations: {result.iter_total}")
print(f"peak test accuracy: {result.peak_accuracy:.4f}"
      f" (stopped: {result.stopped})")

# the report is a plain CSV: accuracy plus per-layer fraction of active
# edges after every batch
print("\ntraining report:")
print(result.report.to_csv())

# final check: accuracy from scratch on the held-out set matches the last
# report row
stats = evaluate_dataset(net, result.biases, test)
print(f"recomputed test accuracy: {stats.accuracy:.4f}")
print(f"fraction of test items with an all-zero output layer:"
      f" {stats.zero_err:.4f}")
print("active-edge fraction per trained layer:", np.round(stats.alphas, 4))
