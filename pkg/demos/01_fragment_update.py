"""
A single conservative update, step by step
==========================================

The smallest interesting network is a 4-edge fragment: one input feeding a
chain of two rectifier edges into the class output, plus a third edge that
skips the middle node.  Driving the class output to zero can be done greedily
(raise the bias of whichever active edge dies first, repeat) or exactly (a
small convex program over all active-edge biases).  On most inputs the two
agree; this script walks one case where they agree and one where the greedy
route pays more.
"""

import numpy as np

from rectwire import (AGGRESSIVE, evaluate, fragment_biases, fragment_network,
                      gradient, sda_update, solve_conservative, update_cost,
                      velocity)

###############################################################################
# Build the fragment.  Edges in canonical order: input->2, 2->3, 2->c, 3->c.
# Node 2 carries weight w; all other weights are 1.  Only the 3->c edge starts
# with a nonzero bias b.

w, b = 0.5, 1.0
net = fragment_network(w)
biases = fragment_biases(b)
d = np.array([1.0])

state = evaluate(net, biases, d)
print(f"w={w} b={b}")
print("node values x:", state.x)
print("edge outputs y:", state.y)
print("active edges:", np.flatnonzero(state.active))

###############################################################################
# The update direction.  gradient() gives dx_c/db per edge (raising a bias can
# only lower the class output), velocity() the speed at which each active
# edge's own output shrinks as every active bias rises at the gradient rate.

g = gradient(net, state, class_node=net.n_nodes - 1)
v = velocity(net, state, g)
print("gradient:", g)
print("edge shrink velocity:", v)

###############################################################################
# Run the full deactivation loop (aggressive mode: stop only when the class
# output is exactly zero) and compare its bias motion with the exact solver.

out = sda_update(net, biases, d, class_index=0, mode=AGGRESSIVE)
qp = solve_conservative(net, biases, d, class_index=0)
print(f"loop: {out.iterations} iterations, terminal {out.terminal}")
print("loop biases:", out.biases)
print("exact biases:", qp.b_prime)
print(f"loop cost {update_cost(biases, out.biases):.6f}"
      f" vs exact cost {qp.cost:.6f}")

###############################################################################
# Same fragment, different constants.  With w=2 the skip edge makes the greedy
# deactivation order suboptimal: the loop still zeroes the output, but moves
# the biases farther than necessary.

w, b = 2.0, 0.5
net = fragment_network(w)
biases = fragment_biases(b)
out = sda_update(net, biases, d, class_index=0, mode=AGGRESSIVE)
qp = solve_conservative(net, biases, d, class_index=0)
loop_cost = update_cost(biases, out.biases)
print(f"\nw={w} b={b}")
print(f"loop cost {loop_cost:.6f} vs exact cost {qp.cost:.6f}"
      f" (gap {loop_cost - qp.cost:.6f})")
print("class output after exact update:", f"{qp.xc_after:.2e}")
