"""Sequential deactivation (SDA): the monotone conservative bias update.

One update takes a single misclassified item (d, c) and raises biases just
enough to fix it.  Each iteration moves all active-edge biases at rate
g_dst (the counterfactual gradient), which shrinks every active edge output
at rate v (the velocity field); the step size t* = min y/v is exactly the
point where the first edge output reaches zero.  That edge leaves the active
set and the loop repeats on the smaller subnetwork.  On exit, biases on edges
that went inactive are rolled back to max(entry bias, current source value):
the least increase that keeps them inactive, which is the conservative choice.

Termination modes:
  "ultra"      stop as soon as x_c = 0 OR c is the strict minimum.
  "aggressive" stop only when x_c = 0 (the zero-output rule).

Updates never decrease a bias, so node values never increase for any input:
everything learned before stays learned (in the counterfactual sense).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .dynamics import evaluate, gradient, velocity, zero_eps
from .network import Network

ULTRA = "ultra"
AGGRESSIVE = "aggressive"

ALREADY_CORRECT = "already_correct"
MADE_STRICT_MIN = "made_strict_min"
MADE_ZERO = "made_zero"
IRREVERSIBLE_TIE = "irreversible_tie"

# all edges within this relative window of the minimal ratio y/v deactivate in
# the same iteration (exact simultaneous deactivations are common: symmetric
# nets produce bit-identical ratios)
TIE_WINDOW = 1e-12


@dataclass
class SdaOutcome:
    biases: np.ndarray
    iterations: int
    terminal: str
    deactivated_layers: Counter = field(default_factory=Counter)

    @property
    def updated(self) -> bool:
        return self.iterations > 0


def step_size(state, v: np.ndarray):
    """(t*, edge ids deactivating at t*) over active edges with positive velocity."""
    cand = np.flatnonzero(state.active & (v > 0))
    if len(cand) == 0:
        raise RuntimeError("no active edge with positive velocity")
    t = state.y[cand] / v[cand]
    tstar = t.min()
    return float(tstar), cand[t <= tstar * (1.0 + TIE_WINDOW)]


def sda_update(network: Network, biases: np.ndarray, d: np.ndarray,
               class_index: int, mode: str = ULTRA,
               in_place: bool = False) -> SdaOutcome:
    """Run the deactivation loop for one item.  `class_index` is the output
    slot (0-based within the output layer).  Returns the updated bias vector
    (the input array itself when in_place is set) plus iteration count,
    terminal condition, and a Counter of deactivated edges by destination
    layer.
    """
    if mode not in (ULTRA, AGGRESSIVE):
        raise ValueError(f"unknown mode {mode!r}")
    if not 0 <= class_index < network.n_outputs:
        raise ValueError(f"class index {class_index} out of range")
    d = np.asarray(d, dtype=np.float64)
    b = biases if in_place else biases.copy()
    eps = zero_eps(d)
    cnode = int(network.layer_start[-2]) + class_index

    state = evaluate(network, b, d)
    entry = state.active.copy()
    cap = int(entry.sum()) + 8
    b0 = b.copy()
    deact: Counter = Counter()
    dst_layer = network.node_layer[network.dst]
    iterations = 0

    def done_and_label():
        outs = state.outputs(network)
        xc = outs[class_index]
        if xc <= eps:
            zeros = int((outs <= eps).sum())
            return True, (IRREVERSIBLE_TIE if zeros > 1 else MADE_ZERO)
        if mode == ULTRA:
            others = np.delete(outs, class_index)
            # strict minimum up to the tie window; exact comparison would
            # promote roundoff-sized differences to strict wins
            if (others > xc + eps).all():
                return True, MADE_STRICT_MIN
        return False, ""

    done, label = done_and_label()
    if done:
        return SdaOutcome(b, 0, ALREADY_CORRECT if label != IRREVERSIBLE_TIE
                          else IRREVERSIBLE_TIE)

    active = state.active.copy()
    while True:
        if iterations >= cap:
            raise RuntimeError("deactivation loop exceeded |A0| + 8 iterations")
        g = gradient(network, state, cnode)
        v = velocity(network, state, g)
        tstar, hit = step_size(state, v)
        b[active] += tstar * g[network.dst[active]]
        active[hit] = False
        state = evaluate(network, b, d, active=active)
        gone = active & ~state.active  # ratio ties beyond the window
        active = state.active.copy()
        iterations += 1
        for layer in dst_layer[hit]:
            deact[int(layer)] += 1
        for layer in dst_layer[gone]:
            deact[int(layer)] += 1
        done, label = done_and_label()
        if done:
            break

    # conservative finalization: inactive edges need no more bias than the
    # value now arriving at their source (and never less than they started
    # with); active edges keep the evolved bias
    inactive = ~active
    b[inactive] = np.maximum(b0[inactive], state.x[network.src[inactive]])
    return SdaOutcome(b, iterations, label, deact)
