"""Training loops and batched evaluation.

An item triggers an update only when its mode's goal is unmet:

  ultra       the true class is not the strict argmin of the outputs
  aggressive  additionally, the true class output is not yet (numerically)
              zero; items already at zero but tied with another zero output
              are counted as errors without any update (irreversible ties)

Every trigger counts toward #err, whether or not biases move.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .dynamics import evaluate, zero_eps
from .encode import Sample
from .network import Network
from .sda import AGGRESSIVE, IRREVERSIBLE_TIE, ULTRA, sda_update


class BatchEvaluator:
    """Evaluates many items against one network, chunked so the node-value
    matrix stays small.  Per-node sums run over edges in canonical order, so
    outputs match dynamics.evaluate bit for bit."""

    def __init__(self, network: Network, chunk: int = 128,
                 n_threads: int | None = None):
        self.network = network
        self.chunk = max(1, chunk)
        self.n_threads = n_threads
        self._layers = []
        self._ids = {}                          # (layer index, rows) -> flat bin ids
        for layer in range(1, len(network.layer_sizes)):
            sl = network.dst_layer_edges(layer)
            dst = network.dst[sl]
            lo = network.layer_start[layer]
            hi = network.layer_start[layer + 1]
            # uniform in-degree 2 gets a fast path below
            indeg2 = sl.stop > sl.start and np.array_equal(
                dst, np.repeat(np.arange(lo, hi), 2))
            self._layers.append((sl, network.src[sl].copy(), dst - lo, indeg2,
                                 lo, hi, network.weights[lo:hi].copy()))

    def _flat_ids(self, li, m):
        # per-row offset bin ids so one bincount sums every row's segments
        # in edge order, exactly like the bincount in dynamics.evaluate;
        # cached only for the standard chunk size (screening blocks come in
        # many sizes and caching every one of them hoards memory)
        key = (li, m)
        ids = self._ids.get(key)
        if ids is None:
            _, _, seg, _, lo, hi, _ = self._layers[li]
            ids = (np.arange(m)[:, None] * (hi - lo) + seg).ravel()
            if m == self.chunk:
                self._ids[key] = ids
        return ids

    def _forward(self, biases, D, want_active):
        net = self.network
        m = D.shape[0]
        X = np.zeros((m, net.n_nodes))
        X[:, :net.n_inputs] = D
        eps = 1e-12 * np.abs(D).sum(axis=1)     # zero_eps per item
        counts = []
        for li, (sl, src, seg, indeg2, lo, hi, w) in enumerate(self._layers):
            Y = np.take(X, src, axis=1)
            Y -= biases[sl]
            np.maximum(Y, 0.0, out=Y)
            Y *= Y > eps[:, None]               # clamp y <= eps to exactly 0
            if want_active:
                counts.append(int((Y > 0.0).sum()))
            if indeg2:
                # adjacent columns share a dst node; pair-add matches the
                # sequential bincount order of dynamics.evaluate exactly
                sums = Y[:, 0::2] + Y[:, 1::2]
            else:
                sums = np.bincount(self._flat_ids(li, m), weights=Y.ravel(),
                                   minlength=m * (hi - lo)).reshape(m, hi - lo)
            X[:, lo:hi] = w * sums
        return X[:, net.layer_start[-2]:], counts

    def outputs(self, biases: np.ndarray, D: np.ndarray) -> np.ndarray:
        """Output-node values for a block of input rows."""
        return self._forward(biases, np.asarray(D, dtype=np.float64), False)[0]

    def _chunk_stats(self, biases, D, labels):
        outs, counts = self._forward(biases, D, True)
        m = len(labels)
        rows = np.arange(m)
        mins = outs.min(axis=1)
        eps = 1e-12 * np.abs(D).sum(axis=1)      # = tie_window per item
        winners = outs <= (mins + eps)[:, None]
        acc = float((winners[rows, labels] / winners.sum(axis=1)).sum())
        wrong = outs.copy()
        wrong[rows, labels] = np.inf
        zero = int((wrong.min(axis=1) <= eps).sum())
        return acc, np.array(counts, dtype=np.int64), zero

    def stats(self, biases: np.ndarray, samples: Sequence[Sample]) -> "EvalStats":
        if not samples:
            raise ValueError("empty evaluation set")
        biases = np.asarray(biases, dtype=np.float64)
        labels = np.array([s.label for s in samples], dtype=np.int64)
        D = np.array([np.asarray(s.input, dtype=np.float64) for s in samples])
        blocks = [(D[i:i + self.chunk], labels[i:i + self.chunk])
                  for i in range(0, len(samples), self.chunk)]
        if self.n_threads and self.n_threads > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(self.n_threads) as pool:
                parts = list(pool.map(
                    lambda blk: self._chunk_stats(biases, *blk), blocks))
        else:
            parts = [self._chunk_stats(biases, *blk) for blk in blocks]
        acc = sum(p[0] for p in parts)          # fixed chunk order
        counts = sum(p[1] for p in parts)
        zero = sum(p[2] for p in parts)
        n = len(samples)
        net = self.network
        layer_edges = np.array([sl.stop - sl.start
                                for sl, *_ in self._layers], dtype=np.int64)
        # report active fractions for edges into node layers 2..h+1 only
        alphas = counts[1:] / (layer_edges[1:] * n)
        return EvalStats(acc / n, alphas, zero / n, n)


@dataclass
class EvalStats:
    accuracy: float
    alphas: np.ndarray          # one entry per hidden layer (layers 1..h)
    zero_err: float             # fraction with a wrong-class output at zero
    n_items: int


def evaluate_dataset(network: Network, biases, samples,
                     chunk: int = 128, n_threads=None) -> EvalStats:
    return BatchEvaluator(network, chunk, n_threads).stats(biases, samples)


def _needs_update(mode: str, outs: np.ndarray, label: int, eps: float) -> bool:
    xc = outs[label]
    strict = (outs > xc + eps).sum() == len(outs) - 1
    if mode == ULTRA:
        return not strict
    if mode == AGGRESSIVE:
        return xc > eps or not strict
    raise ValueError(f"unknown mode: {mode}")


@dataclass
class ReportRow:
    items: int
    err_total: int
    iter_total: int
    iter_per_err_batch: float   # mean iterations per error inside the batch
    stats: EvalStats


@dataclass
class TrainReport:
    rows: list[ReportRow] = field(default_factory=list)

    def header(self) -> str:
        n_alpha = len(self.rows[0].stats.alphas) if self.rows else 0
        alpha = ",".join(f"alpha_{i + 1}" for i in range(n_alpha))
        cols = "items,err_total,iter_total,iter_per_err_batch,acc"
        return cols + ("," + alpha if alpha else "") + ",zero_err"

    def to_csv(self) -> str:
        lines = [self.header()]
        for r in self.rows:
            vals = [str(r.items), str(r.err_total), str(r.iter_total),
                    f"{r.iter_per_err_batch:.6g}", f"{r.stats.accuracy:.10g}"]
            vals += [f"{a:.10g}" for a in r.stats.alphas]
            vals.append(f"{r.stats.zero_err:.10g}")
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


@dataclass
class TrainResult:
    biases: np.ndarray
    report: TrainReport
    items: int
    err_total: int
    iter_total: int
    ambiguous_total: int
    peak_accuracy: float
    reached_full_accuracy: bool
    stopped: str                # max_items | stream_end | zero_err | full_accuracy


def train_online(network: Network, biases, stream: Iterable[Sample],
                 mode: str = ULTRA, max_items: int = 10000,
                 test_samples: Sequence[Sample] | None = None,
                 batch: int = 1000, stop_zero_err: float | None = None,
                 stop_at_full_accuracy: bool = False,
                 chunk: int = 128, n_threads=None) -> TrainResult:
    """Single-presentation training on a stream, with a test-set report row
    before training and after every `batch` items.

    Items are screened in blocks with the batched evaluator; an update
    invalidates the screening of the items behind it in the block, so those
    are re-screened at the new biases.  Block size shrinks to 8 after an
    update and doubles (up to 1024) after each clean block, so the screening
    cost adapts to the error rate.
    """
    b = np.asarray(biases, dtype=np.float64).copy()
    ev = BatchEvaluator(network, chunk, n_threads)
    report = TrainReport()
    err_total = iter_total = ambiguous = items = 0
    batch_err = batch_iter = 0
    peak = 0.0
    full = False
    stopped = "max_items"

    def test_row():
        nonlocal peak, full, batch_err, batch_iter
        if test_samples is None:
            return None
        st = ev.stats(b, test_samples)
        per = batch_iter / batch_err if batch_err else 0.0
        report.rows.append(ReportRow(items, err_total, iter_total, per, st))
        batch_err = batch_iter = 0
        peak = max(peak, st.accuracy)
        full = full or st.accuracy == 1.0
        return st

    test_row()
    it: Iterator[Sample] = iter(stream)
    pending: list[Sample] = []
    block = 8
    next_report = batch
    stop = False
    while not stop and items < max_items:
        while len(pending) < block:
            take = min(block - len(pending), max_items - items - len(pending),
                       next_report - items - len(pending))
            if take <= 0:
                break
            got = []
            for _ in range(take):
                try:
                    got.append(next(it))
                except StopIteration:
                    stop = True
                    stopped = "stream_end"
                    break
            pending.extend(got)
            if stop or len(got) < take:
                break
        if not pending:
            if stop or items >= max_items:
                break
            st = test_row()
            next_report += batch
            if st is not None:
                if stop_zero_err is not None and st.zero_err > stop_zero_err:
                    stopped = "zero_err"
                    break
                if stop_at_full_accuracy and st.accuracy == 1.0:
                    stopped = "full_accuracy"
                    break
            continue
        D = np.array([np.asarray(s.input, dtype=np.float64) for s in pending])
        outs = ev.outputs(b, D)
        # vectorized _needs_update over the block; first hit wins
        rows = np.arange(len(pending))
        labels = np.array([s.label for s in pending], dtype=np.int64)
        eps = 1e-12 * np.abs(D).sum(axis=1)
        xc = outs[rows, labels]
        others = outs.copy()
        others[rows, labels] = np.inf
        trig = others.min(axis=1) <= xc + eps
        if mode == AGGRESSIVE:
            trig |= xc > eps
        hits = np.flatnonzero(trig)
        dirty = hits.size > 0
        if dirty:
            i = int(hits[0])
            s = pending[i]
            out = sda_update(network, b, np.asarray(s.input, np.float64),
                             s.label, mode=mode, in_place=True)
            err_total += 1
            batch_err += 1
            iter_total += out.iterations
            batch_iter += out.iterations
            ambiguous += out.terminal == IRREVERSIBLE_TIE
            consumed = i + 1
        else:
            consumed = len(pending)
        items += consumed
        pending = pending[consumed:]
        block = 8 if dirty else min(block * 2, 1024)
        if items >= next_report:
            st = test_row()
            next_report += batch
            if st is not None:
                if stop_zero_err is not None and st.zero_err > stop_zero_err:
                    stopped = "zero_err"
                    break
                if stop_at_full_accuracy and st.accuracy == 1.0:
                    stopped = "full_accuracy"
                    break
    if items >= max_items and stopped == "stream_end":
        stopped = "max_items"
    if report.rows and report.rows[-1].items != items:
        test_row()
    return TrainResult(b, report, items, err_total, iter_total, ambiguous,
                       peak, full, stopped)


@dataclass
class TrialResult:
    success: bool
    err: int
    iters: int
    passes: int
    ambiguous: int
    biases: np.ndarray
    deactivated_layers: dict


def train_to_convergence(network: Network, biases, samples: Sequence[Sample],
                         mode: str = ULTRA, max_passes: int = 200) -> TrialResult:
    """Repeat passes over a fixed item sequence until one pass triggers no
    update at all; success means such a pass occurred within max_passes."""
    b = np.asarray(biases, dtype=np.float64).copy()
    err = iters = ambiguous = 0
    deact: dict = {}
    for p in range(1, max_passes + 1):
        clean = True
        for s in samples:
            d = np.asarray(s.input, dtype=np.float64)
            state = evaluate(network, b, d)
            outs = state.outputs(network)
            if not _needs_update(mode, outs, s.label, zero_eps(d)):
                continue
            clean = False
            out = sda_update(network, b, d, s.label, mode=mode, in_place=True)
            err += 1
            iters += out.iterations
            ambiguous += out.terminal == IRREVERSIBLE_TIE
            for layer, n in out.deactivated_layers.items():
                deact[layer] = deact.get(layer, 0) + n
        if clean:
            return TrialResult(True, err, iters, p, ambiguous, b, deact)
    return TrialResult(False, err, iters, max_passes, ambiguous, b, deact)
