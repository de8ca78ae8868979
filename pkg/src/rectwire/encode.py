"""Input encoders and dataset file I/O.

Network inputs must be non-negative and carry information in both directions
(a plain 0 carries nothing through rectifiers), so every encoder doubles:

  boolean   bit z -> (z, 1-z); vector order (z1, nz1, z2, nz2, ...)
  symbolic  one-hot blocks, one per symbol position
  analog    per-channel empirical CDF value theta -> (theta, 1-theta)

Dataset text formats: numeric lines "<class> v1 v2 ... vK"; symbolic files
start with "alphabet <SYMBOLS>" and use lines "<class> <string>".  Class
labels are output-node indices.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .network import FileFormatError


class Sample(NamedTuple):
    input: np.ndarray
    label: int


def encode_boolean(bits) -> np.ndarray:
    """(z1, ..., zN) -> (z1, 1-z1, ..., zN, 1-zN) as float64."""
    z = np.asarray(bits)
    if z.ndim != 1 or not np.isin(z, (0, 1)).all():
        raise ValueError("bits must be a 1-d 0/1 sequence")
    out = np.empty(2 * len(z), dtype=np.float64)
    out[0::2] = z
    out[1::2] = 1 - z
    return out


def encode_symbolic(string: str, alphabet: str) -> np.ndarray:
    """One-hot blocks: position i contributes |alphabet| slots with a single 1."""
    k = len(alphabet)
    index = {ch: i for i, ch in enumerate(alphabet)}
    if len(index) != k:
        raise ValueError("alphabet has repeated symbols")
    out = np.zeros(k * len(string), dtype=np.float64)
    for i, ch in enumerate(string):
        if ch not in index:
            raise ValueError(f"symbol {ch!r} not in alphabet {alphabet!r}")
        out[k * i + index[ch]] = 1.0
    return out


@dataclass
class CdfEncoder:
    """Per-channel empirical CDF fitted on training data.

    theta(v) is the tie-averaged rank of v divided by n, linearly interpolated
    between distinct training values; below the training minimum theta = 0,
    above the maximum theta = 1.  Each channel encodes to the pair
    (theta, 1 - theta), so training marginals are near uniform and the pair
    sums to 1.
    """

    points: list[np.ndarray]    # distinct sorted values per channel
    cdf: list[np.ndarray]       # tie-averaged rank / n per point

    @property
    def n_channels(self) -> int:
        return len(self.points)

    def encode(self, row) -> np.ndarray:
        row = np.asarray(row, dtype=np.float64)
        if row.shape != (self.n_channels,):
            raise ValueError(f"expected {self.n_channels} channels")
        out = np.empty(2 * len(row))
        for i, v in enumerate(row):
            pts, cdf = self.points[i], self.cdf[i]
            if v < pts[0]:
                theta = 0.0
            elif v >= pts[-1]:
                theta = 1.0
            else:
                theta = float(np.interp(v, pts, cdf))
            out[2 * i] = theta
            out[2 * i + 1] = 1.0 - theta
        return out


def fit_cdf(training: np.ndarray) -> CdfEncoder:
    training = np.asarray(training, dtype=np.float64)
    if training.ndim != 2 or training.shape[0] < 2:
        raise ValueError("need a 2-d array with at least 2 training rows")
    if not np.isfinite(training).all():
        raise ValueError("training data must be finite")
    n = training.shape[0]
    points, cdf = [], []
    for col in training.T:
        vals, counts = np.unique(col, return_counts=True)
        upper = np.cumsum(counts)
        avg_rank = upper - (counts - 1) / 2.0
        points.append(vals)
        cdf.append(avg_rank / n)
    return CdfEncoder(points, cdf)


# -- MNIST-style IDX files ---------------------------------------------------

_IDX_IMAGES, _IDX_LABELS = 2051, 2049


def load_idx_images(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) != 16:
            raise FileFormatError("truncated IDX image header")
        magic, n, rows, cols = struct.unpack(">iiii", head)
        if magic != _IDX_IMAGES:
            raise FileFormatError(f"bad IDX image magic {magic}")
        data = fh.read(n * rows * cols)
    if len(data) != n * rows * cols:
        raise FileFormatError("truncated IDX image data")
    return np.frombuffer(data, dtype=np.uint8).reshape(n, rows * cols)


def load_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(8)
        if len(head) != 8:
            raise FileFormatError("truncated IDX label header")
        magic, n = struct.unpack(">ii", head)
        if magic != _IDX_LABELS:
            raise FileFormatError(f"bad IDX label magic {magic}")
        data = fh.read(n)
    if len(data) != n:
        raise FileFormatError("truncated IDX label data")
    return np.frombuffer(data, dtype=np.uint8)


def load_mnist_binarized(images_path, labels_path, threshold: float = 0.4):
    """IDX image/label pair -> list of Samples with doubled binarized pixels:
    pixel >= threshold * 255 encodes as (1, 0), else (0, 1)."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if len(images) != len(labels):
        raise FileFormatError("image/label counts differ")
    if labels.max(initial=0) > 9:
        raise FileFormatError("label outside 0..9")
    cut = threshold * 255.0
    out = []
    for img, lab in zip(images, labels):
        bits = (img >= cut).astype(np.uint8)
        d = np.empty(2 * len(bits), dtype=np.uint8)
        d[0::2] = bits
        d[1::2] = 1 - bits
        out.append(Sample(d, int(lab)))
    return out


# -- dataset text files ------------------------------------------------------


def write_dataset(samples, path) -> None:
    with open(path, "w") as fh:
        for d, label in samples:
            vals = " ".join(f"{v:.17g}" for v in np.asarray(d, dtype=np.float64))
            fh.write(f"{label} {vals}\n")


def write_symbolic_dataset(rows, alphabet: str, path) -> None:
    """rows: iterable of (label, string)."""
    with open(path, "w") as fh:
        fh.write(f"alphabet {alphabet}\n")
        for label, s in rows:
            fh.write(f"{label} {s}\n")


def read_dataset(path) -> list[Sample]:
    """Read either dataset format; symbolic files are one-hot encoded."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise FileFormatError("empty dataset file")
    samples = []
    if lines[0].startswith("alphabet"):
        parts = lines[0].split()
        if len(parts) != 2:
            raise FileFormatError("bad alphabet header")
        alphabet = parts[1]
        for ln in lines[1:]:
            try:
                label, s = ln.split()
                samples.append(Sample(encode_symbolic(s, alphabet), int(label)))
            except ValueError as exc:
                raise FileFormatError(f"bad symbolic line {ln!r}: {exc}") from None
        return samples
    width = None
    for ln in lines:
        parts = ln.split()
        try:
            label = int(parts[0])
            d = np.array([float(p) for p in parts[1:]], dtype=np.float64)
        except ValueError:
            raise FileFormatError(f"bad dataset line {ln!r}") from None
        if width is None:
            width = len(d)
        elif len(d) != width:
            raise FileFormatError("inconsistent component count")
        samples.append(Sample(d, label))
    return samples
