"""Synthetic learning problems: number-theoretic majority functions, Markov
chain direction discrimination, and small Boolean function suites.

Class labels are always output-node indices (0-based).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .encode import Sample, encode_boolean, encode_symbolic
from .rng import SplitMix64


# -- number-theoretic majority functions -------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class NmfSpec:
    """f^n_a over arguments z_1..z_{p-1}:

        f^0_a(z) = z_a
        f^n_a(z) = MAJ_{k=1,2,3}( f^{n-1}_{(k a b) mod p}  XOR  z(k a c) )

    with the constant negation flag z(x) = ((x mod p) mod 2).  p must be a
    prime >= 5 so the multipliers 1, 2, 3 never map an index to 0.
    """

    p: int = 31
    b: int = 2
    c: int = 3
    n: int = 1
    a: int = 1

    def __post_init__(self):
        if not _is_prime(self.p) or self.p < 5:
            raise ValueError("p must be a prime >= 5")
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not 1 <= v < self.p:
                raise ValueError(f"{name} must be in 1..p-1")
        if self.n < 0:
            raise ValueError("n must be >= 0")


def nmf_eval_batch(spec: NmfSpec, z: np.ndarray) -> np.ndarray:
    """Evaluate f^n_a for a batch of argument rows (shape (m, p-1), 0/1)."""
    z = np.asarray(z)
    p = spec.p
    if z.ndim != 2 or z.shape[1] != p - 1:
        raise ValueError(f"arguments must have shape (m, {p - 1})")
    level = z.astype(np.uint8)
    cols = np.arange(1, p, dtype=np.int64)  # function index a per column
    for _ in range(spec.n):
        votes = np.zeros(level.shape, dtype=np.uint8)
        for k in (1, 2, 3):
            idx = (k * cols * spec.b) % p
            assert (idx != 0).all()
            flag = ((k * cols * spec.c) % p) % 2
            votes += level[:, idx - 1] ^ flag.astype(np.uint8)
        level = (votes >= 2).astype(np.uint8)
    return level[:, spec.a - 1]


def nmf_eval(spec: NmfSpec, z) -> int:
    return int(nmf_eval_batch(spec, np.asarray(z)[None, :])[0])


def nmf_arguments(spec: NmfSpec, count: int, seed: int) -> np.ndarray:
    """`count` random argument rows; bit (row, col) is the top bit of one
    next_u64() word, drawn row-major."""
    rng = SplitMix64(seed)
    words = rng.u64_array(count * (spec.p - 1))
    return (words >> np.uint64(63)).astype(np.uint8).reshape(count, spec.p - 1)


def nmf_dataset(spec: NmfSpec, count: int, seed: int) -> list[Sample]:
    """Doubled-encoded samples (2(p-1) components) labeled by f^n_a."""
    z = nmf_arguments(spec, count, seed)
    f = nmf_eval_batch(spec, z)
    out = []
    for row, label in zip(z, f):
        d = np.empty(2 * len(row), dtype=np.float64)
        d[0::2] = row
        d[1::2] = 1 - row
        out.append(Sample(d, int(label)))
    return out


# -- Markov chain direction discrimination ------------------------------------

MARKOV_ALPHABET = "ABCD"

# doubly stochastic transition matrix, rows = current symbol; class 0 strings
# follow T, class 1 strings follow T transposed
MARKOV_T = np.array([[1, 2, 1, 6],
                     [3, 1, 4, 2],
                     [4, 1, 4, 1],
                     [2, 6, 1, 1]], dtype=np.float64) / 10.0


def _ratio_exponents(T: np.ndarray):
    """Factor T[a,b]/T[b,a] = 2^x * 3^y; raises if any ratio has another
    prime factor.  Exactness of the rate computation rests on this."""
    T10 = np.rint(T * 10).astype(int)
    if not np.allclose(T * 10, T10):
        raise ValueError("transition entries must be multiples of 0.1")
    if (T10 <= 0).any():
        raise ValueError("transition entries must be positive")
    dx = np.zeros((4, 4), dtype=int)
    dy = np.zeros((4, 4), dtype=int)
    for a in range(4):
        for b in range(4):
            r = Fraction(int(T10[a, b]), int(T10[b, a]))
            num, den = r.numerator, r.denominator
            for val, sign in ((num, 1), (den, -1)):
                while val % 2 == 0:
                    dx[a, b] += sign
                    val //= 2
                while val % 3 == 0:
                    dy[a, b] += sign
                    val //= 3
                if val != 1:
                    raise ValueError("likelihood ratios are not 2^x 3^y")
    return T10, dx, dy


def _ratio_sign(x: int, y: int) -> int:
    """sign(2^x * 3^y - 1) computed exactly."""
    num = 2 ** max(x, 0) * 3 ** max(y, 0)
    den = 2 ** max(-x, 0) * 3 ** max(-y, 0)
    return (num > den) - (num < den)


def markov_optimal_rate(length: int, T: np.ndarray | None = None) -> float:
    """True-positive rate of the exact likelihood-ratio classifier on strings
    generated by T (forward class).  A string equally probable under both
    chains counts for the generating class, so the rate is an achievable
    per-class maximum.

    Exhaustive enumeration, done exactly: every string's likelihood ratio is
    2^x 3^y with integer exponents bounded by the length, so a dynamic program
    over (last symbol, x, y) with integer path weights enumerates all 4^L
    strings without roundoff.  Works for any length.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    T = MARKOV_T if T is None else np.asarray(T, dtype=np.float64)
    t10a, dxa, dya = _ratio_exponents(T)
    # plain Python ints: exponents exceed int64 range for long strings
    T10, dx, dy = t10a.tolist(), dxa.tolist(), dya.tolist()
    states: dict[tuple[int, int, int], int] = {(s, 0, 0): 1 for s in range(4)}
    for _ in range(length - 1):
        nxt: dict[tuple[int, int, int], int] = {}
        for (s, x, y), w in states.items():
            for t in range(4):
                key = (t, x + dx[s][t], y + dy[s][t])
                nxt[key] = nxt.get(key, 0) + w * T10[s][t]
        states = nxt
    total = 4 * 10 ** (length - 1)
    win = sum(w for (s, x, y), w in states.items() if _ratio_sign(x, y) >= 0)
    assert sum(states.values()) == total
    return float(Fraction(win, total))


def markov_optimal_rate_mc(length: int, samples: int = 10**7, seed: int = 7,
                           T: np.ndarray | None = None,
                           chunk: int = 10**6) -> float:
    """Monte Carlo estimate of markov_optimal_rate; per-sample decisions use
    the same exact integer exponents, so only the sampling is stochastic."""
    T = MARKOV_T if T is None else np.asarray(T, dtype=np.float64)
    _, dx, dy = _ratio_exponents(T)
    bounds = np.cumsum(T, axis=1)
    rng = SplitMix64(seed)
    num = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        u = rng.uniform_array(m * length).reshape(m, length)
        sym = np.minimum((u[:, 0] * 4).astype(np.int64), 3)
        x = np.zeros(m, dtype=np.int64)
        y = np.zeros(m, dtype=np.int64)
        for step in range(1, length):
            nxt = (u[:, step][:, None] >= bounds[sym]).sum(axis=1)
            x += dx[sym, nxt]
            y += dy[sym, nxt]
            sym = nxt
        logr = x * np.log(2.0) + y * np.log(3.0)
        tie = (x == 0) & (y == 0)
        num += int((tie | (logr > 0)).sum())
        done += m
    return num / samples


def markov_strings(length: int, count: int, seed: int,
                   T: np.ndarray | None = None) -> list[tuple[int, str]]:
    """(label, string) pairs; labels drawn uniformly (0 = forward chain T,
    1 = reversed chain T transposed), first symbols uniform.

    Draw order: `count` top-of-word class bits, then a count x length block of
    uniforms; row i drives string i (first symbol, then transitions).
    """
    if length < 1 or count < 0:
        raise ValueError("bad length/count")
    T = MARKOV_T if T is None else np.asarray(T, dtype=np.float64)
    rng = SplitMix64(seed)
    labels = (rng.u64_array(count) >> np.uint64(63)).astype(np.int64)
    u = rng.uniform_array(count * length).reshape(count, length)
    mats = np.stack([np.cumsum(T, axis=1), np.cumsum(T.T, axis=1)])
    sym = np.minimum((u[:, 0] * 4).astype(np.int64), 3)
    chars = np.empty((count, length), dtype=np.int64)
    chars[:, 0] = sym
    for step in range(1, length):
        bounds = mats[labels, sym]      # (count, 4)
        sym = (u[:, step][:, None] >= bounds).sum(axis=1)
        chars[:, step] = sym
    out = []
    for lab, row in zip(labels, chars):
        out.append((int(lab), "".join(MARKOV_ALPHABET[s] for s in row)))
    return out


def markov_dataset(length: int, count: int, seed: int,
                   T: np.ndarray | None = None) -> list[Sample]:
    return [Sample(encode_symbolic(s, MARKOV_ALPHABET), lab)
            for lab, s in markov_strings(length, count, seed, T)]


# -- Boolean function suites ---------------------------------------------------

def boolean_dataset(table) -> list[Sample]:
    """All 2^N assignments of a truth table, doubled-encoded; assignment index
    m has z_k = bit k-1 of m; label = table[m]."""
    table = np.asarray(table)
    n = int(np.log2(len(table)))
    if 2**n != len(table) or not np.isin(table, (0, 1)).all():
        raise ValueError("table must be a 0/1 array of length 2^N")
    out = []
    for m in range(len(table)):
        bits = [(m >> k) & 1 for k in range(n)]
        out.append(Sample(encode_boolean(bits), int(table[m])))
    return out


def all_boolean_functions(n_vars: int) -> list[np.ndarray]:
    """All 2^(2^N) truth tables, ordered by table-as-binary-number (bit m of
    the function id is the value on assignment m)."""
    if not 1 <= n_vars <= 3:
        raise ValueError("n_vars must be 1..3")
    size = 2**n_vars
    return [np.array([(fid >> m) & 1 for m in range(size)], dtype=np.int64)
            for fid in range(2**size)]


def named_boolean_functions(n_vars: int) -> dict[str, np.ndarray]:
    """The benchmark functions: constant 0, dictator z1, XOR/parity, AND,
    majority (names f0, f1, f+, fx, f>)."""
    size = 2**n_vars
    m = np.arange(size)
    ones = np.array([bin(v).count("1") for v in m])
    named = {
        "f0": np.zeros(size, dtype=np.int64),
        "f1": (m & 1).astype(np.int64),
        "f+": (ones % 2).astype(np.int64),
    }
    if n_vars == 2:
        named["fx"] = ((m == 3)).astype(np.int64)
    if n_vars == 3:
        named["f>"] = (ones >= 2).astype(np.int64)
    return named
