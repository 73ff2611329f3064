"""Classical function tables and derived families.

A FunctionTable is the dense truth table of f: {0,1}^n -> {0,1}^m.
Bit strings are big-endian: the first (leading) bit of an n-bit input
is its most significant bit, so a prefix of k bits selects a block of
2^(n-k) consecutive table entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class BitString:
    width: int
    value: int

    def __post_init__(self):
        if self.width < 0 or not (0 <= self.value < (1 << self.width) or self.width == 0 and self.value == 0):
            raise ValueError(f"value {self.value} does not fit in {self.width} bits")

    def bit(self, i: int) -> int:
        """Bit i counted from the most significant end (big-endian)."""
        return (self.value >> (self.width - 1 - i)) & 1

    def concat(self, other: "BitString") -> "BitString":
        return BitString(self.width + other.width,
                         (self.value << other.width) | other.value)

    def split(self, k: int) -> tuple["BitString", "BitString"]:
        """(first k bits, remaining width-k bits)."""
        low_width = self.width - k
        return (BitString(k, self.value >> low_width),
                BitString(low_width, self.value & ((1 << low_width) - 1)))


class FunctionTable:
    """Truth table of f: {0,1}^n -> {0,1}^m as 2^n unsigned words."""

    __slots__ = ("n", "m", "entries")

    def __init__(self, n: int, m: int, entries):
        if n < 0 or m < 1:
            raise ValueError("need n >= 0 and m >= 1")
        arr = np.asarray(entries, dtype=np.uint64)
        if arr.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} entries, got {arr.shape}")
        if m < 64 and np.any(arr >> np.uint64(m)):
            raise ValueError(f"entries do not fit in {m} bits")
        self.n = n
        self.m = m
        self.entries = arr
        self.entries.setflags(write=False)

    def __call__(self, x: int) -> int:
        return int(self.entries[x])

    def __eq__(self, other) -> bool:
        return (isinstance(other, FunctionTable) and self.n == other.n
                and self.m == other.m and bool(np.array_equal(self.entries, other.entries)))

    def __xor__(self, other: "FunctionTable") -> "FunctionTable":
        if (self.n, self.m) != (other.n, other.m):
            raise ValueError("shape mismatch")
        return FunctionTable(self.n, self.m, self.entries ^ other.entries)

    def __repr__(self) -> str:
        return f"FunctionTable(n={self.n}, m={self.m})"


def restrict_prefix(f: FunctionTable, prefix: BitString, k: int) -> FunctionTable:
    """Table of z -> f(prefix ++ z) over n-k input bits."""
    if not (0 <= k <= f.n):
        raise ValueError(f"k={k} out of range for n={f.n}")
    if prefix.width != k:
        raise ValueError("prefix width must equal k")
    block = 1 << (f.n - k)
    start = prefix.value * block
    return FunctionTable(f.n - k, f.m, f.entries[start:start + block])


@dataclass(frozen=True, slots=True)
class GFamily:
    k: int
    members: tuple[FunctionTable, ...]  # 2^k + 1 tables over n-k inputs


def build_g_family(f: FunctionTable, k: int) -> GFamily:
    """g_0 = f_0, g_l = f_{l-1} xor f_l, g_{2^k} = f_{2^k-1}.

    Telescoping: f_l(z) = xor of g_0..g_l = xor of g_{l+1}..g_{2^k}.
    """
    if not (1 <= k < f.n):
        raise ValueError(f"k={k} out of range for n={f.n}")
    parts = [restrict_prefix(f, BitString(k, l), k) for l in range(1 << k)]
    members = [parts[0]]
    for l in range(1, 1 << k):
        members.append(parts[l - 1] ^ parts[l])
    members.append(parts[-1])
    return GFamily(k=k, members=tuple(members))


def shift_input(f: FunctionTable, b: BitString) -> FunctionTable:
    """Table of x -> f(x xor b)."""
    if b.width != f.n:
        raise ValueError("shift width must equal n")
    idx = np.arange(1 << f.n, dtype=np.uint64) ^ np.uint64(b.value)
    return FunctionTable(f.n, f.m, f.entries[idx])


def correction_table(f: FunctionTable, b: BitString) -> FunctionTable:
    """Correction function over n-1 inputs for a leading-bit-1 shift b.

    For b = 1 ++ b': g(z) = f(0 ++ z) xor f(1 ++ (z xor b')).
    A shift with leading bit 0 must be relabeled first (see
    resource.classify_shift); b = 0 is rejected since no correction
    is needed.
    """
    if b.width != f.n:
        raise ValueError("shift width must equal n")
    if b.value == 0:
        raise ValueError("b = 0 needs no correction")
    if b.bit(0) != 1:
        raise ValueError("leading bit of b must be 1 (relabel first)")
    half = 1 << (f.n - 1)
    b_low = b.value & (half - 1)
    low = f.entries[:half]
    high_idx = (np.arange(half, dtype=np.uint64) ^ np.uint64(b_low))
    high = f.entries[half:][high_idx]
    return FunctionTable(f.n - 1, f.m, low ^ high)


def permute_input_bits(f: FunctionTable, perm: tuple[int, ...]) -> FunctionTable:
    """Table of x -> f(x with its bits relabeled by perm).

    perm[i] = j means: bit i of the result's input reads bit j of the
    original input (big-endian positions).  Equivalently the returned
    table satisfies result(x) = f(y) with y_bit[perm[i]] = x_bit[i].
    """
    n = f.n
    if sorted(perm) != list(range(n)):
        raise ValueError("perm must be a permutation of input positions")
    xs = np.arange(1 << n, dtype=np.uint64)
    ys = np.zeros_like(xs)
    for i, j in enumerate(perm):
        bit = (xs >> np.uint64(n - 1 - i)) & np.uint64(1)
        ys |= bit << np.uint64(n - 1 - j)
    return FunctionTable(n, f.m, f.entries[ys])


def random_table(n: int, m: int, seed: int) -> FunctionTable:
    if n < 1 or m < 1:
        raise ValueError("need n, m >= 1")
    rng = np.random.default_rng(seed)
    if m <= 48:
        entries = rng.integers(0, 1 << m, size=1 << n, dtype=np.uint64)
    else:
        low = rng.integers(0, 1 << 48, size=1 << n, dtype=np.uint64)
        high = rng.integers(0, 1 << (m - 48), size=1 << n, dtype=np.uint64)
        entries = (high << np.uint64(48)) | low
    return FunctionTable(n, m, entries)


def all_ones_table(n: int, m: int) -> FunctionTable:
    return FunctionTable(n, m, np.full(1 << n, (1 << m) - 1, dtype=np.uint64))


def save_table(f: FunctionTable, path: str) -> None:
    """File format: header `n m`, then 2^n hex words, one per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{f.n} {f.m}\n")
        for word in f.entries:
            fh.write(f"{int(word):x}\n")


def load_table(path: str) -> FunctionTable:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: bad header, expected `n m`")
        n, m = int(header[0]), int(header[1])
        entries = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                entries.append(int(line, 16))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not a hex word: {line!r}") from exc
    if len(entries) != 1 << n:
        raise ValueError(f"{path}: expected {1 << n} entries, got {len(entries)}")
    return FunctionTable(n, m, entries)
