"""Source-block partitioning and the four-component SOPI for multi-block objects."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .modarith import FieldParams, mod_mul_add

RAPTORQ_KMAX = 56403
RAPTORQ_MAX_T = 1 << 16


def partition(kt: int, z: int) -> tuple[int, int, int, int]:
    """Split kt symbols into ZL blocks of KL and ZS blocks of KS symbols."""
    if kt < 1:
        raise ValueError(f"Kt must be >= 1, got {kt}")
    if not 1 <= z <= kt:
        raise ValueError(f"Z must lie in [1, Kt={kt}], got {z}")
    kl = -(-kt // z)
    ks = kt // z
    zl = kt - ks * z
    return kl, ks, zl, z - zl


@dataclass(frozen=True)
class BlockStructure:
    F: int
    T: int
    WS: int
    Kt: int
    Kmax: int
    Z: int
    KL: int
    KS: int
    ZL: int
    ZS: int

    def block_k(self, j: int) -> int:
        """Source symbols in block j (the ZL large blocks come first)."""
        if not 0 <= j < self.Z:
            raise ValueError(f"block index {j} outside [0, {self.Z})")
        return self.KL if j < self.ZL else self.KS

    def block_spans(self) -> list[tuple[int, int]]:
        """(byte offset, byte length) of each block within the padded object."""
        spans, off = [], 0
        for j in range(self.Z):
            n = self.block_k(j) * self.T
            spans.append((off, n))
            off += n
        return spans

    def to_json(self) -> dict:
        out = asdict(self)
        del out["Kmax"]
        return out


def block_structure(F: int, T: int, WS: int, kmax_limit: int | None = None) -> BlockStructure:
    if F < 1:
        raise ValueError(f"object size F must be >= 1, got {F}")
    if T < 1:
        raise ValueError(f"symbol size T must be >= 1, got {T}")
    kmax = WS // T
    if kmax < 1:
        raise ValueError(f"WS={WS} holds no symbol of size T={T}")
    if kmax_limit is not None and kmax > kmax_limit:
        raise ValueError(f"floor(WS/T)={kmax} exceeds the code limit {kmax_limit}")
    kt = -(-F // T)
    z = -(-kt // kmax)
    kl, ks, zl, zs = partition(kt, z)
    return BlockStructure(F, T, WS, kt, kmax, z, kl, ks, zl, zs)


def split_object(data: bytes, structure: BlockStructure) -> list[list[bytes]]:
    """Cut ``data`` into per-block lists of T-byte symbols, zero-padding the tail."""
    if len(data) != structure.F:
        raise ValueError(f"data has {len(data)} bytes, structure expects {structure.F}")
    t = structure.T
    padded = data + bytes(structure.Kt * t - len(data))
    return [
        [padded[off + k * t : off + (k + 1) * t] for k in range(length // t)]
        for off, length in structure.block_spans()
    ]


@dataclass(frozen=True)
class LargeSopi:
    A: int
    B: int
    C: int
    D: int

    def check(self, params: FieldParams) -> "LargeSopi":
        n = params.N
        if not (0 <= self.A < n and 0 <= self.C < n):
            raise ValueError(f"A, C must lie in [0, {n - 1}]: {self}")
        if not (1 <= self.B < n and 1 <= self.D < n):
            raise ValueError(f"B, D must lie in [1, {n - 1}]: {self}")
        return self

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "LargeSopi":
        return cls(int(obj["A"]), int(obj["B"]), int(obj["C"]), int(obj["D"]))


class BlockSymbolRef(NamedTuple):
    block_index: int
    symbol_id: int


def large_symbol_at(p: LargeSopi, i: int, z: int, params: FieldParams) -> BlockSymbolRef:
    """Block and symbol ID at stream position i for an object of z blocks.

    Positions come in aligned groups of z; a group shares one symbol ID and
    visits every block once, in an order shifted by C + r*D.
    """
    if z < 1:
        raise ValueError(f"block count must be >= 1, got {z}")
    if not 0 <= i <= z * params.N - 1:
        raise ValueError(f"position {i} outside [0, {z * params.N - 1}]")
    r = i // z
    j = mod_mul_add(p.A, r, p.B, params)
    jp = (i + p.C + r * p.D) % z
    return BlockSymbolRef(jp, j)


def large_prefix_arrays(p: LargeSopi, length: int, z: int, params: FieldParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``large_symbol_at`` over positions 0..length-1: (blocks, ids)."""
    if length > z * params.N:
        raise ValueError("prefix longer than the stream")
    i = np.arange(length, dtype=np.int64)
    r = i // z
    ids = (p.A + r * p.B) % params.N
    blocks = (i + p.C % z + r * (p.D % z)) % z
    return blocks, ids


def random_large_sopi(rng: np.random.Generator, params: FieldParams) -> LargeSopi:
    n = params.N
    a, c = (int(v) for v in rng.integers(0, n, size=2))
    b, d = (int(v) for v in rng.integers(1, n, size=2))
    return LargeSopi(a, b, c, d)


def max_single_block_size(T: int, kmax: int = RAPTORQ_KMAX) -> int:
    """Largest object (bytes) that still fits in one source block."""
    return kmax * T


def max_object_size(T: int, params: FieldParams, kmax: int = RAPTORQ_KMAX) -> int:
    """Largest object (bytes) addressable with up to N source blocks."""
    return params.N * kmax * T
