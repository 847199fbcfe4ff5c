"""SOPI values and the symbol-ID permutations they define.

A SOPI ``(A, B)`` orders the ``N`` symbol IDs of an object as
``A, A + B, A + 2B, ...`` taken mod ``N``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .modarith import FieldParams, mod_mul_add


@functools.total_ordering
@dataclass(frozen=True, eq=True)
class Sopi:
    A: int
    B: int

    def __lt__(self, other: "Sopi") -> bool:
        if not isinstance(other, Sopi):
            return NotImplemented
        return (self.B, self.A) < (other.B, other.A)

    def check(self, params: FieldParams) -> "Sopi":
        if not 0 <= self.A < params.N:
            raise ValueError(f"A={self.A} outside [0, {params.N - 1}]")
        if not 1 <= self.B < params.N:
            raise ValueError(f"B={self.B} outside [1, {params.N - 1}]")
        return self

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B}

    @classmethod
    def from_json(cls, obj: dict) -> "Sopi":
        return cls(int(obj["A"]), int(obj["B"]))

    def __str__(self) -> str:
        return f"{self.A}:{self.B}"

    @classmethod
    def parse(cls, text: str) -> "Sopi":
        a, sep, b = text.strip().partition(":")
        if not sep:
            raise ValueError(f"expected 'A:B', got {text!r}")
        return cls(int(a), int(b))


@dataclass(frozen=True)
class PrefixSpec:
    """The first ``length`` positions of the stream object for ``sopi``."""

    sopi: Sopi
    length: int


def symbol_id_at(sopi: Sopi, i: int, params: FieldParams) -> int:
    if not 0 <= i < params.N:
        raise ValueError(f"position {i} outside [0, {params.N})")
    return mod_mul_add(sopi.A, i, sopi.B, params)


def prefix(spec: PrefixSpec, params: FieldParams) -> list[int]:
    sopi = spec.sopi.check(params)
    if not 0 <= spec.length <= params.N:
        raise ValueError(f"prefix length {spec.length} outside [0, {params.N}]")
    return [mod_mul_add(sopi.A, i, sopi.B, params) for i in range(spec.length)]


def prefix_array(sopi: Sopi, length: int, params: FieldParams, start: int = 0) -> np.ndarray:
    """Vectorised ``prefix`` returning an int64 array (positions start..start+length-1)."""
    if start < 0 or start + length > params.N:
        raise ValueError(f"positions [{start}, {start + length}) exceed N={params.N}")
    # i*B < 2^62 for N <= 2^31 - 1, so int64 never overflows here
    i = np.arange(start, start + length, dtype=np.int64)
    return (sopi.A + i * sopi.B) % params.N


def random_sopi(rng: np.random.Generator, params: FieldParams) -> Sopi:
    """Draw A uniformly from [0, N-1] and B from [1, N-1]."""
    a = int(rng.integers(0, params.N))
    b = int(rng.integers(1, params.N))
    return Sopi(a, b)


def make_rng(seed: int | None, *stream: int) -> np.random.Generator:
    """PCG64 generator keyed by ``(seed, *stream)`` via numpy's SeedSequence.

    Distinct stream tuples give statistically independent substreams, so
    trial ``k`` of an experiment can be reproduced without replaying 0..k-1.
    """
    if seed is None:
        return np.random.default_rng()
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))
