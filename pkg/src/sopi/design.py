"""Deterministic construction of SOPI sets with bounded prefix overlap.

A designed set is ``{(A, B) : B in Bset, A in Aset(B)}`` where every pair of
strides in ``Bset`` is at B-distance >= d, and for each stride the offsets
in ``Aset(B)`` are spaced ``M*B`` apart so their length-M prefixes never meet.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import Sopi, make_rng, prefix_array
from .modarith import FieldParams, mod_inv
from .overlap import check_distance_precondition, distance

log = logging.getLogger(__name__)

SIEVE_MAX_N = 1 << 24
STRATEGIES = ("incremental", "sieve")


@dataclass(frozen=True)
class DesignParams:
    params: FieldParams
    d: int
    M: int

    def __post_init__(self) -> None:
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")
        check_distance_precondition(self.M, self.params)
        if not 2 <= self.d <= 2 * self.M:
            raise ValueError(f"d must lie in [2, 2M={2 * self.M}], got {self.d}")

    @property
    def N(self) -> int:
        return self.params.N


def capacity_bounds(design: DesignParams) -> dict[str, float]:
    n, d, m = design.N, design.d, design.M
    return {
        "b_lower": (n - 1) / d**2,
        "a_lower": n / m - 1,
        "total_lower": n**2 / (d**2 * m),
    }


def _offset_pairs(design: DesignParams) -> tuple[np.ndarray, np.ndarray]:
    """All (i, j) in D x D with i > 0 and |i| + |j| < d."""
    top = design.M - 1
    i_vals, j_vals = [], []
    for i in range(1, min(top, design.d - 2) + 1):
        reach = min(top, design.d - 1 - i)
        for j in range(1, reach + 1):
            i_vals += [i, i]
            j_vals += [j, -j]
    return np.array(i_vals, dtype=np.int64), np.array(j_vals, dtype=np.int64)


def _build_b_sieve(design: DesignParams, max_count: int | None) -> list[int]:
    n = design.N
    if n > SIEVE_MAX_N:
        raise ValueError(f"sieve strategy limited to N <= 2^24, got N={n}")
    i_vals, j_vals = _offset_pairs(design)
    # i * j^-1 does not depend on B, so the deletion pattern is precomputed once
    ratios = np.array(
        sorted({int(i) * mod_inv(int(j) % n, design.params) % n for i, j in zip(i_vals, j_vals)}),
        dtype=np.int64,
    )
    alive = np.ones(n, dtype=bool)
    alive[0] = False
    chosen: list[int] = []
    cursor = 1
    while max_count is None or len(chosen) < max_count:
        nxt = np.flatnonzero(alive[cursor:])
        if nxt.size == 0:
            break
        b = cursor + int(nxt[0])
        chosen.append(b)
        alive[b] = False
        alive[b * ratios % n] = False
        cursor = b + 1
    return chosen


def _build_b_incremental(design: DesignParams, max_count: int | None) -> list[int]:
    n, M, d = design.N, design.M, design.d
    # a match closer than d needs 1 <= d0 <= d-2 and |d1| <= d-1-d0
    d0 = np.arange(1, min(M - 1, d - 2) + 1, dtype=np.int64)[:, None]
    reach = np.minimum(M - 1, d - 1 - d0)
    accepted = np.empty(0, dtype=np.int64)
    chosen: list[int] = []
    for cand in range(1, n):
        if max_count is not None and len(chosen) >= max_count:
            break
        if accepted.size and d0.size:
            ratios = accepted * mod_inv(cand, design.params) % n
            d1 = d0 * ratios[None, :] % n
            d1 = np.minimum(d1, n - d1)
            if (d1 <= reach).any():
                continue
        chosen.append(cand)
        accepted = np.append(accepted, cand)
    return chosen


def build_b_set(design: DesignParams, max_count: int | None = None, strategy: str = "incremental") -> list[int]:
    """Strides whose pairwise B-distance is at least ``design.d``.

    ``incremental`` scans candidates 1, 2, ... and keeps one when it is far
    enough from everything kept so far; ``sieve`` keeps the smallest live
    candidate and strikes out every ``i*B/j`` with ``|i| + |j| < d``.
    ``max_count=None`` runs to exhaustion.
    """
    if max_count is not None and max_count < 1:
        raise ValueError("max_count must be >= 1")
    if strategy == "incremental":
        return _build_b_incremental(design, max_count)
    if strategy == "sieve":
        return _build_b_sieve(design, max_count)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def build_a_set(
    b: int,
    design: DesignParams,
    max_count: int | None = None,
    seed: int | None = 0,
    first_a: int | None = None,
) -> list[int]:
    n, M = design.N, design.M
    if not 1 <= b < n:
        raise ValueError(f"B={b} outside [1, {n - 1}]")
    if first_a is None:
        first_a = int(make_rng(seed, b).integers(0, n))
    count = n // M if max_count is None else min(max_count, n // M)
    step = M * b % n
    out = [first_a]
    for _ in range(count - 1):
        out.append((out[-1] + step) % n)
    return out


@dataclass
class SopiSet:
    design: DesignParams
    b_values: list[int]
    a_values: dict[int, list[int]]
    seed: int | None = 0
    strategy: str = "incremental"
    _entries: list[Sopi] = field(default=None, init=False, repr=False, compare=False)

    def entries(self) -> list[Sopi]:
        if self._entries is None:
            self._entries = sorted(Sopi(a, b) for b in self.b_values for a in self.a_values[b])
        return self._entries

    def __len__(self) -> int:
        return len(self.entries())

    def to_json(self) -> dict:
        return {
            "N": self.design.N,
            "d": self.design.d,
            "M": self.design.M,
            "seed": self.seed,
            "strategy": self.strategy,
            "entries": [s.to_json() for s in self.entries()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SopiSet":
        design = DesignParams(FieldParams(int(obj["N"])), int(obj["d"]), int(obj["M"]))
        a_values: dict[int, list[int]] = {}
        for e in obj["entries"]:
            s = Sopi.from_json(e).check(design.params)
            a_values.setdefault(s.B, []).append(s.A)
        return cls(design, sorted(a_values), a_values, obj.get("seed"), obj.get("strategy", "incremental"))


def build_sopi_set(
    design: DesignParams,
    b_cap: int | None,
    a_cap: int | None,
    seed: int | None = 0,
    strategy: str = "incremental",
) -> SopiSet:
    b_values = build_b_set(design, b_cap, strategy)
    a_values = {b: build_a_set(b, design, a_cap, seed) for b in b_values}
    log.info("built %d strides x up to %s offsets (N=%d d=%d M=%d)", len(b_values), a_cap, design.N, design.d, design.M)
    return SopiSet(design, b_values, a_values, seed, strategy)


def audit_sopi_set(sopi_set: SopiSet) -> list[str]:
    """Re-check both set guarantees; returns human-readable violations."""
    design = sopi_set.design
    problems = []
    bs = sorted(sopi_set.b_values)
    for k, b0 in enumerate(bs):
        for b1 in bs[k + 1 :]:
            res = distance(b0, b1, design.M, design.params)
            if res.distance < design.d:
                problems.append(f"strides {b0},{b1}: distance {res.distance} < {design.d}")
    for b in bs:
        seen: set[int] = set()
        for a in sopi_set.a_values[b]:
            ids = prefix_array(Sopi(a, b), design.M, design.params).tolist()
            if seen.intersection(ids):
                problems.append(f"stride {b}: prefix of A={a} overlaps an earlier offset")
            seen.update(ids)
    return problems
