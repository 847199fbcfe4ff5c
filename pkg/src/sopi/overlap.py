"""Duplicate counting between stream-object prefixes and the bounds on it.

Two strides ``B0`` and ``B1`` interact through offset pairs ``(d0, d1)``
with ``d0*B0 == d1*B1 (mod N)``: once two prefixes share a symbol ID at
positions ``(p0, p1)``, they share another at ``(p0 + d0, p1 + d1)``.
The B-distance is ``|d0| + |d1|`` for the smallest such pair with both
offsets in ``D = {-M+1..-1} u {1..M-1}``, or ``2M`` when there is none.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .core import PrefixSpec, Sopi, prefix_array
from .modarith import FieldParams, mod_inv


@dataclass(frozen=True)
class DiffSet:
    """Offsets reachable inside prefixes whose total length is at most M."""

    M: int

    def __post_init__(self) -> None:
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")

    def __contains__(self, d: int) -> bool:
        return d != 0 and abs(d) <= self.M - 1

    def __iter__(self):
        yield from range(-self.M + 1, 0)
        yield from range(1, self.M)

    def __len__(self) -> int:
        return 2 * (self.M - 1)


@dataclass(frozen=True)
class DistanceResult:
    matched: bool
    d0: int
    d1: int
    distance: int

    @property
    def kind(self) -> str:
        return "matched" if self.matched else "unmatched"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "distance": self.distance}
        if self.matched:
            out["d0"] = self.d0
            out["d1"] = self.d1
        return out


def _as_diffset(diff: DiffSet | int) -> DiffSet:
    return diff if isinstance(diff, DiffSet) else DiffSet(int(diff))


def check_distance_precondition(M: int, params: FieldParams) -> None:
    if 2 * M * M >= params.N:
        raise ValueError(f"M={M} violates M^2 < N/2 for N={params.N}")


def _check_strides(b0: int, b1: int, params: FieldParams) -> None:
    for b in (b0, b1):
        if not 1 <= b < params.N:
            raise ValueError(f"stride {b} outside [1, {params.N - 1}]")


def matches(d0: int, d1: int, b0: int, b1: int, params: FieldParams) -> bool:
    """True iff d0*B0 == d1*B1 (mod N); negative offsets are taken mod N."""
    n = params.N
    return (d0 % n) * b0 % n == (d1 % n) * b1 % n


def distance(b0: int, b1: int, diff: DiffSet | int, params: FieldParams) -> DistanceResult:
    """B-distance in O(M): for each d0 > 0 the only candidate d1 is d0*B0/B1."""
    diff = _as_diffset(diff)
    M, n = diff.M, params.N
    _check_strides(b0, b1, params)
    check_distance_precondition(M, params)
    ratio = b0 * mod_inv(b1, params) % n
    d0 = np.arange(1, M, dtype=np.int64)
    d1 = d0 * ratio % n
    d1 = np.where(d1 > n // 2, d1 - n, d1)
    cost = np.where(np.abs(d1) <= M - 1, d0 + np.abs(d1), 2 * M)
    k = int(np.argmin(cost))
    if cost[k] >= 2 * M:
        return DistanceResult(False, 0, 0, 2 * M)
    return DistanceResult(True, int(d0[k]), int(d1[k]), int(cost[k]))


def distance_many(b0s: Sequence[int], b1: int, M: int, params: FieldParams) -> np.ndarray:
    """B-distance from each of ``b0s`` to ``b1`` (2M where unmatched)."""
    n = params.N
    check_distance_precondition(M, params)
    b0s = np.asarray(b0s, dtype=np.int64)
    if b0s.size == 0:
        return np.empty(0, dtype=np.int64)
    ratios = b0s * mod_inv(b1, params) % n
    d0 = np.arange(1, M, dtype=np.int64)[:, None]
    d1 = d0 * ratios[None, :] % n
    d1 = np.where(d1 > n // 2, d1 - n, d1)
    cost = np.where(np.abs(d1) <= M - 1, d0 + np.abs(d1), 2 * M)
    return cost.min(axis=0)


def distance_bruteforce(b0: int, b1: int, diff: DiffSet | int, params: FieldParams) -> DistanceResult:
    """Exhaustive O(M^2) scan of D x D; reference for ``distance``."""
    diff = _as_diffset(diff)
    M, n = diff.M, params.N
    best = None
    for d0 in range(1, M):
        lhs = d0 * b0 % n
        for d1 in diff:
            if lhs == (d1 % n) * b1 % n:
                cost = d0 + abs(d1)
                if best is None or cost < best[0]:
                    best = (cost, d0, d1)
    if best is None:
        return DistanceResult(False, 0, 0, 2 * M)
    return DistanceResult(True, best[1], best[2], best[0])


class DistinctCount(NamedTuple):
    distinct: int
    duplicates: int
    total: int


def count_distinct(prefixes: Iterable[PrefixSpec], params: FieldParams) -> DistinctCount:
    seen: set[int] = set()
    total = 0
    for spec in prefixes:
        spec.sopi.check(params)
        seen.update(prefix_array(spec.sopi, spec.length, params).tolist())
        total += spec.length
    return DistinctCount(len(seen), total - len(seen), total)


def pair_duplicate_table(p0: Sopi, p1: Sopi, max_len: int, params: FieldParams) -> np.ndarray:
    """``table[m0, m1]`` = shared symbol IDs between prefixes of lengths m0 and m1.

    Each stream is a permutation, so the shared-ID count equals the number
    of colliding position pairs; a 2-D prefix sum over the collision matrix
    yields every split at once.
    """
    ids0 = prefix_array(p0, max_len, params)
    ids1 = prefix_array(p1, max_len, params)
    hit = (ids0[:, None] == ids1[None, :]).astype(np.int64)
    table = np.zeros((max_len + 1, max_len + 1), dtype=np.int64)
    table[1:, 1:] = hit.cumsum(axis=0).cumsum(axis=1)
    return table


def pair_overlap_lower_bound(m: int, d: int) -> int:
    """Fewest distinct IDs two prefixes of total length m can hold at B-distance d."""
    if m < 0 or d < 2:
        raise ValueError(f"need m >= 0 and d >= 2, got m={m}, d={d}")
    if m < 2:
        return m
    return m - (m - 2) // d - 1


def multi_overlap_lower_bound(m: int, s: int, d: int) -> float:
    if s < 1 or m < s:
        raise ValueError(f"need s >= 1 and m >= s, got m={m}, s={s}")
    return m - (s - 1) * ((m - s) / d + s / 2)


def expected_distinct_lower_bound(M: int, params: FieldParams) -> float:
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    return M - (M - 1) ** 2 / (2 * params.N)


def theorem_failure_bound(delta: float, params: FieldParams, M: int | None = None) -> float:
    """Upper bound 1/(delta^2 N) on the chance M random-SOPI symbols miss K = (1-delta)M.

    Saturates at 1. When ``M`` is given the M^2 <= 2N requirement is enforced.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if M is not None and M * M > 2 * params.N:
        raise ValueError(f"M={M} violates M^2 <= 2N for N={params.N}")
    return min(1.0, 1.0 / (delta * delta * params.N))

