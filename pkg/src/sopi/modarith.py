"""Arithmetic modulo a prime N, with a fast path for N = 2^31 - 1."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MERSENNE31 = (1 << 31) - 1
_LIMB_MASK = MERSENNE31
_REDUCE_LIMIT = 1 << 62


@lru_cache(maxsize=64)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldParams:
    """The prime modulus N, i.e. the number of available symbol IDs."""

    N: int = MERSENNE31

    def __post_init__(self) -> None:
        if not isinstance(self.N, int) or self.N < 3:
            raise ValueError(f"modulus must be an integer >= 3, got {self.N!r}")
        if self.N > MERSENNE31:
            raise ValueError(f"modulus {self.N} exceeds 2^31 - 1")
        if not is_prime(self.N):
            raise ValueError(f"modulus {self.N} is not prime")

    @property
    def is_mersenne31(self) -> bool:
        return self.N == MERSENNE31


RAPTORQ = FieldParams(MERSENNE31)


def mersenne_reduce(x: int, a: int = 0) -> int:
    """Return (a + x) mod 2^31 - 1 for 0 <= x < 2^62 and 0 <= a < 2^31 - 1.

    x is split into two 31-bit limbs which are summed with the addend;
    the sum is below 3N so two conditional subtractions finish the job.
    """
    if x < 0 or x >= _REDUCE_LIMIT:
        raise ValueError(f"mersenne_reduce input out of range [0, 2^62): {x}")
    c = a + (x & _LIMB_MASK) + (x >> 31)
    if c >= MERSENNE31:
        c -= MERSENNE31
    if c >= MERSENNE31:
        c -= MERSENNE31
    return c


def mod_mul_add(a: int, i: int, b: int, params: FieldParams) -> int:
    """Return (a + i*b) mod N."""
    n = params.N
    if not (0 <= a < n and 0 <= i < n and 0 <= b < n):
        raise ValueError(f"operands must lie in [0, {n}): a={a}, i={i}, b={b}")
    if params.is_mersenne31:
        return mersenne_reduce(i * b, a)
    return (a + i * b) % n


def mod_inv(a: int, params: FieldParams) -> int:
    n = params.N
    if not 0 < a < n:
        raise ValueError(f"no inverse for {a} modulo {n}")
    return pow(a, -1, n)


def centered(x: int, n: int) -> int:
    """Representative of x mod n in (-n/2, n/2)."""
    r = x % n
    return r - n if r > n // 2 else r
