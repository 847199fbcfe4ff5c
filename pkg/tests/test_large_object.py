import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sopi.core import Sopi, make_rng, symbol_id_at
from sopi.large_object import (
    RAPTORQ_KMAX,
    LargeSopi,
    block_structure,
    large_prefix_arrays,
    large_symbol_at,
    partition,
    random_large_sopi,
    split_object,
)
from sopi.modarith import RAPTORQ, FieldParams

P = FieldParams(10007)


@pytest.mark.parametrize(
    "kt, z, expected",
    [(10, 3, (4, 3, 1, 2)), (12, 3, (4, 4, 0, 3)), (777, 1, (777, 777, 0, 1)), (5, 5, (1, 1, 0, 5))],
)
def test_partition_examples(kt, z, expected):
    kl, ks, zl, zs = partition(kt, z)
    assert (kl, ks, zl, zs) == expected
    assert zl * kl + zs * ks == kt


@pytest.mark.parametrize("kt, z", [(0, 1), (3, 0), (3, 4)])
def test_partition_rejects(kt, z):
    with pytest.raises(ValueError):
        partition(kt, z)


@given(st.integers(1, 10**6).flatmap(lambda kt: st.tuples(st.just(kt), st.integers(1, kt))))
def test_partition_conservation(args):
    kt, z = args
    kl, ks, zl, zs = partition(kt, z)
    assert zl * kl + zs * ks == kt
    assert zl + zs == z
    assert kl - ks in (0, 1)


def test_block_structure_small_example():
    bs = block_structure(50, 4, 16)
    assert (bs.Kt, bs.Kmax, bs.Z) == (13, 4, 4)
    assert (bs.KL, bs.KS, bs.ZL, bs.ZS) == (4, 3, 1, 3)
    assert bs.to_json() == {"F": 50, "T": 4, "WS": 16, "Kt": 13, "Z": 4, "KL": 4, "KS": 3, "ZL": 1, "ZS": 3}


def test_block_structure_single_symbol():
    bs = block_structure(1400, 1400, 5000)
    assert (bs.Kt, bs.Z, bs.KL) == (1, 1, 1)


def test_block_structure_raptorq_single_block_boundary():
    ws = 1400 * RAPTORQ_KMAX
    assert block_structure(RAPTORQ_KMAX * 1400, 1400, ws, RAPTORQ_KMAX).Z == 1
    assert block_structure(RAPTORQ_KMAX * 1400 + 1, 1400, ws).Z == 2
    # 80e6 bytes needs 57143 symbols, one block too many
    assert block_structure(80 * 10**6, 1400, ws).Z == 2


def test_block_structure_rejects():
    with pytest.raises(ValueError):
        block_structure(10, 0, 10)
    with pytest.raises(ValueError):
        block_structure(10, 8, 7)
    with pytest.raises(ValueError):
        block_structure(0, 8, 16)
    with pytest.raises(ValueError):
        block_structure(10, 1, 56404, RAPTORQ_KMAX)


def test_split_object_layout_and_padding():
    data = bytes(range(50))
    bs = block_structure(50, 4, 16)
    blocks = split_object(data, bs)
    assert [len(b) for b in blocks] == [4, 3, 3, 3]
    assert all(len(sym) == 4 for b in blocks for sym in b)
    flat = b"".join(sym for b in blocks for sym in b)
    assert flat[:50] == data and flat[50:] == b"\x00\x00"
    assert blocks[0][0] == bytes([0, 1, 2, 3]) and blocks[1][0] == bytes(range(16, 20))


def test_large_symbol_at_example():
    p = LargeSopi(0, 1, 0, 1)
    got = [tuple(large_symbol_at(p, i, 3, P)) for i in range(6)]
    assert got == [(0, 0), (1, 0), (2, 0), (1, 1), (2, 1), (0, 1)]


def test_large_symbol_at_range():
    p = LargeSopi(0, 1, 0, 1)
    large_symbol_at(p, 3 * P.N - 1, 3, P)
    with pytest.raises(ValueError):
        large_symbol_at(p, 3 * P.N, 3, P)
    with pytest.raises(ValueError):
        large_symbol_at(p, 0, 0, P)


@pytest.mark.parametrize("z", [2, 3, 7])
def test_aligned_groups_share_id_and_permute_blocks(z):
    rng = make_rng(31, z)
    for _ in range(50):
        p = random_large_sopi(rng, P)
        for r in (0, 1, 2, 500, P.N - 1):
            refs = [large_symbol_at(p, r * z + k, z, P) for k in range(z)]
            assert len({ref.symbol_id for ref in refs}) == 1
            assert sorted(ref.block_index for ref in refs) == list(range(z))


def test_single_block_matches_two_component_sopi():
    rng = make_rng(8)
    for _ in range(20):
        p = random_large_sopi(rng, RAPTORQ)
        for i in (0, 1, 2, 12345, RAPTORQ.N - 1):
            ref = large_symbol_at(p, i, 1, RAPTORQ)
            assert ref.block_index == 0
            assert ref.symbol_id == symbol_id_at(Sopi(p.A, p.B), i, RAPTORQ)


def test_prefix_arrays_match_scalar_path():
    rng = make_rng(4)
    for z in (1, 2, 5):
        p = random_large_sopi(rng, P)
        blocks, ids = large_prefix_arrays(p, 40, z, P)
        assert list(zip(blocks.tolist(), ids.tolist())) == [tuple(large_symbol_at(p, i, z, P)) for i in range(40)]


def test_per_block_balance():
    p = random_large_sopi(make_rng(12), P)
    blocks, _ = large_prefix_arrays(p, 11 * 7, 7, P)
    assert np.bincount(blocks, minlength=7).tolist() == [11] * 7


def test_random_large_sopi_reproducible_and_valid():
    a = random_large_sopi(make_rng(3), RAPTORQ)
    assert a == random_large_sopi(make_rng(3), RAPTORQ)
    rng = make_rng(4)
    for _ in range(1000):
        random_large_sopi(rng, P).check(P)
    assert LargeSopi.from_json(a.to_json()) == a


def test_first_group_shift_is_uniform():
    z, draws = 5, 10_000
    rng = make_rng(17)
    shifts = np.array([random_large_sopi(rng, P).C % z for _ in range(draws)])
    counts = np.bincount(shifts, minlength=z)
    sigma = np.sqrt(draws * (1 / z) * (1 - 1 / z))
    assert np.all(np.abs(counts - draws / z) < 5 * sigma)
