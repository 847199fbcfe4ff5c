"""Exit criteria for the package, one test per criterion (criterion 7 split in three).

Run alone with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import itertools
import math
import random
import time

import numpy as np
import pytest

from sopi.cli import GRID_DELTA, GRID_K, GRID_N, GRID_S
from sopi.core import PrefixSpec, Sopi, make_rng, prefix, random_sopi, symbol_id_at
from sopi.design import DesignParams, audit_sopi_set, build_b_set, build_sopi_set, capacity_bounds
from sopi.distribution import NodeGraph, greedy_color, validate_assignment
from sopi.experiments import TrialConfig, designed_overlap_experiment, estimate_failure_probability
from sopi.large_object import (
    RAPTORQ_KMAX,
    RAPTORQ_MAX_T,
    large_prefix_arrays,
    large_symbol_at,
    max_object_size,
    max_single_block_size,
    partition,
    random_large_sopi,
)
from sopi.modarith import MERSENNE31, RAPTORQ, FieldParams, mersenne_reduce
from sopi.overlap import distance, distance_bruteforce, multi_overlap_lower_bound, pair_duplicate_table, pair_overlap_lower_bound

P10007 = FieldParams(10007)


def test_c01_pairwise_uniqueness_n11(criterion):
    start = time.perf_counter()
    n = 11
    params = FieldParams(n)
    perms = [prefix(PrefixSpec(Sopi(a, b), n), params) for a in range(n) for b in range(1, n)]
    assert len(perms) == 110
    exceptions = 0
    for i0, i1 in itertools.permutations(range(n), 2):
        hits = {}
        for perm in perms:
            key = (perm[i0], perm[i1])
            hits[key] = hits.get(key, 0) + 1
        for j0, j1 in itertools.permutations(range(n), 2):
            exceptions += hits.get((j0, j1), 0) != 1
    elapsed = time.perf_counter() - start
    criterion(exceptions == 0 and elapsed < 5, f"{exceptions} exceptions over 12100 quadruples, {elapsed:.2f}s (< 5s)")
    assert exceptions == 0
    assert elapsed < 5


def test_c02_distance_matches_bruteforce(criterion):
    start = time.perf_counter()
    rng = random.Random(1002)
    mismatches = 0
    for _ in range(1000):
        b0, b1 = rng.randrange(1, P10007.N), rng.randrange(1, P10007.N)
        mismatches += distance(b0, b1, 50, P10007) != distance_bruteforce(b0, b1, 50, P10007)
    elapsed = time.perf_counter() - start
    criterion(mismatches == 0 and elapsed < 10, f"{mismatches}/1000 mismatches, {elapsed:.2f}s (< 10s)")
    assert mismatches == 0
    assert elapsed < 10


def _lemma_pairs(count: int):
    """Half from a designed set, half random (every other one forced to collide)."""
    rng = make_rng(1003)
    designed = build_sopi_set(DesignParams(P10007, 101, 60), 40, 3, seed=1003).entries()
    combos = list(itertools.combinations(designed, 2))
    picks = rng.choice(len(combos), size=count // 2, replace=False)
    pairs = [combos[int(k)] for k in picks]
    for k in range(count - len(pairs)):
        p0, p1 = random_sopi(rng, P10007), random_sopi(rng, P10007)
        if k % 2:
            q0, q1 = (int(x) for x in rng.integers(0, 60, size=2))
            p1 = Sopi((p0.A + q0 * p0.B - q1 * p1.B) % P10007.N, p1.B)
        pairs.append((p0, p1))
    return pairs


def test_c03_overlap_lemma_soundness(criterion):
    M = 60
    violations = checked = 0
    for p0, p1 in _lemma_pairs(500):
        d = distance(p0.B, p1.B, M, P10007).distance
        table = pair_duplicate_table(p0, p1, M, P10007)
        for m0 in range(M + 1):
            for m1 in range(M + 1 - m0):
                m = m0 + m1
                checked += 1
                violations += m - table[m0, m1] < pair_overlap_lower_bound(m, d)
    criterion(violations == 0, f"{violations} violations over {checked} (pair, split) cases")
    assert violations == 0


def test_c04_designed_set_duplication_under_1_5_percent(criterion):
    start = time.perf_counter()
    dp = DesignParams(RAPTORQ, 1000, 30000)
    sset = build_sopi_set(dp, 16, 4, seed=1004, strategy="incremental")
    assert not audit_sopi_set(sset)
    rep = designed_overlap_experiment(sset, 10, 30000, 100, seed=1004, distinct_strides=True)
    analytic = (30000 - multi_overlap_lower_bound(30000, 10, 1000)) / 30000
    elapsed = time.perf_counter() - start
    ok = rep.max_fraction < 0.015 and analytic <= 0.0105 and rep.violations == 0 and elapsed < 120
    criterion(
        ok,
        f"max sampled duplication {rep.max_fraction:.4%} (< 1.5%), analytic bound {analytic:.4%} (<= 1.05%), "
        f"{rep.violations} bound violations, {elapsed:.1f}s (< 120s)",
    )
    assert rep.max_fraction < 0.015
    assert analytic <= 0.0105
    assert rep.violations == 0
    assert elapsed < 120


@pytest.mark.slow
def test_c05_theorem_monte_carlo_grid(criterion):
    start = time.perf_counter()
    lines, ok = [], True
    for n in GRID_N:
        for delta in GRID_DELTA:
            for s in GRID_S:
                cfg = TrialConfig(GRID_K[n], delta, s, trials=100_000, seed=7, params=FieldParams(n))
                rep = estimate_failure_probability(cfg)
                bound = 1 / (delta**2 * n)
                assert rep.theorem_bound == pytest.approx(bound)
                good = rep.failure_rate <= bound + 3 * math.sqrt(bound * (1 - bound) / rep.trials_run)
                if n == MERSENNE31:
                    good = good and rep.failures == 0
                ok &= good
                lines.append(f"N={n} d={delta} s={s}: {rep.failures} fails")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    criterion(ok, f"12 configs x 1e5 trials, {elapsed:.0f}s (< 600s); " + "; ".join(lines))
    assert ok


def test_c06_capacity(criterion):
    big = capacity_bounds(DesignParams(RAPTORQ, 101, 30000))["total_lower"]
    mid = capacity_bounds(DesignParams(RAPTORQ, 1000, 30000))["total_lower"]
    assert big == MERSENNE31**2 / (101**2 * 30000)
    assert mid == MERSENNE31**2 / (1000**2 * 30000)
    built = len(build_b_set(DesignParams(P10007, 5, 50), None, "incremental"))
    need = (P10007.N - 1) / 25
    ok = big >= 1.5e10 and mid >= 1.5e8 and built >= need
    criterion(ok, f"d=101: {big:.4g} (>= 1.5e10), d=1000: {mid:.4g} (>= 1.5e8), |B| at N=10007,d=5: {built} (>= {need:.2f})")
    assert big >= 1.5e10
    assert mid >= 1.5e8
    assert built >= need


def test_c07a_partition_conservation(criterion):
    rng = make_rng(1007)
    violations = 0
    for _ in range(10_000):
        kt = int(rng.integers(1, 10**6 + 1))
        z = int(rng.integers(1, kt + 1))
        kl, ks, zl, zs = partition(kt, z)
        violations += not (zl * kl + zs * ks == kt and kl - ks in (0, 1) and zl + zs == z)
    criterion(violations == 0, f"{violations} violations over 1e4 random (Kt, Z)")
    assert violations == 0


def test_c07b_single_block_size_near_80MB(criterion):
    size = max_single_block_size(1400, RAPTORQ_KMAX)
    rel = abs(size - 80e6) / 80e6
    criterion(rel <= 0.01, f"56403 x 1400 = {size} bytes, {rel:.2%} from 80e6 (tolerance 1%)")
    assert rel <= 0.01


def test_c07c_max_object_size_near_8e18(criterion):
    size = max_object_size(RAPTORQ_MAX_T, RAPTORQ, RAPTORQ_KMAX)
    rel = abs(size - 8e18) / 8e18
    criterion(rel <= 0.01, f"(2^31-1) x 56403 x 65536 = {size:.4e} bytes, {rel:.2%} from 8e18 (tolerance 1%)")
    assert rel <= 0.01


def test_c08_large_sopi_cyclic_groups(criterion):
    rng = make_rng(1008)
    bad = 0
    for z in (2, 3, 7):
        for _ in range(1000):
            p = random_large_sopi(rng, P10007)
            blocks, ids = large_prefix_arrays(p, 40 * z, z, P10007)
            blocks, ids = blocks.reshape(40, z), ids.reshape(40, z)
            bad += not (ids == ids[:, :1]).all()
            bad += not (np.sort(blocks, axis=1) == np.arange(z)).all()
            r = int(rng.integers(0, P10007.N))
            refs = [large_symbol_at(p, r * z + k, z, P10007) for k in range(z)]
            bad += len({x.symbol_id for x in refs}) != 1 or sorted(x.block_index for x in refs) != list(range(z))
    for _ in range(1000):
        p = random_large_sopi(rng, RAPTORQ)
        i = int(rng.integers(0, RAPTORQ.N))
        ref = large_symbol_at(p, i, 1, RAPTORQ)
        bad += ref != (0, symbol_id_at(Sopi(p.A, p.B), i, RAPTORQ))
    criterion(bad == 0, f"{bad} failures over 3x1000 random 4-tuples (Z=2,3,7) plus 1000 Z=1 checks")
    assert bad == 0


def test_c09_fast_reduction(criterion):
    rng = random.Random(1009)
    xs = [rng.getrandbits(62) for _ in range(1_000_000)]
    start = time.perf_counter()
    mismatches = sum(mersenne_reduce(x) != x % MERSENNE31 for x in xs)
    elapsed = time.perf_counter() - start
    criterion(mismatches == 0 and elapsed < 5, f"{mismatches}/1e6 mismatches, {elapsed:.2f}s (< 5s)")
    assert mismatches == 0
    assert elapsed < 5


def test_c10_coloring_validity(criterion):
    rng = np.random.default_rng(1010)
    palette = [Sopi(0, b) for b in range(1, 202)]
    bad = 0
    worst = 0
    for _ in range(1000):
        n = int(rng.integers(1, 201))
        p = float(rng.uniform(0, 0.2))
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < p
        nodes = [f"v{k}" for k in range(n)]
        graph = NodeGraph(nodes, [(nodes[a], nodes[b]) for a, b in zip(iu[keep], ju[keep])])
        asg = greedy_color(graph, palette)
        bad += bool(validate_assignment(graph, asg)) or asg.colors_used > graph.max_degree + 1
        worst = max(worst, asg.colors_used)
    criterion(bad == 0, f"{bad}/1000 graphs invalid or over max_degree+1 colours (most colours used: {worst})")
    assert bad == 0
