"""Monte Carlo checks of the duplicate bounds and a small download simulator.

Every trial draws from its own generator keyed by ``(seed, trial_index)``,
so results do not depend on batch size or on the order trials run in.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core import Sopi, make_rng, prefix_array
from .design import SopiSet
from .distribution import Assignment, select_streams
from .large_object import BlockStructure, LargeSopi, large_prefix_arrays
from .modarith import FieldParams
from .overlap import multi_overlap_lower_bound, theorem_failure_bound

SPLITS = ("equal", "random")


def equal_split(total: int, s: int) -> list[int]:
    q, r = divmod(total, s)
    return [q + 1 if k < r else q for k in range(s)]


def random_split(rng: np.random.Generator, total: int, s: int) -> list[int]:
    """Uniform composition of ``total`` into ``s`` positive parts."""
    if total < s:
        raise ValueError(f"cannot split {total} into {s} positive parts")
    cuts = np.sort(rng.choice(total - 1, size=s - 1, replace=False) + 1) if s > 1 else np.empty(0, np.int64)
    edges = np.concatenate(([0], cuts, [total]))
    return np.diff(edges).astype(int).tolist()


@dataclass(frozen=True)
class TrialConfig:
    K: int
    delta: float
    s: int
    trials: int = 10_000
    seed: int = 0
    split: str = "equal"
    params: FieldParams = field(default_factory=FieldParams)

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.M * self.M > 2 * self.params.N:
            raise ValueError(f"M={self.M} violates M^2 <= 2N for N={self.params.N}")
        if self.M < self.s:
            raise ValueError(f"M={self.M} is smaller than the stream count s={self.s}")

    @property
    def M(self) -> int:
        # decimal delta read exactly so K/(1-delta) integral cases do not round up
        return math.ceil(self.K / (1 - Fraction(str(self.delta))))

    def to_json(self) -> dict:
        out = asdict(self)
        out["N"] = self.params.N
        out["M"] = self.M
        del out["params"]
        return out


@dataclass(frozen=True)
class TrialResult:
    distinct: int
    duplicates: int
    recoverable: bool


def _draw_trial(config: TrialConfig, trial_index: int) -> tuple[np.ndarray, np.ndarray, list[int]]:
    rng = make_rng(config.seed, trial_index)
    n, s = config.params.N, config.s
    a = rng.integers(0, n, size=s)
    b = rng.integers(1, n, size=s)
    lengths = equal_split(config.M, s) if config.split == "equal" else random_split(rng, config.M, s)
    return a, b, lengths


def _distinct_rows(a: np.ndarray, b: np.ndarray, lengths: np.ndarray, n: int) -> np.ndarray:
    """Distinct symbol IDs per trial row, given per-stream offsets/strides/lengths (T x s)."""
    rows, total = lengths.shape[0], int(lengths[0].sum())
    flat_len = lengths.ravel()
    starts = np.cumsum(flat_len) - flat_len
    pos = np.arange(rows * total, dtype=np.int64) - np.repeat(starts, flat_len)
    ids = (np.repeat(a.ravel(), flat_len) + pos * np.repeat(b.ravel(), flat_len)) % n
    ids = np.sort(ids.reshape(rows, total), axis=1)
    return total - (np.diff(ids, axis=1) == 0).sum(axis=1)


def run_random_trial(config: TrialConfig, trial_index: int, sopis: Sequence[Sopi] | None = None) -> TrialResult:
    """One trial: s random SOPIs, prefixes totalling M, count distinct IDs.

    ``sopis`` overrides the random draw (the split is still drawn as usual).
    """
    a, b, lengths = _draw_trial(config, trial_index)
    if sopis is not None:
        if len(sopis) != config.s:
            raise ValueError(f"expected {config.s} SOPIs, got {len(sopis)}")
        a = np.array([p.A for p in sopis], dtype=np.int64)
        b = np.array([p.B for p in sopis], dtype=np.int64)
    distinct = int(_distinct_rows(a[None, :], b[None, :], np.array([lengths]), config.params.N)[0])
    return TrialResult(distinct, config.M - distinct, distinct >= config.K)


def iter_trials(config: TrialConfig, batch: int = 2048) -> Iterator[tuple[int, int]]:
    """Yield ``(trial_index, distinct)`` for every trial, computed in batches."""
    n = config.params.N
    for lo in range(0, config.trials, batch):
        hi = min(config.trials, lo + batch)
        draws = [_draw_trial(config, t) for t in range(lo, hi)]
        a = np.array([d[0] for d in draws], dtype=np.int64)
        b = np.array([d[1] for d in draws], dtype=np.int64)
        lengths = np.array([d[2] for d in draws], dtype=np.int64)
        distinct = _distinct_rows(a, b, lengths, n)
        yield from zip(range(lo, hi), distinct.tolist())


@dataclass
class ExperimentReport:
    config: dict
    trials_run: int
    failures: int
    failure_rate: float
    theorem_bound: float
    sigma: float
    within_bound: bool
    mean_duplicates: float
    max_duplicates: int
    expected_duplicates_bound: float
    wall_time: float

    def to_json(self) -> dict:
        return asdict(self)


def estimate_failure_probability(config: TrialConfig, batch: int = 2048) -> ExperimentReport:
    """Empirical Pr[distinct < K] against the 1/(delta^2 N) bound.

    ``within_bound`` is the one-sided check rate <= bound + 3 sigma, with
    sigma the binomial standard error at the bound.
    """
    start = time.perf_counter()
    M = config.M
    failures = dup_sum = dup_max = 0
    for _, distinct in iter_trials(config, batch):
        dup = M - distinct
        dup_sum += dup
        dup_max = max(dup_max, dup)
        failures += distinct < config.K
    trials = config.trials
    bound = theorem_failure_bound(config.delta, config.params, M)
    sigma = math.sqrt(bound * (1 - bound) / trials)
    rate = failures / trials
    return ExperimentReport(
        config=config.to_json(),
        trials_run=trials,
        failures=failures,
        failure_rate=rate,
        theorem_bound=bound,
        sigma=sigma,
        within_bound=rate <= bound + 3 * sigma,
        mean_duplicates=dup_sum / trials,
        max_duplicates=dup_max,
        expected_duplicates_bound=(M - 1) ** 2 / (2 * config.params.N),
        wall_time=time.perf_counter() - start,
    )


@dataclass
class DesignedReport:
    s: int
    m: int
    d: int
    samples: int
    duplicate_bound: float
    max_duplicates: int
    mean_duplicates: float
    max_fraction: float
    bound_fraction: float
    violations: int
    wall_time: float

    def to_json(self) -> dict:
        return asdict(self)


def _sample_tuple(sopi_set: SopiSet, s: int, rng: np.random.Generator, distinct_strides: bool) -> list[Sopi]:
    if distinct_strides:
        bs = rng.choice(len(sopi_set.b_values), size=s, replace=False)
        out = []
        for k in bs:
            b = sopi_set.b_values[int(k)]
            choices = sopi_set.a_values[b]
            out.append(Sopi(choices[int(rng.integers(len(choices)))], b))
        return out
    entries = sopi_set.entries()
    return [entries[int(k)] for k in rng.choice(len(entries), size=s, replace=False)]


def designed_overlap_experiment(
    sopi_set: SopiSet,
    s: int,
    m: int,
    samples: int,
    seed: int = 0,
    distinct_strides: bool = False,
) -> DesignedReport:
    """Sample s-tuples from a designed set and compare duplicates to the worst case.

    Each sample splits ``m`` symbols into ``s`` positive prefix lengths at
    random. ``violations`` counts samples above (s-1)((m-s)/d + s/2).
    """
    design = sopi_set.design
    if m > design.M:
        raise ValueError(f"m={m} exceeds the design bound M={design.M}")
    pool = len(sopi_set.b_values) if distinct_strides else len(sopi_set)
    if s > pool:
        raise ValueError(f"cannot draw {s} distinct SOPIs from a pool of {pool}")
    start = time.perf_counter()
    bound = m - multi_overlap_lower_bound(m, s, design.d)
    dups = []
    for k in range(samples):
        rng = make_rng(seed, k)
        tup = _sample_tuple(sopi_set, s, rng, distinct_strides)
        lengths = random_split(rng, m, s)
        ids = np.concatenate([prefix_array(p, ln, design.params) for p, ln in zip(tup, lengths)])
        dups.append(m - np.unique(ids).size)
    dups_arr = np.array(dups)
    return DesignedReport(
        s=s,
        m=m,
        d=design.d,
        samples=samples,
        duplicate_bound=bound,
        max_duplicates=int(dups_arr.max()),
        mean_duplicates=float(dups_arr.mean()),
        max_fraction=float(dups_arr.max()) / m,
        bound_fraction=bound / m,
        violations=int((dups_arr > bound).sum()),
        wall_time=time.perf_counter() - start,
    )


@dataclass
class DownloadReport:
    selected: list[str]
    stream_lengths: list[int]
    requested: int
    distinct: int
    per_block_distinct: list[int]
    per_block_needed: list[int]
    recoverable: bool

    def to_json(self) -> dict:
        return asdict(self)


def simulate_multi_source_download(
    structure: BlockStructure,
    assignment: Assignment,
    client_view: Sequence[str],
    budget: int,
    K: int | None = None,
    large_sopis: dict[str, LargeSopi] | None = None,
    seed: int = 0,
    params: FieldParams | None = None,
) -> DownloadReport:
    """Download ``budget`` symbols round-robin from the client's usable streams.

    Offers repeating a SOPI are dropped first. With one source block the
    object is recoverable once ``K`` (default Kt) distinct IDs arrive; with
    several, each block needs its own KL or KS distinct IDs. Multi-block
    streams use ``large_sopis[node]`` when given, otherwise C and D are drawn
    from ``seed`` and the node's (A, B).
    """
    params = params or FieldParams()
    if not client_view:
        raise ValueError("client_view is empty")
    K = structure.Kt if K is None else K
    if budget < K:
        raise ValueError(f"budget {budget} is below K={K}")
    offers = [(node, assignment.sopi_of(node)) for node in client_view]
    chosen = select_streams(offers)
    lengths = equal_split(budget, len(chosen))
    z = structure.Z
    if z == 1:
        ids = np.concatenate([prefix_array(p, ln, params) for (_, p), ln in zip(chosen, lengths)])
        distinct = int(np.unique(ids).size)
        per_block, needed = [distinct], [K]
    else:
        keys = []
        for (node, p), ln in zip(chosen, lengths):
            lp = (large_sopis or {}).get(node)
            if lp is None:
                rng = make_rng(seed, p.A, p.B)
                lp = LargeSopi(p.A, p.B, int(rng.integers(0, params.N)), int(rng.integers(1, params.N)))
            blocks, ids = large_prefix_arrays(lp.check(params), ln, z, params)
            keys.append(blocks * params.N + ids)
        uniq = np.unique(np.concatenate(keys))
        per_block = np.bincount(uniq // params.N, minlength=z).astype(int).tolist()
        needed = [structure.block_k(j) for j in range(z)]
        distinct = int(uniq.size)
    return DownloadReport(
        selected=[node for node, _ in chosen],
        stream_lengths=lengths,
        requested=sum(lengths),
        distinct=distinct,
        per_block_distinct=per_block,
        per_block_needed=needed,
        recoverable=all(got >= need for got, need in zip(per_block, needed)),
    )
