"""Reproducible simulation of the queue and its running maximum.

Random numbers are organised so that results do not depend on how the
replicas are split between workers.  Replica ``r`` belongs to block
``r // BLOCK`` and reads column ``r % BLOCK`` of that block's draws; block
``b`` of a run with cycle half-length ``ell`` uses a Philox stream seeded by
``SeedSequence(seed, spawn_key=(ell, b))`` and consumes its uniforms
time-major, ``(steps, BLOCK)`` at a time.  A worker handed a replica range
that cuts a block regenerates the whole block and keeps its own columns.

Statistics are accumulated as an integer histogram of the maximum, so
merging partial runs is exact and order independent.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ValidationError
from .walk import Params, PhaseKind, make_params, phase_of

BLOCK = 1024
#: Uniforms drawn per chunk (bounds peak memory at ~32 MB of float64).
CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class SimConfig:
    params: Params
    n: int
    reps: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        if self.reps < 1:
            raise ValidationError("reps must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimResult:
    n: int
    ell: int
    p: str
    reps: int
    seed: int
    mean_max: float
    mean_max_sq: float
    variance: float
    stderr_mean: float
    stderr_sq: float
    counts: tuple = field(repr=False)
    elapsed: float = field(default=0.0, compare=False)

    @property
    def scaled_first(self) -> float:
        return self.mean_max / math.sqrt(self.n)

    @property
    def scaled_second(self) -> float:
        return self.mean_max_sq / self.n

    def pmf(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.reps

    def to_dict(self) -> dict:
        return {
            "n": self.n, "ell": self.ell, "p": self.p, "reps": self.reps, "seed": self.seed,
            "mean_max": self.mean_max, "mean_max_sq": self.mean_max_sq,
            "variance": self.variance, "stderr_mean": self.stderr_mean,
            "stderr_sq": self.stderr_sq,
            "scaled_first": self.scaled_first, "scaled_second": self.scaled_second,
        }


def _uniforms(stream, n: int) -> np.ndarray:
    if hasattr(stream, "random"):
        return np.asarray(stream.random(n), dtype=float)
    u = np.asarray(stream, dtype=float)
    if u.shape != (n,):
        raise ValidationError(f"expected {n} uniforms, got shape {u.shape}")
    return u


def arrival_mask(ell: int, start: int, count: int) -> np.ndarray:
    """True for arrival steps among steps ``start+1 .. start+count``."""
    i = np.arange(start, start + count)
    return (i % (2 * ell)) < ell


def path_trajectory(params: Params, n: int, stream) -> np.ndarray:
    """``S_0, ..., S_n`` for one path, stepping the recursion directly."""
    u = _uniforms(stream, n)
    p = float(params.p)
    s = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        hit = u[i - 1] < p
        if phase_of(i, params.ell) is PhaseKind.ARRIVAL:
            s[i] = s[i - 1] + hit
        else:
            s[i] = s[i - 1] if hit else max(s[i - 1] - 1, 0)
    return s


def simulate_path(params: Params, n: int, stream) -> tuple[int, int]:
    """One draw of ``(S_n, M_n)``.

    ``stream`` is a numpy Generator or a length-``n`` array of uniforms;
    a uniform below ``p`` means "a car arrives" on red and "nobody leaves"
    on green.
    """
    s = path_trajectory(params, n, stream)
    return int(s[-1]), int(s.max())


def _block_generator(seed: int, ell: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(ell, block))
    return np.random.Generator(np.random.Philox(ss))


@njit(cache=True, nogil=True)
def _advance(u, p, arrive, s, m):
    for i in range(u.shape[0]):
        red = arrive[i]
        for j in range(u.shape[1]):
            hit = u[i, j] < p
            if red:
                if hit:
                    s[j] += 1
                    if s[j] > m[j]:
                        m[j] = s[j]
            elif not hit and s[j] > 0:
                s[j] -= 1


def simulate_block(params: Params, n: int, seed: int, block: int) -> tuple[np.ndarray, np.ndarray]:
    """Final states and maxima of the ``BLOCK`` replicas of one block."""
    gen = _block_generator(seed, params.ell, block)
    p = float(params.p)
    s = np.zeros(BLOCK, dtype=np.int64)
    m = np.zeros(BLOCK, dtype=np.int64)
    step = max(1, CHUNK_CELLS // BLOCK)
    done = 0
    while done < n:
        t = min(step, n - done)
        _advance(gen.random((t, BLOCK)), p, arrival_mask(params.ell, done, t), s, m)
        done += t
    return s, m


def max_histogram(config: SimConfig, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Counts of ``M_n = a`` over replicas ``start .. stop-1``."""
    stop = config.reps if stop is None else stop
    if not 0 <= start <= stop <= config.reps:
        raise ValidationError("replica range out of bounds")
    counts = np.zeros(1, dtype=np.int64)
    for block in range(start // BLOCK, -(-stop // BLOCK)):
        lo = max(start, block * BLOCK) - block * BLOCK
        hi = min(stop, (block + 1) * BLOCK) - block * BLOCK
        if lo >= hi:
            continue
        _, m = simulate_block(config.params, config.n, config.seed, block)
        counts = _add_counts(counts, np.bincount(m[lo:hi]))
    return counts


def _add_counts(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[: len(b)] += b
    return out


def merge_histograms(parts) -> np.ndarray:
    counts = np.zeros(1, dtype=np.int64)
    for part in parts:
        counts = _add_counts(counts, np.asarray(part, dtype=np.int64))
    return counts


def split_ranges(reps: int, workers: int) -> list[tuple[int, int]]:
    edges = [reps * k // workers for k in range(workers + 1)]
    return [(a, b) for a, b in zip(edges, edges[1:]) if a < b]


def result_from_counts(config: SimConfig, counts, elapsed: float = 0.0) -> SimResult:
    counts = [int(c) for c in np.trim_zeros(np.asarray(counts), "b")] or [0]
    reps = sum(counts)
    if reps != config.reps:
        raise ValidationError(f"histogram holds {reps} replicas, config says {config.reps}")
    s1 = sum(c * a for a, c in enumerate(counts))
    s2 = sum(c * a ** 2 for a, c in enumerate(counts))
    s4 = sum(c * a ** 4 for a, c in enumerate(counts))
    mean, mean_sq = s1 / reps, s2 / reps
    if reps > 1:
        var = (s2 - s1 * s1 / reps) / (reps - 1)
        var_sq = (s4 - s2 * s2 / reps) / (reps - 1)
    else:
        var = var_sq = 0.0
    return SimResult(
        n=config.n, ell=config.params.ell, p=str(config.params.p), reps=reps, seed=config.seed,
        mean_max=mean, mean_max_sq=mean_sq, variance=var,
        stderr_mean=math.sqrt(max(var, 0.0) / reps), stderr_sq=math.sqrt(max(var_sq, 0.0) / reps),
        counts=tuple(counts), elapsed=elapsed)


def estimate_moments(config: SimConfig, workers: int = 1) -> SimResult:
    """Moments of ``M_n`` over ``config.reps`` replicas.

    The result is a function of ``config`` alone; ``workers`` only changes
    how the replica range is divided.
    """
    t0 = time.perf_counter()
    ranges = split_ranges(config.reps, max(1, workers))
    if len(ranges) == 1:
        parts = [max_histogram(config, *ranges[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            parts = list(pool.map(lambda r: max_histogram(config, *r), ranges))
    return result_from_counts(config, merge_histograms(parts), time.perf_counter() - t0)


@dataclass(frozen=True)
class UniversalityReport:
    """Per-``ell`` moments of ``M_n / sqrt(n)`` compared with the first ``ell``."""

    p: str
    n: int
    reps: int
    seed: int
    results: tuple
    z_first: tuple
    z_second: tuple
    rel_diff_first: tuple
    rel_diff_second: tuple
    label: str = ("conjecture check: moments of M_n/sqrt(n) are expected not to depend "
                  "on the cycle length; agreement is evidence, not proof")

    def rows(self) -> list[dict]:
        out = []
        for r, z1, z2, d1, d2 in zip(self.results, self.z_first, self.z_second,
                                      self.rel_diff_first, self.rel_diff_second):
            row = r.to_dict()
            row.update(stderr_first=r.stderr_mean / math.sqrt(r.n),
                       stderr_second=r.stderr_sq / r.n,
                       z_first=z1, z_second=z2, rel_diff_first=d1, rel_diff_second=d2)
            out.append(row)
        return out


def _z(a: float, sa: float, b: float, sb: float) -> float:
    se = math.hypot(sa, sb)
    if se == 0:
        return 0.0
    return (a - b) / se


def universality_experiment(p, ells, n: int, reps: int, seed: int, workers: int = 1) -> UniversalityReport:

    ells = list(ells)
    if not ells:
        raise ValidationError("ells must be nonempty")
    results = tuple(
        estimate_moments(SimConfig(make_params(p, ell, "float"), n, reps, seed), workers)
        for ell in ells)
    ref = results[0]
    z1, z2, d1, d2 = [], [], [], []
    for r in results:
        z1.append(_z(r.mean_max, r.stderr_mean, ref.mean_max, ref.stderr_mean) if r is not ref else 0.0)
        z2.append(_z(r.mean_max_sq, r.stderr_sq, ref.mean_max_sq, ref.stderr_sq) if r is not ref else 0.0)
        d1.append(r.mean_max / ref.mean_max - 1 if ref.mean_max else 0.0)
        d2.append(r.mean_max_sq / ref.mean_max_sq - 1 if ref.mean_max_sq else 0.0)
    return UniversalityReport(str(ref.p), n, reps, seed, results,
                              tuple(z1), tuple(z2), tuple(d1), tuple(d2))
