"""The random side of the lab: fair-coin walks against the iterated-
logarithm envelope, Hawkins random sieves, and Monte Carlo primality.

Every operation is a pure function of (inputs, seed, trial index); see
`rng` for the pinned generator and stream derivation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .rng import Seed, Stream

ENVELOPE_MIN_N = 16  # below this ln ln n is uncomfortably close to 0

DEFAULT_HAWKINS_CAP = 1 << 26


@dataclass(frozen=True)
class WalkSummary:
    n: int
    final_s: int
    max_abs_s: int
    envelope_exceed_count: int  # steps k >= 16 with |S_k| > lil_envelope(k)


@dataclass(frozen=True)
class EnsembleStats:
    trials: int
    n: int
    mean_final: float
    var_final: float
    frac_within: dict[float, float]  # c -> fraction with max_abs_s <= c*sqrt(n)
    frac_ever_exceed_envelope: float


@dataclass(frozen=True)
class HawkinsResult:
    limit: int
    survivor_count: int
    survivors: np.ndarray | None
    density_samples: list[tuple[int, int]]  # (n, survivors <= n)


@dataclass(frozen=True)
class PrimalityVerdict:
    tag: str  # "composite" | "probably_prime"
    rounds: int | None = None

    @property
    def error_bound(self) -> float:
        """Probability the verdict is wrong: 0 for composite (definitive),
        at most 4^-rounds for probably_prime."""
        return 0.0 if self.tag == "composite" else 4.0 ** -(self.rounds or 0)


def lil_envelope(n: int) -> float:
    """sqrt(2 n ln ln n), the iterated-logarithm scale of a fair-coin walk."""
    if n < ENVELOPE_MIN_N:
        raise ValueError(f"envelope defined for n >= {ENVELOPE_MIN_N}, got {n}")
    return math.sqrt(2.0 * n * math.log(math.log(n)))


def _envelope_array(n: int) -> np.ndarray:
    """Envelope values for k = 16..n (empty when n < 16)."""
    if n < ENVELOPE_MIN_N:
        return np.empty(0, dtype=np.float64)
    k = np.arange(ENVELOPE_MIN_N, n + 1, dtype=np.float64)
    return np.sqrt(2.0 * k * np.log(np.log(k)))


def _walk(n: int, seed: Seed, trial: int, envelope: np.ndarray) -> WalkSummary:
    out = Stream(seed, trial).next_uint64_block(n)
    steps = (out & np.uint64(1)).astype(np.int64) * 2 - 1
    s = np.cumsum(steps)
    abs_s = np.abs(s)
    exceed = 0
    if n >= ENVELOPE_MIN_N:
        exceed = int(np.count_nonzero(abs_s[ENVELOPE_MIN_N - 1 :] > envelope))
    return WalkSummary(
        n=n,
        final_s=int(s[-1]),
        max_abs_s=int(abs_s.max()),
        envelope_exceed_count=exceed,
    )


def coin_walk(n: int, seed: Seed, trial: int = 0) -> WalkSummary:
    """Walk of n independent +-1 steps from the derived (seed, trial) stream."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _walk(n, seed, trial, _envelope_array(n))


def walk_trials(
    trials: int, n: int, seed: Seed, *, threads: int = 1
) -> list[WalkSummary]:
    """Summaries for trials 0..trials-1, in trial order."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    env = _envelope_array(n)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda t: _walk(n, seed, t, env), range(trials)))
    return [_walk(n, seed, t, env) for t in range(trials)]


def ensemble_from(
    walks: list[WalkSummary], n: int, c_list: list[float]
) -> EnsembleStats:
    """Reduce per-trial summaries to ensemble statistics.

    Sums are carried in exact integer arithmetic, so the reported values
    are independent of trial evaluation or merge order.
    """
    trials = len(walks)
    if trials < 2:
        raise ValueError(f"trials must be >= 2, got {trials}")
    sum_f = sum(w.final_s for w in walks)
    sum_f2 = sum(w.final_s * w.final_s for w in walks)
    var = (sum_f2 - sum_f * sum_f / trials) / (trials - 1)
    root_n = math.sqrt(n)
    frac_within = {
        float(c): sum(1 for w in walks if w.max_abs_s <= c * root_n) / trials
        for c in c_list
    }
    exceed = sum(1 for w in walks if w.envelope_exceed_count > 0)
    return EnsembleStats(
        trials=trials,
        n=n,
        mean_final=sum_f / trials,
        var_final=var,
        frac_within=frac_within,
        frac_ever_exceed_envelope=exceed / trials,
    )


def walk_ensemble(
    trials: int,
    n: int,
    seed: Seed,
    c_list: list[float],
    *,
    threads: int = 1,
) -> EnsembleStats:
    """Aggregate statistics over independent trials of coin_walk."""
    if trials < 2:
        raise ValueError(f"trials must be >= 2, got {trials}")
    return ensemble_from(walk_trials(trials, n, seed, threads=threads), n, c_list)


def hawkins_sieve(
    limit: int,
    seed: Seed,
    trial: int = 0,
    *,
    keep_survivors: bool = True,
    capacity: int = DEFAULT_HAWKINS_CAP,
) -> HawkinsResult:
    """Hawkins random sieve over [2, limit].

    Repeatedly take the smallest survivor not yet used as a pivot p and
    delete each larger survivor independently with probability 1/p.  One
    uniform is drawn per (pivot, survivor) pair, in ascending survivor
    order, so runs reproduce exactly for a given (seed, trial).
    """
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    if limit > capacity:
        raise CapacityError(f"hawkins limit {limit} exceeds capacity {capacity}")
    stream = Stream(seed, trial)
    surv = np.arange(2, limit + 1, dtype=np.int64)
    i = 0
    while i < surv.size:
        p = int(surv[i])
        rest = surv[i + 1 :]
        if rest.size:
            u = stream.next_uniform_block(rest.size)
            surv = np.concatenate((surv[: i + 1], rest[u >= 1.0 / p]))
        i += 1

    grid = []
    point = 10
    while point < limit:
        grid.append(point)
        point *= 10
    grid.append(limit)
    counts = np.searchsorted(surv, grid, side="right")
    density = [(g, int(c)) for g, c in zip(grid, counts)]
    return HawkinsResult(
        limit=limit,
        survivor_count=int(surv.size),
        survivors=surv if keep_survivors else None,
        density_samples=density,
    )


def miller_rabin(n: int, rounds: int = 20, seed: Seed = Seed(0)) -> PrimalityVerdict:
    """Miller-Rabin test with bases drawn uniformly from [2, n-2].

    Composite verdicts are definitive (a witness was found);
    probably_prime verdicts are wrong with probability <= 4^-rounds.
    Bases come from the stream derived from (seed, trial=n).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    if n in (2, 3):
        return PrimalityVerdict("probably_prime", rounds)
    if n % 2 == 0:
        return PrimalityVerdict("composite")

    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1

    stream = Stream(seed, trial=n)
    for _ in range(rounds):
        a = 2 + stream.next_below(n - 3)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return PrimalityVerdict("composite")
    return PrimalityVerdict("probably_prime", rounds)
