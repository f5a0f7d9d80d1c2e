"""Streaming Mertens function statistics.

M(n) is accumulated in exact 64-bit integer arithmetic, block by block;
no floating point touches M(n) itself (ratios are derived, read-only
views).  Block production may run on a thread pool; the prefix-sum
reduction is sequential in block order, so results are identical for
any block length and thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CheckpointError, InsufficientDataError
from .sieve import DEFAULT_BLOCK_LENGTH, MoebiusBlock, mu_block, primes_up_to

CHECKPOINT_FORMAT_VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MertensSummary:
    """Run statistics of M(n) over 1..limit."""

    limit: int
    final_m: int
    max_abs_m: int
    argmax: int
    count_neg: int
    count_pos: int
    count_zero: int
    max_ratio: float  # max over 2 <= n <= limit of |M(n)|/sqrt(n); 0.0 if limit < 2


@dataclass(frozen=True)
class TrajectorySample:
    n: int
    m: int
    ratio: float  # m / sqrt(n), signed


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares slope of log|M| against log n over record maxima."""

    alpha: float
    intercept: float
    points_used: int
    residual: float  # rms residual of the fit, >= 0


@dataclass(frozen=True)
class Checkpoint:
    """Resumable summary state, saved only at block boundaries."""

    format_version: int
    n_processed: int
    m: int
    count_neg: int
    count_pos: int
    count_zero: int
    max_abs_m: int
    argmax: int
    max_ratio: float
    block_length: int


def sample_grid(limit: int, sample_count: int) -> list[int]:
    """Approximately geometric sample points in [2, limit].

    Powers of 10 and `limit` itself are always included; duplicates from
    integer rounding are dropped, so the result holds roughly
    `sample_count` points.  Empty when sample_count == 0.
    """
    if limit < 1 or sample_count < 0:
        raise ValueError("limit >= 1 and sample_count >= 0 required")
    if sample_count == 0:
        return []
    if limit == 1:
        return [1]
    pts = {limit}
    p = 10
    while p < limit:
        pts.add(p)
        p *= 10
    lo = 2.0
    ratio = (limit / lo) ** (1.0 / sample_count)
    x = lo
    for _ in range(sample_count):
        pts.add(min(limit, max(2, round(x))))
        x *= ratio
    return sorted(pts)


class MertensRun:
    """Block-streaming computation of M(n) with optional resume state.

    Collects the trajectory samples requested on the grid, plus every
    record maximum of |M| (for the growth-exponent fit).  `on_block` is
    invoked after each reduced block with the run itself, which is how
    the harness drives checkpoints and incremental output.
    """

    def __init__(
        self,
        limit: int,
        block_length: int = DEFAULT_BLOCK_LENGTH,
        sample_count: int = 200,
        *,
        threads: int = 1,
        resume: Checkpoint | None = None,
    ):
        if limit < 1 or block_length < 1:
            raise ValueError("limit >= 1 and block_length >= 1 required")
        self.limit = limit
        self.block_length = block_length
        self.sample_count = sample_count
        self.threads = max(1, threads)
        self.samples: list[TrajectorySample] = []
        self.records: list[tuple[int, int]] = []
        self._grid = sample_grid(limit, sample_count)
        if resume is None:
            self.n_processed = 0
            self.m = 0
            self.count_neg = self.count_pos = self.count_zero = 0
            self.max_abs_m = 0
            self.argmax = 0
            self.max_ratio = 0.0
        else:
            if resume.block_length != block_length:
                raise CheckpointError(
                    f"checkpoint block_length {resume.block_length} != {block_length}"
                )
            if resume.n_processed % block_length != 0:
                raise CheckpointError("checkpoint not at a block boundary")
            if resume.n_processed >= limit:
                raise CheckpointError(
                    f"checkpoint at n={resume.n_processed} is not before limit {limit}"
                )
            self.n_processed = resume.n_processed
            self.m = resume.m
            self.count_neg = resume.count_neg
            self.count_pos = resume.count_pos
            self.count_zero = resume.count_zero
            self.max_abs_m = resume.max_abs_m
            self.argmax = resume.argmax
            self.max_ratio = resume.max_ratio
        self._grid_pos = 0
        while self._grid_pos < len(self._grid) and self._grid[self._grid_pos] <= self.n_processed:
            self._grid_pos += 1

    def _ranges(self, stop: int):
        lo = self.n_processed + 1
        while lo <= stop:
            hi = min(lo + self.block_length - 1, stop)
            yield lo, hi
            lo = hi + 1

    def run(self, *, stop_after: int | None = None, on_block=None) -> "MertensRun":
        """Stream blocks up to `limit` (or the first boundary >= stop_after)."""
        stop = self.limit
        if stop_after is not None:
            # stop at the first block boundary at or past stop_after
            blocks = -(-max(0, stop_after - self.n_processed) // self.block_length)
            stop = min(stop, self.n_processed + blocks * self.block_length)
        base = primes_up_to(math.isqrt(self.limit))
        ranges = list(self._ranges(stop))
        if self.threads > 1 and len(ranges) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                pending = []
                idx = 0
                window = self.threads * 2
                while idx < len(ranges) or pending:
                    while idx < len(ranges) and len(pending) < window:
                        lo, hi = ranges[idx]
                        pending.append(pool.submit(mu_block, lo, hi, primes=base))
                        idx += 1
                    self._reduce(pending.pop(0).result())
                    if on_block is not None:
                        on_block(self)
        else:
            for lo, hi in ranges:
                self._reduce(mu_block(lo, hi, primes=base))
                if on_block is not None:
                    on_block(self)
        return self

    def _reduce(self, block: MoebiusBlock) -> None:
        lo, hi = block.lo, block.hi
        mu = block.values
        m_arr = self.m + np.cumsum(mu, dtype=np.int64)

        self.count_neg += int(np.count_nonzero(mu == -1))
        self.count_pos += int(np.count_nonzero(mu == 1))
        self.count_zero += int(np.count_nonzero(mu == 0))

        abs_m = np.abs(m_arr)

        # record maxima: strictly above everything seen before this n
        cmax = np.maximum.accumulate(abs_m)
        prev = np.empty_like(cmax)
        prev[0] = self.max_abs_m
        np.maximum(cmax[:-1], self.max_abs_m, out=prev[1:])
        rec_idx = np.flatnonzero(abs_m > prev)
        for i in rec_idx:
            self.records.append((lo + int(i), int(abs_m[i])))

        block_max = int(cmax[-1])
        if block_max > self.max_abs_m:
            first = int(np.argmax(abs_m == block_max))
            self.max_abs_m = block_max
            self.argmax = lo + first

        # ratio view over n >= 2 only
        start = max(0, 2 - lo)
        if start < abs_m.size:
            n_arr = np.arange(lo + start, hi + 1, dtype=np.float64)
            r = float((abs_m[start:] / np.sqrt(n_arr)).max())
            if r > self.max_ratio:
                self.max_ratio = r

        while self._grid_pos < len(self._grid) and self._grid[self._grid_pos] <= hi:
            n = self._grid[self._grid_pos]
            m_at = int(m_arr[n - lo])
            self.samples.append(TrajectorySample(n, m_at, m_at / math.sqrt(n)))
            self._grid_pos += 1

        self.m = int(m_arr[-1])
        self.n_processed = hi

    @property
    def summary(self) -> MertensSummary:
        return MertensSummary(
            limit=self.n_processed,
            final_m=self.m,
            max_abs_m=self.max_abs_m,
            argmax=self.argmax,
            count_neg=self.count_neg,
            count_pos=self.count_pos,
            count_zero=self.count_zero,
            max_ratio=self.max_ratio,
        )

    @property
    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            format_version=CHECKPOINT_FORMAT_VERSION,
            n_processed=self.n_processed,
            m=self.m,
            count_neg=self.count_neg,
            count_pos=self.count_pos,
            count_zero=self.count_zero,
            max_abs_m=self.max_abs_m,
            argmax=self.argmax,
            max_ratio=self.max_ratio,
            block_length=self.block_length,
        )


def mertens_stream(
    limit: int,
    block_length: int = DEFAULT_BLOCK_LENGTH,
    sample_count: int = 200,
    *,
    threads: int = 1,
    resume: Checkpoint | None = None,
) -> tuple[MertensSummary, list[TrajectorySample]]:
    """Exact prefix sums of mu streamed block by block.

    Samples are taken at roughly geometric n (always including limit);
    the summary is independent of block_length and threads.  With
    `resume`, only samples past the checkpoint are produced.
    """
    run = MertensRun(
        limit, block_length, sample_count, threads=threads, resume=resume
    ).run()
    return run.summary, run.samples


def mertens_at(n: int, block_length: int = DEFAULT_BLOCK_LENGTH) -> int:
    """Exact M(n) = sum of mu(k) for k <= n."""
    summary, _ = mertens_stream(n, block_length, sample_count=0)
    return summary.final_m


def sign_balance(limit: int) -> tuple[int, int, int, int]:
    """Counts of mu = -1 / +1 / 0 up to limit, and their signed difference.

    The difference count_neg - count_pos equals -M(limit) exactly; the
    sign is preserved rather than folded into an absolute value.
    """
    summary, _ = mertens_stream(limit, sample_count=0)
    return (
        summary.count_neg,
        summary.count_pos,
        summary.count_zero,
        summary.count_neg - summary.count_pos,
    )


def fit_growth_exponent(samples: list[tuple[int, int]]) -> GrowthFit:
    """Least-squares fit of log|M| against log n over record maxima.

    `samples` are (n, |M(n)|) pairs with n strictly increasing and every
    |M| >= 1 (records exclude |M| = 0 by construction, so no log 0).
    """
    if len(samples) < 2:
        raise InsufficientDataError(f"need >= 2 samples, got {len(samples)}")
    ns = np.array([s[0] for s in samples], dtype=np.float64)
    ms = np.array([s[1] for s in samples], dtype=np.float64)
    if np.any(ms < 1):
        raise ValueError("all |M| values must be >= 1")
    if np.any(np.diff(ns) <= 0):
        raise ValueError("n values must be strictly increasing")
    x = np.log(ns)
    y = np.log(ms)
    alpha, intercept = np.polyfit(x, y, 1)
    resid = y - (alpha * x + intercept)
    return GrowthFit(
        alpha=float(alpha),
        intercept=float(intercept),
        points_used=len(samples),
        residual=float(np.sqrt(np.mean(resid * resid))),
    )


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


_CHECKPOINT_FIELDS = (
    "format_version",
    "n_processed",
    "m",
    "count_neg",
    "count_pos",
    "count_zero",
    "max_abs_m",
    "argmax",
    "max_ratio",
    "block_length",
)


def checkpoint_bytes(state: Checkpoint) -> bytes:
    """Serialized checkpoint: key:value lines in fixed order, then the
    FNV-1a 64 digest (16 hex digits) over the preceding lines' bytes."""
    lines = []
    for name in _CHECKPOINT_FIELDS:
        value = getattr(state, name)
        text = repr(value) if name == "max_ratio" else str(value)
        lines.append(f"{name}:{text}\n")
    payload = "".join(lines).encode("utf-8")
    digest = _fnv1a64(payload)
    return payload + f"integrity_digest:{digest:016x}\n".encode("utf-8")


def checkpoint_save(state: Checkpoint, path) -> None:
    """Write the checkpoint atomically (never corrupts a prior one)."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(checkpoint_bytes(state))
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def checkpoint_resume(path) -> Checkpoint:
    """Load and validate a checkpoint; digest or version mismatch rejects."""
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.split(b"\n")
    if len(lines) != len(_CHECKPOINT_FIELDS) + 2 or lines[-1] != b"":
        raise CheckpointError(f"{path}: malformed or truncated checkpoint")
    payload = b"\n".join(lines[: len(_CHECKPOINT_FIELDS)]) + b"\n"
    values = {}
    for name, line in zip(_CHECKPOINT_FIELDS, lines):
        key, _, text = line.decode("utf-8", "replace").partition(":")
        if key != name:
            raise CheckpointError(f"{path}: expected field {name!r}, found {key!r}")
        values[name] = text
    key, _, digest_text = lines[len(_CHECKPOINT_FIELDS)].decode("utf-8", "replace").partition(":")
    if key != "integrity_digest":
        raise CheckpointError(f"{path}: missing integrity digest")
    try:
        stored = int(digest_text, 16)
    except ValueError:
        raise CheckpointError(f"{path}: unreadable digest {digest_text!r}") from None
    actual = _fnv1a64(payload)
    if stored != actual:
        raise CheckpointError(
            f"{path}: digest mismatch (stored {stored:016x}, computed {actual:016x})"
        )
    try:
        state = Checkpoint(
            format_version=int(values["format_version"]),
            n_processed=int(values["n_processed"]),
            m=int(values["m"]),
            count_neg=int(values["count_neg"]),
            count_pos=int(values["count_pos"]),
            count_zero=int(values["count_zero"]),
            max_abs_m=int(values["max_abs_m"]),
            argmax=int(values["argmax"]),
            max_ratio=float(values["max_ratio"]),
            block_length=int(values["block_length"]),
        )
    except ValueError as exc:
        raise CheckpointError(f"{path}: unparseable field ({exc})") from None
    if state.format_version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format_version {state.format_version} != {CHECKPOINT_FORMAT_VERSION}"
        )
    if state.count_neg + state.count_pos + state.count_zero != state.n_processed:
        raise CheckpointError(f"{path}: counts do not sum to n_processed")
    if state.count_pos - state.count_neg != state.m:
        raise CheckpointError(f"{path}: m inconsistent with sign counts")
    if abs(state.m) > state.max_abs_m or state.argmax > state.n_processed:
        raise CheckpointError(f"{path}: extreme fields inconsistent")
    return state
