"""Mertens streaming against brute-force prefix sums of mu."""

import math

import numpy as np
import pytest

from mertenslab import (
    Checkpoint,
    CheckpointError,
    InsufficientDataError,
    MertensRun,
    checkpoint_resume,
    checkpoint_save,
    fit_growth_exponent,
    mertens_at,
    mertens_stream,
    sign_balance,
)
from mertenslab.mertens import CHECKPOINT_FORMAT_VERSION, checkpoint_bytes, sample_grid


def oracle_mu(n):
    count = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            count += 1
        d += 1
    if n > 1:
        count += 1
    return -1 if count % 2 else 1


@pytest.fixture(scope="module")
def oracle_m_1e5():
    """Exact M(n) for 1 <= n <= 10^5 from the per-n factorization oracle."""
    mu = np.array([oracle_mu(n) for n in range(1, 10**5 + 1)], dtype=np.int64)
    return np.cumsum(mu)


class TestMertensStream:
    def test_limit_one(self):
        summary, samples = mertens_stream(1, sample_count=1)
        assert summary.final_m == 1
        assert summary.count_pos == 1
        assert samples[0].n == 1 and samples[0].m == 1

    def test_limit_ten(self):
        summary, _ = mertens_stream(10)
        assert summary.final_m == -1
        assert (summary.count_neg, summary.count_pos, summary.count_zero) == (4, 3, 3)

    def test_limit_five(self):
        # partial sums 1, 0, -1, -1, -2
        summary, _ = mertens_stream(5)
        assert summary.final_m == -2
        assert summary.max_abs_m == 2

    def test_matches_oracle(self, oracle_m_1e5):
        summary, samples = mertens_stream(10**5, block_length=4096, sample_count=50)
        assert summary.final_m == oracle_m_1e5[-1]
        assert summary.max_abs_m == np.abs(oracle_m_1e5).max()
        for s in samples:
            assert s.m == oracle_m_1e5[s.n - 1], s.n

    def test_step_identity(self, oracle_m_1e5):
        # M(n) - M(n-1) = mu(n) for all 2 <= n <= 10^5, on the real path
        from mertenslab import mu_block, mu_of

        lib_m = np.cumsum(mu_block(1, 10**5).values, dtype=np.int64)
        assert np.array_equal(lib_m, oracle_m_1e5)
        for n in (2, 3, 17, 999, 10**4, 10**5):
            assert mertens_at(n) - mertens_at(n - 1) == mu_of(n)

    @pytest.mark.parametrize("limit", [1, 2, 3, 7, 64, 1000, 54321, 10**5])
    def test_count_identity(self, limit, oracle_m_1e5):
        summary, _ = mertens_stream(limit, block_length=977, sample_count=0)
        assert summary.final_m == summary.count_pos - summary.count_neg
        assert summary.final_m == oracle_m_1e5[limit - 1]
        assert summary.count_neg + summary.count_pos + summary.count_zero == limit

    def test_block_independence_1e6(self):
        results = [
            mertens_stream(10**6, block_length=b, sample_count=25)
            for b in (10**3, 10**4, 1 << 20)
        ]
        assert results[0] == results[1] == results[2]

    def test_threads_do_not_change_results(self):
        a = mertens_stream(10**6, block_length=1 << 16, sample_count=25)
        b = mertens_stream(10**6, block_length=1 << 16, sample_count=25, threads=4)
        assert a == b

    def test_ratio_bound_shadow(self):
        summary, samples = mertens_stream(10**6, sample_count=60)
        assert summary.max_ratio < 1.0
        for s in samples:
            if s.n >= 2:
                assert abs(s.ratio) <= summary.max_ratio + 1e-15

    def test_exact_integer_state(self):
        summary, samples = mertens_stream(1000, sample_count=5)
        assert isinstance(summary.final_m, int)
        assert isinstance(summary.max_abs_m, int)
        assert all(isinstance(s.m, int) for s in samples)


class TestMertensAt:
    @pytest.mark.parametrize("n,expected", [(2, 0), (3, -1), (10, -1)])
    def test_small(self, n, expected):
        assert mertens_at(n) == expected

    def test_known_value_1e4(self, oracle_m_1e5):
        assert mertens_at(10**4) == oracle_m_1e5[10**4 - 1] == -23


class TestSignBalance:
    def test_examples(self):
        assert sign_balance(10) == (4, 3, 3, 1)
        assert sign_balance(1) == (0, 1, 0, -1)
        assert sign_balance(4) == (2, 1, 1, 1)

    @pytest.mark.parametrize("limit", [10, 100, 5000])
    def test_difference_is_minus_m(self, limit):
        neg, pos, zero, diff = sign_balance(limit)
        assert diff == neg - pos == -mertens_at(limit)


class TestSampleGrid:
    def test_includes_limit_and_decades(self):
        grid = sample_grid(10**6, 50)
        assert grid[-1] == 10**6
        for p in (10, 100, 1000, 10**4, 10**5):
            assert p in grid

    def test_sorted_unique_in_range(self):
        grid = sample_grid(12345, 200)
        assert grid == sorted(set(grid))
        assert grid[0] >= 2 and grid[-1] == 12345

    def test_zero_samples(self):
        assert sample_grid(100, 0) == []

    def test_limit_one(self):
        assert sample_grid(1, 5) == [1]


class TestGrowthFit:
    def test_exact_half_power(self):
        samples = [(10, math.sqrt(10)), (100, 10), (1000, math.sqrt(1000))]
        fit = fit_growth_exponent(samples)
        assert fit.alpha == pytest.approx(0.5, abs=1e-12)
        assert fit.points_used == 3
        assert fit.residual == pytest.approx(0.0, abs=1e-12)

    def test_linear_data(self):
        fit = fit_growth_exponent([(10, 10), (100, 100)])
        assert fit.alpha == pytest.approx(1.0, abs=1e-12)

    def test_insufficient(self):
        with pytest.raises(InsufficientDataError):
            fit_growth_exponent([(10, 3)])

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            fit_growth_exponent([(10, 3), (5, 4)])  # n not increasing
        with pytest.raises(ValueError):
            fit_growth_exponent([(10, 0), (20, 4)])  # |M| < 1

    def test_records_from_run(self):
        run = MertensRun(10**5, sample_count=0).run()
        ns = [n for n, _ in run.records]
        ms = [m for _, m in run.records]
        assert ns == sorted(ns)
        assert ms == sorted(ms) and ms[0] >= 1
        fit = fit_growth_exponent(run.records)
        assert 0.0 < fit.alpha < 1.0
        assert fit.points_used == len(run.records)


class TestCheckpoint:
    def make_run(self, tmp_path, stop):
        run = MertensRun(10**5, block_length=10**4, sample_count=30)
        run.run(stop_after=stop)
        path = tmp_path / "state.ck"
        checkpoint_save(run.checkpoint, path)
        return run, path

    def test_resume_matches_direct(self, tmp_path):
        _, path = self.make_run(tmp_path, 10**4)
        state = checkpoint_resume(path)
        resumed = MertensRun(
            10**5, block_length=10**4, sample_count=30, resume=state
        ).run()
        direct = MertensRun(10**5, block_length=10**4, sample_count=30).run()
        assert resumed.summary == direct.summary
        tail = [s for s in direct.samples if s.n > state.n_processed]
        assert resumed.samples == tail

    def test_roundtrip_bytes_identical(self, tmp_path):
        run, path = self.make_run(tmp_path, 3 * 10**4)
        state = checkpoint_resume(path)
        assert checkpoint_bytes(state) == path.read_bytes()
        assert state == run.checkpoint

    def test_truncated_rejected(self, tmp_path):
        _, path = self.make_run(tmp_path, 10**4)
        path.write_bytes(path.read_bytes()[:-25])
        with pytest.raises(CheckpointError):
            checkpoint_resume(path)

    def test_corrupted_field_rejected(self, tmp_path):
        _, path = self.make_run(tmp_path, 10**4)
        text = path.read_text().replace("m:", "m:9", 1)
        path.write_text(text)
        with pytest.raises(CheckpointError, match="digest"):
            checkpoint_resume(path)

    def test_version_mismatch_rejected(self, tmp_path):
        run, _ = self.make_run(tmp_path, 10**4)
        bad = Checkpoint(
            **{
                **run.checkpoint.__dict__,
                "format_version": CHECKPOINT_FORMAT_VERSION + 1,
            }
        )
        path = tmp_path / "vers.ck"
        checkpoint_save(bad, path)
        with pytest.raises(CheckpointError, match="format_version"):
            checkpoint_resume(path)

    def test_resume_requires_block_boundary(self, tmp_path):
        run, _ = self.make_run(tmp_path, 10**4)
        with pytest.raises(CheckpointError, match="block_length"):
            MertensRun(10**5, block_length=999, resume=run.checkpoint)

    def test_resume_requires_room(self, tmp_path):
        run, _ = self.make_run(tmp_path, 10**4)
        with pytest.raises(CheckpointError, match="limit"):
            MertensRun(10**4, block_length=10**4, resume=run.checkpoint)

    def test_save_never_corrupts_prior(self, tmp_path):
        run, path = self.make_run(tmp_path, 10**4)
        before = path.read_bytes()
        try:
            checkpoint_save(run.checkpoint, tmp_path / "nodir" / "x.ck")
        except OSError:
            pass
        assert path.read_bytes() == before
