"""Command-line front door: experiment configuration, execution, CSV and
manifest emission, and the checkpoint lifecycle.

One subcommand per experiment family: mu, mertens, walk, hawkins, pi-li,
twins, zeta, gamma, primality.  Exit codes: 0 success, 2 usage,
3 runtime/IO.  Data files are written with a `.partial` suffix and
renamed atomically on completion; identical config + seed reproduces
byte-identical data files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from . import __version__
from .analytic import (
    euler_gamma,
    gauss_gap_scan,
    mertens_product_check,
    mu_reciprocal_identity,
    twin_heuristic,
    twin_prime_constant,
    twin_prime_count,
    zeta_euler_product,
    zeta_real,
)
from .errors import CheckpointError
from .mertens import (
    MertensRun,
    checkpoint_resume,
    checkpoint_save,
    fit_growth_exponent,
)
from .rng import Seed
from .sieve import DEFAULT_BLOCK_LENGTH, mu_block
from .stochastic import ensemble_from, hawkins_sieve, miller_rabin, walk_trials

SUBCOMMANDS = (
    "mu",
    "mertens",
    "walk",
    "hawkins",
    "pi-li",
    "twins",
    "zeta",
    "gamma",
    "primality",
)


@dataclass
class ExperimentConfig:
    subcommand: str
    output_path: str
    seed: Seed = Seed(0)
    lo: int | None = None
    hi: int | None = None
    limit: int | None = None
    n: int | None = None
    s: float | None = None
    terms: int | None = None
    prime_limit: int | None = None
    stride: int | None = None
    tol: float | None = None
    rounds: int | None = None
    trials: int | None = None
    c_list: list[float] | None = None
    block_length: int | None = None
    sample_count: int | None = None
    checkpoint_path: str | None = None
    resume: bool = False
    stop_after: int | None = None
    threads: int = 1


@dataclass
class CsvSeries:
    """Rendered rows ready for emission; every row matches the header arity."""

    headers: list[str]
    rows: list[tuple[str, ...]] = field(default_factory=list)


@dataclass
class RunManifest:
    tool_version: str
    command_line: list[str]
    subcommand: str
    seed: int
    parameters: dict
    started_at: str
    finished_at: str
    files: dict[str, str]
    results: dict


def render_int(v) -> str:
    return str(int(v))


def render_float(v) -> str:
    """Locale-independent rendering at 12 significant digits."""
    return format(float(v), ".12g")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _int_at_least(floor: int):
    def convert(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < floor:
            raise argparse.ArgumentTypeError(f"must be >= {floor}, got {v}")
        return v

    return convert


def _nonneg_int(text: str) -> int:
    return _int_at_least(0)(text)


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _float_above_one(text: str) -> float:
    v = float(text)
    if not v > 1:
        raise argparse.ArgumentTypeError(f"s must be > 1, got {v}")
    return v


def _c_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad c list: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("c list is empty")
    return values


def _default_threads() -> int:
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mertenslab",
        description="Desk-scale Mobius/Mertens experiments and analytic baselines",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, default_out):
        p.add_argument("--out", default=default_out, help="output CSV path")
        p.add_argument("--seed", type=_nonneg_int, default=0, help="64-bit seed")

    p = subs.add_parser("mu", help="Mobius values over a range")
    common(p, "mu.csv")
    p.add_argument("--lo", type=_positive_int, default=1)
    p.add_argument("--hi", type=_positive_int, required=True)

    p = subs.add_parser("mertens", help="stream M(n) with trajectory samples")
    common(p, "mertens.csv")
    p.add_argument("--limit", type=_positive_int, required=True)
    p.add_argument("--block-length", type=_positive_int, default=DEFAULT_BLOCK_LENGTH)
    p.add_argument("--samples", type=_nonneg_int, default=200)
    p.add_argument("--checkpoint", help="checkpoint file path")
    p.add_argument("--resume", action="store_true", help="resume from checkpoint")
    p.add_argument(
        "--stop-after",
        type=_positive_int,
        help="stop at the first block boundary past this n (leaves .partial)",
    )
    p.add_argument("--threads", type=_positive_int, default=_default_threads())

    p = subs.add_parser("walk", help="fair-coin walk ensemble")
    common(p, "walk.csv")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--trials", type=_int_at_least(2), default=100)
    p.add_argument("--c", type=_c_list, default=[1.0, 2.0, 3.0], help="comma list")
    p.add_argument("--threads", type=_positive_int, default=_default_threads())

    p = subs.add_parser("hawkins", help="Hawkins random sieve trials")
    common(p, "hawkins.csv")
    p.add_argument("--limit", type=_int_at_least(2), required=True)
    p.add_argument("--trials", type=_positive_int, default=1)
    p.add_argument("--threads", type=_positive_int, default=_default_threads())

    p = subs.add_parser("pi-li", help="Li(x) - pi(x) gap scan")
    common(p, "pi-li.csv")
    p.add_argument("--limit", type=_int_at_least(3), required=True)
    p.add_argument("--stride", type=_positive_int, default=1000)
    p.add_argument("--tol", type=_positive_float, default=1e-8)

    p = subs.add_parser("twins", help="twin-prime counts vs the heuristic")
    common(p, "twins.csv")
    p.add_argument("--limit", type=_int_at_least(4), required=True)
    p.add_argument("--stride", type=_positive_int, help="default: limit // 10")
    p.add_argument("--c2-prime-limit", type=_int_at_least(3), help="default: limit")

    p = subs.add_parser("zeta", help="zeta(s) by sum, product, and reciprocal")
    common(p, "zeta.csv")
    p.add_argument("--s", type=_float_above_one, default=2.0)
    p.add_argument("--terms", type=_positive_int, default=10_000)
    p.add_argument("--prime-limit", type=_int_at_least(2), default=100_000)

    p = subs.add_parser("gamma", help="Euler gamma and the Mertens product")
    common(p, "gamma.csv")
    p.add_argument("--terms", type=_int_at_least(10), default=1_000_000)
    p.add_argument("--limit", type=_int_at_least(3), default=1_000_000)

    p = subs.add_parser("primality", help="Miller-Rabin verdict for one n")
    common(p, "primality.csv")
    p.add_argument("--n", type=_int_at_least(2), required=True)
    p.add_argument("--rounds", type=_positive_int, default=20)

    return parser


def parse_config(argv: list[str]) -> ExperimentConfig:
    """Validate argv into a config; argparse exits with code 2 on bad usage."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    sub = ns.subcommand
    cfg = ExperimentConfig(subcommand=sub, output_path=ns.out, seed=Seed(ns.seed))
    if sub == "mu":
        if ns.hi < ns.lo:
            parser.error(f"--hi {ns.hi} must be >= --lo {ns.lo}")
        cfg.lo, cfg.hi = ns.lo, ns.hi
    elif sub == "mertens":
        cfg.limit = ns.limit
        cfg.block_length = ns.block_length
        cfg.sample_count = ns.samples
        cfg.checkpoint_path = ns.checkpoint
        cfg.resume = ns.resume
        cfg.stop_after = ns.stop_after
        cfg.threads = ns.threads
        if cfg.resume and not cfg.checkpoint_path:
            parser.error("--resume requires --checkpoint")
        if cfg.stop_after is not None and not cfg.checkpoint_path:
            parser.error("--stop-after requires --checkpoint")
    elif sub == "walk":
        cfg.n, cfg.trials, cfg.c_list, cfg.threads = ns.n, ns.trials, ns.c, ns.threads
    elif sub == "hawkins":
        cfg.limit, cfg.trials, cfg.threads = ns.limit, ns.trials, ns.threads
    elif sub == "pi-li":
        cfg.limit, cfg.stride, cfg.tol = ns.limit, ns.stride, ns.tol
    elif sub == "twins":
        cfg.limit = ns.limit
        cfg.stride = ns.stride if ns.stride is not None else max(1, ns.limit // 10)
        cfg.prime_limit = (
            ns.c2_prime_limit if ns.c2_prime_limit is not None else ns.limit
        )
    elif sub == "zeta":
        cfg.s, cfg.terms, cfg.prime_limit = ns.s, ns.terms, ns.prime_limit
    elif sub == "gamma":
        cfg.terms, cfg.limit = ns.terms, ns.limit
    elif sub == "primality":
        cfg.n, cfg.rounds = ns.n, ns.rounds
    return cfg


def emit_csv(series: CsvSeries, path) -> None:
    """Write header then rows, UTF-8, \\n endings, no trailing blank line.

    The file appears under a `.partial` name until atomically renamed.
    """
    path = os.fspath(path)
    partial = path + ".partial"
    with open(partial, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(series.headers) + "\n")
        for row in series.rows:
            if len(row) != len(series.headers):
                raise ValueError(f"row arity {len(row)} != header arity")
            fh.write(",".join(row) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(partial, path)


def parse_csv(path) -> CsvSeries:
    """Round-trip reader for files produced by emit_csv."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    headers = lines[0].split(",") if lines else []
    rows = [tuple(line.split(",")) for line in lines[1:]]
    return CsvSeries(headers=headers, rows=rows)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _utc_now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def _parameters(cfg: ExperimentConfig) -> dict:
    params = asdict(cfg)
    params["seed"] = cfg.seed.value
    return {k: v for k, v in params.items() if v is not None}


def _run_mu(cfg):
    series = CsvSeries(headers=["n", "mu"])
    lo = cfg.lo
    while lo <= cfg.hi:
        hi = min(lo + (1 << 22) - 1, cfg.hi)
        block = mu_block(lo, hi)
        for n in range(lo, hi + 1):
            series.rows.append((render_int(n), render_int(block.mu(n))))
        lo = hi + 1
    return series, {}


def _run_walk(cfg):
    walks = walk_trials(cfg.trials, cfg.n, cfg.seed, threads=cfg.threads)
    series = CsvSeries(headers=["trial", "final", "max_abs", "exceed_count"])
    for t, w in enumerate(walks):
        series.rows.append(
            (
                render_int(t),
                render_int(w.final_s),
                render_int(w.max_abs_s),
                render_int(w.envelope_exceed_count),
            )
        )
    stats = ensemble_from(walks, cfg.n, cfg.c_list)
    results = {
        "mean_final": stats.mean_final,
        "var_final": stats.var_final,
        "frac_within": {render_float(c): v for c, v in stats.frac_within.items()},
        "frac_ever_exceed_envelope": stats.frac_ever_exceed_envelope,
    }
    return series, results


def _run_hawkins(cfg):
    series = CsvSeries(headers=["trial", "n", "count"])
    counts = []
    trials = range(cfg.trials)
    if cfg.threads > 1 and cfg.trials > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(
                pool.map(
                    lambda t: hawkins_sieve(
                        cfg.limit, cfg.seed, t, keep_survivors=False
                    ),
                    trials,
                )
            )
    else:
        outcomes = [
            hawkins_sieve(cfg.limit, cfg.seed, t, keep_survivors=False) for t in trials
        ]
    for t, res in enumerate(outcomes):
        for n, count in res.density_samples:
            series.rows.append((render_int(t), render_int(n), render_int(count)))
        counts.append(res.survivor_count)
    results = {
        "mean_survivor_count": sum(counts) / len(counts),
        "expected_x_over_ln_x": cfg.limit / math.log(cfg.limit),
    }
    return series, results


def _run_pi_li(cfg):
    points, all_positive = gauss_gap_scan(cfg.limit, cfg.stride, tol=cfg.tol)
    series = CsvSeries(headers=["x", "pi", "li", "gap"])
    for pt in points:
        series.rows.append(
            (
                render_int(pt.x),
                render_int(pt.pi),
                render_float(pt.li),
                render_float(pt.gap),
            )
        )
    return series, {"all_gaps_positive": all_positive}


def _run_twins(cfg):
    table = primes_up_to(cfg.limit)
    c2 = twin_prime_constant(cfg.prime_limit).c2_partial
    xs = [x for x in range(cfg.stride, cfg.limit + 1, cfg.stride) if x >= 4]
    if not xs or xs[-1] != cfg.limit:
        xs.append(cfg.limit)
    series = CsvSeries(headers=["x", "pairs", "heuristic"])
    last_ratio = None
    for x in xs:
        pairs = twin_prime_count(x, table=table)
        est = twin_heuristic(x, c2).value
        series.rows.append((render_int(x), render_int(pairs), render_float(est)))
        if pairs:
            last_ratio = est / pairs
    return series, {"c2_partial": c2, "final_heuristic_over_count": last_ratio}


def _run_zeta(cfg):
    series = CsvSeries(headers=["s", "method", "parameter", "value", "tail_bound"])
    for method in ("direct-sum", "euler-maclaurin"):
        ev = zeta_real(cfg.s, cfg.terms, method)
        series.rows.append(
            (
                render_float(ev.s),
                method,
                render_int(cfg.terms),
                render_float(ev.value),
                render_float(ev.tail_bound),
            )
        )
    ev = zeta_euler_product(cfg.s, cfg.prime_limit)
    series.rows.append(
        (
            render_float(ev.s),
            ev.method,
            render_int(cfg.prime_limit),
            render_float(ev.value),
            render_float(ev.tail_bound),
        )
    )
    identity = mu_reciprocal_identity(cfg.s, cfg.terms)
    series.rows.append(
        (
            render_float(cfg.s),
            "moebius-reciprocal",
            render_int(cfg.terms),
            render_float(identity),
            "",
        )
    )
    return series, {"moebius_reciprocal": identity}


def _run_gamma(cfg):
    series = CsvSeries(headers=["kind", "parameter", "value"])
    grid = []
    t = 10
    while t < cfg.terms:
        grid.append(t)
        t *= 10
    grid.append(cfg.terms)
    for t in grid:
        series.rows.append(
            ("harmonic", render_int(t), render_float(euler_gamma(t).value))
        )
    xs = []
    x = 10
    while x < cfg.limit:
        xs.append(x)
        x *= 10
    xs.append(cfg.limit)
    table = primes_up_to(cfg.limit)
    final = None
    for x in xs:
        final = mertens_product_check(x, table=table)
        series.rows.append(("mertens_product", render_int(x), render_float(final)))
    return series, {"gamma_estimate": euler_gamma(cfg.terms).value, "product_final": final}


def _run_primality(cfg):
    verdict = miller_rabin(cfg.n, cfg.rounds, cfg.seed)
    series = CsvSeries(headers=["n", "verdict", "rounds"])
    series.rows.append(
        (
            render_int(cfg.n),
            verdict.tag,
            render_int(verdict.rounds) if verdict.rounds is not None else "",
        )
    )
    return series, {"verdict": verdict.tag, "error_bound": verdict.error_bound}


_RUNNERS = {
    "mu": _run_mu,
    "walk": _run_walk,
    "hawkins": _run_hawkins,
    "pi-li": _run_pi_li,
    "twins": _run_twins,
    "zeta": _run_zeta,
    "gamma": _run_gamma,
    "primality": _run_primality,
}

_MERTENS_HEADERS = ["n", "M", "ratio"]


def _mertens_row(sample) -> tuple[str, str, str]:
    return (render_int(sample.n), render_int(sample.m), render_float(sample.ratio))


def _trim_partial(partial: str, n_keep: int) -> list[str]:
    """Keep only sample rows with n <= n_keep; returns the kept lines."""
    if not os.path.exists(partial):
        raise CheckpointError(f"{partial}: partial data file missing, cannot resume")
    with open(partial, encoding="utf-8", newline="") as fh:
        lines = [line for line in fh.read().split("\n") if line]
    if not lines or lines[0] != ",".join(_MERTENS_HEADERS):
        raise CheckpointError(f"{partial}: unexpected header, cannot resume")
    kept = [lines[0]]
    for line in lines[1:]:
        n_text = line.split(",", 1)[0]
        try:
            if int(n_text) <= n_keep:
                kept.append(line)
        except ValueError:
            raise CheckpointError(f"{partial}: unparseable row {line!r}") from None
    return kept


def _run_mertens_streaming(cfg: ExperimentConfig) -> tuple[dict, bool]:
    """Stream M(n), appending samples to the partial CSV and saving the
    checkpoint at block boundaries.  Returns (results, finished)."""
    partial = cfg.output_path + ".partial"
    state = None
    if cfg.resume:
        state = checkpoint_resume(cfg.checkpoint_path)
        kept = _trim_partial(partial, state.n_processed)
        tmp = partial + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(kept) + "\n")
        os.replace(tmp, partial)
        out = open(partial, "a", encoding="utf-8", newline="")
    else:
        out = open(partial, "w", encoding="utf-8", newline="")
        out.write(",".join(_MERTENS_HEADERS) + "\n")

    run = MertensRun(
        cfg.limit,
        cfg.block_length,
        cfg.sample_count,
        threads=cfg.threads,
        resume=state,
    )
    written = 0

    def on_block(r: MertensRun):
        nonlocal written
        while written < len(r.samples):
            out.write(",".join(_mertens_row(r.samples[written])) + "\n")
            written += 1
        out.flush()
        if cfg.checkpoint_path:
            checkpoint_save(r.checkpoint, cfg.checkpoint_path)
        print(
            f"mertens: n={r.n_processed} M={r.m} max|M|={r.max_abs_m}",
            file=sys.stderr,
        )

    try:
        run.run(stop_after=cfg.stop_after, on_block=on_block)
        out.flush()
        os.fsync(out.fileno())
    finally:
        out.close()

    if run.n_processed < cfg.limit:
        # deliberate stop: leave the .partial and checkpoint for resume
        return {"stopped_at": run.n_processed}, False

    os.replace(partial, cfg.output_path)
    if cfg.checkpoint_path and os.path.exists(cfg.checkpoint_path):
        os.remove(cfg.checkpoint_path)  # run complete; avoid stale state
    summary = run.summary
    results = {
        "final_m": summary.final_m,
        "max_abs_m": summary.max_abs_m,
        "argmax": summary.argmax,
        "count_neg": summary.count_neg,
        "count_pos": summary.count_pos,
        "count_zero": summary.count_zero,
        "max_ratio": summary.max_ratio,
    }
    if len(run.records) >= 2:
        fit = fit_growth_exponent(run.records)
        results["growth_alpha"] = fit.alpha
        results["growth_residual"] = fit.residual
    return results, True


def run_experiment(
    config: ExperimentConfig, argv: list[str] | None = None
) -> RunManifest | None:
    """Dispatch to the owning module and write CSV + manifest.

    Returns None for a deliberately stopped (resumable) mertens run,
    which leaves only `.partial` data and a checkpoint behind.
    """
    started = _utc_now()
    if config.subcommand == "mertens":
        results, finished = _run_mertens_streaming(config)
        if not finished:
            return None
    else:
        series, results = _RUNNERS[config.subcommand](config)
        emit_csv(series, config.output_path)
    manifest = RunManifest(
        tool_version=__version__,
        command_line=["mertenslab", *(sys.argv[1:] if argv is None else argv)],
        subcommand=config.subcommand,
        seed=config.seed.value,
        parameters=_parameters(config),
        started_at=started,
        finished_at=_utc_now(),
        files={config.output_path: _sha256(config.output_path)},
        results=results,
    )
    manifest_path = config.output_path + ".manifest.json"
    tmp = manifest_path + ".partial"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(asdict(manifest), fh, indent=2, default=str)
        fh.write("\n")
    os.replace(tmp, manifest_path)
    return manifest


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    config = parse_config(argv)
    try:
        manifest = run_experiment(config, argv)
    except (OSError, CheckpointError) as exc:
        print(f"mertenslab: error: {exc}", file=sys.stderr)
        return 3
    if manifest is None:
        print(
            f"mertenslab: stopped before limit; resume with --resume "
            f"--checkpoint {config.checkpoint_path}",
            file=sys.stderr,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
