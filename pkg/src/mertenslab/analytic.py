"""Deterministic analytic baselines.

The logarithmic integral against exact prime counts, twin-prime counts
against the Hardy-Littlewood heuristic, Euler's gamma with the Mertens
product, and real-axis zeta via truncated sum, Euler product, and the
Mobius reciprocal.  Every reported value carries an explicit error
bound or tolerance.  All operations are pure and thread-safe.

The integral convention everywhere is the lower limit 2 (so there is no
u = 1 singularity to dodge); values are 64-bit floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sieve import PrimeTable, mu_block, primes_up_to


@dataclass(frozen=True)
class Quadrature:
    value: float
    error_estimate: float  # bound on the refinement residual, >= 0


@dataclass(frozen=True)
class TwinConstants:
    c2_partial: float  # partial Hardy-Littlewood product, in (0, 1)
    prime_limit: int


@dataclass(frozen=True)
class ZetaEval:
    s: float
    value: float
    method: str  # direct-sum | euler-maclaurin | euler-product | moebius-reciprocal
    tail_bound: float


@dataclass(frozen=True)
class GammaEstimate:
    terms: int
    value: float


@dataclass(frozen=True)
class GapPoint:
    x: int
    pi: int
    li: float
    gap: float  # li - pi


def _adaptive_simpson(f, a: float, b: float, tol: float) -> Quadrature:
    """Adaptive Simpson with interval bisection.

    Accepts a panel when the Richardson estimate |S_halves - S_whole|/15
    is within its share of the tolerance; the accepted estimates sum to
    the reported error bound.
    """

    def rec(a, fa, b, fb, m, fm, whole, tol):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = f(lm)
        frm = f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0, abs(delta) / 15.0
        v1, e1 = rec(a, fa, m, fm, lm, flm, left, tol / 2.0)
        v2, e2 = rec(m, fm, b, fb, rm, frm, right, tol / 2.0)
        return v1 + v2, e1 + e2

    if b <= a:
        return Quadrature(0.0, 0.0)
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    value, err = rec(a, fa, b, fb, m, fm, whole, tol)
    return Quadrature(value, err)


def li(x: float, tol: float = 1e-9) -> Quadrature:
    """Logarithmic integral from 2 to x by adaptive Simpson."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _adaptive_simpson(lambda u: 1.0 / math.log(u), 2.0, float(x), tol)


def pi_exact(x: int, *, table: PrimeTable | None = None) -> int:
    """Exact count of primes <= x."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if table is None:
        table = primes_up_to(x)
    elif table.limit < x:
        raise ValueError(f"prime table up to {table.limit} < {x}")
    return int(np.searchsorted(table.primes, x, side="right"))


def gauss_gap_scan(
    x_max: int,
    stride: int,
    *,
    tol: float = 1e-8,
    table: PrimeTable | None = None,
) -> tuple[list[GapPoint], bool]:
    """Li(x) - pi(x) on the stride grid, plus an all-positive flag.

    The grid is the multiples of `stride` up to x_max (never below 3,
    which drops the degenerate x = 2 endpoint), with x_max appended when
    it is off-grid.  Li is accumulated segment by segment, so the error
    estimate at the last point bounds the whole accumulation.
    """
    if x_max < 3:
        raise ValueError(f"x_max must be >= 3, got {x_max}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    xs = [x for x in range(stride, x_max + 1, stride) if x >= 3]
    if not xs or xs[-1] != x_max:
        xs.append(x_max)
    if table is None:
        table = primes_up_to(x_max)
    seg_tol = tol / len(xs)
    points: list[GapPoint] = []
    li_val = 0.0
    li_err = 0.0
    prev = 2.0
    all_positive = True
    for x in xs:
        q = _adaptive_simpson(lambda u: 1.0 / math.log(u), prev, float(x), seg_tol)
        li_val += q.value
        li_err += q.error_estimate
        prev = float(x)
        count = pi_exact(x, table=table)
        gap = li_val - count
        points.append(GapPoint(x=x, pi=count, li=li_val, gap=gap))
        if gap <= 0:
            all_positive = False
    return points, all_positive


def twin_prime_count(x: int, *, table: PrimeTable | None = None) -> int:
    """Count of twin pairs (p, p+2), both prime, with p + 2 <= x."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    if table is None:
        table = primes_up_to(x)
    p = table.primes[table.primes <= x]
    if p.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(p) == 2))


def twin_prime_constant(prime_limit: int) -> TwinConstants:
    """Partial twin-prime constant: product over odd primes p <= limit
    of (1 - 1/(p-1)^2).  Strictly decreasing in the limit."""
    if prime_limit < 3:
        raise ValueError(f"prime_limit must be >= 3, got {prime_limit}")
    p = primes_up_to(prime_limit).primes[1:].astype(np.float64)  # odd primes
    log_c2 = float(np.sum(np.log1p(-1.0 / ((p - 1.0) ** 2))))
    return TwinConstants(c2_partial=math.exp(log_c2), prime_limit=prime_limit)


def twin_density_integral(x: float, tol: float = 1e-9) -> Quadrature:
    """Integral from 2 to x of dt/(ln t)^2 (0 at the x = 2 boundary)."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    return _adaptive_simpson(lambda t: math.log(t) ** -2.0, 2.0, float(x), tol)


def twin_heuristic(x: float, c2: float, tol: float = 1e-9) -> Quadrature:
    """Hardy-Littlewood twin estimate 2*c2*integral(dt/(ln t)^2, 2..x).

    The reported error is at most tol * 2 * c2.  Doubling c2 doubles the
    estimate; the raw integral is exposed as `twin_density_integral`.
    """
    if x < 4:
        raise ValueError(f"x must be >= 4, got {x}")
    q = twin_density_integral(x, tol)
    scale = 2.0 * c2
    return Quadrature(scale * q.value, scale * q.error_estimate)


def euler_gamma(terms: int) -> GammaEstimate:
    """Harmonic-sum estimate H_n - ln n - 1/(2n); error is O(n^-2)."""
    if terms < 10:
        raise ValueError(f"terms must be >= 10, got {terms}")
    h = float(np.sum(1.0 / np.arange(1, terms + 1, dtype=np.float64)))
    return GammaEstimate(terms, h - math.log(terms) - 0.5 / terms)


def mertens_product_check(x: int, *, table: PrimeTable | None = None) -> float:
    """e^gamma * ln x * product over p <= x of (1 - 1/p); tends to 1."""
    if x < 3:
        raise ValueError(f"x must be >= 3, got {x}")
    if table is None:
        table = primes_up_to(x)
    p = table.primes[table.primes <= x].astype(np.float64)
    log_prod = float(np.sum(np.log1p(-1.0 / p)))
    return math.exp(np.euler_gamma + log_prod) * math.log(x)


def zeta_real(s: float, terms: int, method: str = "euler-maclaurin") -> ZetaEval:
    """Real-axis zeta for s > 1 by truncated summation.

    direct-sum sums n = 1..N with the integral tail bound N^(1-s)/(s-1).
    euler-maclaurin sums n = 1..N-1 and corrects with the integral plus
    half-endpoint terms N^(1-s)/(s-1) + N^(-s)/2, leaving the next
    Euler-Maclaurin term (s/12) N^(-s-1) as the stated bound.
    """
    if s <= 1:
        raise ValueError(f"s must be > 1, got {s}")
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    n_float = float(terms)
    if method == "direct-sum":
        ns = np.arange(1, terms + 1, dtype=np.float64)
        value = float(np.sum(ns ** -s))
        bound = n_float ** (1.0 - s) / (s - 1.0)
    elif method == "euler-maclaurin":
        ns = np.arange(1, terms, dtype=np.float64)
        value = float(np.sum(ns ** -s)) if terms > 1 else 0.0
        value += n_float ** (1.0 - s) / (s - 1.0) + 0.5 * n_float ** -s
        bound = (s / 12.0) * n_float ** (-s - 1.0)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ZetaEval(s=s, value=value, method=method, tail_bound=bound)


def zeta_euler_product(s: float, prime_limit: int) -> ZetaEval:
    """Product over primes p <= prime_limit of 1/(1 - p^-s).

    Always underestimates the full value; the bound covers the dropped
    primes via log(zeta/product) <= 2 * sum_{n > P} n^-s.
    """
    if s <= 1:
        raise ValueError(f"s must be > 1, got {s}")
    if prime_limit < 2:
        raise ValueError(f"prime_limit must be >= 2, got {prime_limit}")
    p = primes_up_to(prime_limit).primes.astype(np.float64)
    log_value = -float(np.sum(np.log1p(-(p ** -s))))
    value = math.exp(log_value)
    log_tail = 2.0 * float(prime_limit) ** (1.0 - s) / (s - 1.0)
    return ZetaEval(
        s=s, value=value, method="euler-product", tail_bound=value * math.expm1(log_tail)
    )


def mu_reciprocal_identity(s: float, terms: int) -> float:
    """(sum of mu(n)/n^s for n <= terms) * zeta(s); tends to 1.

    The Mobius partial sum approximates 1/zeta(s), so the product drifts
    from 1 only by the two truncation tails.
    """
    if s <= 1:
        raise ValueError(f"s must be > 1, got {s}")
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    total = 0.0
    lo = 1
    while lo <= terms:
        hi = min(lo + (1 << 22) - 1, terms)
        block = mu_block(lo, hi)
        ns = np.arange(lo, hi + 1, dtype=np.float64)
        total += float(np.sum(block.values * ns ** -s))
        lo = hi + 1
    return total * zeta_real(s, terms, "euler-maclaurin").value
