"""mertenslab: desk-scale experiments around the Mobius and Mertens
functions, fair-coin random walks, and classical prime baselines."""

__version__ = "0.1.0"

from .errors import CapacityError, CheckpointError, InsufficientDataError
from .rng import Seed, Stream
from .sieve import (
    MoebiusBlock,
    PrimeTable,
    SpfTable,
    mu_block,
    mu_of,
    primes_up_to,
    spf_table,
)
from .mertens import (
    Checkpoint,
    GrowthFit,
    MertensRun,
    MertensSummary,
    TrajectorySample,
    checkpoint_resume,
    checkpoint_save,
    fit_growth_exponent,
    mertens_at,
    mertens_stream,
    sign_balance,
)
from .stochastic import (
    EnsembleStats,
    HawkinsResult,
    PrimalityVerdict,
    WalkSummary,
    coin_walk,
    hawkins_sieve,
    lil_envelope,
    miller_rabin,
    walk_ensemble,
)
from .analytic import (
    GammaEstimate,
    GapPoint,
    Quadrature,
    TwinConstants,
    ZetaEval,
    euler_gamma,
    gauss_gap_scan,
    li,
    mertens_product_check,
    mu_reciprocal_identity,
    pi_exact,
    twin_density_integral,
    twin_heuristic,
    twin_prime_constant,
    twin_prime_count,
    zeta_euler_product,
    zeta_real,
)

__all__ = [
    "CapacityError",
    "CheckpointError",
    "InsufficientDataError",
    "Seed",
    "Stream",
    "PrimeTable",
    "SpfTable",
    "MoebiusBlock",
    "primes_up_to",
    "spf_table",
    "mu_of",
    "mu_block",
    "MertensSummary",
    "TrajectorySample",
    "GrowthFit",
    "Checkpoint",
    "MertensRun",
    "mertens_stream",
    "mertens_at",
    "sign_balance",
    "fit_growth_exponent",
    "checkpoint_save",
    "checkpoint_resume",
    "WalkSummary",
    "EnsembleStats",
    "HawkinsResult",
    "PrimalityVerdict",
    "lil_envelope",
    "coin_walk",
    "walk_ensemble",
    "hawkins_sieve",
    "miller_rabin",
    "Quadrature",
    "TwinConstants",
    "ZetaEval",
    "GammaEstimate",
    "GapPoint",
    "li",
    "pi_exact",
    "gauss_gap_scan",
    "twin_prime_count",
    "twin_prime_constant",
    "twin_density_integral",
    "twin_heuristic",
    "euler_gamma",
    "mertens_product_check",
    "zeta_real",
    "zeta_euler_product",
    "mu_reciprocal_identity",
]
