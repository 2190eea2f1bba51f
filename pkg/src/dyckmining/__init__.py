"""Apparent hashrates of block-withholding mining strategies.

Closed forms (:mod:`.analytic`), exact enumeration of attack cycles
(:mod:`.oracle`), Monte Carlo simulation (:mod:`.simulator`) and parameter
sweeps (:mod:`.sweep`).
"""

from .analytic import (
    EthereumParams,
    EthExpectations,
    apparent_hashrate,
    eth_expectations,
    xi_factor,
)
from .combinatorics import catalan_gf, catalan_number, enumerate_dyck_words, is_dyck_word
from .distributions import (
    MinerParams,
    Strategy,
    cycle_length_pmf,
    expected_cycle_length,
    tail_mass_bound,
    tail_mean_bound,
)
from .errors import CapExceededError, DomainError, MissingEthParamsError, UnsupportedStrategyError
from .oracle import (
    Interval,
    enumerate_cycles,
    oracle_apparent_hashrate,
    oracle_eth_pair_expectations,
    oracle_expected_length,
)
from .simulator import EstimateReport, derive_stream, run_estimation, simulate_cycle
from .sweep import Comparison, classify_point, region_grid, threshold_curve

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "Comparison",
    "DomainError",
    "EstimateReport",
    "EthExpectations",
    "EthereumParams",
    "Interval",
    "MinerParams",
    "MissingEthParamsError",
    "Strategy",
    "UnsupportedStrategyError",
    "apparent_hashrate",
    "catalan_gf",
    "catalan_number",
    "classify_point",
    "cycle_length_pmf",
    "derive_stream",
    "enumerate_cycles",
    "enumerate_dyck_words",
    "eth_expectations",
    "expected_cycle_length",
    "is_dyck_word",
    "oracle_apparent_hashrate",
    "oracle_eth_pair_expectations",
    "oracle_expected_length",
    "region_grid",
    "run_estimation",
    "simulate_cycle",
    "tail_mass_bound",
    "tail_mean_bound",
    "threshold_curve",
    "xi_factor",
]
