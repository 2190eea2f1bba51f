"""Strategy-dominance grids and profitability thresholds over (q, gamma)."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .analytic import EthereumParams, apparent_hashrate
from .distributions import MinerParams, Strategy
from .errors import DomainError

Q_MIN_EDGE = 1e-6
Q_MAX_EDGE = 0.5 - 1e-6

#: tie-break order; on (near-)equal values the earliest strategy wins
PRECEDENCE = (
    Strategy.HONEST,
    Strategy.SM,
    Strategy.LSM,
    Strategy.EFSM,
    Strategy.ETH_SM_OLD_DA,
    Strategy.ETH_SM_NEW_DA,
)
TIE_RTOL = 1e-12

REGION_HEADER = (
    "q", "gamma", "best",
    "value_hm", "value_sm", "value_lsm", "value_efsm", "value_eth_old", "value_eth_new",
)
THRESHOLD_HEADER = ("comparison", "gamma", "q_min", "converged")

BITCOIN_SET = frozenset({Strategy.HONEST, Strategy.SM, Strategy.LSM, Strategy.EFSM})


class Comparison(enum.Enum):
    """Withholding strategy compared against honest mining for a threshold."""

    BTC_SM = "btc-sm"
    ETH_OLD = "eth-old"
    ETH_NEW = "eth-new"

    @property
    def strategy(self) -> Strategy:
        return {
            Comparison.BTC_SM: Strategy.SM,
            Comparison.ETH_OLD: Strategy.ETH_SM_OLD_DA,
            Comparison.ETH_NEW: Strategy.ETH_SM_NEW_DA,
        }[self]

    @classmethod
    def parse(cls, name: str) -> "Comparison":
        key = name.lower().replace("_", "-")
        for c in cls:
            if c.value == key:
                return c
        raise DomainError(f"unknown comparison {name!r}")


@dataclass(frozen=True)
class RegionCell:
    q: float
    gamma: float
    best: Strategy
    values: dict  # Strategy -> apparent hashrate


class ThresholdStatus(enum.Enum):
    ROOT = "root"
    #: withholding beats honest mining on the whole q range
    ALWAYS_PROFITABLE = "always-profitable"
    NEVER_PROFITABLE = "never-profitable"


@dataclass(frozen=True)
class ThresholdPoint:
    """Smallest q where the strategy's apparent hashrate exceeds q.

    ``q_min`` is None unless ``status`` is ROOT. ``one_crossing`` is False when
    the verification mesh finds ``q~(q) <= q`` somewhere above the root.
    """

    comparison: Comparison
    gamma: float
    q_min: float | None
    status: ThresholdStatus
    one_crossing: bool = True

    @property
    def converged(self) -> bool:
        return self.status is ThresholdStatus.ROOT


def classify_point(q, gamma, strategies, eth: EthereumParams | None = None) -> RegionCell:
    """Evaluate each strategy at (q, gamma) and keep the best one."""
    strategies = set(strategies)
    if not strategies:
        raise DomainError("no strategies to compare")
    params = MinerParams(q, gamma)
    if eth is None and any(s.is_ethereum for s in strategies):
        eth = EthereumParams()
    values = {s: apparent_hashrate(s, params, eth) for s in PRECEDENCE if s in strategies}
    top = max(values.values())
    best = next(s for s, v in values.items() if v >= top - TIE_RTOL * abs(top))
    return RegionCell(q=q, gamma=gamma, best=best, values=values)


def _clamp_q(q: float) -> float:
    return min(max(q, Q_MIN_EDGE), Q_MAX_EDGE)


def grid_axes(q_range, gamma_range, resolution):
    nq, ng = (resolution, resolution) if isinstance(resolution, int) else resolution
    if nq < 2 or ng < 2:
        raise DomainError(f"resolution must be >= 2 per axis, got {resolution}")
    qs = [_clamp_q(float(x)) for x in np.linspace(q_range[0], q_range[1], nq)]
    gs = [float(x) for x in np.linspace(gamma_range[0], gamma_range[1], ng)]
    if any(not 0 <= g <= 1 for g in gs):
        raise DomainError("gamma range must lie in [0, 1]")
    return qs, gs


def region_grid(
    q_range=(0.0, 0.5),
    gamma_range=(0.0, 1.0),
    resolution=100,
    strategies=BITCOIN_SET,
    eth: EthereumParams | None = None,
) -> list[RegionCell]:
    """Row-major grid of :func:`classify_point` (q outer, gamma inner).

    ``resolution`` is one count for both axes or a ``(nq, ngamma)`` pair. q is
    clamped to ``[1e-6, 1/2 - 1e-6]``.
    """
    qs, gs = grid_axes(q_range, gamma_range, resolution)
    return [classify_point(q, g, strategies, eth) for q in qs for g in gs]


def _excess(strategy, eth):
    def f(q, gamma):
        return float(apparent_hashrate(strategy, MinerParams(q, gamma), eth)) - q
    return f


def threshold_at(
    comparison: Comparison,
    gamma: float,
    tol: float = 1e-9,
    eth: EthereumParams | None = None,
    mesh: int = 2000,
) -> ThresholdPoint:
    """Bisection for the smallest root of ``q~(q, gamma) - q`` in q.

    A uniform mesh on ``[1e-6, 1/2 - 1e-6]`` locates the first step from
    ``f <= 0`` to ``f > 0``; bisection then refines that bracket to ``tol``.
    """
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    eth = eth or EthereumParams()
    f = _excess(comparison.strategy, eth)
    xs = np.linspace(Q_MIN_EDGE, Q_MAX_EDGE, mesh)
    fs = [f(float(x), gamma) for x in xs]
    if fs[0] > 0:
        return ThresholdPoint(comparison, gamma, None, ThresholdStatus.ALWAYS_PROFITABLE)
    k = next((i for i in range(1, mesh) if fs[i - 1] <= 0 < fs[i]), None)
    if k is None:
        return ThresholdPoint(comparison, gamma, None, ThresholdStatus.NEVER_PROFITABLE)
    lo, hi = float(xs[k - 1]), float(xs[k])
    if fs[k - 1] == 0:
        root = lo
    else:
        root = bisect(lambda q: f(q, gamma), lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
    one = all(v > 0 for v in fs[k:])
    return ThresholdPoint(comparison, gamma, float(root), ThresholdStatus.ROOT, one)


def gamma_grid(gamma_samples: int) -> list[float]:
    """``gamma_samples`` evenly spaced values on [0, 1]; a single sample is gamma = 0."""
    if gamma_samples < 1:
        raise DomainError(f"gamma_samples must be >= 1, got {gamma_samples}")
    if gamma_samples == 1:
        return [0.0]
    return [float(g) for g in np.linspace(0.0, 1.0, gamma_samples)]


def threshold_curve(
    comparison: Comparison,
    gamma_samples: int = 101,
    tol: float = 1e-9,
    eth: EthereumParams | None = None,
    gammas=None,
) -> list[ThresholdPoint]:
    """q_min along gamma; explicit ``gammas`` override the even grid."""
    gs = gamma_grid(gamma_samples) if gammas is None else [float(g) for g in gammas]
    return [threshold_at(comparison, g, tol, eth) for g in gs]


def _num(x) -> str:
    return "%.12g" % float(x)


_COLUMN_OF = dict(zip(PRECEDENCE, ("value_hm", "value_sm", "value_lsm", "value_efsm",
                                    "value_eth_old", "value_eth_new")))


def region_rows(cells):
    for c in cells:
        row = {"q": _num(c.q), "gamma": _num(c.gamma), "best": c.best.value}
        for s, col in _COLUMN_OF.items():
            row[col] = _num(c.values[s]) if s in c.values else ""
        yield [row[h] for h in REGION_HEADER]


def threshold_rows(points):
    for p in points:
        yield [
            p.comparison.value,
            _num(p.gamma),
            "" if p.q_min is None else _num(p.q_min),
            "true" if p.converged else "false",
        ]


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_regions_csv(path, cells) -> None:
    _write(path, REGION_HEADER, region_rows(cells))


def write_thresholds_csv(path, points) -> None:
    _write(path, THRESHOLD_HEADER, threshold_rows(points))
