"""Closed-form long-term apparent hashrates.

The apparent hashrate of a strategy is ``E[Z] / E[L]`` (attacker blocks over
blocks added to the official chain per attack cycle). In Ethereum the
numerator becomes the full per-cycle revenue ``E[R]`` in coinbase units, and
under the current difficulty adjustment referred uncles join the
denominator: ``E[R] / (E[L] + E[U])``.

Rational inputs (:class:`~fractions.Fraction`) give exact rational outputs
for every formula that does not involve the Catalan generating function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .combinatorics import exact_or_float_sqrt
from .distributions import MinerParams, Strategy, expected_cycle_length
from .errors import DomainError, MissingEthParamsError

#: Below this connectivity the EFSM/LSM closed forms switch to their gamma -> 0 limits.
GAMMA_LIMIT_SWITCH = 1e-9


def _default_schedule() -> tuple:
    return tuple(Fraction(8 - d, 8) for d in range(1, 7))


@dataclass(frozen=True)
class EthereumParams:
    """Ethereum uncle reward rules.

    ``ku[d-1]`` is the uncle reward ``K_u(d)`` (fraction of the coinbase) for
    distance ``d = height(nephew) - height(uncle)``, ``1 <= d <= n1``.
    Defaults: ``n1 = 6``, ``K_u(d) = (8 - d) / 8``, ``pi = 1/32``, ``b = 2``.
    """

    n1: int = 6
    ku: tuple = field(default_factory=_default_schedule)
    pi: object = Fraction(1, 32)
    b: object = 2

    def __post_init__(self):
        if self.n1 < 1:
            raise DomainError(f"n1 must be >= 1, got {self.n1}")
        object.__setattr__(self, "ku", tuple(self.ku))
        if len(self.ku) != self.n1:
            raise DomainError(
                f"uncle schedule needs {self.n1} entries (d = 1..n1), got {len(self.ku)}"
            )
        if any(not 0 <= k <= 1 for k in self.ku):
            raise DomainError("uncle rewards must lie in [0, 1]")
        if not 0 <= self.pi < 1:
            raise DomainError(f"nephew premium must lie in [0, 1), got {self.pi}")
        if self.b <= 0:
            raise DomainError(f"coinbase must be positive, got {self.b}")

    def uncle_reward(self, d: int):
        """``K_u(d)``; zero outside ``1 <= d <= n1``."""
        if 1 <= d <= self.n1:
            return self.ku[d - 1]
        return 0

    @property
    def max_uncle_reward(self):
        return max(self.ku)


@dataclass(frozen=True)
class EthExpectations:
    """Per-cycle uncle/nephew expectations of Ethereum selfish mining."""

    e_u: object
    e_v: object
    e_uh: object
    e_us: object
    e_ru_over_b: object
    e_rn_over_pi: object
    #: ``E[U_h]`` split into in-cycle (first) and next-cycle (second) honest references
    e_uh_in_cycle: object
    e_uh_next_cycle: object


def apparent_hashrate_sm_btc(params: MinerParams):
    """Selfish mining in Bitcoin.

    Numerator ``[(p-q)(1+pq) + pq] q - (p-q) p^2 q (1-gamma)`` over the
    denominator ``p^2 q + p - q = (p - q) E[L]``.
    """
    p, q, g = params.p, params.q, params.gamma
    num = ((p - q) * (1 + p * q) + p * q) * q - (p - q) * p**2 * q * (1 - g)
    return num / (p**2 * q + p - q)


def apparent_hashrate_efsm(params: MinerParams):
    """Equal-Fork Stubborn Mining; the gamma = 0 singularity is removable with limit 0.

    With ``s = sqrt(1 - 4(1-gamma)pq)`` the factor ``1 - p C((1-gamma)pq)``
    equals ``4pq gamma / ((s + p - q)(1 + s))``, so the ``1/gamma`` cancels and
    small gamma loses no precision.
    """
    p, q, g = params.p, params.q, params.gamma
    if g < GAMMA_LIMIT_SWITCH:
        return 0 * q
    s = exact_or_float_sqrt(1 - 4 * (1 - g) * p * q)
    return q / p - (1 - g) * (p - q) * 4 * q / ((s + p - q) * (1 + s))


def apparent_hashrate_lsm(params: MinerParams):
    """Lead Stubborn Mining; at gamma = 0 the limit ``q^2 (2p - q) / (p + pq - q)`` is used.

    ``1 - p(1-gamma) C((1-gamma)pq) = (s - t) / (1 + s)`` with
    ``t = p - q - 2p gamma``; for ``t > 0`` the difference is rewritten as
    ``4p^2 gamma (1-gamma) / (s + t)`` to avoid cancellation.
    """
    p, q, g = params.p, params.q, params.gamma
    denom = p + p * q - q
    if g < GAMMA_LIMIT_SWITCH:
        return q**2 * (2 * p - q) / denom
    s = exact_or_float_sqrt(1 - 4 * (1 - g) * p * q)
    t = p - q - 2 * p * g
    if t > 0:
        fork = p * q * (p - q) * (1 - g) ** 2 * 4 * p**2 / ((s + t) * (1 + s))
    else:
        fork = p * q * (p - q) * (1 - g) / g * (s - t) / (1 + s)
    lead = q * (p + p * q - q**2) / denom
    return lead - fork / denom


def _late_uncle_mass(params: MinerParams, eth: EthereumParams):
    # P[cycle is S^k H^(k-1), 2 <= k <= n1] = pq^2 (1 - (pq)^(n1-1)) / (1 - pq)
    p, q = params.p, params.q
    return p * q**2 * (1 - (p * q) ** (eth.n1 - 1)) / (1 - p * q)


def eth_expectations(params: MinerParams, eth: EthereumParams | None = None) -> EthExpectations:
    eth = eth or EthereumParams()
    p, q, g = params.p, params.q, params.gamma
    e_u = q - q ** (eth.n1 + 1)
    e_v = _late_uncle_mass(params, eth)
    uh_first = p**2 * q
    uh_second = (p + (1 - g) * p**2 * q) * e_v
    e_uh = uh_first + uh_second
    e_rn_over_pi = q**2 * (1 + p) - q ** (eth.n1 + 1) - (p + (1 - g) * p**2 * q) * e_v
    return EthExpectations(
        e_u=e_u,
        e_v=e_v,
        e_uh=e_uh,
        e_us=e_u - e_uh,
        e_ru_over_b=p**2 * q * (1 - g) * eth.uncle_reward(1),
        e_rn_over_pi=e_rn_over_pi,
        e_uh_in_cycle=uh_first,
        e_uh_next_cycle=uh_second,
    )


def eth_components(params: MinerParams, eth: EthereumParams | None = None) -> dict:
    """The additive pieces of the old-adjustment hashrate and the factor xi."""
    eth = eth or EthereumParams()
    p, q, g = params.p, params.q, params.gamma
    scale = (p - q) / (p - q + p**2 * q)  # 1 / E[L]
    qu = p**2 * q * (1 - g) * scale
    qn = eth_expectations(params, eth).e_rn_over_pi * scale
    return {
        "q_btc": apparent_hashrate_sm_btc(params),
        "q_uncle": qu,
        "q_nephew": qn,
        "uncle_term": qu * eth.uncle_reward(1),
        "nephew_term": qn * eth.pi,
        "xi": xi_factor(params, eth),
    }


def apparent_hashrate_eth_old(params: MinerParams, eth: EthereumParams | None = None):
    """Ethereum selfish mining, difficulty adjusted on official blocks only."""
    c = eth_components(params, eth)
    return c["q_btc"] + c["uncle_term"] + c["nephew_term"]


def xi_factor(params: MinerParams, eth: EthereumParams | None = None):
    """``E[L] / (E[L] + E[U])``."""
    eth = eth or EthereumParams()
    p, q = params.p, params.q
    return (p - q + p**2 * q) / (p**2 * q + (p - q) * (1 + q - q ** (eth.n1 + 1)))


def apparent_hashrate_eth_new(params: MinerParams, eth: EthereumParams | None = None):
    """Ethereum selfish mining when referred uncles count towards difficulty."""
    return apparent_hashrate_eth_old(params, eth) * xi_factor(params, eth)


def apparent_hashrate(strategy: Strategy, params: MinerParams, eth: EthereumParams | None = None):
    if strategy is Strategy.HONEST:
        return params.q
    if strategy is Strategy.SM:
        return apparent_hashrate_sm_btc(params)
    if strategy is Strategy.EFSM:
        return apparent_hashrate_efsm(params)
    if strategy is Strategy.LSM:
        return apparent_hashrate_lsm(params)
    if eth is None:
        raise MissingEthParamsError(f"{strategy.value} needs Ethereum parameters")
    if strategy is Strategy.ETH_SM_OLD_DA:
        return apparent_hashrate_eth_old(params, eth)
    return apparent_hashrate_eth_new(params, eth)


def expected_attacker_blocks(strategy: Strategy, params: MinerParams):
    """``E[Z]``: attacker blocks in the official chain per cycle."""
    if strategy is Strategy.HONEST:
        return params.q
    law = strategy.cycle_law
    return apparent_hashrate(law, params) * expected_cycle_length(law, params)


def expected_revenue(params: MinerParams, eth: EthereumParams | None = None):
    """``E[R] / b`` for Ethereum selfish mining."""
    eth = eth or EthereumParams()
    ex = eth_expectations(params, eth)
    return (
        expected_attacker_blocks(Strategy.SM, params)
        + ex.e_ru_over_b
        + eth.pi * ex.e_rn_over_pi
    )
