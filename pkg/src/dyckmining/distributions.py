"""Cycle-length laws of the Bitcoin withholding strategies.

An attack cycle adds ``L`` blocks to the official chain. Its law is a
Catalan-type distribution for each strategy:

* SM:   P[L=1] = p, P[L=2] = pq + pq^2, P[L=n] = pq^2 (pq)^(n-2) C_(n-2) for n >= 3
* EFSM: P[L=n+1] = p (pq)^n C_n                                    for n >= 0
* LSM:  P[L=1] = p, P[L=n+1] = (pq)^n C_(n-1)                      for n >= 1

All functions are written against the number protocol only, so passing
:class:`~fractions.Fraction` parameters keeps every result an exact rational.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .combinatorics import catalan_number
from .errors import DomainError, UnsupportedStrategyError


class Strategy(enum.Enum):
    HONEST = "hm"
    SM = "sm"
    EFSM = "efsm"
    LSM = "lsm"
    ETH_SM_OLD_DA = "eth-old"
    ETH_SM_NEW_DA = "eth-new"

    @property
    def is_ethereum(self) -> bool:
        return self in (Strategy.ETH_SM_OLD_DA, Strategy.ETH_SM_NEW_DA)

    @property
    def cycle_law(self) -> "Strategy":
        """The Bitcoin strategy whose cycle shape this strategy shares."""
        return Strategy.SM if self.is_ethereum else self

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        try:
            return cls(name.lower())
        except ValueError:
            try:
                return cls[name.upper().replace("-", "_")]
            except KeyError:
                raise DomainError(f"unknown strategy {name!r}") from None


WITHHOLDING = (Strategy.SM, Strategy.EFSM, Strategy.LSM)


@dataclass(frozen=True)
class MinerParams:
    """Attacker hashrate ``q`` and connectivity ``gamma``; ``p = 1 - q``.

    Floats and Fractions are both accepted. ``p`` is derived, so ``p + q == 1``
    holds exactly for Fractions.
    """

    q: Real
    gamma: Real = 0

    def __post_init__(self):
        if not 0 < self.q < Fraction(1, 2):
            raise DomainError(f"q must satisfy 0 < q < 1/2, got {self.q}")
        if not 0 <= self.gamma <= 1:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")

    @property
    def p(self):
        return 1 - self.q

    def exact(self) -> "MinerParams":
        """The same point with Fraction fields (floats converted exactly)."""
        return MinerParams(Fraction(self.q), Fraction(self.gamma))


def cycle_length_pmf(strategy: Strategy, params: MinerParams, n: int):
    """``P[L = n]`` for the SM, EFSM and LSM cycle laws.

    Ethereum SM strategies share the SM law. HONEST has no withholding cycle
    and raises :class:`UnsupportedStrategyError`.
    """
    if strategy is Strategy.HONEST:
        raise UnsupportedStrategyError("HONEST has no cycle-length law (L = 1)")
    if n < 1:
        raise DomainError(f"cycle length starts at 1, got {n}")
    p, q = params.p, params.q
    law = strategy.cycle_law
    if law is Strategy.SM:
        if n == 1:
            return p
        if n == 2:
            return p * q + p * q**2
        return p * q**2 * (p * q) ** (n - 2) * catalan_number(n - 2)
    if law is Strategy.EFSM:
        return p * (p * q) ** (n - 1) * catalan_number(n - 1)
    if n == 1:
        return p
    return (p * q) ** (n - 1) * catalan_number(n - 2)


def expected_cycle_length(strategy: Strategy, params: MinerParams):
    """Closed-form ``E[L]``; HONEST is the point mass ``L = 1``."""
    p, q = params.p, params.q
    law = strategy.cycle_law
    if law is Strategy.HONEST:
        return 1
    if law is Strategy.SM:
        return 1 + p**2 * q / (p - q)
    if law is Strategy.EFSM:
        return p / (p - q)
    return (p - q + p * q) / (p - q)


def _geometric_moment_tail(N: int, x):
    # sum_{n >= N+1} n x^n
    return x ** (N + 1) * ((N + 1) / (1 - x) + x / (1 - x) ** 2)


def tail_mass_bound(strategy: Strategy, params: MinerParams, N: int):
    """Upper bound on ``P[L > N]`` from ``C_m <= 4^m``.

    With ``x = 4pq < 1``:

    * SM:   ``pq^2 x^(N-1) / (1 - x)``
    * EFSM: ``p x^N / (1 - x)``
    * LSM:  ``x^N / (4 (1 - x))``

    HONEST returns 0. Decreasing in N.
    """
    if N < 3:
        raise DomainError(f"tail bounds need N >= 3, got {N}")
    p, q = params.p, params.q
    x = 4 * p * q
    law = strategy.cycle_law
    if law is Strategy.HONEST:
        return 0 * x
    if law is Strategy.SM:
        return p * q**2 * x ** (N - 1) / (1 - x)
    if law is Strategy.EFSM:
        return p * x**N / (1 - x)
    return x**N / (4 * (1 - x))


def tail_mean_bound(strategy: Strategy, params: MinerParams, N: int):
    """Upper bound on ``E[L; L > N] = sum_{n > N} n P[L = n]``, same bounding rule."""
    if N < 3:
        raise DomainError(f"tail bounds need N >= 3, got {N}")
    p, q = params.p, params.q
    x = 4 * p * q
    law = strategy.cycle_law
    if law is Strategy.HONEST:
        return 0 * x
    g = _geometric_moment_tail(N, x)
    if law is Strategy.SM:
        return p * q**2 * g / x**2
    if law is Strategy.EFSM:
        return p * g / x
    return g / (4 * x)
