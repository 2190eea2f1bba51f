"""Per-cycle outcome records shared by the simulator and the oracle."""

from __future__ import annotations

from dataclasses import dataclass

ATTACKER = "attacker"
HONEST = "honest"

#: branch tags for a tie resolved by an honest block
ATTACKER_BRANCH = "A"
HONEST_BRANCH = "H"
#: a tie whose resolution cannot change the outcome (both branches summed)
ANY_BRANCH = "*"


@dataclass(frozen=True)
class UncleRecord:
    owner: str
    height_offset: int  # height above the cycle's base block


@dataclass(frozen=True)
class UncleReference:
    uncle_owner: str
    nephew_owner: str
    distance: int  # height(nephew) - height(uncle)


@dataclass(frozen=True)
class PendingUncle:
    """An unreferred uncle handed to the next cycle.

    ``age_heights`` is the height difference between the uncle and the last
    official block of the cycle that created it, so the first block of the
    next cycle sits at distance ``age_heights + 1``.
    """

    owner: str
    age_heights: int


@dataclass(frozen=True)
class Revenue:
    """Attacker revenue of one cycle in coinbase units."""

    static: object = 0
    uncle: object = 0
    nephew: object = 0

    @property
    def total(self):
        return self.static + self.uncle + self.nephew


@dataclass(frozen=True)
class CycleOutcome:
    word: str
    l: int
    z: int
    branch_tags: tuple = ()
    first_owner: str | None = None
    uncle_created: UncleRecord | None = None
    uncle_referred_in_cycle: UncleReference | None = None
    carryover: PendingUncle | None = None
    carryover_referred: UncleReference | None = None
    revenue: Revenue = Revenue()

    @property
    def references(self) -> tuple:
        return tuple(
            r for r in (self.uncle_referred_in_cycle, self.carryover_referred) if r is not None
        )

    @property
    def n_referred(self) -> int:
        return len(self.references)


def revenue_for(z: int, refs, eth) -> Revenue:
    """Static, uncle and nephew revenue of the attacker for the given references."""
    if eth is None:
        return Revenue(static=z)
    uncle = sum(eth.uncle_reward(r.distance) for r in refs if r.uncle_owner == ATTACKER)
    nephew = sum(eth.pi for r in refs if r.nephew_owner == ATTACKER)
    return Revenue(static=z, uncle=uncle, nephew=nephew)
