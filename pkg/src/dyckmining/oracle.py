"""Exact enumeration of attack cycles with rational probabilities.

This is the ground-truth path. Each strategy is a word automaton over
``{S, H}`` that knows when a cycle ends and what it yields; it never calls a
closed form. Truncated sums over all cycles with ``L <= max_len`` are exact
rationals, and the mass that is not enumerated is known exactly as
``1 - sum`` (cycles end almost surely because ``q < 1/2``). Tails of
expectations are bracketed with the ``C_m <= 4^m`` bounds of
:mod:`dyckmining.distributions` and the per-cycle caps ``Z <= L``,
``U <= 1``.

Two enumeration modes share the automata:

* :func:`enumerate_cycles` lists every word individually (with tie-break
  expansions); it is exponential and capped at :data:`EXPLICIT_CAP`.
* :func:`cycle_classes` merges words that reach the same automaton state
  (a transfer-matrix count over integer multiplicities), so ``L <= 40`` is
  cheap.

Tie resolutions that cannot change the outcome are summed out and tagged
``"*"``; e.g. in EFSM only the last tie won by the attacker's branch matters.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .analytic import EthereumParams
from .distributions import MinerParams, Strategy, tail_mean_bound
from .errors import CapExceededError, MissingEthParamsError
from .outcome import (
    ANY_BRANCH,
    ATTACKER,
    ATTACKER_BRANCH,
    HONEST,
    HONEST_BRANCH,
    CycleOutcome,
    PendingUncle,
    UncleRecord,
    UncleReference,
    revenue_for,
)

#: Largest cycle length accepted by the aggregated enumeration.
MAX_LEN_CAP = 40
#: Largest cycle length accepted by the explicit, word-by-word enumeration.
EXPLICIT_CAP = 10
#: Largest cycle length accepted for consecutive-pair enumeration.
PAIR_CAP = 30


@dataclass(frozen=True)
class WeightedCycle:
    word: str
    branch_tags: tuple
    prob: Fraction
    outcome: CycleOutcome


@dataclass(frozen=True)
class CycleClass:
    """``multiplicity`` words sharing one outcome; ``mass`` is their total probability."""

    l: int
    multiplicity: int
    mass: Fraction
    outcome: CycleOutcome


@dataclass(frozen=True)
class Interval:
    lower: Fraction
    upper: Fraction

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, value, rel_slack: float = 1e-12) -> bool:
        """Containment allowing ``rel_slack`` for floating-point ``value``."""
        if isinstance(value, (int, Fraction)):
            return self.lower <= value <= self.upper
        slack = rel_slack * max(abs(float(value)), 1e-300)
        return float(self.lower) - slack <= value <= float(self.upper) + slack

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lower + other.lower, self.upper + other.upper)

    def scale(self, c) -> "Interval":
        return Interval(self.lower * c, self.upper * c)

    def __str__(self):
        return f"[{float(self.lower):.12g}, {float(self.upper):.12g}]"


# -- word automata -------------------------------------------------------------
#
# step(state, letter) returns the next state or ("end", terminal). Terminals
# are expanded by _expand into (tags, factor, fields) where factor is the tie
# probability and fields the outcome given the letter counts.

_END = "end"


def _step_sm(state, letter):
    kind = state[0]
    if kind == "start":
        return (_END, ("H",)) if letter == "H" else ("s1",)
    if kind == "s1":
        return ("tie",) if letter == "H" else ("run", 2)
    if kind == "tie":
        return (_END, ("SHS",)) if letter == "S" else (_END, ("SHH",))
    if kind == "run":  # S^k, no honest block yet
        k = state[1]
        if letter == "S":
            return ("run", k + 1)
        if k == 2:
            return (_END, ("late", 2, False))
        return ("mid", k - 1, k, False)
    _, lead, k, after = state  # lead counts S minus H since the cycle began
    if letter == "S":
        return ("mid", lead + 1, k, True)
    if lead == 2:
        return (_END, ("late", k, after))
    return ("mid", lead - 1, k, after)


def _step_efsm(state, letter):
    lead = state[1] + (1 if letter == "S" else -1)
    if lead < 0:
        return (_END, ("efsm",))
    return ("e", lead)


def _step_lsm(state, letter):
    kind = state[0]
    if kind == "start":
        return (_END, ("H",)) if letter == "H" else ("lead", 1)
    if kind == "final":
        return (_END, ("win",)) if letter == "S" else (_END, ("fork",))
    lead = state[1] + (1 if letter == "S" else -1)
    return ("final",) if lead == 0 else ("lead", lead)


def _step_honest(state, letter):
    return (_END, (letter,))


_AUTOMATA = {
    Strategy.SM: (("start",), _step_sm),
    Strategy.EFSM: (("e", 0), _step_efsm),
    Strategy.LSM: (("start",), _step_lsm),
    Strategy.HONEST: (("start",), _step_honest),
}


def _last_win_classes(n_ties: int, g):
    """Outcome classes of ``n_ties`` independent ties when only the last
    attacker-branch win matters: yields (tags, factor, m) with m the 1-based
    index of that win, 0 for none."""
    yield (HONEST_BRANCH,) * n_ties, (1 - g) ** n_ties, 0
    for m in range(1, n_ties + 1):
        tags = (ANY_BRANCH,) * (m - 1) + (ATTACKER_BRANCH,) + (HONEST_BRANCH,) * (n_ties - m)
        yield tags, g * (1 - g) ** (n_ties - m), m


def _expand(strategy: Strategy, terminal, n_s: int, n_h: int, g, eth):
    """Yield (tags, factor, fields) for one terminal; fields feed CycleOutcome."""
    kind = terminal[0]
    if strategy is Strategy.HONEST:
        yield (), 1, dict(l=1, z=1 if kind == "S" else 0, first_owner=ATTACKER if kind == "S" else HONEST)
        return
    if strategy is Strategy.EFSM:
        for tags, factor, m in _last_win_classes(n_s, g):
            yield tags, factor, dict(l=n_s + 1, z=m, first_owner=ATTACKER if m else HONEST)
        return
    if strategy is Strategy.LSM:
        if kind == "H":
            yield (), 1, dict(l=1, z=0, first_owner=HONEST)
        elif kind == "win":
            yield (ANY_BRANCH,) * (n_h - 1), 1, dict(l=n_s, z=n_s, first_owner=ATTACKER)
        else:
            n = n_s
            lead_ties = n - 1
            yield (ANY_BRANCH,) * lead_ties + (ATTACKER_BRANCH,), g, dict(
                l=n + 1, z=n, first_owner=ATTACKER
            )
            for tags, factor, m in _last_win_classes(lead_ties, g):
                yield tags + (HONEST_BRANCH,), factor * (1 - g), dict(
                    l=n + 1, z=m, first_owner=ATTACKER if m else HONEST
                )
        return

    # selfish mining, optionally with Ethereum uncle bookkeeping
    n1 = eth.n1 if eth is not None else None

    def uncles(fields, created, ref=None, carry=None):
        if eth is not None:
            fields.update(uncle_created=created, uncle_referred_in_cycle=ref, carryover=carry)
        return fields

    if kind == "H":
        yield (), 1, dict(l=1, z=0, first_owner=HONEST)
    elif kind == "SHS":
        yield (), 1, uncles(
            dict(l=2, z=2, first_owner=ATTACKER),
            UncleRecord(HONEST, 1),
            UncleReference(HONEST, ATTACKER, 1),
        )
    elif kind == "SHH":
        yield (ATTACKER_BRANCH,), g, uncles(
            dict(l=2, z=1, first_owner=ATTACKER),
            UncleRecord(HONEST, 1),
            UncleReference(HONEST, HONEST, 1),
        )
        yield (HONEST_BRANCH,), 1 - g, uncles(
            dict(l=2, z=0, first_owner=HONEST),
            UncleRecord(ATTACKER, 1),
            UncleReference(ATTACKER, HONEST, 1),
        )
    else:
        _, k, after = terminal
        fields = dict(l=n_s, z=n_s, first_owner=ATTACKER)
        created = UncleRecord(HONEST, 1)
        if eth is None:
            yield (), 1, fields
        elif after:
            # the first attacker block after the uncle sits k heights above it
            ref = UncleReference(HONEST, ATTACKER, k) if k <= n1 else None
            yield (), 1, uncles(fields, created, ref=ref)
        else:
            carry = PendingUncle(HONEST, k - 1) if k <= n1 else None
            yield (), 1, uncles(fields, created, carry=carry)


def _prepare(strategy: Strategy, params: MinerParams, eth):
    if strategy.is_ethereum and eth is None:
        raise MissingEthParamsError(f"{strategy.value} needs Ethereum parameters")
    exact = params.exact()
    eth_used = eth if strategy.is_ethereum else None
    return strategy.cycle_law, exact, eth_used


def _make_outcome(word, tags, fields, eth) -> CycleOutcome:
    ref = fields.get("uncle_referred_in_cycle")
    refs = (ref,) if ref is not None else ()
    return CycleOutcome(
        word=word,
        branch_tags=tags,
        revenue=revenue_for(fields["z"], refs, eth),
        **fields,
    )


def enumerate_cycles(
    strategy: Strategy,
    params: MinerParams,
    max_len: int,
    eth: EthereumParams | None = None,
) -> list[WeightedCycle]:
    """Every cycle word with ``L <= max_len`` and each outcome-relevant tie
    resolution, with exact probabilities; listed in lexicographic word order."""
    if max_len > EXPLICIT_CAP:
        raise CapExceededError(f"explicit enumeration capped at L <= {EXPLICIT_CAP}")
    law, exact, eth = _prepare(strategy, params, eth)
    start, step = _AUTOMATA[law]
    p, q, g = exact.p, exact.q, exact.gamma
    max_word = 2 * max_len - 1
    found: list[WeightedCycle] = []

    def walk(state, word, n_s, n_h):
        for letter in ("H", "S"):
            nxt = step(state, letter)
            w = word + letter
            s, h = n_s + (letter == "S"), n_h + (letter == "H")
            if nxt[0] == _END:
                base = q**s * p**h
                for tags, factor, fields in _expand(law, nxt[1], s, h, g, eth):
                    prob = base * factor
                    if prob > 0:
                        found.append(WeightedCycle(w, tags, prob, _make_outcome(w, tags, fields, eth)))
            elif len(w) < max_word:
                walk(nxt, w, s, h)

    walk(start, "", 0, 0)
    found.sort(key=lambda c: (c.word, c.branch_tags))
    return found


def cycle_classes(
    strategy: Strategy,
    params: MinerParams,
    max_len: int,
    eth: EthereumParams | None = None,
) -> list[CycleClass]:
    """All cycles with ``L <= max_len`` merged by (letter counts, automaton terminal, tie class)."""
    if max_len > MAX_LEN_CAP:
        raise CapExceededError(f"enumeration capped at L <= {MAX_LEN_CAP}")
    law, exact, eth = _prepare(strategy, params, eth)
    start, step = _AUTOMATA[law]
    p, q, g = exact.p, exact.q, exact.gamma

    frontier = {(start, 0, 0): 1}
    terminals: dict = defaultdict(int)
    for _ in range(2 * max_len - 1):
        nxt_frontier: dict = defaultdict(int)
        for (state, n_s, n_h), count in frontier.items():
            for letter in ("S", "H"):
                nxt = step(state, letter)
                s, h = n_s + (letter == "S"), n_h + (letter == "H")
                if nxt[0] == _END:
                    terminals[(nxt[1], s, h)] += count
                else:
                    nxt_frontier[(nxt, s, h)] += count
        frontier = nxt_frontier
        if not frontier:
            break

    classes = []
    for (terminal, s, h), count in sorted(terminals.items(), key=lambda kv: repr(kv[0])):
        base = q**s * p**h
        for tags, factor, fields in _expand(law, terminal, s, h, g, eth):
            mass = count * base * factor
            if mass > 0:
                outcome = _make_outcome("", tags, fields, eth)
                classes.append(CycleClass(fields["l"], count, mass, outcome))
    return classes


def length_masses(strategy: Strategy, params: MinerParams, max_len: int, eth=None) -> dict[int, Fraction]:
    """Exact ``P[L = n]`` for ``n <= max_len`` summed from the enumeration."""
    masses: dict[int, Fraction] = defaultdict(Fraction)
    for c in cycle_classes(strategy, params, max_len, eth):
        masses[c.l] += c.mass
    return dict(sorted(masses.items()))


def _truncated_moments(strategy, params, max_len, eth=None):
    classes = cycle_classes(strategy, params, max_len, eth)
    mass = sum((c.mass for c in classes), Fraction(0))
    return classes, mass


def _length_tail(strategy, exact, max_len, rest):
    # unenumerated cycles all have L >= max_len + 1
    lo = (max_len + 1) * rest
    hi = max(lo, Fraction(tail_mean_bound(strategy.cycle_law, exact, max_len)))
    return lo, hi


def oracle_expected_length(strategy: Strategy, params: MinerParams, max_len: int) -> Interval:
    """Certified bracket on ``E[L]`` from the cycles with ``L <= max_len``."""
    if strategy is Strategy.HONEST:
        return Interval(Fraction(1), Fraction(1))
    classes, mass = _truncated_moments(strategy.cycle_law, params, max_len)
    exact = params.exact()
    total = sum((c.l * c.mass for c in classes), Fraction(0))
    lo, hi = _length_tail(strategy, exact, max_len, 1 - mass)
    return Interval(total + lo, total + hi)


def _btc_moments(strategy, params, max_len):
    classes, mass = _truncated_moments(strategy, params, max_len)
    exact = params.exact()
    sum_l = sum((c.l * c.mass for c in classes), Fraction(0))
    sum_z = sum((c.outcome.z * c.mass for c in classes), Fraction(0))
    t_lo, t_hi = _length_tail(strategy, exact, max_len, 1 - mass)
    e_l = Interval(sum_l + t_lo, sum_l + t_hi)
    e_z = Interval(sum_z, sum_z + t_hi)  # Z <= L
    return e_l, e_z


def _ratio(num: Interval, den: Interval) -> Interval:
    return Interval(num.lower / den.upper, num.upper / den.lower)


def oracle_apparent_hashrate(
    strategy: Strategy,
    params: MinerParams,
    eth: EthereumParams | None = None,
    max_len: int = MAX_LEN_CAP,
) -> Interval:
    """Certified bracket on the apparent hashrate.

    Bitcoin strategies: ``E[Z] / E[L]``. Ethereum: ``E[R] / E[L]`` (old
    adjustment) or ``E[R] / (E[L] + E[U])`` (new), revenue in coinbase units.
    """
    if strategy is Strategy.HONEST:
        q = Fraction(params.q)
        return Interval(q, q)
    if not strategy.is_ethereum:
        e_l, e_z = _btc_moments(strategy, params, max_len)
        return _ratio(e_z, e_l)
    if eth is None:
        raise MissingEthParamsError(f"{strategy.value} needs Ethereum parameters")
    e_l, e_z = _btc_moments(Strategy.SM, params, max_len)
    pair = oracle_eth_pair_expectations(params, eth, min(max_len, PAIR_CAP))
    revenue = e_z + pair["e_ru_over_b"] + pair["e_rn_over_pi"].scale(Fraction(eth.pi))
    if strategy is Strategy.ETH_SM_OLD_DA:
        return _ratio(revenue, e_l)
    return _ratio(revenue, e_l + pair["e_u"])


def oracle_eth_pair_expectations(
    params: MinerParams,
    eth: EthereumParams,
    max_len: int = PAIR_CAP,
) -> dict[str, Interval]:
    """Certified brackets on the uncle/nephew expectations per cycle.

    Quantities attached to a cycle ``w`` can depend on the next cycle
    ``w'`` (who mines the first official block there decides whether the
    carried-over uncle gets an honest or an attacker nephew), so the sums run
    over independent consecutive pairs ``(w, w')``. Pairs only interact through
    that owner, so ``w'`` is grouped by it before pairing.
    """
    if max_len > PAIR_CAP:
        raise CapExceededError(f"pair enumeration capped at L <= {PAIR_CAP}")
    classes = cycle_classes(Strategy.ETH_SM_OLD_DA, params, max_len, eth)
    mass = sum((c.mass for c in classes), Fraction(0))

    first_owner: dict[str, Fraction] = defaultdict(Fraction)
    for c in classes:
        first_owner[c.outcome.first_owner] += c.mass

    ku = {d: Fraction(eth.uncle_reward(d)) for d in range(0, eth.n1 + 2)}
    sums = defaultdict(Fraction)
    for c in classes:
        o = c.outcome
        for owner_next, m_next in first_owner.items():
            w = c.mass * m_next
            ref = o.uncle_referred_in_cycle
            carry = o.carryover
            if carry is not None:
                ref_next = UncleReference(carry.owner, owner_next, carry.age_heights + 1)
            else:
                ref_next = None
            for r, slot in ((ref, "in"), (ref_next, "next")):
                if r is None:
                    continue
                sums["e_u"] += w
                if slot == "next":
                    sums["e_v"] += w
                if r.nephew_owner == HONEST:
                    sums["e_uh"] += w
                    sums["e_uh_in_cycle" if slot == "in" else "e_uh_next_cycle"] += w
                else:
                    sums["e_rn_over_pi"] += w
                if r.uncle_owner == ATTACKER:
                    sums["e_ru_over_b"] += w * ku.get(r.distance, Fraction(0))

    missing = 1 - mass * mass
    caps = {
        "e_u": 1,
        "e_v": 1,
        "e_uh": 1,
        "e_uh_in_cycle": 1,
        "e_uh_next_cycle": 1,
        "e_rn_over_pi": 1,
        "e_ru_over_b": Fraction(eth.max_uncle_reward),
    }
    return {k: Interval(sums[k], sums[k] + missing * cap) for k, cap in caps.items()}
