"""Reference simulation of one attack cycle as an explicit block tree.

Every block records its parent, height, miner and the uncles it references.
References are fixed when a block is created and may only cite blocks its
miner can see: the attacker sees everything, honest miners see published
blocks. A reference counts only if the referencing block ends up in the
official chain. Outcomes (L, Z, uncles, nephews, carryover) are read off the
finished tree rather than tabulated per word.

Randomness comes from ``rng.random()`` in a fixed order: one draw per block
(``u < q`` means the attacker finds it) and, whenever an honest block is found
during a tie, one draw for the branch it extends (``u < gamma``: the
attacker's). The estimation kernels consume the same stream.
"""

from __future__ import annotations

from ..analytic import EthereumParams
from ..distributions import MinerParams, Strategy
from ..errors import MissingEthParamsError
from ..outcome import (
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

MAX_REFS_PER_BLOCK = 2


class _Block:
    __slots__ = ("owner", "parent", "height", "published", "refs", "external")

    def __init__(self, owner, parent, height, published, external=False):
        self.owner = owner
        self.parent = parent
        self.height = height
        self.published = published
        self.refs: tuple = ()
        # uncle left over from an earlier cycle; its parent is below the base
        self.external = external

    def chain(self):
        b = self
        while b is not None:
            yield b
            b = b.parent


class _Tree:
    def __init__(self, eth: EthereumParams | None, pending: PendingUncle | None):
        self.eth = eth
        self.base = _Block(None, None, 0, True)
        self.blocks: list[_Block] = []
        self.pending = None
        if eth is not None and pending is not None:
            self.pending = _Block(pending.owner, None, -pending.age_heights, True, external=True)

    def mine(self, owner: str, parent: _Block) -> _Block:
        block = _Block(owner, parent, parent.height + 1, published=(owner == HONEST))
        if self.eth is not None:
            block.refs = tuple(self._eligible_uncles(block))
            assert len(block.refs) <= MAX_REFS_PER_BLOCK
        self.blocks.append(block)
        return block

    def _eligible_uncles(self, block: _Block):
        ancestors = set(map(id, block.parent.chain()))
        referred = {id(r) for a in block.parent.chain() for r in a.refs}
        pool = self.blocks if self.pending is None else [self.pending, *self.blocks]
        for c in pool:
            if id(c) in ancestors or id(c) in referred:
                continue
            if block.owner == HONEST and not c.published:
                continue
            if not (c.external or id(c.parent) in ancestors):
                continue
            if 1 <= block.height - c.height <= self.eth.n1:
                yield c

    @staticmethod
    def publish(block: _Block):
        for b in block.chain():
            if b.published:
                break
            b.published = True

    @staticmethod
    def at_height(tip: _Block, height: int) -> _Block:
        for b in tip.chain():
            if b.height == height:
                return b
        raise ValueError(height)


class _Cycle:
    def __init__(self, params: MinerParams, rng, tree: _Tree):
        self.q = params.q
        self.gamma = params.gamma
        self.rng = rng
        self.tree = tree
        self.word: list[str] = []
        self.tags: list[str] = []

    def letter(self) -> str:
        x = "S" if self.rng.random() < self.q else "H"
        self.word.append(x)
        return x

    def resolve_tie(self, tie):
        honest_side, attacker_side = tie
        if self.rng.random() < self.gamma:
            self.tags.append(ATTACKER_BRANCH)
            return attacker_side
        self.tags.append(HONEST_BRANCH)
        return honest_side


def _run_honest(c: _Cycle):
    t = c.tree
    owner = ATTACKER if c.letter() == "S" else HONEST
    return t.mine(owner, t.base)


def _run_sm(c: _Cycle):
    t = c.tree
    secret = public = t.base
    tie = None
    while True:
        if c.letter() == "S":
            secret = t.mine(ATTACKER, secret)
            if tie is not None:
                t.publish(secret)
                return secret
            continue
        if tie is not None:
            return t.mine(HONEST, c.resolve_tie(tie))
        lead = secret.height - public.height
        public = t.mine(HONEST, public)
        if lead == 0:
            return public
        if lead == 1:
            t.publish(secret)
            tie = (public, secret)
        elif lead == 2:
            t.publish(secret)
            return secret


def _run_stubborn(c: _Cycle, lead_stubborn: bool):
    t = c.tree
    secret = public = t.base
    tie = None
    final = False
    while True:
        if c.letter() == "S":
            secret = t.mine(ATTACKER, secret)
            if final:
                t.publish(secret)
                return secret
            continue
        h = t.mine(HONEST, c.resolve_tie(tie) if tie is not None else public)
        if final or secret.height < h.height:
            return h
        if lead_stubborn and secret.height == h.height:
            final = True
        matched = t.at_height(secret, h.height)
        t.publish(matched)
        public, tie = h, (h, matched)


def simulate_cycle(
    strategy: Strategy,
    params: MinerParams,
    eth: EthereumParams | None = None,
    rng=None,
    pending: PendingUncle | None = None,
) -> tuple[CycleOutcome, PendingUncle | None]:
    """Play one attack cycle; returns its outcome and the uncle carried to the next cycle.

    ``rng`` is anything with a ``random()`` method returning floats in [0, 1),
    e.g. a :class:`numpy.random.Generator`. ``pending`` (Ethereum only) is the
    uncle carried over from the previous cycle.
    """
    if strategy.is_ethereum and eth is None:
        raise MissingEthParamsError(f"{strategy.value} needs Ethereum parameters")
    eth_used = eth if strategy.is_ethereum else None
    tree = _Tree(eth_used, pending)
    cyc = _Cycle(params, rng, tree)
    law = strategy.cycle_law
    if law is Strategy.HONEST:
        tip = _run_honest(cyc)
    elif law is Strategy.SM:
        tip = _run_sm(cyc)
    else:
        tip = _run_stubborn(cyc, lead_stubborn=(law is Strategy.LSM))
    return _read_outcome(tree, tip, "".join(cyc.word), tuple(cyc.tags), eth_used)


def _read_outcome(tree: _Tree, tip: _Block, word: str, tags: tuple, eth):
    main = [b for b in tip.chain() if b is not tree.base]
    main.reverse()
    l = len(main)
    z = sum(b.owner == ATTACKER for b in main)
    fields = dict(word=word, l=l, z=z, branch_tags=tags, first_owner=main[0].owner)
    if eth is None:
        return CycleOutcome(revenue=revenue_for(z, (), None), **fields), None

    on_main = {id(b) for b in main} | {id(tree.base)}
    in_cycle, carried, referred = [], None, set()
    for nephew in main:
        for u in nephew.refs:
            ref = UncleReference(u.owner, nephew.owner, nephew.height - u.height)
            referred.add(id(u))
            if u is tree.pending:
                carried = ref
            else:
                in_cycle.append(ref)
    assert len(in_cycle) <= 1

    created = [b for b in tree.blocks if id(b) not in on_main and id(b.parent) in on_main]
    assert len(created) <= 1, "at most one uncle candidate per cycle"
    leftovers = [b for b in created if id(b) not in referred]
    if tree.pending is not None and id(tree.pending) not in referred:
        leftovers.append(tree.pending)
    carry = [
        PendingUncle(b.owner, tip.height - b.height)
        for b in leftovers
        if tip.height + 1 - b.height <= eth.n1
    ]
    assert len(carry) <= 1, "at most one pending uncle"
    carryover = carry[0] if carry else None

    refs = tuple(in_cycle) + ((carried,) if carried else ())
    outcome = CycleOutcome(
        uncle_created=UncleRecord(created[0].owner, created[0].height) if created else None,
        uncle_referred_in_cycle=in_cycle[0] if in_cycle else None,
        carryover=carryover,
        carryover_referred=carried,
        revenue=revenue_for(z, refs, eth),
        **fields,
    )
    return outcome, carryover


class ReplayRandom:
    """Deterministic stand-in for a generator: returns preset uniforms in order."""

    def __init__(self, values):
        self._values = list(values)
        self._i = 0

    def random(self) -> float:
        v = self._values[self._i]
        self._i += 1
        return v

    @property
    def consumed(self) -> int:
        return self._i


def tie_positions(strategy: Strategy, word: str) -> list[int]:
    """Indices of the honest letters of ``word`` that are found during a tie."""
    law = strategy.cycle_law
    if law is Strategy.SM:
        return [2] if word == "SHH" else []
    if law in (Strategy.EFSM, Strategy.LSM):
        return [i for i, x in enumerate(word) if x == "H"][1:]
    return []


def replay_uniforms(strategy: Strategy, word: str, branch_tags, wildcard: str = HONEST_BRANCH) -> list[float]:
    """Uniforms that make :func:`simulate_cycle` play ``word`` with the given tie resolutions.

    ``"*"`` tags are replayed as ``wildcard``. The requested branches must have
    positive probability (no attacker branch at gamma = 0, no honest one at 1).
    """
    low, high = 0.0, 1.0 - 2.0**-53
    tags = [wildcard if t == "*" else t for t in branch_tags]
    positions = tie_positions(strategy, word)
    if len(positions) != len(tags):
        raise ValueError(f"{word!r} has {len(positions)} ties under {strategy.value}, got {len(tags)} tags")
    ties = iter(tags)
    out: list[float] = []
    for i, letter in enumerate(word):
        out.append(low if letter == "S" else high)
        if i in positions:
            out.append(low if next(ties) == ATTACKER_BRANCH else high)
    return out
