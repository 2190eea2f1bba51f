"""Monte Carlo simulation of attack cycles.

Two engines consume the same uniform stream and agree draw for draw:

* :func:`simulate_cycle` builds an explicit block tree per cycle (reference).
* :func:`run_estimation` plays millions of cycles at word level through the
  compiled kernel, or its pure-Python twin when the extension is missing.

Set ``DYCKMINING_PURE_PYTHON=1`` to force the Python kernel.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..analytic import EthereumParams
from ..distributions import MinerParams, Strategy
from ..errors import DomainError, MissingEthParamsError
from ..outcome import CycleOutcome, PendingUncle
from . import _kernel_py
from .blocktree import ReplayRandom, replay_uniforms, simulate_cycle, tie_positions

if os.environ.get("DYCKMINING_PURE_PYTHON") == "1":
    _kernel = _kernel_py
    BACKEND = "python"
else:
    try:
        from . import _kernel  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _kernel = _kernel_py
        BACKEND = "python"

#: uniforms drawn per buffer refill
CHUNK = 1 << 16
N_STATS = _kernel_py.N_STATS
HIST_BINS = _kernel_py.HIST_BINS
# indices into the per-cycle vector, see _kernel_py
L, Z, U, V, UH1, UH2, RU, RN, R = range(N_STATS)

_CODES = {
    Strategy.SM: _kernel_py.SM,
    Strategy.EFSM: _kernel_py.EFSM,
    Strategy.LSM: _kernel_py.LSM,
    Strategy.ETH_SM_OLD_DA: _kernel_py.ETH,
    Strategy.ETH_SM_NEW_DA: _kernel_py.ETH,
}


def derive_stream(master_seed: int, stream_index: int) -> np.random.Generator:
    """Independent PCG64 generator for one batch.

    The state comes from numpy's ``SeedSequence(master_seed, spawn_key=(stream_index,))``,
    which hashes the entropy and spawn key, so distinct indices give
    statistically independent streams.
    """
    seq = np.random.SeedSequence(master_seed, spawn_key=(stream_index,))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float

    def z_score(self, target: float) -> float:
        """Deviation of ``target`` from the mean in standard errors."""
        d = self.mean - float(target)
        if self.stderr == 0:
            return 0.0 if d == 0 else math.copysign(math.inf, d)
        return d / self.stderr


@dataclass(frozen=True)
class EstimateReport:
    """Ratio-of-sums hashrate plus per-cycle means, each with a standard error.

    ``e_ru_b`` is the attacker's uncle reward and ``e_rn_b`` the nephew
    reward (``pi`` times the attacker nephew count), both in coinbase units.
    ``e_uh1`` / ``e_uh2`` split honest references into in-cycle and
    previous-cycle ones. ``l_hist[k]`` counts cycles with ``L = k``; the last
    bin pools all longer cycles.
    """

    strategy: str
    backend: str
    n_cycles: int
    seed: int
    n_streams: int
    qhat: Estimate
    e_l: Estimate
    e_z: Estimate
    e_u: Estimate
    e_v: Estimate
    e_uh: Estimate
    e_uh1: Estimate
    e_uh2: Estimate
    e_ru_b: Estimate
    e_rn_b: Estimate
    l_hist: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return asdict(self)


def _empty_acc():
    return (
        np.zeros(N_STATS),
        np.zeros((N_STATS, N_STATS)),
        np.zeros(HIST_BINS, dtype=np.int64),
    )


def _kernel_arrays(eth: EthereumParams | None):
    if eth is None:
        return 1, np.zeros(2), 0.0
    ku = np.zeros(eth.n1 + 1)
    ku[1:] = [float(k) for k in eth.ku]
    return eth.n1, ku, float(eth.pi)


def _run_stream(code, params, eth, n_cycles, gen, kernel):
    sums, cross, hist = _empty_acc()
    n1, ku, pi = _kernel_arrays(eth)
    q, gamma = float(params.q), float(params.gamma)
    buf = gen.random(CHUNK)
    pos = 0
    pending_age, pending_owner = _kernel_py.NO_PENDING, _kernel_py.OWNER_HONEST
    left = n_cycles
    while left > 0:
        pos, done, pending_age, pending_owner = kernel.run_cycles(
            code, q, gamma, n1, ku, pi, buf, pos, left,
            pending_age, pending_owner, sums, cross, hist,
        )
        left -= done
        if left > 0:
            # the unfinished cycle restarts on the same draws plus fresh ones
            buf = np.concatenate((buf[pos:], gen.random(CHUNK)))
            pos = 0
    return sums, cross, hist


def _honest_stream(params, n_cycles, gen):
    sums, cross, hist = _empty_acc()
    z = (gen.random(n_cycles) < float(params.q)).astype(float)
    nz = float(z.sum())
    sums[L] = cross[L, L] = float(n_cycles)
    sums[Z] = sums[R] = cross[Z, Z] = cross[Z, R] = cross[R, R] = nz
    cross[L, Z] = cross[L, R] = nz
    hist[1] = n_cycles
    return sums, cross, hist


def _sym(cross):
    return np.triu(cross) + np.triu(cross, 1).T


def _mean(sums, s2, n, a) -> Estimate:
    m = sums[a] / n
    if n < 2:
        return Estimate(float(m), math.nan)
    var = max(s2[a, a] - n * m * m, 0.0) / (n - 1)
    return Estimate(float(m), float(math.sqrt(var / n)))


def _ratio(sums, s2, n, x, y) -> Estimate:
    """``sum(x) / sum(y)`` with delta-method error.

    ``x`` and ``y`` are weight vectors over the per-cycle statistics, so
    ``y = e_L + e_U`` gives the uncle-aware denominator. The error is
    ``sqrt(sum((x_i - R y_i)^2) / (n (n-1))) / mean(y)``, obtained from the
    accumulated sums and cross moments.
    """
    sx, sy = x @ sums, y @ sums
    r = sx / sy
    if n < 2:
        return Estimate(float(r), math.nan)
    w = x - r * y
    ss = max(float(w @ s2 @ w), 0.0)
    return Estimate(float(r), float(math.sqrt(ss / (n * (n - 1))) / (sy / n)))


def run_estimation(
    strategy: Strategy,
    params: MinerParams,
    eth: EthereumParams | None = None,
    n_cycles: int = 1_000_000,
    master_seed: int = 0,
    n_streams: int = 1,
    workers: int | None = None,
    backend: str | None = None,
) -> EstimateReport:
    """Simulate ``n_cycles`` consecutive cycles and estimate the hashrate.

    The cycles are split over ``n_streams`` independent streams (stream ``i``
    uses ``derive_stream(master_seed, i)``); pending uncles chain across the
    cycles of one stream. Results are merged in stream order, so they do not
    depend on ``workers``. ``backend`` picks ``"python"`` or ``"cython"``
    explicitly, defaulting to :data:`BACKEND`.
    """
    if n_cycles < 1:
        raise DomainError(f"n_cycles must be >= 1, got {n_cycles}")
    if n_streams < 1:
        raise DomainError(f"n_streams must be >= 1, got {n_streams}")
    if strategy.is_ethereum and eth is None:
        raise MissingEthParamsError(f"{strategy.value} needs Ethereum parameters")
    kernel = _resolve_backend(backend)
    eth_used = eth if strategy.is_ethereum else None
    sizes = [n_cycles // n_streams + (i < n_cycles % n_streams) for i in range(n_streams)]

    def job(i):
        if sizes[i] == 0:
            return _empty_acc()
        gen = derive_stream(master_seed, i)
        if strategy is Strategy.HONEST:
            return _honest_stream(params, sizes[i], gen)
        return _run_stream(_CODES[strategy], params, eth_used, sizes[i], gen, kernel)

    if n_streams == 1 or workers == 1:
        parts = [job(i) for i in range(n_streams)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(n_streams)))
    sums, cross, hist = _empty_acc()
    for s, c, h in parts:
        sums += s
        cross += c
        hist += h
    s2 = _sym(cross)
    n = n_cycles

    def unit(*idx):
        v = np.zeros(N_STATS)
        v[list(idx)] = 1.0
        return v

    if strategy is Strategy.HONEST:
        qhat = Estimate(float(params.q), 0.0)
    elif strategy is Strategy.ETH_SM_NEW_DA:
        qhat = _ratio(sums, s2, n, unit(R), unit(L, U))
    else:
        qhat = _ratio(sums, s2, n, unit(R), unit(L))
    uh = unit(UH1, UH2)
    uh_mean = float(uh @ sums) / n
    uh_var = max(float(uh @ s2 @ uh) - n * uh_mean**2, 0.0) / (n - 1) if n > 1 else math.nan
    pi = float(eth_used.pi) if eth_used else 0.0
    rn = _mean(sums, s2, n, RN)
    return EstimateReport(
        strategy=strategy.value,
        backend="python" if kernel is _kernel_py else "cython",
        n_cycles=n,
        seed=master_seed,
        n_streams=n_streams,
        qhat=qhat,
        e_l=_mean(sums, s2, n, L),
        e_z=_mean(sums, s2, n, Z),
        e_u=_mean(sums, s2, n, U),
        e_v=_mean(sums, s2, n, V),
        e_uh=Estimate(uh_mean, float(math.sqrt(uh_var / n))),
        e_uh1=_mean(sums, s2, n, UH1),
        e_uh2=_mean(sums, s2, n, UH2),
        e_ru_b=_mean(sums, s2, n, RU),
        e_rn_b=Estimate(pi * rn.mean, pi * rn.stderr),
        l_hist=tuple(int(x) for x in hist),
    )


def _resolve_backend(name):
    if name is None:
        return _kernel
    if name == "python":
        return _kernel_py
    if name == "cython":
        if _kernel is _kernel_py:
            raise ImportError("compiled kernel is not available")
        return _kernel
    raise ValueError(f"unknown backend {name!r}")


__all__ = [
    "BACKEND",
    "CycleOutcome",
    "Estimate",
    "EstimateReport",
    "PendingUncle",
    "ReplayRandom",
    "derive_stream",
    "replay_uniforms",
    "run_estimation",
    "simulate_cycle",
    "tie_positions",
]
