"""Throughput of the compiled kernel against the pure-Python fallback.

    python benchmarks/bench_kernel.py [--cycles N] [--repeat R]

Both backends run the same streams; the script also checks that their
reports are bit-identical.
"""

import argparse
import time

from dyckmining.analytic import EthereumParams
from dyckmining.distributions import MinerParams, Strategy
from dyckmining.simulator import BACKEND, run_estimation

CASES = [
    (Strategy.SM, MinerParams(0.35, 0.5)),
    (Strategy.EFSM, MinerParams(0.35, 0.5)),
    (Strategy.LSM, MinerParams(0.35, 0.5)),
    (Strategy.ETH_SM_OLD_DA, MinerParams(0.35, 0.5)),
]


def best_of(repeat, fn):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cycles", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if BACKEND != "cython":
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
    eth = EthereumParams()
    print(f"{'strategy':<9} {'python c/s':>12} {'cython c/s':>12} {'speedup':>8}  identical")
    for strategy, params in CASES:
        def run(backend):
            return lambda: run_estimation(strategy, params, eth, args.cycles, 1, backend=backend)

        t_py, r_py = best_of(1, run("python"))
        t_cy, r_cy = best_of(args.repeat, run("cython"))
        same = {k: v for k, v in r_py.to_dict().items() if k != "backend"} == \
            {k: v for k, v in r_cy.to_dict().items() if k != "backend"}
        print(f"{strategy.value:<9} {args.cycles / t_py:>12,.0f} {args.cycles / t_cy:>12,.0f} "
              f"{t_py / t_cy:>7.0f}x  {same}")


if __name__ == "__main__":
    main()
