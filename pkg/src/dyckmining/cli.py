"""Command-line entry point: ``dyckmining <command> [options]``.

Exit status: 0 success, 1 statistical check failed, 2 bad arguments,
3 parameters outside the model's domain, 4 oracle containment failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import sweep
from .analytic import (
    EthereumParams,
    apparent_hashrate,
    eth_components,
    eth_expectations,
    expected_attacker_blocks,
)
from .distributions import (
    MinerParams,
    Strategy,
    cycle_length_pmf,
    expected_cycle_length,
    tail_mass_bound,
)
from .errors import DomainError
from .oracle import (
    MAX_LEN_CAP,
    PAIR_CAP,
    oracle_apparent_hashrate,
    oracle_eth_pair_expectations,
    oracle_expected_length,
)
from .simulator import run_estimation

EXIT_STAT_FAIL = 1
EXIT_DOMAIN = 3
EXIT_CONTAINMENT = 4

THREADS_ENV = "DYCKMINING_THREADS"
Z_LIMIT = 4.0

REGION_SETS = {
    "btc": sweep.BITCOIN_SET,
    "eth-old": frozenset({Strategy.HONEST, Strategy.ETH_SM_OLD_DA}),
    "eth-new": frozenset({Strategy.HONEST, Strategy.ETH_SM_NEW_DA}),
}


def _fmt(x) -> str:
    return "%.12g" % float(x)


def _exact(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _ku_list(text: str) -> tuple:
    return tuple(_exact(t.strip()) for t in text.split(",") if t.strip())


def _strategy(text: str) -> Strategy:
    try:
        return Strategy.parse(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _comparison(text: str):
    if text == "all":
        return tuple(sweep.Comparison)
    try:
        return (sweep.Comparison.parse(text),)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _resolution(text: str):
    parts = text.lower().split("x")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"resolution must be N or NQxNG, got {text!r}") from None
    if len(nums) == 1:
        return nums[0], nums[0]
    if len(nums) == 2:
        return nums[0], nums[1]
    raise argparse.ArgumentTypeError(f"resolution must be N or NQxNG, got {text!r}")


def _default_workers() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    return int(raw) if raw else None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dyckmining",
        description="Apparent hashrates of block-withholding strategies.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--strategy", type=_strategy, default=Strategy.SM,
                       help="hm, sm, efsm, lsm, eth-old or eth-new (default sm)")
    point.add_argument("--q", type=_exact, required=True, help="attacker hashrate, 0 < q < 1/2")
    point.add_argument("--gamma", type=_exact, default=Fraction(0), help="connectivity in [0, 1]")

    eth = argparse.ArgumentParser(add_help=False)
    g = eth.add_argument_group("Ethereum rewards")
    g.add_argument("--n1", type=int, default=None, help="max uncle distance (default 6)")
    g.add_argument("--ku", type=_ku_list, default=None,
                   help="uncle rewards K_u(1..n1) as a comma list (default (8-d)/8)")
    g.add_argument("--pi", type=_exact, default=None, help="nephew premium (default 1/32)")
    g.add_argument("--b", type=_exact, default=None, help="coinbase (default 2)")

    p = sub.add_parser("hashrate", parents=[point, eth], help="closed-form apparent hashrate")
    p.set_defaults(run=cmd_hashrate)

    p = sub.add_parser("distribution", parents=[point], help="cycle-length pmf table")
    p.add_argument("--max-len", type=int, default=20)
    p.set_defaults(run=cmd_distribution)

    p = sub.add_parser("simulate", parents=[point, eth], help="Monte Carlo estimate")
    p.add_argument("--cycles", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--streams", type=int, default=1, help="independent streams (default 1)")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads across streams (default ${THREADS_ENV} or cpu count)")
    p.add_argument("--json", action="store_true", help="print the report as one JSON object")
    p.set_defaults(run=cmd_simulate)

    p = sub.add_parser("oracle", parents=[point, eth], help="certified intervals by exact enumeration")
    p.add_argument("--max-len", type=int, default=MAX_LEN_CAP)
    p.set_defaults(run=cmd_oracle)

    p = sub.add_parser("regions", parents=[eth], help="dominance grid to CSV")
    p.add_argument("--set", dest="region_set", choices=sorted(REGION_SETS), default="btc",
                   help="strategies compared: btc (HM/SM/LSM/EFSM), eth-old or eth-new")
    p.add_argument("--strategies", type=lambda s: [_strategy(x) for x in s.split(",")],
                   default=None, help="explicit comma list, overrides --set")
    p.add_argument("--resolution", type=_resolution, default=(100, 100), help="N or NQxNG")
    p.add_argument("--output", default="regions.csv")
    p.set_defaults(run=cmd_regions)

    p = sub.add_parser("threshold", parents=[eth], help="profitability thresholds to CSV")
    p.add_argument("--comparison", type=_comparison, default=tuple(sweep.Comparison),
                   help="btc-sm, eth-old, eth-new or all (default all)")
    p.add_argument("--gamma-samples", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--output", default="thresholds.csv")
    p.set_defaults(run=cmd_threshold)

    p = sub.add_parser("verify", parents=[eth],
                       help="oracle, closed forms and simulation cross-checked on a grid")
    p.add_argument("--cycles", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--max-len", type=int, default=MAX_LEN_CAP)
    p.set_defaults(run=cmd_verify)
    return ap


def eth_from_args(args) -> EthereumParams:
    n1 = args.n1 if args.n1 is not None else (len(args.ku) if args.ku else 6)
    kw = {"n1": n1}
    if args.ku is not None:
        kw["ku"] = args.ku
    elif n1 != 6:
        kw["ku"] = tuple(Fraction(8 - d, 8) for d in range(1, n1 + 1))
    if args.pi is not None:
        kw["pi"] = args.pi
    if args.b is not None:
        kw["b"] = args.b
    return EthereumParams(**kw)


def _params(args, exact=False) -> MinerParams:
    if exact:
        return MinerParams(args.q, args.gamma)
    return MinerParams(float(args.q), float(args.gamma))


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def cmd_hashrate(args) -> int:
    params = _params(args)
    eth = eth_from_args(args)
    s = args.strategy
    _out(f"strategy {s.value}  q {_fmt(params.q)}  gamma {_fmt(params.gamma)}")
    _out(f"apparent_hashrate {_fmt(apparent_hashrate(s, params, eth))}")
    if s.is_ethereum:
        c = eth_components(params, eth)
        _out(f"  q_btc             {_fmt(c['q_btc'])}")
        _out(f"  q_uncle * K_u(1)  {_fmt(c['uncle_term'])}")
        _out(f"  q_nephew * pi     {_fmt(c['nephew_term'])}")
        _out(f"  xi                {_fmt(c['xi'])}")
    _out(f"profitable {'yes' if apparent_hashrate(s, params, eth) > params.q else 'no'}")
    return 0


def cmd_distribution(args) -> int:
    s = args.strategy.cycle_law
    if s is Strategy.HONEST:
        raise DomainError("honest mining has no attack cycles")
    if args.max_len < 1:
        raise DomainError("--max-len must be >= 1")
    params = _params(args, exact=True)
    _out(f"strategy {s.value}  q {_fmt(params.q)}  gamma {_fmt(params.gamma)}")
    _out(f"{'L':>4}  {'P[L]':>20}  {'P[L<=n]':>20}")
    acc = Fraction(0)
    for n in range(1, args.max_len + 1):
        m = cycle_length_pmf(s, params, n)
        acc += m
        _out(f"{n:>4}  {_fmt(m):>20}  {_fmt(acc):>20}")
    _out(f"tail P[L>{args.max_len}] exact {_fmt(1 - acc)}")
    if args.max_len >= 3:
        _out(f"tail bound {_fmt(tail_mass_bound(s, params, args.max_len))}")
    _out(f"E[L] {_fmt(expected_cycle_length(s, params))}")
    return 0


def _analytic_targets(s: Strategy, params: MinerParams, eth: EthereumParams) -> dict:
    t = {
        "qhat": apparent_hashrate(s, params, eth),
        "e_l": expected_cycle_length(s.cycle_law, params) if s is not Strategy.HONEST else 1,
        "e_z": expected_attacker_blocks(s, params),
    }
    if s.is_ethereum:
        ex = eth_expectations(params, eth)
        t.update(
            e_u=ex.e_u,
            e_v=ex.e_v,
            e_uh=ex.e_uh,
            e_uh1=ex.e_uh_in_cycle,
            e_uh2=ex.e_uh_next_cycle,
            e_ru_b=ex.e_ru_over_b,
            e_rn_b=ex.e_rn_over_pi * eth.pi,
        )
    return {k: float(v) for k, v in t.items()}


def cmd_simulate(args) -> int:
    params = _params(args)
    eth = eth_from_args(args)
    s = args.strategy
    workers = args.threads if args.threads is not None else _default_workers()
    rep = run_estimation(s, params, eth, args.cycles, args.seed, args.streams, workers)
    targets = _analytic_targets(s, params, eth)
    zs = {k: getattr(rep, k).z_score(v) for k, v in targets.items()}
    if args.json:
        d = rep.to_dict()
        d["analytic"] = targets
        d["z_scores"] = zs
        _out(json.dumps(d, sort_keys=True))
        return 0
    _out(f"strategy {s.value}  q {_fmt(params.q)}  gamma {_fmt(params.gamma)}  "
         f"cycles {rep.n_cycles}  seed {rep.seed}  streams {rep.n_streams}  backend {rep.backend}")
    _out(f"{'metric':<8} {'estimate':>16} {'stderr':>14} {'analytic':>16} {'z':>8}")
    for name in ("qhat", "e_l", "e_z", "e_u", "e_v", "e_uh", "e_uh1", "e_uh2", "e_ru_b", "e_rn_b"):
        e = getattr(rep, name)
        a = targets.get(name)
        tail = f"{_fmt(a):>16} {zs[name]:>8.3f}" if a is not None else f"{'':>16} {'':>8}"
        _out(f"{name:<8} {_fmt(e.mean):>16} {_fmt(e.stderr):>14} {tail}")
    return 0


def _check(label: str, interval, value) -> bool:
    ok = interval.contains(value)
    _out(f"{'PASS' if ok else 'FAIL'}  {label:<22} {interval}  width {_fmt(interval.width)}  "
         f"analytic {_fmt(value)}")
    return ok


def run_oracle_checks(s: Strategy, params: MinerParams, eth: EthereumParams, max_len: int) -> bool:
    ok = True
    ok &= _check("apparent_hashrate", oracle_apparent_hashrate(s, params, eth, max_len),
                 apparent_hashrate(s, params, eth))
    if s is not Strategy.HONEST:
        ok &= _check("E[L]", oracle_expected_length(s, params, max_len),
                     expected_cycle_length(s.cycle_law, params))
    if s.is_ethereum:
        pair = oracle_eth_pair_expectations(params, eth, min(max_len, PAIR_CAP))
        ex = eth_expectations(params, eth)
        for key in ("e_u", "e_v", "e_uh", "e_uh_in_cycle", "e_uh_next_cycle",
                    "e_ru_over_b", "e_rn_over_pi"):
            ok &= _check(key, pair[key], getattr(ex, key))
    return ok


def cmd_oracle(args) -> int:
    params = _params(args, exact=True)
    eth = eth_from_args(args)
    _out(f"strategy {args.strategy.value}  q {args.q}  gamma {args.gamma}  max_len {args.max_len}")
    return 0 if run_oracle_checks(args.strategy, params, eth, args.max_len) else EXIT_CONTAINMENT


def cmd_regions(args) -> int:
    strategies = frozenset(args.strategies) if args.strategies else REGION_SETS[args.region_set]
    eth = eth_from_args(args)
    cells = sweep.region_grid(resolution=args.resolution, strategies=strategies, eth=eth)
    sweep.write_regions_csv(args.output, cells)
    counts: dict[str, int] = {}
    for c in cells:
        counts[c.best.value] = counts.get(c.best.value, 0) + 1
    _out(f"wrote {len(cells)} cells to {args.output}")
    for s in sweep.PRECEDENCE:
        if s.value in counts:
            _out(f"  {s.value:<8} {counts[s.value]}")
    return 0


def cmd_threshold(args) -> int:
    if args.tol <= 0:
        raise DomainError(f"--tol must be positive, got {args.tol}")
    eth = eth_from_args(args)
    points = []
    for c in args.comparison:
        points.extend(sweep.threshold_curve(c, args.gamma_samples, args.tol, eth))
    sweep.write_thresholds_csv(args.output, points)
    _out(f"wrote {len(points)} thresholds to {args.output}")
    for p in points:
        q = "-" if p.q_min is None else _fmt(p.q_min)
        note = p.status.value if p.q_min is None else ("" if p.one_crossing else "multiple crossings")
        _out(f"  {p.comparison.value:<7} gamma {_fmt(p.gamma):<8} q_min {q:<16} {note}".rstrip())
    if not all(p.one_crossing for p in points):
        print("warning: some curves cross q more than once", file=sys.stderr)
    return 0


VERIFY_Q = (Fraction(1, 10), Fraction(1, 5), Fraction(1, 3), Fraction(2, 5), Fraction(9, 20))
VERIFY_GAMMA = (Fraction(0), Fraction(1, 2), Fraction(1))


def cmd_verify(args) -> int:
    eth = eth_from_args(args)
    contained, stat_ok = True, True
    for s in Strategy:
        for q in VERIFY_Q:
            for g in VERIFY_GAMMA:
                params = MinerParams(q, g)
                _out(f"# {s.value} q={q} gamma={g}")
                contained &= run_oracle_checks(s, params, eth, args.max_len)
                fparams = MinerParams(float(q), float(g))
                rep = run_estimation(s, fparams, eth, args.cycles, args.seed)
                for name, target in _analytic_targets(s, fparams, eth).items():
                    z = getattr(rep, name).z_score(target)
                    ok = abs(z) <= Z_LIMIT
                    stat_ok &= ok
                    _out(f"{'PASS' if ok else 'FAIL'}  sim {name:<18} z {z:+.3f}")
    _out(f"oracle containment {'PASS' if contained else 'FAIL'}")
    _out(f"simulation within {Z_LIMIT:g} stderr {'PASS' if stat_ok else 'FAIL'}")
    if not contained:
        return EXIT_CONTAINMENT
    return 0 if stat_ok else EXIT_STAT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except DomainError as e:
        print(f"dyckmining: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
