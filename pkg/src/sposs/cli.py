"""Command-line experiment harness.

Subcommands:
  run      evaluate (instance, sparsifier) pairs from a TOML/JSON config
  balance  measure CRS balance per element
  certify  statistical suites for the exchange-map guarantees
  lpcheck  LP solver vs brute-force vertex enumeration
  gen      emit adversarial instances to JSON

Outputs are CSV with a versioned header comment; all seeds come from the
config or flags (never the wall clock), so re-runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import certify as certify_mod
from .crs import OrderedGreedy, Rank1Uniform, empirical_balance
from .errors import SizeLimitError, SpossError
from .lp import random_lp, solve, vertex_enumeration_value
from .rng import substream
from .serialize import instance_from_dict, load_instance, save_instance
from .sparsify import (
    CoverageLpSparsifier,
    CrsSparsifier,
    EmptySparsifier,
    FixedSparsifier,
    IdentitySparsifier,
    IntersectionSampleSparsifier,
    MatchingHybridSparsifier,
    MatroidNssSparsifier,
)
from .stochastic import (
    ENUM_CAP,
    Marginals,
    SppInstance,
    estimate_marginals,
    evaluate_sparsifier,
    exact_marginals,
    sample_active,
)

CSV_VERSION = "# sposs-csv v1"
CSV_COLUMNS = [
    "instance",
    "sparsifier",
    "params",
    "ratio_mean",
    "ratio_stderr",
    "degree_mean",
    "opt_mean",
    "trials",
    "seed",
    "notes",
]


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def _load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        data = fh.read()
    if path.endswith(".json"):
        return json.loads(data)
    try:
        import tomllib  # py >= 3.11
    except ImportError:
        import tomli as tomllib
    return tomllib.loads(data.decode("utf-8"))


def _resolve_marginals(inst: SppInstance, spec, seed: int) -> Marginals:
    if spec in (None, "exact"):
        if len(inst.system.ground) <= ENUM_CAP:
            return exact_marginals(inst)
        spec = 2000
    return estimate_marginals(inst, int(spec), seed)


def _build_producer(inst: SppInstance, name: str, params: dict, seed: int):
    notes = []
    if name == "identity":
        producer = IdentitySparsifier(inst)
    elif name == "empty":
        producer = EmptySparsifier(inst)
    elif name == "fixed":
        producer = FixedSparsifier(inst, params["elements"])
    elif name == "crs":
        marg = _resolve_marginals(inst, params.get("marginals"), seed)
        producer = CrsSparsifier(inst, marg)
        notes.append(f"marginals={marg.estimator}")
    elif name == "matroid_nss":
        producer = MatroidNssSparsifier(inst, params["eps"])
    elif name == "intersection_sample":
        producer = IntersectionSampleSparsifier(
            inst, params["eps"], params.get("tau")
        )
    elif name == "matching_hybrid":
        marg = _resolve_marginals(inst, params.get("marginals"), seed)
        producer = MatchingHybridSparsifier(
            inst, params["eps"], marg, params.get("t_override")
        )
        notes.append(f"marginals={marg.estimator}")
        if producer.params["T_overridden"]:
            notes.append(f"T_override={producer.t}")
        notes.append("T_formula=" + producer.params["T_formula"])
    elif name == "coverage_lp":
        producer = CoverageLpSparsifier(inst)
    else:
        raise SpossError(f"unknown sparsifier {name!r}")
    return producer, ";".join(notes)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_run(args) -> int:
    try:
        cfg = _load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: cannot parse config: {exc}", file=sys.stderr)
        return 2
    default_trials = int(cfg.get("trials", 1000))
    default_seed = cfg.get("seed")
    if default_seed is None:
        print("error: config must set a seed", file=sys.stderr)
        return 2
    experiments = cfg.get("experiment", [])
    if not experiments:
        print("error: config has no [[experiment]] entries", file=sys.stderr)
        return 2

    buf = io.StringIO()
    buf.write(CSV_VERSION + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    base_dir = os.path.dirname(os.path.abspath(args.config))
    for exp in experiments:
        spec = exp["instance"]
        if isinstance(spec, str):
            path = spec if os.path.isabs(spec) else os.path.join(base_dir, spec)
            inst = load_instance(path)
            inst_name = inst.name or os.path.basename(spec)
        else:
            inst = instance_from_dict(spec)
            inst_name = inst.name or "inline"
        name = exp["sparsifier"]
        params = dict(exp.get("params", {}))
        trials = int(args.trials_override or exp.get("trials", default_trials))
        seed = int(exp.get("seed", default_seed))
        try:
            producer, notes = _build_producer(inst, name, params, seed)
            report = evaluate_sparsifier(
                inst, producer, trials, seed, threads=args.threads
            )
            writer.writerow(
                [
                    inst_name,
                    name,
                    json.dumps(params, sort_keys=True, separators=(",", ":")),
                    _fmt(report.ratio_mean),
                    _fmt(report.ratio_stderr),
                    _fmt(report.degree_mean),
                    _fmt(report.opt_mean),
                    report.trials,
                    seed,
                    notes,
                ]
            )
        except SizeLimitError as exc:
            writer.writerow(
                [
                    inst_name,
                    name,
                    json.dumps(params, sort_keys=True, separators=(",", ":")),
                    "", "", "", "", trials, seed, f"skipped:size ({exc})",
                ]
            )
    out, close = _open_out(args.out)
    out.write(buf.getvalue())
    if close:
        out.close()
    return 0


def cmd_balance(args) -> int:
    inst = load_instance(args.instance)
    if args.x == "exact":
        x = exact_marginals(inst).q
    elif args.x == "p":
        n = max(inst.system.ground) + 1
        x = np.zeros(n)
        for e in inst.system.ground:
            x[e] = inst.p
    else:
        x = estimate_marginals(inst, int(args.x), args.seed).q
    if args.scheme == "rank1-uniform":
        scheme = Rank1Uniform(inst.system)
    else:
        w = inst.objective.w if inst.objective.kind == "additive" else None
        scheme = OrderedGreedy(
            inst.system, order=args.order, w=w if args.order == "weight" else None
        )
    report = empirical_balance(scheme, x, args.trials, args.seed)
    out, close = _open_out(args.out)
    out.write(CSV_VERSION + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["element", "x", "balance", "stderr", "active_count"])
    for e in inst.system.ground:
        writer.writerow(
            [
                e,
                _fmt(float(x[e])),
                _fmt(float(report.balance[e])),
                _fmt(float(report.stderr[e])),
                int(report.active_counts[e]),
            ]
        )
    if close:
        out.close()
    print(f"min balance: {_fmt(report.min_balance)}", file=sys.stderr)
    return 0


def cmd_certify(args) -> int:
    inst = load_instance(args.instance)
    ok = True
    if args.suite == "exchange-map":
        ok = _suite_exchange_map(inst, args.trials, args.seed)
    elif args.suite == "stitching":
        ok = _suite_stitching(inst, args.trials, args.seed, args.eps)
    else:
        print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
        return 2
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _suite_exchange_map(inst, trials, seed) -> bool:
    if inst.system.kind == "matroid":
        matroids = [inst.system.matroid]
    elif inst.system.kind == "intersection":
        matroids = list(inst.system.matroids)
    else:
        print("exchange-map suite needs a matroid/intersection system",
              file=sys.stderr)
        return False
    w = inst.objective.w
    # Two structurally different feasible sets: the optimum and the optimum
    # of the ground with the first set removed.
    m0 = matroids[0]
    s1 = _shrink_to_common(matroids, m0.max_weight_independent(w))
    rest = [e for e in inst.system.ground if e not in s1]
    s2 = _shrink_to_common(
        matroids, m0.restrict(rest).max_weight_independent(w)
    )
    k = len(matroids)
    counts = {e: 0 for e in s1 | s2}
    for t in range(trials):
        r = sample_active(inst, substream(seed, "certify", t))
        ts = [certify_mod.construct_T(m, s1, s2, r)[0] for m in matroids]
        t_all = frozenset.intersection(*ts)
        for e in t_all:
            if e in counts:
                counts[e] += 1
    ok = True
    sigma = 1.0 / (2 * math.sqrt(trials))
    for e in sorted(s1 - s2):
        emp = counts[e] / trials
        good = abs(emp - inst.p) <= 4 * sigma
        ok &= good
        print(f"e={e} in S1\\S2: Pr[T]={emp:.4f} target={inst.p} "
              f"{'ok' if good else 'VIOLATION'}")
    for f in sorted(s2 - s1):
        emp = counts[f] / trials
        bound = (1 - inst.p) ** k
        good = emp >= bound - 4 * sigma
        ok &= good
        print(f"f={f} in S2\\S1: Pr[T]={emp:.4f} bound={(bound):.4f} "
              f"{'ok' if good else 'VIOLATION'}")
    return ok


def _shrink_to_common(matroids, s) -> frozenset:
    out: set = set()
    for e in sorted(s):
        if all(m.is_independent(frozenset(out | {e})) for m in matroids):
            out.add(e)
    return frozenset(out)


def _suite_stitching(inst, trials, seed, eps) -> bool:
    if inst.system.kind != "intersection":
        print("stitching suite needs an intersection system", file=sys.stderr)
        return False
    producer = IntersectionSampleSparsifier(inst, eps, tau=4)
    k = len(inst.system.matroids)
    tau = producer.tau
    hits = {}
    tries = {}
    for t in range(trials):
        rng = substream(seed, "stitch", t)
        q_list = producer.sample_list(rng)
        r = sample_active(inst, substream(seed, "stitch-r", t))
        i_star = certify_mod.construct_I(inst.system.matroids, q_list, r)
        seen: set = set()
        for i, q in enumerate(q_list):
            for e in sorted(q - frozenset(seen)):
                tries[(e, i)] = tries.get((e, i), 0) + 1
                if e in i_star:
                    hits[(e, i)] = hits.get((e, i), 0) + 1
            seen |= q
    ok = True
    for key in sorted(tries):
        n = tries[key]
        if n < 100:
            continue
        e, i = key
        emp = hits.get(key, 0) / n
        bound = inst.p * (1 - inst.p) ** (k * i)
        sigma = 1.0 / (2 * math.sqrt(n))
        good = emp >= bound - 4 * sigma
        ok &= good
        print(f"e={e} first-sample={i + 1}/{tau}: Pr[I*]={emp:.4f} "
              f"bound={bound:.4f} n={n} {'ok' if good else 'VIOLATION'}")
    return ok


def cmd_lpcheck(args) -> int:
    worst = 0.0
    for i in range(args.count):
        lp = random_lp(substream(args.seed, "lpcheck", i))
        sol = solve(lp)
        ref, _ = vertex_enumeration_value(lp)
        worst = max(worst, abs(sol.value - ref))
    print(f"checked {args.count} LPs; max |simplex - vertex| = {worst:.3e}")
    return 0 if worst <= 1e-9 else 1


def cmd_gen(args) -> int:
    from .hard_instances import (
        block_hard_instance,
        equal_partition_hard_instance,
        rank1_hard_instance,
    )

    if args.family == "rank1":
        inst, meta = rank1_hard_instance(args.n, args.mode, args.seed)
    elif args.family == "blocks":
        inst, meta = block_hard_instance(args.m, args.k, args.seed)
    elif args.family == "equal_partition":
        inst, meta = equal_partition_hard_instance(
            args.n, args.r, args.p, args.seed
        )
    else:
        print(f"error: unknown family {args.family!r}", file=sys.stderr)
        return 2
    save_instance(inst, args.out)
    print(json.dumps(meta, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sposs", description="stochastic packing sparsification harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run experiments from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default="-")
    p_run.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("SPOSS_THREADS", "1")),
    )
    p_run.add_argument("--trials-override", type=int, default=None)
    p_run.set_defaults(func=cmd_run)

    p_bal = sub.add_parser("balance", help="CRS balance curves")
    p_bal.add_argument("--instance", required=True)
    p_bal.add_argument(
        "--scheme", choices=["ordered-greedy", "rank1-uniform"],
        default="ordered-greedy",
    )
    p_bal.add_argument("--order", choices=["random", "weight"], default="random")
    p_bal.add_argument("--x", default="exact",
                       help="'exact', 'p', or a sample count")
    p_bal.add_argument("--trials", type=int, default=10000)
    p_bal.add_argument("--seed", type=int, required=True)
    p_bal.add_argument("--out", default="-")
    p_bal.set_defaults(func=cmd_balance)

    p_cert = sub.add_parser("certify", help="exchange-map statistical suites")
    p_cert.add_argument("--instance", required=True)
    p_cert.add_argument("--suite", choices=["exchange-map", "stitching"],
                        default="exchange-map")
    p_cert.add_argument("--trials", type=int, default=20000)
    p_cert.add_argument("--seed", type=int, required=True)
    p_cert.add_argument("--eps", type=float, default=0.25)
    p_cert.set_defaults(func=cmd_certify)

    p_lp = sub.add_parser("lpcheck", help="LP solver vs vertex enumeration")
    p_lp.add_argument("--count", type=int, default=200)
    p_lp.add_argument("--seed", type=int, required=True)
    p_lp.set_defaults(func=cmd_lpcheck)

    p_gen = sub.add_parser("gen", help="emit an adversarial instance")
    p_gen.add_argument("--family", required=True,
                       choices=["rank1", "blocks", "equal_partition"])
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--n", type=int, default=50)
    p_gen.add_argument("--r", type=int, default=3)
    p_gen.add_argument("--m", type=int, default=16)
    p_gen.add_argument("--k", type=int, default=3)
    p_gen.add_argument("--p", type=float, default=1.0 / 3.0)
    p_gen.add_argument("--mode", default="example31",
                       choices=["example31", "prop45"])
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
