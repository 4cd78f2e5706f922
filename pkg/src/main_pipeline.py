import json
import os
import sys
from fractions import Fraction

import numpy as np
import pandas as pd

from .adversary.basic import BasicGenConfig, gen_basic_sequence, gen_lgt_sequence
from .adversary.combine import Mode
from .adversary.martingale import martingale_stats
from .adversary.refined import RefinedParams, check_chunked_seq, gen_refined_chunks
from .adversary.universal import coupon_collector_ratio, sample_universal, select_subspace, uniform_plan
from .algorithms.registry import make_algorithm, parse_algorithms
from .config import LabSettings
from .games.engine import run_mss
from .games.layered import export_layered_graph, layered_shortest_path, mts_to_layered_graph
from .games.offline import BudgetExceededError, opt_cost_dp
from .games.translations import mss_to_mts
from .harness.experiments import experiment_ratio, save_table
from .harness.oracles import oracle_balls_bins, oracle_binom_tail, sweep_case_analysis
from .harness.verify import verify_chunk_contract
from .metrics.descriptor import format_descriptor, load_descriptor
from .metrics.diamond import diamond_basic, diamond_refined, lgt_variant
from .metrics.graph import materialize_graph
from .metrics.hst import HstSpace, format_hst, hst_preprocess, parse_hst, random_hst
from .metrics.line import line_metric, uniform_metric
from .requests.text_format import format_sequence, parse_sequence


def parse_levels(text):
    """`1-4` or `1,2,3` → [1, 2, 3, 4] / [1, 2, 3]"""
    text = text.strip()
    if "-" in text:
        lo, hi = (int(x) for x in text.split("-", 1))
        if hi < lo:
            raise ValueError(f"Empty level range {text!r}")
        return list(range(lo, hi + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _int_tuple(text):
    return tuple(int(x) for x in text.split(",") if x.strip()) if text else None


def _fraction_tuple(text):
    return tuple(Fraction(x) for x in text.split(",") if x.strip()) if text else None


class LowerBoundLab:
    """Drives generation, play and measurement for one configured session"""

    def __init__(self, settings):
        self.settings = settings
        self.out_dir = settings.out_dir
        os.makedirs(self.out_dir, exist_ok=True)
        print("🚀 Initializing lab...")
        print(f"   Seed: {settings.seed} | Trials: {settings.trials} | Workers: {settings.workers}")
        print(f"   Output: {self.out_dir}")

    def _path(self, name):
        return os.path.join(self.out_dir, name)

    def _write(self, name, text):
        path = self._path(name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"✅ Saved: {path}")
        return path

    def _dump(self, name, payload):
        return self._write(name, json.dumps(payload, indent=2, default=str) + "\n")

    # --- metrics -----------------------------------------------------------------
    def build_space(self, args):
        kind = args.kind
        if kind == "line":
            return line_metric(args.beta or self.settings.desk_beta)
        if kind == "uniform":
            return uniform_metric(args.ell, Fraction(args.diam))
        if kind == "diamond_basic":
            return diamond_basic(args.w, _int_tuple(args.m) or (1,) * args.w)
        if kind == "diamond_refined":
            alpha = Fraction(args.alpha) if args.alpha else self.settings.refined_alpha
            return diamond_refined(args.w, args.beta or self.settings.refined_beta, alpha)
        if kind == "lgt_variant":
            return lgt_variant(args.w, _int_tuple(args.m) or (1,) * args.w, _fraction_tuple(args.C))
        if kind == "hst":
            root = self._load_tree(args)
            return HstSpace(hst_preprocess(root) if args.preprocess else root)
        raise ValueError(f"Unknown space kind {kind!r}")

    def _load_tree(self, args):
        if args.hst:
            with open(args.hst, "r", encoding="utf-8") as f:
                return parse_hst(f.read())
        return random_hst(np.random.default_rng(self.settings.seed), max_leaves=args.leaves)

    def gen_metric(self, args):
        print(f"\n{'='*60}")
        print(f"📐 Building {args.kind} space")
        print(f"{'='*60}\n")
        space = self.build_space(args)
        print(f"   Points: {space.point_count} | d(s,t) = {space.distance(space.s, space.t)}")
        paths = [self._write(f"{args.name}.space", format_descriptor(space))]
        if isinstance(space, HstSpace):
            paths.append(self._write(f"{args.name}.tree", format_hst(space.root)))
        if args.edges:
            graph = materialize_graph(space, cap=self.settings.materialize_cap)
            paths.append(self._write(f"{args.name}.edges", graph.to_edge_list()))
        return paths

    # --- sequences -----------------------------------------------------------------
    def generate(self, args):
        rng = np.random.default_rng(self.settings.seed)
        if args.kind in ("basic", "lgt"):
            cfg = BasicGenConfig(
                w=args.w, m=_int_tuple(args.m) or (1,) * args.w, seed=self.settings.seed,
                width_bounded=args.kind == "lgt", C=_fraction_tuple(args.C),
            )
            seq = gen_lgt_sequence(cfg, rng) if cfg.width_bounded else gen_basic_sequence(cfg, rng)
            return cfg.space(), seq
        if args.kind == "refined":
            params = RefinedParams.from_settings(
                self.settings, args.w, desk=args.desk,
                beta=args.beta, alpha=Fraction(args.alpha) if args.alpha else None, mode=args.mode,
            )
            seq = gen_refined_chunks(params, rng)
            check_chunked_seq(seq, params)
            return params.space(), seq
        if args.kind == "universal":
            alpha = Fraction(args.alpha) if args.alpha else self.settings.universal_alpha
            if args.ell:
                plan = uniform_plan(args.ell, Fraction(args.diam), alpha)
            else:
                root = hst_preprocess(self._load_tree(args))
                plan = select_subspace(root, alpha)
            seq = sample_universal(plan, rng, draws=args.h, lift=args.lift)
            seq.meta.pop("draws", None)
            return plan.space, seq
        raise ValueError(f"Unknown sequence kind {args.kind!r}")

    def gen_seq(self, args):
        print(f"\n{'='*60}")
        print(f"🎲 Generating {args.kind} sequence (seed {self.settings.seed})")
        print(f"{'='*60}\n")
        space, seq = self.generate(args)
        print(f"   Requests: {len(seq)} | Chunks: {len(seq.chunks)} | Max |S|: {seq.max_cardinality(space)}")
        manifest = pd.DataFrame([
            {"chunk": i, "start": c.start, "stop": c.stop, "size": str(c.size) if c.size is not None else "", "stage": c.tag}
            for i, c in enumerate(seq.chunks)
        ])
        return [
            self._write(f"{args.name}.space", format_descriptor(space)),
            self._write(f"{args.name}.seq", format_sequence(seq)),
            self._write(f"{args.name}.sizes.csv", manifest.to_csv(index=False)),
        ]

    # --- play ------------------------------------------------------------------------
    def run(self, args, algorithms):
        space = load_descriptor(args.space)
        with open(args.seq, "r", encoding="utf-8") as f:
            seq = parse_sequence(f.read())
        print(f"\n{'='*60}")
        print(f"🏁 Racing {', '.join(algorithms)} on {len(seq)} requests")
        print(f"{'='*60}\n")

        summary = {"requests": len(seq)}
        try:
            opt = opt_cost_dp(space, seq, budget=self.settings.dp_budget)
            summary["opt"] = opt.cost
            print(f"📊 OPT (DP): {opt.cost}")
        except BudgetExceededError as e:
            print(f"🔄 {e}; using the witness certificate")
            summary["opt"] = space.distance(space.s, space.t) if seq.witness is not None else None

        rng = np.random.default_rng(self.settings.seed)
        for name in algorithms:
            algorithm = make_algorithm(
                name, rng=rng, witness=seq, threshold=self.settings.escape_threshold, budget=self.settings.dp_budget,
            )
            ledger = run_mss(space, seq, algorithm)
            summary[name] = ledger.total
            print(f"📊 {name}: cost {ledger.total}")
            self._write(f"{args.name}.{name.replace(':', '_')}.json", ledger.to_json())

        if args.layered:
            graph = mts_to_layered_graph(space, mss_to_mts(space, seq))
            length, _ = layered_shortest_path(graph)
            print(f"📊 Layered-graph shortest path: {length}")
            self._write(f"{args.name}.layered", export_layered_graph(graph))
        self._dump(f"{args.name}.summary.json", summary)
        return summary

    # --- measurement -------------------------------------------------------------------
    def experiment(self, args, algorithms, fmt):
        if args.kind == "coupon":
            result = coupon_collector_ratio(
                args.ell, args.h, self.settings.trials, np.random.default_rng(self.settings.seed),
                algorithms, budget=self.settings.dp_budget,
            )
            return self._dump(f"{args.name}.json", result)
        table = experiment_ratio(
            args.kind, parse_levels(args.levels), algorithms, self.settings.trials, self.settings,
            opt_mode=args.opt, mirrored=args.mirrored, mode=args.mode,
        )
        return save_table(table, self._path(f"{args.name}.{fmt}"), fmt)

    def verify(self, args, algorithms):
        params = RefinedParams.from_settings(self.settings, args.w, desk=True, mode=args.mode)
        seeds = list(range(self.settings.seed, self.settings.seed + self.settings.trials))
        report = verify_chunk_contract(
            params, algorithms, seeds, self.settings.confidence, self.settings.dp_budget, self.settings.escape_threshold,
        )
        if args.check:
            rng = np.random.default_rng(self.settings.seed)
            report["checks"] = [check_chunked_seq(gen_refined_chunks(params, rng), params) for _ in seeds[:args.check]]
        return self._dump(f"{args.name}.json", report)

    def oracle(self, args):
        rng = np.random.default_rng(self.settings.seed)
        if args.which == "balls-bins":
            result = oracle_balls_bins(args.n, args.balls, self.settings.trials, args.c, rng)
        elif args.which == "binom-tail":
            result = oracle_binom_tail(args.p, args.mu, args.delta, self.settings.trials, args.lam, rng)
        elif args.which == "case-analysis":
            corpus = [random_hst(rng, max_leaves=args.leaves) for _ in range(self.settings.trials)]
            result = sweep_case_analysis(corpus, self.settings.universal_alpha)
        else:
            params = RefinedParams(
                w=args.w, beta=args.beta or self.settings.refined_beta,
                alpha=Fraction(args.alpha) if args.alpha else None, seed=self.settings.seed,
            )
            result = martingale_stats(params, self.settings.trials, rng)
        verdict = result.get("holds", result.get("bound_ok", not result.get("failures")))
        print(f"{'✅' if verdict else '⚠️ '} {args.which}: {'holds' if verdict else 'fails'}")
        return self._dump(f"{args.name}.json", result)


def build_parser():
    import argparse

    parser = argparse.ArgumentParser(description="Lower-bound laboratory for metrical service systems")
    parser.add_argument("--seed", type=int, help="Base random seed")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--format", choices=["csv", "json"], default="csv", help="Table format")
    parser.add_argument("--config", help="Key-value config file overriding the defaults")
    parser.add_argument("--alg", default="greedy,work_function", help="Comma-separated algorithm names")
    parser.add_argument("--trials", type=int, help="Trials per cell")
    parser.add_argument("--workers", type=int, help="Worker processes for experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    metric = sub.add_parser("gen-metric", help="Write a space descriptor")
    metric.add_argument("kind", choices=["line", "uniform", "diamond_basic", "diamond_refined", "lgt_variant", "hst"])
    metric.add_argument("--name", default="space")
    metric.add_argument("--edges", action="store_true", help="Also export the materialized edge list")
    metric.add_argument("--preprocess", action="store_true", help="Round HST weights to powers of two")

    seq = sub.add_parser("gen-seq", help="Generate a request sequence")
    seq.add_argument("kind", choices=["basic", "lgt", "refined", "universal"])
    seq.add_argument("--name", default="sequence")
    seq.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.ROLLOUT.value)
    seq.add_argument("--desk", action="store_true", help="Use the desk-scale refined α and β")
    seq.add_argument("--h", type=int, default=1, help="Universal draws from D")
    seq.add_argument("--lift", action="store_true", help="Lift universal requests to the whole tree")

    for p in (metric, seq):
        p.add_argument("--w", type=int, default=1)
        p.add_argument("--m", help="m sequence, e.g. 1,1,2")
        p.add_argument("--C", help="Extra-edge constants of the width-bounded variant")
        p.add_argument("--beta", type=int)
        p.add_argument("--alpha")
        p.add_argument("--ell", type=int)
        p.add_argument("--diam", default="1")
        p.add_argument("--hst", help="HST text file")
        p.add_argument("--leaves", type=int, default=64)

    run = sub.add_parser("run", help="Play algorithms on a stored sequence")
    run.add_argument("space")
    run.add_argument("seq")
    run.add_argument("--name", default="run")
    run.add_argument("--layered", action="store_true", help="Export the layered MTS graph")

    exp = sub.add_parser("experiment", help="Measure competitive ratios")
    exp.add_argument("kind", choices=["refined", "basic", "lgt", "coupon"])
    exp.add_argument("--levels", default="1-4")
    exp.add_argument("--opt", choices=["auto", "dp", "certificate"], default="auto")
    exp.add_argument("--mirrored", action="store_true")
    exp.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.GREEDY.value)
    exp.add_argument("--ell", type=int, default=8)
    exp.add_argument("--h", type=int, default=10_000, help="Draws per coupon-collector trial")
    exp.add_argument("--name", default="experiment")

    ver = sub.add_parser("verify", help="Check the chunk contract on desk-scale refined sequences")
    ver.add_argument("--w", type=int, default=2)
    ver.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.GREEDY.value)
    ver.add_argument("--check", type=int, default=0, help="Also report chunk properties for this many draws")
    ver.add_argument("--name", default="verify")

    ora = sub.add_parser("oracle", help="Run an empirical probability oracle")
    ora.add_argument("which", choices=["balls-bins", "binom-tail", "case-analysis", "martingale"])
    ora.add_argument("--n", type=int, default=2)
    ora.add_argument("--balls", type=int, default=16)
    ora.add_argument("--c", type=float, default=0.1)
    ora.add_argument("--p", type=float, default=0.5)
    ora.add_argument("--mu", type=float, default=16)
    ora.add_argument("--delta", type=float, default=0.5)
    ora.add_argument("--lam", type=float, default=0.3)
    ora.add_argument("--leaves", type=int, default=64)
    ora.add_argument("--w", type=int, default=4)
    ora.add_argument("--beta", type=int)
    ora.add_argument("--alpha")
    ora.add_argument("--name", default="oracle")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = LabSettings.load(
            args.config, seed=args.seed, out_dir=args.out, trials=args.trials, workers=args.workers,
        )
        lab = LowerBoundLab(settings)
        if args.command == "gen-metric":
            lab.gen_metric(args)
        elif args.command == "gen-seq":
            lab.gen_seq(args)
        elif args.command == "run":
            lab.run(args, parse_algorithms(args.alg))
        elif args.command == "experiment":
            lab.experiment(args, parse_algorithms(args.alg), args.format)
        elif args.command == "verify":
            lab.verify(args, parse_algorithms(args.alg))
        else:
            lab.oracle(args)
    except Exception as e:
        print(f"❌ Error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
