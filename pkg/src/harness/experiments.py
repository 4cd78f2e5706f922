"""
Ratio experiments: generate sequences per (w, trial), race the online algorithms on
each one, and reduce E[cost]/E[OPT] per (w, algorithm) with confidence intervals.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import pandas as pd

from ..adversary.basic import BasicGenConfig, BasicSequenceGenerator
from ..adversary.refined import RefinedGenerator, RefinedParams
from ..algorithms.registry import make_algorithm
from ..config import LabSettings
from ..games.engine import run_mss
from ..games.offline import BudgetExceededError, opt_cost_dp
from ..requests.sequence import mirror_sequence
from .stats import ratio_ci, trial_rng

KINDS = ("refined", "basic", "lgt")
OPT_MODES = ("auto", "dp", "certificate")
CSV_COLUMNS = ["w", "algorithm", "trials", "mean_cost", "mean_opt", "ratio", "ci_low", "ci_high"]


@dataclass
class Cell:
    kind: str
    w: int
    algorithms: tuple
    seed: int
    opt_mode: str = "auto"
    mirrored: bool = False
    mode: str = "greedy"
    beta: int = 4
    alpha: str = "1"
    rollouts: int = 256
    pool_size: int = 32
    budget: int = 50_000_000
    escape_threshold: float = 1.0


def build_generator(cell, rng):
    if cell.kind == "refined":
        params = RefinedParams(
            w=cell.w, beta=cell.beta, alpha=Fraction(cell.alpha), seed=cell.seed,
            mode=cell.mode, rollouts=cell.rollouts, pool_size=cell.pool_size,
        )
        return RefinedGenerator(params, rng)
    if cell.kind in ("basic", "lgt"):
        cfg = BasicGenConfig(w=cell.w, m=(1,) * cell.w, seed=cell.seed, width_bounded=cell.kind == "lgt")
        return BasicSequenceGenerator(cfg, rng)
    raise ValueError(f"Unknown space kind {cell.kind!r}; choose from {', '.join(KINDS)}")


def repeat_mirrored(space, seq):
    """The sequence followed by its s↔t mirror image (a t→s round on the same space)."""
    twin = mirror_sequence(space, seq)
    joined = type(seq)(requests=list(seq.requests), chunks=list(seq.chunks), witness=list(seq.witness or []), meta=dict(seq.meta))
    return joined.extend(twin)


def _opt(cell, space, seq):
    certificate = None
    if seq.witness is not None:
        certificate = Fraction(space.distance(space.s, space.t)) * (2 if cell.mirrored else 1)
    if cell.opt_mode == "certificate":
        if certificate is None:
            raise ValueError("OPT unavailable: the sequence carries no witness certificate")
        return certificate, "certificate"
    try:
        return opt_cost_dp(space, seq, budget=cell.budget).cost, "dp"
    except BudgetExceededError:
        if cell.opt_mode == "dp" or certificate is None:
            raise
        return certificate, "certificate"


def run_trial(cell, trial):
    """Costs of every algorithm on one generated sequence, plus its OPT."""
    rng = trial_rng(cell.seed, cell.w, trial)
    generator = build_generator(cell, rng)
    seq = generator.generate()
    space = generator.space
    if cell.mirrored:
        seq = repeat_mirrored(space, seq)

    opt, method = _opt(cell, space, seq)
    costs = {}
    for name in cell.algorithms:
        algorithm = make_algorithm(name, rng=rng, witness=seq, threshold=cell.escape_threshold, budget=cell.budget)
        costs[name] = run_mss(space, seq, algorithm).total
    return {"opt": opt, "method": method, "costs": costs}


def _star_run_trial(args):
    return run_trial(*args)


def _reduce(cell, outcomes, confidence, kappa):
    rows = []
    opts = [float(o["opt"]) for o in outcomes]
    methods = sorted({o["method"] for o in outcomes})
    mean_opt = sum(opts) / len(opts)
    for name in cell.algorithms:
        costs = [float(o["costs"][name]) for o in outcomes]
        ratio, low, high = ratio_ci(costs, opts, confidence)
        mean_cost = sum(costs) / len(costs)
        rows.append({
            "w": cell.w,
            "algorithm": name,
            "trials": len(outcomes),
            "mean_cost": mean_cost,
            "mean_opt": mean_opt,
            "ratio": ratio,
            "ci_low": low,
            "ci_high": high,
            "ratio_minus_kappa": (mean_cost - float(kappa)) / mean_opt if mean_opt else math.inf,
            "opt_method": "+".join(methods),
        })
    return rows


def experiment_ratio(kind, w_values, algorithms, trials, settings=None, opt_mode="auto", mirrored=False, mode="greedy", progress=None):
    """
    Table of E[cost]/E[OPT] per (w, algorithm). OPT is the exact DP where the
    budget allows; `auto` falls back to the d(s,t) certificate of the witness path.
    """
    settings = settings or LabSettings()
    if opt_mode not in OPT_MODES:
        raise ValueError(f"Unknown OPT mode {opt_mode!r}; choose from {', '.join(OPT_MODES)}")
    if kind not in KINDS:
        raise ValueError(f"Unknown space kind {kind!r}; choose from {', '.join(KINDS)}")
    if trials < 1:
        raise ValueError(f"Need at least one trial per cell, got {trials}")

    print(f"\n{'='*60}")
    print(f"🚀 Ratio experiment: {kind}, w ∈ {list(w_values)}, algorithms {', '.join(algorithms)}")
    print(f"   Trials per cell: {trials} | OPT: {opt_mode} | workers: {settings.workers}")
    print(f"{'='*60}\n")

    rows = []
    for step, w in enumerate(w_values):
        cell = Cell(
            kind=kind, w=w, algorithms=tuple(algorithms), seed=settings.seed, opt_mode=opt_mode,
            mirrored=mirrored, mode=mode, beta=settings.desk_beta, alpha=str(settings.desk_alpha),
            rollouts=settings.rollouts, pool_size=settings.pool_size, budget=settings.dp_budget,
            escape_threshold=settings.escape_threshold,
        )
        tasks = [(cell, t) for t in range(trials)]
        if settings.workers > 1:
            with ProcessPoolExecutor(max_workers=settings.workers) as pool:
                outcomes = list(pool.map(_star_run_trial, tasks))
        else:
            outcomes = [run_trial(*task) for task in tasks]

        cell_rows = _reduce(cell, outcomes, settings.confidence, settings.kappa)
        for row in cell_rows:
            print(f"📊 w={w} {row['algorithm']}: ratio {row['ratio']:.4f} [{row['ci_low']:.4f}, {row['ci_high']:.4f}] ({row['opt_method']})")
        rows.extend(cell_rows)
        if progress:
            progress((step + 1) / len(w_values), f"w={w} done")

    print("✅ Experiment complete")
    return pd.DataFrame(rows)


def save_table(df, path, fmt="csv"):
    """CSV keeps the fixed header; JSON carries every column."""
    if fmt == "csv":
        df[CSV_COLUMNS].to_csv(path, index=False)
    elif fmt == "json":
        df.to_json(path, orient="records", indent=2)
    else:
        raise ValueError(f"Unknown table format {fmt!r}; use csv or json")
    print(f"✅ Table saved: {path}")
    return path