"""
Monte Carlo statistics of the stage-2a drift S_j = L_j − R_j.

Child chunk sizes are drawn i.i.d. from a grid of normalized sizes in [1/2, 3/2].
Step j advances the left side by n_L with probability n_R/(n_L+n_R) and the right
side by n_R otherwise, so E[X_j | past] = 0 and E[X_j² | past] = n_L·n_R.
"""
from fractions import Fraction

import numpy as np

from ..config import PHI_MINUS_ONE

DEFAULT_GRID = (0.5, 0.75, 1.0, 1.25, 1.5)


def martingale_stats(params, trials, rng=None, size_grid=DEFAULT_GRID, samples=5, max_steps=None):
    """
    Simulate `trials` independent stage-2a runs of a level-params.w sequence; the
    stopping threshold and the bound use the child level w−1. Returns a summary dict.
    """
    if trials < 2:
        raise ValueError(f"Need at least two trials for standard errors, got {trials}")
    if params.w <= params.base_level:
        raise ValueError(f"Level {params.w} is a base level; stage 2a exists only above level {params.base_level}")
    rng = rng if rng is not None else np.random.default_rng(params.seed)
    grid = np.asarray(size_grid, dtype=float)
    if grid.min() < 0.5 or grid.max() > 1.5:
        raise ValueError(f"Normalized child sizes must lie in [1/2, 3/2], got {size_grid}")

    child_level = params.w - 1
    threshold = float(params.threshold(child_level))
    # every step adds at least 1/4 to Σ n_L·n_R
    horizon = max_steps or int(np.ceil(threshold / grid.min() ** 2)) + 1

    n_l = rng.choice(grid, size=trials)
    n_r = rng.choice(grid, size=trials)
    drift = np.zeros(trials)
    product = np.zeros(trials)
    kappa = np.full(trials, -1)
    stopped_drift = np.zeros(trials)
    path = np.zeros((horizon, trials))
    variance_min, variance_max = np.inf, -np.inf
    second_moment = []

    for j in range(horizon):
        prod = n_l * n_r
        stopping = (kappa < 0) & (product + prod >= threshold)
        kappa[stopping] = j
        stopped_drift[stopping] = drift[stopping]

        variance_min = min(variance_min, float(prod.min()))
        variance_max = max(variance_max, float(prod.max()))
        go_left = rng.random(trials) < n_r / (n_l + n_r)
        step = np.where(go_left, n_l, -n_r)
        second_moment.append(float(np.mean(step ** 2 - prod)))

        drift += step
        product += prod
        path[j] = drift
        n_l = np.where(go_left, rng.choice(grid, size=trials), n_l)
        n_r = np.where(go_left, n_r, rng.choice(grid, size=trials))

    unfinished = kappa < 0
    kappa[unfinished] = horizon
    stopped_drift[unfinished] = drift[unfinished]

    picks = np.unique(np.linspace(0, horizon - 1, num=min(samples, horizon)).round().astype(int))
    means = path[picks].mean(axis=1)
    errors = path[picks].std(axis=1, ddof=1) / np.sqrt(trials)
    z = np.abs(means) / np.where(errors > 0, errors, np.inf)

    alpha_beta = float(params.alpha * params.beta)
    bound = PHI_MINUS_ONE * np.sqrt(alpha_beta) * child_level / 2
    abs_stopped = np.abs(stopped_drift)
    summary = {
        "w": params.w,
        "threshold": threshold,
        "trials": trials,
        "steps": [int(j) + 1 for j in picks],
        "mean_S": means.tolist(),
        "se_S": errors.tolist(),
        "max_z": float(z.max()),
        "kappa_mean": float(kappa.mean()),
        "abs_S_kappa": float(abs_stopped.mean()),
        "abs_S_kappa_se": float(abs_stopped.std(ddof=1) / np.sqrt(trials)),
        "bound": float(bound),
        "bound_ok": bool(abs_stopped.mean() >= bound),
        "variance_min": variance_min,
        "variance_max": variance_max,
        "variance_in_range": Fraction(1, 4) <= Fraction(variance_min) and Fraction(variance_max) <= Fraction(9, 4),
        "second_moment_gap": float(np.max(np.abs(second_moment))) if second_moment else 0.0,
        "warnings": [],
    }
    if not summary["bound_ok"]:
        message = (
            f"E|S_κ| = {summary['abs_S_kappa']:.4g} is below Φ(−1)·√(αβ)·w/2 = {bound:.4g} "
            f"(mean κ = {summary['kappa_mean']:.2f})"
        )
        print(f"⚠️  {message}")
        summary["warnings"].append(message)
    return summary
