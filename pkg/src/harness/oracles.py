"""
Empirical oracles for the probability facts the constructions lean on: the minimum
bin load of balls in bins, a lower tail of the binomial, and the child-size
dichotomy behind subspace selection.
"""
import math
from collections import Counter

import numpy as np
from scipy.stats import binom

from ..adversary.universal import case_dichotomy, select_subspace
from ..metrics.hst import HstSpace


def exact_min_two_bins(m):
    """E[min(X, m−X)] for X ~ Binomial(m, 1/2), i.e. m/2 − E|X − m/2|."""
    k = np.arange(m + 1)
    pmf = binom.pmf(k, m, 0.5)
    return float(m / 2 - np.sum(pmf * np.abs(k - m / 2)))


def oracle_balls_bins(n, m, trials, c=0.1, rng=None):
    """Empirical E[min load] of m balls in n bins; the minimum should stay below m/n − c·√(m·ln n / n)."""
    if n < 2:
        raise ValueError(f"Need n ≥ 2 bins, got {n}")
    if m < n * math.log(n):
        raise ValueError(f"Need m ≥ n·ln n = {n * math.log(n):.2f}, got m = {m}")
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}")
    rng = rng if rng is not None else np.random.default_rng()
    loads = rng.multinomial(m, [1.0 / n] * n, size=trials)
    minima = loads.min(axis=1)
    bound = m / n - c * math.sqrt(m * math.log(n) / n)
    result = {
        "n": n,
        "m": m,
        "trials": trials,
        "mean_min": float(minima.mean()),
        "se": float(minima.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
        "bound": bound,
        "c": c,
    }
    result["holds"] = result["mean_min"] <= bound
    if n == 2:
        result["exact_mean_min"] = exact_min_two_bins(m)
    return result


def oracle_binom_tail(p, mu, delta, trials=0, lam=0.3, rng=None):
    """
    Pr[X ≤ (1−δ)μ] for X ~ Binomial(μ/p, p), exactly from the CDF and optionally by
    sampling, against λ·exp(−δ²μ/λ).
    """
    if not 0 < p <= 0.5:
        raise ValueError(f"Need 0 < p ≤ 1/2, got {p}")
    if mu < 4:
        raise ValueError(f"Need μ ≥ 4, got {mu}")
    if not 0 <= delta <= 1:
        raise ValueError(f"Need δ ∈ [0, 1], got {delta}")
    n = round(mu / p)
    if abs(n * p - mu) > 1e-9:
        raise ValueError(f"μ/p = {mu / p} is not an integer number of trials")
    cutoff = math.floor((1 - delta) * mu + 1e-12)
    exact = float(binom.cdf(cutoff, n, p))
    result = {
        "p": p,
        "mu": mu,
        "delta": delta,
        "n": n,
        "exact": exact,
        "bound": lam * math.exp(-delta * delta * mu / lam),
        "lambda": lam,
    }
    result["holds"] = exact >= result["bound"]
    if trials:
        rng = rng if rng is not None else np.random.default_rng()
        result["empirical"] = float(np.mean(rng.binomial(n, p, size=trials) <= cutoff))
    return result


def sweep_case_analysis(corpus, alpha):
    """
    For every internal node of every tree: check that at least one alternative of the
    size dichotomy holds, and count which case subspace selection picks at the root.
    """
    checked, failures = 0, []
    census = Counter()
    for t, root in enumerate(corpus):
        for current in root.internal_nodes():
            if len(current.children) < 2:
                continue
            sizes = [c.leaf_count() for c in current.children]
            outcome = case_dichotomy(sizes)
            checked += 1
            if not outcome["binary"] and outcome["ell"] is None:
                failures.append((t, tuple(sorted(sizes, reverse=True))))
        plan = select_subspace(root, alpha, HstSpace(root))
        census[plan.case.value] += 1
    print(f"📊 Size dichotomy: {checked} nodes checked, {len(failures)} failures; root cases {dict(census)}")
    return {"nodes": checked, "failures": failures, "census": dict(census)}
