"""Confidence intervals and seeding for Monte Carlo cells."""
import numpy as np
from scipy.stats import norm


def z_value(confidence=0.95):
    if not 0 < confidence < 1:
        raise ValueError(f"Confidence level must lie in (0, 1), got {confidence}")
    return float(norm.ppf(0.5 + confidence / 2))


def mean_ci(values, confidence=0.95):
    """(mean, low, high) under the normal approximation."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("Cannot summarize an empty sample")
    mean = float(values.mean())
    if values.size == 1:
        return mean, mean, mean
    half = z_value(confidence) * float(values.std(ddof=1)) / np.sqrt(values.size)
    return mean, mean - half, mean + half


def ratio_ci(costs, opts, confidence=0.95):
    """
    E[cost]/E[OPT] with a delta-method interval: both means come from the same
    trials, so the covariance term is kept.
    """
    costs = np.asarray(costs, dtype=float)
    opts = np.asarray(opts, dtype=float)
    if costs.shape != opts.shape or costs.size == 0:
        raise ValueError(f"Cost and OPT samples must be non-empty and paired, got {costs.size} and {opts.size}")
    mean_cost, mean_opt = float(costs.mean()), float(opts.mean())
    if mean_opt <= 0:
        raise ValueError("Mean OPT is zero; the ratio is undefined")
    ratio = mean_cost / mean_opt
    if costs.size == 1:
        return ratio, ratio, ratio
    cov = np.cov(costs, opts, ddof=1)
    variance = (cov[0, 0] - 2 * ratio * cov[0, 1] + ratio ** 2 * cov[1, 1]) / (costs.size * mean_opt ** 2)
    half = z_value(confidence) * float(np.sqrt(max(variance, 0.0)))
    return ratio, ratio - half, ratio + half


def trial_rng(seed, cell, trial):
    """Generator for one (cell, trial) pair; independent of the order trials run in."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(cell), int(trial))))