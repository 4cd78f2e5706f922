"""Open registry: strategies register a factory by name for CLI and harness selection."""
import numpy as np

from .escape import EscapeAwareWrapper
from .greedy import Greedy
from .offline_agents import PathFollower, TrajectoryAgent
from .random_eligible import RandomEligible
from .stay_inside import StayInside
from .work_function import WorkFunction

_REGISTRY = {}


def register_algorithm(name):
    def decorate(factory):
        if name in _REGISTRY:
            raise ValueError(f"Algorithm {name!r} is already registered")
        _REGISTRY[name] = factory
        return factory
    return decorate


def available_algorithms():
    return sorted(_REGISTRY)


def make_algorithm(name, rng=None, plan=None, witness=None, threshold=None, budget=50_000_000):
    """
    Build a fresh algorithm instance. `escape:<base>` wraps <base> in the
    escape-aware wrapper (threshold defaults to 1).
    """
    if name.startswith("escape:"):
        base = make_algorithm(name.split(":", 1)[1], rng, plan, witness, None, budget)
        return EscapeAwareWrapper(base, 1.0 if threshold is None else threshold)
    if name not in _REGISTRY:
        raise ValueError(f"Unknown algorithm {name!r}; available: {', '.join(available_algorithms())}")
    return _REGISTRY[name](rng=rng, plan=plan, witness=witness, budget=budget)


def parse_algorithms(text):
    """`greedy,work_function` → list of names, validated."""
    names = [part.strip() for part in text.split(",") if part.strip()]
    for name in names:
        base = name.split(":", 1)[1] if name.startswith("escape:") else name
        if base not in _REGISTRY:
            raise ValueError(f"Unknown algorithm {name!r}; available: {', '.join(available_algorithms())}")
    return names


@register_algorithm("greedy")
def _greedy(**_):
    return Greedy()


@register_algorithm("work_function")
def _work_function(budget=50_000_000, **_):
    return WorkFunction(budget)


@register_algorithm("random_eligible")
def _random_eligible(rng=None, **_):
    return RandomEligible(rng if rng is not None else np.random.default_rng())


@register_algorithm("stay_inside")
def _stay_inside(plan=None, **_):
    return StayInside(plan)


@register_algorithm("path_follower")
def _path_follower(witness=None, **_):
    return PathFollower(witness)


@register_algorithm("trajectory")
def _trajectory(witness=None, **_):
    if witness is None:
        raise ValueError("trajectory agent needs a list of points")
    return TrajectoryAgent(witness)
