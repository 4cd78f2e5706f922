import os
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

from dotenv import dotenv_values, load_dotenv
from scipy.stats import norm

load_dotenv()

ENV_PREFIX = "MSSLAB_"

# Φ(−1), the standard normal mass below −1
PHI_MINUS_ONE = float(norm.cdf(-1.0))


def default_refined_alpha(beta):
    """Default refined α coupled to β through Φ(−1)/4 = 9·√(αβ)."""
    return Fraction(PHI_MINUS_ONE / 36) ** 2 / beta


@dataclass
class LabSettings:
    """Every tunable default of the lab in one place"""

    seed: int = 0
    trials: int = 1000
    materialize_cap: int = 100_000
    dp_budget: int = 50_000_000
    rollouts: int = 256
    pool_size: int = 32
    refined_beta: int = 64
    refined_alpha: Fraction = field(default_factory=lambda: default_refined_alpha(64))
    desk_alpha: Fraction = Fraction(1)
    desk_beta: int = 4
    universal_alpha: Fraction = Fraction(1, 16)
    kappa: Fraction = Fraction(0)
    escape_threshold: float = 1.0
    workers: int = 1
    confidence: float = 0.95
    out_dir: str = "outputs"

    @classmethod
    def load(cls, config_path=None, **overrides):
        """
        Defaults → MSSLAB_* environment → key-value config file → explicit overrides.
        """
        settings = cls()
        settings = settings._apply(_environment_values(), source="environment")

        if config_path:
            if not os.path.exists(config_path):
                raise ValueError(f"Config file not found: {config_path}")
            print(f"🔧 Loading config: {config_path}")
            settings = settings._apply(dotenv_values(config_path), source=config_path, warn_unknown=True)

        explicit = {k: v for k, v in overrides.items() if v is not None}
        return settings._apply(explicit, source="flags")

    def _apply(self, values, source, warn_unknown=False):
        known = {f.name: f for f in fields(self)}
        changes = {}
        for raw_key, raw_value in values.items():
            key = raw_key.lower()
            if key.startswith(ENV_PREFIX.lower()):
                key = key[len(ENV_PREFIX):]
            if key not in known:
                if warn_unknown:
                    print(f"⚠️  Unknown config key '{raw_key}' in {source} (ignored)")
                continue
            changes[key] = _coerce(key, type(getattr(self, key)), raw_value)
        return replace(self, **changes)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _environment_values():
    return {k: v for k, v in os.environ.items() if k.startswith(ENV_PREFIX)}


def _coerce(key, kind, value):
    if not isinstance(value, str):
        return value
    try:
        if kind is Fraction:
            return Fraction(value.strip())
        if kind is int:
            return int(value)
        if kind is float:
            return float(value)
        return value
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Invalid value for {key}: {value!r} ({e})")
