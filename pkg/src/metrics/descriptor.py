"""Space descriptors: a human-readable key-value document per space."""
import io
from fractions import Fraction

from dotenv import dotenv_values

from .diamond import diamond_basic, diamond_refined, lgt_variant
from .graph import ExplicitGraph, parse_edge_list
from .hst import HstSpace, parse_hst
from .line import line_metric, uniform_metric

KINDS = ("line", "uniform", "diamond_basic", "diamond_refined", "lgt_variant", "hst", "graph")


def _format_value(value):
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


def format_descriptor(space):
    """`key="value"` lines; graphs also embed their edge list."""
    values = dict(space.descriptor())
    if isinstance(space, ExplicitGraph):
        values["edges"] = ";".join(space.to_edge_list().strip().split("\n"))
    lines = [f'{key}="{_format_value(value)}"' for key, value in values.items()]
    return "\n".join(lines) + "\n"


def _int_list(text):
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _fraction_list(text):
    return tuple(Fraction(x) for x in str(text).split(",") if x.strip())


def space_from_values(values):
    values = {k.lower(): v for k, v in values.items() if v is not None}
    kind = values.get("kind")
    if kind not in KINDS:
        raise ValueError(f"Unknown space kind {kind!r}; expected one of {', '.join(KINDS)}")

    try:
        if kind == "line":
            return line_metric(int(values["beta"]), Fraction(values.get("unit", 1)))
        if kind == "uniform":
            return uniform_metric(int(values["ell"]), Fraction(values.get("diam", 1)))
        if kind == "diamond_basic":
            return diamond_basic(int(values["w"]), _int_list(values.get("m", "")))
        if kind == "diamond_refined":
            alpha = values.get("alpha")
            return diamond_refined(int(values["w"]), int(values["beta"]), Fraction(alpha) if alpha else None)
        if kind == "lgt_variant":
            C = values.get("c")
            return lgt_variant(int(values["w"]), _int_list(values.get("m", "")), _fraction_list(C) if C else None)
        if kind == "hst":
            return HstSpace(parse_hst("\n".join(str(values["tree"]).split(";"))))
        return parse_edge_list("\n".join(str(values["edges"]).split(";")))
    except KeyError as e:
        raise ValueError(f"Descriptor for {kind} is missing key {e.args[0]!r}")


def parse_descriptor(text):
    return space_from_values(dotenv_values(stream=io.StringIO(text)))


def load_descriptor(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_descriptor(f.read())
