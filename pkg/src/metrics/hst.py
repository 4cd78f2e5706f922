"""
Hierarchically separated trees (ultrametrics).

Distance between two leaves is the weight of their least common ancestor. Leaves
are addressed by their depth-first index, `PointAddr((), i)`.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from .address import base_point
from .base import MetricSpace


@dataclass(eq=False)
class HstNode:
    weight: Fraction = Fraction(0)
    children: list = field(default_factory=list)
    label: str = None

    def __post_init__(self):
        self.weight = Fraction(self.weight)

    @property
    def is_leaf(self):
        return not self.children

    def leaves(self):
        if self.is_leaf:
            return [self]
        found = []
        for child in self.children:
            found.extend(child.leaves())
        return found

    def leaf_count(self):
        return 1 if self.is_leaf else sum(child.leaf_count() for child in self.children)

    def internal_nodes(self):
        if self.is_leaf:
            return []
        found = [self]
        for child in self.children:
            found.extend(child.internal_nodes())
        return found


def leaf(label):
    return HstNode(Fraction(0), [], label)


def node(weight, *children):
    return HstNode(Fraction(weight), list(children))


class HstSpace(MetricSpace):
    """Leaves of an HST under the LCA-weight metric."""

    kind = "hst"

    def __init__(self, root):
        super().__init__()
        validate_hst(root)
        self.root = root
        self.leaf_nodes = root.leaves()
        self.labels = []
        self._index_of_label = {}
        self._ancestors = []
        self.ranges = {}

        self._walk(root, ())
        for i, lf in enumerate(self.leaf_nodes):
            label = lf.label if lf.label is not None else f"x{i}"
            if label in self._index_of_label:
                raise ValueError(f"Duplicate leaf label {label!r}")
            self._index_of_label[label] = i
            self.labels.append(label)

    def _walk(self, current, path):
        if current.is_leaf:
            self._ancestors.append(path)
            return
        lo = len(self._ancestors)
        for child in current.children:
            self._walk(child, path + (current,))
        self.ranges[id(current)] = (lo, len(self._ancestors))

    # --- terminals -------------------------------------------------------------
    @property
    def s(self):
        return base_point(0)

    @property
    def t(self):
        return base_point(len(self.leaf_nodes) - 1)

    @property
    def diameter(self):
        return self.root.weight if len(self.leaf_nodes) > 1 else Fraction(0)

    def canonical(self, addr):
        if addr.levels or not 0 <= addr.base < len(self.leaf_nodes):
            raise ValueError(f"Address {addr} is not a leaf of this HST")
        return addr

    def _count(self):
        return len(self.leaf_nodes)

    def _enumerate(self):
        return [base_point(i) for i in range(len(self.leaf_nodes))]

    def _distance(self, x, y):
        return self.lca(x.base, y.base).weight

    # --- tree helpers ----------------------------------------------------------
    def lca(self, i, j):
        a, b = self._ancestors[i], self._ancestors[j]
        common = None
        for u, v in zip(a, b):
            if u is not v:
                break
            common = u
        return common

    def ancestors(self, i):
        """Ancestors of leaf i, root first."""
        return self._ancestors[i]

    def leaf_range(self, subtree):
        """Half-open DFS index range of the leaves under `subtree`."""
        if subtree.is_leaf:
            i = self.leaf_nodes.index(subtree)
            return i, i + 1
        return self.ranges[id(subtree)]

    def point_of(self, label):
        if label not in self._index_of_label:
            raise ValueError(f"Leaf {label!r} is not in the tree")
        return base_point(self._index_of_label[label])

    def label_of(self, p):
        return self.labels[p.base]

    def nearest_allowed(self, p, forbidden):
        """
        Nearest leaf outside `forbidden` (a set of PointAddr); walks up the
        ancestors of p, ties to the smallest index. Returns (point, distance) or None.
        """
        if p not in forbidden:
            return p, Fraction(0)
        for ancestor in reversed(self._ancestors[p.base]):
            lo, hi = self.ranges[id(ancestor)]
            for i in range(lo, hi):
                q = base_point(i)
                if q not in forbidden:
                    return q, ancestor.weight
        return None

    def descriptor(self):
        return {"kind": self.kind, "leaves": len(self.leaf_nodes), "tree": ";".join(format_hst(self.root).rstrip("\n").split("\n"))}


# --- validation and predicates ---------------------------------------------------

def validate_hst(root):
    if root is None:
        raise ValueError("Empty tree")
    stack = [(root, None)]
    while stack:
        current, parent_weight = stack.pop()
        if current.is_leaf:
            if current.weight != 0:
                raise ValueError(f"Leaf {current.label!r} must have weight 0, got {current.weight}")
            continue
        if current.weight <= 0:
            raise ValueError(f"Internal node weight must be positive, got {current.weight}")
        if parent_weight is not None and current.weight > parent_weight:
            raise ValueError(f"Weights must be non-increasing root→leaf ({current.weight} under {parent_weight})")
        stack.extend((child, current.weight) for child in current.children)


def is_k_hst(root, k=2):
    for parent in root.internal_nodes():
        for child in parent.children:
            if not child.is_leaf and child.weight * k > parent.weight:
                return False
    return True


def round_up_power_of_two(x):
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"Cannot round nonpositive weight {x}")
    p = Fraction(1)
    while p < x:
        p *= 2
    while p / 2 >= x:
        p /= 2
    return p


def ultrametric_distance(root, a, b):
    """LCA weight of leaves labelled a and b (0 iff a = b)."""
    space = HstSpace(root)
    return space.distance(space.point_of(a), space.point_of(b))


def hst_preprocess(root):
    """
    Round every internal weight up to a power of two, then contract every
    parent/child pair of equal weight. Leaf-pair distances grow by a factor in [1, 2).
    """
    for internal in root.internal_nodes():
        if internal.weight <= 0:
            raise ValueError(f"Nonpositive internal weight {internal.weight}")
    validate_hst(root)

    def rebuild(current):
        if current.is_leaf:
            return HstNode(Fraction(0), [], current.label)
        weight = round_up_power_of_two(current.weight)
        children = []
        for child in current.children:
            built = rebuild(child)
            if not built.is_leaf and built.weight == weight:
                children.extend(built.children)
            else:
                children.append(built)
        return HstNode(weight, children, current.label)

    out = rebuild(root)
    if not out.is_leaf and len(out.children) == 0:
        raise ValueError("Preprocessing produced an empty tree")
    return out


# --- text format -------------------------------------------------------------------
#   16
#     4
#       - a
#       - b
#     - c

def format_hst(root, indent="  "):
    lines = []

    def emit(current, depth):
        pad = indent * depth
        if current.is_leaf:
            lines.append(f"{pad}- {current.label if current.label is not None else ''}".rstrip())
        else:
            lines.append(f"{pad}{current.weight}")
            for child in current.children:
                emit(child, depth + 1)

    emit(root, 0)
    return "\n".join(lines) + "\n"


def parse_hst(text):
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        depth = len(raw) - len(raw.lstrip(" "))
        entries.append((depth, raw.strip(), lineno))
    if not entries:
        raise ValueError("Empty tree")

    root = None
    stack = []  # (depth, node)
    leaf_counter = 0
    leaf_depth = None
    for depth, token, lineno in entries:
        if token.startswith("-"):
            label = token[1:].strip() or f"x{leaf_counter}"
            leaf_counter += 1
            current = leaf(label)
        else:
            try:
                current = HstNode(Fraction(token), [])
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"Line {lineno}: expected a weight or '- label', got {token!r}")
        if leaf_depth is not None and depth > leaf_depth:
            raise ValueError(f"Line {lineno}: leaves cannot have children")
        leaf_depth = depth if token.startswith("-") else None
        while stack and stack[-1][0] >= depth:
            stack.pop()
        if stack:
            stack[-1][1].children.append(current)
        elif root is None:
            root = current
        else:
            raise ValueError(f"Line {lineno}: more than one root")
        if not token.startswith("-"):
            stack.append((depth, current))
    return root


# --- builders -----------------------------------------------------------------------

def uniform_hst(ell, diam=Fraction(1)):
    """Star tree: ℓ leaves under one node of weight diam."""
    if ell < 2:
        raise ValueError(f"Uniform HST needs ℓ ≥ 2, got {ell}")
    return HstNode(Fraction(diam), [leaf(f"x{i}") for i in range(ell)])


def random_hst(rng, max_leaves=64, max_children=5, max_depth=4, top_weight=Fraction(256)):
    """
    Random tree with non-increasing internal weights ≥ 1 and at most `max_leaves`
    leaves. Weights shrink by a random factor in [1, 4] per level, so raw trees are
    generally not 2-HSTs until preprocessed.
    """
    counter = [0]

    def new_leaf():
        counter[0] += 1
        return leaf(f"x{counter[0] - 1}")

    def grow(weight, depth, budget):
        width = int(rng.integers(2, max_children + 1))
        width = max(2, min(width, budget))
        children = []
        remaining = budget
        for k in range(width):
            share = remaining - (width - k - 1)
            if share <= 1 or depth >= max_depth or rng.random() < 0.35:
                children.append(new_leaf())
                remaining -= 1
                continue
            take = int(rng.integers(2, share + 1))
            shrink = Fraction(int(rng.integers(4, 17)), 4)
            child_weight = max(Fraction(1), weight / shrink)
            sub = grow(child_weight, depth + 1, take)
            children.append(sub)
            remaining -= sub.leaf_count()
        return HstNode(weight, children)

    if max_leaves < 2:
        raise ValueError(f"max_leaves must be ≥ 2, got {max_leaves}")
    return grow(Fraction(top_weight), 1, int(max_leaves))


__all__ = [
    "HstNode",
    "HstSpace",
    "leaf",
    "node",
    "validate_hst",
    "is_k_hst",
    "ultrametric_distance",
    "hst_preprocess",
    "round_up_power_of_two",
    "format_hst",
    "parse_hst",
    "uniform_hst",
    "random_hst",
]
