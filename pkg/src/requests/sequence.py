from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

from ..metrics.address import selector
from .request_set import Lift, Points, RequestSet, Union, members


@dataclass
class Chunk:
    """Requests [start, stop) of a sequence with an optional size and provenance tag."""

    start: int
    stop: int
    size: Fraction = None
    tag: str = ""

    def __len__(self):
        return self.stop - self.start


@dataclass
class RequestSeq:
    requests: list = field(default_factory=list)
    chunks: list = field(default_factory=list)
    witness: list = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.requests)

    @property
    def sizes(self):
        return [chunk.size for chunk in self.chunks]

    @property
    def boundaries(self):
        return [chunk.start for chunk in self.chunks]

    @property
    def total_size(self):
        return sum((c.size for c in self.chunks if c.size is not None), Fraction(0))

    def chunk_of(self, index):
        """Index of the chunk holding request `index` (chunks cover the sequence)."""
        starts = self.boundaries
        position = bisect_right(starts, index) - 1
        if position < 0 or index >= self.chunks[position].stop:
            raise IndexError(f"Request {index} is not inside any chunk")
        return position

    def chunk_requests(self, i):
        chunk = self.chunks[i]
        return self.requests[chunk.start:chunk.stop]

    def append_chunk(self, requests, size=None, tag="", witness=None):
        start = len(self.requests)
        self.requests.extend(requests)
        if witness is not None:
            if self.witness is None:
                if start:
                    raise ValueError("Cannot add witnesses to a sequence that started without them")
                self.witness = []
            self.witness.extend(witness)
        self.chunks.append(Chunk(start, len(self.requests), size, tag))
        return self.chunks[-1]

    def extend(self, other):
        """Concatenate `other`, keeping its chunking."""
        offset = len(self.requests)
        if self.witness is not None or (offset == 0 and other.witness is not None):
            self.witness = (self.witness or []) + list(other.witness or [])
        self.requests.extend(other.requests)
        for chunk in other.chunks:
            self.chunks.append(Chunk(chunk.start + offset, chunk.stop + offset, chunk.size, chunk.tag))
        return self

    def max_cardinality(self, space):
        return max((len(members(space, r)) for r in self.requests), default=0)


@dataclass
class ChunkedSeq(RequestSeq):
    """Sequence whose every chunk carries a size (in absolute distance units)."""

    level: int = 0
    unit: Fraction = Fraction(1)
    mode: str = ""

    @property
    def m(self):
        return len(self.chunks)

    def normalized_sizes(self):
        return [c.size / self.unit for c in self.chunks]


# --- s↔t mirroring -----------------------------------------------------------------

def mirror_node(space, node):
    if isinstance(node, Points):
        return Points(frozenset(space.reflect(p) for p in node.points))
    if isinstance(node, Union):
        return Union(tuple(mirror_node(space, part) for part in node.parts))
    if isinstance(node, Lift):
        side, index = node.selector
        child = space.segment(node.selector).space
        return Lift(selector(side, space.n + 1 - index), mirror_node(child, node.inner))
    raise TypeError(f"Unknown request node {node!r}")


def mirror_sequence(space, seq):
    """Same sequence played from t to s (space must be s↔t symmetric)."""
    mirrored = RequestSeq(
        requests=[RequestSet(mirror_node(space, r.node), r.polarity) for r in seq.requests],
        chunks=[Chunk(c.start, c.stop, c.size, c.tag) for c in seq.chunks],
        witness=[space.reflect(p) for p in seq.witness] if seq.witness is not None else None,
        meta={**seq.meta, "mirrored": True},
    )
    return mirrored
