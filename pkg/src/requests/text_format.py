"""
Line-oriented sequence format.

    # meta kind=refined w=3
    # chunk 0 size=3/2 stage=stage1
    IN L1/@4 R1/@4 ! L1/@4
    OUT @3 @5

One request per line: polarity token, atom tokens (copy selectors then `@base`), and
optionally `!` followed by the witness point.
"""
from fractions import Fraction

from ..metrics.address import base_point, format_addr, parse_addr
from .request_set import EMPTY, Lift, Points, Polarity, RequestSet, Union, union
from .sequence import Chunk, ChunkedSeq, RequestSeq


def _flatten(node):
    if isinstance(node, Points):
        return list(node.points)
    if isinstance(node, Union):
        found = []
        for part in node.parts:
            found.extend(_flatten(part))
        return found
    if isinstance(node, Lift):
        return [p.lift(node.selector) for p in _flatten(node.inner)]
    raise TypeError(f"Unknown request node {node!r}")


def format_request(request, witness=None):
    atoms = sorted(set(_flatten(request.node)))
    tokens = [request.polarity.value] + [format_addr(a) for a in atoms]
    if witness is not None:
        tokens += ["!", format_addr(witness)]
    return " ".join(tokens)


def _atom_node(addr):
    node = Points(frozenset([base_point(addr.base)]))
    for sel in reversed(addr.levels):
        node = Lift(sel, node)
    return node


def parse_request(line):
    tokens = line.split()
    if not tokens or tokens[0] not in ("IN", "OUT"):
        raise ValueError(f"Request line must start with IN or OUT: {line!r}")
    polarity = Polarity(tokens[0])
    witness = None
    if "!" in tokens:
        cut = tokens.index("!")
        if cut != len(tokens) - 2:
            raise ValueError(f"Witness marker must be followed by exactly one address: {line!r}")
        witness = parse_addr(tokens[-1])
        tokens = tokens[:cut]
    atoms = [_atom_node(parse_addr(tok)) for tok in tokens[1:]]
    if not atoms:
        return RequestSet(EMPTY, polarity), witness
    return union(*[RequestSet(a, polarity) for a in atoms]), witness


def format_sequence(seq):
    lines = []
    meta = " ".join(f"{k}={v}" for k, v in seq.meta.items() if not isinstance(v, (list, dict)))
    if meta:
        lines.append(f"# meta {meta}")
    for i, chunk in enumerate(seq.chunks):
        size = "" if chunk.size is None else f" size={chunk.size}"
        lines.append(f"# chunk {i}{size} stage={chunk.tag or '-'} requests={len(chunk)}")
        for j in range(chunk.start, chunk.stop):
            witness = seq.witness[j] if seq.witness is not None else None
            lines.append(format_request(seq.requests[j], witness))
    return "\n".join(lines) + "\n"


def _parse_fields(text):
    fields = {}
    for part in text.split():
        if "=" in part:
            key, value = part.split("=", 1)
            fields[key] = value
    return fields


def parse_sequence(text):
    requests, witness, chunks, meta = [], [], [], {}
    pending = None  # (size, tag, start)
    has_witness = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("# meta"):
            meta.update(_parse_fields(line[len("# meta"):]))
            continue
        if line.startswith("# chunk"):
            fields = _parse_fields(line)
            size = Fraction(fields["size"]) if "size" in fields else None
            tag = fields.get("stage", "")
            if pending is not None:
                chunks.append(Chunk(pending[2], len(requests), pending[0], pending[1]))
            pending = (size, "" if tag == "-" else tag, len(requests))
            continue
        if line.startswith("#"):
            continue
        try:
            request, point = parse_request(line)
        except ValueError as e:
            raise ValueError(f"Line {lineno}: {e}")
        if has_witness is None:
            has_witness = point is not None
        elif has_witness != (point is not None):
            raise ValueError(f"Line {lineno}: witness present on some requests only")
        requests.append(request)
        witness.append(point)

    if pending is not None:
        chunks.append(Chunk(pending[2], len(requests), pending[0], pending[1]))
    if not chunks and requests:
        chunks.append(Chunk(0, len(requests)))

    cls = ChunkedSeq if chunks and all(c.size is not None for c in chunks) else RequestSeq
    return cls(requests=requests, chunks=chunks, witness=witness if has_witness else None, meta=meta)
