from .request_set import (
    EMPTY,
    InfeasibleRequestError,
    Lift,
    Points,
    Polarity,
    RequestSet,
    Union,
    admissible,
    compliant,
    contains,
    empty,
    lift,
    members,
    nearest_in,
    points,
    singleton,
    union,
)
from .sequence import Chunk, ChunkedSeq, RequestSeq, mirror_sequence
from .text_format import format_request, format_sequence, parse_request, parse_sequence
