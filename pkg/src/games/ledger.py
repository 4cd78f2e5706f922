import json
from dataclasses import dataclass
from fractions import Fraction

from ..metrics.address import format_addr


@dataclass
class StepRecord:
    index: int
    response: object
    cost: Fraction
    escaped: bool = False
    kind: str = "local"   # local | switch | escape | idle


class CostLedger:
    """
    Write-once record of one run: a cost per request, the escape event if any, and
    the local/switching split. Per-chunk views sum back to the total.
    """

    def __init__(self):
        self.steps = []
        self.escaped_at = None
        self.escape_price = None

    def record(self, index, response, cost, kind="local"):
        cost = Fraction(cost)
        if cost < 0:
            raise ValueError(f"Negative cost {cost} at request {index}")
        self.steps.append(StepRecord(index, response, cost, False, kind))

    def record_escape(self, index, price):
        self.escaped_at = index
        self.escape_price = Fraction(price)
        self.steps.append(StepRecord(index, None, self.escape_price, True, "escape"))

    def record_idle(self, index):
        self.steps.append(StepRecord(index, None, Fraction(0), True, "idle"))

    # --- views -------------------------------------------------------------------
    @property
    def costs(self):
        return [step.cost for step in self.steps]

    @property
    def total(self):
        return sum(self.costs, Fraction(0))

    @property
    def escaped(self):
        return self.escaped_at is not None

    @property
    def trajectory(self):
        return [step.response for step in self.steps]

    def prefix_cost(self, upto):
        """Cost of requests [0, upto)."""
        return sum((s.cost for s in self.steps if s.index < upto), Fraction(0))

    def conditional(self, start):
        """Cost of requests [start, end) given the prefix, c(ρ₂ | ρ₁)."""
        return self.total - self.prefix_cost(start)

    def split(self):
        switching = sum((s.cost for s in self.steps if s.kind == "switch"), Fraction(0))
        return {"switching": switching, "local": self.total - switching}

    def chunk_costs(self, chunks, fake_charges=False):
        """
        Cost per chunk. With `fake_charges`, every chunk strictly after the escape
        is charged its own size, so escaping never looks cheaper than playing on.
        """
        per_chunk = [Fraction(0)] * len(chunks)
        owner = {}
        for k, chunk in enumerate(chunks):
            for i in range(chunk.start, chunk.stop):
                owner[i] = k
        for step in self.steps:
            if step.index in owner:
                per_chunk[owner[step.index]] += step.cost

        if fake_charges and self.escaped:
            escape_chunk = owner.get(self.escaped_at)
            for k, chunk in enumerate(chunks):
                if escape_chunk is not None and k > escape_chunk and chunk.size is not None:
                    per_chunk[k] += chunk.size
        return per_chunk

    # --- export ------------------------------------------------------------------
    def to_transcript(self):
        return [
            {
                "request_id": step.index,
                "response": format_addr(step.response) if step.response is not None else None,
                "cost": str(step.cost),
                "escaped": step.escaped,
            }
            for step in self.steps
        ]

    def to_json(self, indent=2):
        return json.dumps({"total": str(self.total), "steps": self.to_transcript()}, indent=indent)
