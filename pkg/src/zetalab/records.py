"""Result records shared by the functional layer and the command line."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

KINDS = ("prod3", "lin3", "dprod", "divisor")


@dataclass(frozen=True)
class FunctionalEstimate:
    """A finite-tau value of one limit functional, next to its limit ``target_x``."""

    kind: str
    target_x: float
    tau: float
    estimate: float
    parameters: dict[str, Any] = field(default_factory=dict, hash=False)
    deviation: float = field(init=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if not math.isfinite(self.estimate):
            raise ValueError("estimate must be finite")
        object.__setattr__(self, "deviation", self.estimate - self.target_x)

    def as_row(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "x": self.target_x,
            "tau": self.tau,
            "estimate": self.estimate,
            "deviation": self.deviation,
            **{k: self.parameters[k] for k in sorted(self.parameters)},
        }
