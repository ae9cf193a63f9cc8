"""Deterministic per-cycle bit patterns for sources (token available) and
sinks (stop asserted).

JSON forms::

    "always" | "never"
    {"bits": [1, 0, 1]}                 cyclic explicit list
    {"period": 3, "offset": 1}          1 iff (t - start) % period == offset
    {"bernoulli": 0.25, "seed": 7}      splitmix64 coin, see syncproc.mixing

Every form also accepts ``"start": k`` (pattern is 0 before cycle k and
counts cycles from k).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Tuple, Union

from ..mixing import derive_seed, unit_float


@dataclass(frozen=True)
class Pattern:
    kind: str = "always"
    bits: Tuple[int, ...] = ()
    period: int = 1
    offset: int = 0
    p: float = 0.0
    seed: int = 0
    start: int = 0

    def __post_init__(self):
        if self.kind not in ("always", "never", "bits", "period", "bernoulli"):
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if self.kind == "bits" and not self.bits:
            raise ValueError("bit pattern must not be empty")
        if self.kind == "period" and (self.period < 1 or not 0 <= self.offset < self.period):
            raise ValueError("period pattern needs period >= 1 and 0 <= offset < period")
        if self.kind == "bernoulli" and not 0.0 <= self.p <= 1.0:
            raise ValueError("bernoulli probability must be in [0, 1]")
        if self.start < 0:
            raise ValueError("start must be non-negative")

    @classmethod
    def from_json(cls, obj: Union[str, dict, "Pattern"]) -> "Pattern":
        if isinstance(obj, Pattern):
            return obj
        if obj in ("always", "never"):
            return cls(obj)
        if not isinstance(obj, dict):
            raise ValueError(f"cannot read pattern from {obj!r}")
        start = int(obj.get("start", 0))
        if obj.get("kind") in ("always", "never"):
            return cls(obj["kind"], start=start)
        if "bits" in obj:
            return cls("bits", bits=tuple(1 if b else 0 for b in obj["bits"]), start=start)
        if "period" in obj:
            return cls("period", period=int(obj["period"]), offset=int(obj.get("offset", 0)), start=start)
        if "bernoulli" in obj:
            return cls("bernoulli", p=float(obj["bernoulli"]), seed=int(obj.get("seed", 0)), start=start)
        raise ValueError(f"cannot read pattern from {obj!r}")

    def to_json(self) -> Any:
        if self.kind in ("always", "never"):
            return self.kind if not self.start else {"kind": self.kind, "start": self.start}
        if self.kind == "bits":
            d: dict = {"bits": list(self.bits)}
        elif self.kind == "period":
            d = {"period": self.period, "offset": self.offset}
        else:
            d = {"bernoulli": self.p, "seed": self.seed}
        if self.start:
            d["start"] = self.start
        return d

    def sampler(self, run_seed: int = 0, name: str = "") -> Callable[[int], bool]:
        """Return ``f(cycle) -> bool``; Bernoulli streams are keyed by
        (run seed, element name, pattern seed)."""
        start = self.start
        if self.kind == "always":
            return (lambda t: t >= start) if start else (lambda t: True)
        if self.kind == "never":
            return lambda t: False
        if self.kind == "bits":
            bits = self.bits
            n = len(bits)
            return lambda t: t >= start and bool(bits[(t - start) % n])
        if self.kind == "period":
            period, offset = self.period, self.offset
            return lambda t: t >= start and (t - start) % period == offset
        seed = derive_seed(run_seed, name, self.seed)
        p = self.p
        return lambda t: t >= start and unit_float(seed, t) < p
