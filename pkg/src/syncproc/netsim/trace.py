"""Simulation traces and the observables computed from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, NamedTuple, Optional, Tuple

from ..elastic import ChannelWires, Kind, Token

TRACE_MAGIC = "# lis-trace v1"


class Violation(NamedTuple):
    cycle: int
    kind: str  # relay-overflow | garbage-read | dropped-token | overwrite
    where: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.cycle} {self.kind} {self.where} {self.detail}".rstrip()


class PearlStatus(NamedTuple):
    shell: str
    phase: str
    missing_inputs: int
    blocked_outputs: int
    firing_count: int


class Snapshot(NamedTuple):
    cycle: int
    pearls: Dict[str, PearlStatus]
    buffered: int


@dataclass
class Trace:
    """Per-cycle record of a run.

    ``channels`` holds the wires at the consumer end of every channel,
    ``enables`` each pearl's clock enable, ``activity`` the number of
    transfers on all segments (including those between relay stations).
    """

    channels: Dict[str, List[ChannelWires]]
    enables: Dict[str, List[bool]]
    violations: List[Violation] = field(default_factory=list)
    activity: List[int] = field(default_factory=list)
    start: int = 0
    final: Optional[Snapshot] = None

    @property
    def cycles(self) -> int:
        return len(self.activity)

    def transferred(self, channel: str) -> List[Token]:
        return [w.data for w in self.channels[channel] if w.data.kind is Kind.DATA and not w.stop]

    def __add__(self, other: "Trace") -> "Trace":
        if set(self.channels) != set(other.channels) or set(self.enables) != set(other.enables):
            raise ValueError("cannot join traces of different networks")
        if other.start != self.start + self.cycles:
            raise ValueError(f"trace starting at {other.start} does not continue one ending at {self.start + self.cycles}")
        return Trace(
            {k: v + other.channels[k] for k, v in self.channels.items()},
            {k: v + other.enables[k] for k, v in self.enables.items()},
            self.violations + other.violations,
            self.activity + other.activity,
            self.start,
            other.final if other.final is not None else self.final,
        )


# -- equivalence -------------------------------------------------------------

class UnmappedChannel(KeyError):
    pass


@dataclass(frozen=True)
class Divergence:
    channel: str
    other_channel: str
    position: int
    left: Optional[Token]
    right: Optional[Token]

    def __str__(self) -> str:
        return (
            f"channel {self.channel} (vs {self.other_channel}) diverges at position {self.position}: "
            f"{self.left if self.left is not None else '<none>'} != "
            f"{self.right if self.right is not None else '<none>'}"
        )


@dataclass(frozen=True)
class Equivalence:
    divergence: Optional[Divergence] = None
    compared: Dict[str, int] = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.divergence is None

    def __bool__(self) -> bool:
        return self.divergence is None


def _resolve_map(a: Trace, b: Trace, channel_map: Optional[Mapping[str, str]]) -> Dict[str, str]:
    if channel_map is None:
        channel_map = {name: name for name in a.channels}
    missing = [c for c in a.channels if c not in channel_map]
    if missing:
        raise UnmappedChannel(f"channels without a counterpart: {', '.join(sorted(missing))}")
    for left, right in channel_map.items():
        if left not in a.channels:
            raise UnmappedChannel(f"{left!r} is not a channel of the first trace")
        if right not in b.channels:
            raise UnmappedChannel(f"{right!r} is not a channel of the second trace")
    return dict(channel_map)


def latency_equivalent(a: Trace, b: Trace, channel_map: Optional[Mapping[str, str]] = None) -> Equivalence:
    """Compare the transferred Data streams of corresponding channels.

    Stall cycles are deleted and the remaining token sequences compared
    position by position. Traces are finite, so the comparison covers the
    common prefix: a channel that has carried fewer tokens (more latency) is
    equivalent as long as it agrees with the other trace so far.
    """
    mapping = _resolve_map(a, b, channel_map)
    compared = {}
    for left in sorted(mapping):
        right = mapping[left]
        xs, ys = a.transferred(left), b.transferred(right)
        n = min(len(xs), len(ys))
        for k in range(n):
            if xs[k] != ys[k]:
                return Equivalence(Divergence(left, right, k, xs[k], ys[k]), compared)
        compared[left] = n
    return Equivalence(None, compared)


def cycle_identical(a: Trace, b: Trace, channel_map: Optional[Mapping[str, str]] = None) -> Equivalence:
    """Stronger check: same transfer (or none) on every channel every cycle,
    and the same enable stream for every pearl. ``position`` of a divergence
    is a cycle index."""
    mapping = _resolve_map(a, b, channel_map)
    if a.cycles != b.cycles:
        raise ValueError("traces cover different numbers of cycles")
    for name in sorted(a.enables):
        ea, eb = a.enables[name], b.enables.get(name)
        if eb is None:
            raise UnmappedChannel(f"pearl {name!r} missing from the second trace")
        if ea != eb:
            k = next(i for i, (x, y) in enumerate(zip(ea, eb)) if x != y)
            return Equivalence(Divergence(f"enable:{name}", f"enable:{name}", k, None, None))
    compared = {}
    for left in sorted(mapping):
        right = mapping[left]
        for k, (wa, wb) in enumerate(zip(a.channels[left], b.channels[right])):
            ta = wa.data if wa.transfer else None
            tb = wb.data if wb.transfer else None
            if ta != tb:
                return Equivalence(Divergence(left, right, k, ta, tb), compared)
        compared[left] = a.cycles
    return Equivalence(None, compared)


# -- throughput --------------------------------------------------------------

class Throughput(NamedTuple):
    transfers: int
    total: Fraction
    steady: Fraction


def throughput(t: Trace, channel: str) -> Throughput:
    """Transfers per cycle over the whole trace and over its last half."""
    wires = t.channels[channel]
    n = len(wires)
    if n == 0:
        return Throughput(0, Fraction(0), Fraction(0))
    flags = [w.data.kind is Kind.DATA and not w.stop for w in wires]
    count = sum(flags)
    half = n // 2
    tail = flags[half:]
    return Throughput(count, Fraction(count, n), Fraction(sum(tail), len(tail)))


def duty_cycle(t: Trace, pearl: str) -> Fraction:
    e = t.enables[pearl]
    return Fraction(sum(e), len(e)) if e else Fraction(0)


# -- deadlock ----------------------------------------------------------------

@dataclass(frozen=True)
class DeadlockReport:
    since: int
    buffered: int
    waiting: Tuple[str, ...]
    pearls: Dict[str, PearlStatus]

    def __str__(self) -> str:
        lines = [f"deadlock since cycle {self.since}: {self.buffered} token(s) stuck, waiting: {', '.join(self.waiting) or '-'}"]
        for name in sorted(self.pearls):
            s = self.pearls[name]
            lines.append(
                f"  {name} [{s.shell}] {s.phase} missing_in={s.missing_inputs:#b} "
                f"blocked_out={s.blocked_outputs:#b} firings={s.firing_count}"
            )
        return "\n".join(lines)


def detect_deadlock(t: Trace, window: int) -> Optional[DeadlockReport]:
    """Report a network that made no progress during the last ``window``
    cycles: no transfer on any segment, no pearl clocked, while a token is
    buffered or a pearl is stalled on a synchronization it cannot meet."""
    if window < 1:
        raise ValueError("window must be positive")
    if t.cycles < window or t.final is None:
        return None
    if any(t.activity[-window:]):
        return None
    if any(any(e[-window:]) for e in t.enables.values()):
        return None
    waiting = tuple(
        sorted(name for name, s in t.final.pearls.items() if s.missing_inputs or s.blocked_outputs)
    )
    if not waiting and not t.final.buffered:
        return None
    return DeadlockReport(t.start + t.cycles - window, t.final.buffered, waiting, dict(t.final.pearls))


# -- export ------------------------------------------------------------------

def format_trace(t: Trace, header: Optional[Mapping[str, object]] = None, window: int = 64) -> str:
    """Render a trace as ``lis-trace v1`` text.

    Body lines are ``<cycle> <channel> <valid> <stop> <token>`` with the
    token as ``origin/firing/port/VALUE`` or ``-`` for Void.
    """
    out = [TRACE_MAGIC]
    if header:
        out.append("# " + " ".join(f"{k}={header[k]}" for k in header))
    names = sorted(t.channels)
    for k in range(t.cycles):
        cycle = t.start + k
        for name in names:
            w = t.channels[name][k]
            out.append(f"{cycle} {name} {int(w.valid)} {int(w.stop)} {w.data}")
    out.append("# summary")
    for name in names:
        tp = throughput(t, name)
        out.append(f"throughput {name} transfers={tp.transfers} total={tp.total} steady={tp.steady}")
    for name in sorted(t.enables):
        out.append(f"duty {name} {duty_cycle(t, name)}")
    out.append(f"violations {len(t.violations)}")
    for v in t.violations:
        out.append(f"violation {v}")
    report = detect_deadlock(t, min(window, t.cycles)) if t.cycles else None
    out.append("deadlock none" if report is None else "deadlock " + str(report).replace("\n", "\n# "))
    return "\n".join(out) + "\n"
