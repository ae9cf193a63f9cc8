"""Tokens, channel wires and the two-slot relay station.

A channel carries one :class:`Token` per cycle from producer to consumer plus
a ``stop`` bit flowing back. A token moves across a clock edge iff the
producer offers Data (``valid``) and the consumer does not assert ``stop``.
Producers hold a refused token and offer it again on later cycles.

The relay station has no combinational input-to-output path: its output
token is the head slot and its stop to upstream is ``occupancy == 2``, both
taken from state registered at the previous edge.
"""

from __future__ import annotations

import enum
from typing import NamedTuple, Optional, Tuple


class Kind(enum.Enum):
    VOID = "void"
    DATA = "data"


class Token(NamedTuple):
    kind: Kind
    origin: Optional[str] = None
    firing_index: int = 0
    port_index: int = 0
    value: int = 0

    @classmethod
    def data(cls, origin: str, firing_index: int, port_index: int, value: int) -> "Token":
        if firing_index < 0 or port_index < 0:
            raise ValueError("firing_index and port_index must be non-negative")
        return cls(Kind.DATA, origin, firing_index, port_index, value & 0xFFFFFFFFFFFFFFFF)

    @property
    def is_data(self) -> bool:
        return self.kind is Kind.DATA

    @property
    def key(self) -> Tuple[Optional[str], int, int, int]:
        return (self.origin, self.firing_index, self.port_index, self.value)

    def __str__(self) -> str:
        if self.kind is Kind.VOID:
            return "-"
        return f"{self.origin}/{self.firing_index}/{self.port_index}/{self.value:016X}"


VOID = Token(Kind.VOID)


class ChannelWires(NamedTuple):
    """The wires of one channel segment during one cycle."""

    data: Token
    stop: bool

    @property
    def valid(self) -> bool:
        return self.data.kind is Kind.DATA

    @property
    def transfer(self) -> bool:
        return self.data.kind is Kind.DATA and not self.stop


class ProtocolViolation(Exception):
    def __init__(self, message: str, cycle: Optional[int] = None):
        self.cycle = cycle
        where = f"cycle {cycle}: " if cycle is not None else ""
        super().__init__(where + message)


class RelayOverflow(ProtocolViolation):
    """The upstream abandoned a refused token and offered a different one."""


RELAY_CAPACITY = 2


class RelayStation(NamedTuple):
    slots: Tuple[Token, ...] = ()
    # token refused under stop and still owed by the upstream
    refused: Optional[Token] = None

    @property
    def occupancy(self) -> int:
        return len(self.slots)

    @property
    def out(self) -> Token:
        return self.slots[0] if self.slots else VOID

    @property
    def valid_out(self) -> bool:
        return bool(self.slots)

    @property
    def upstream_stop(self) -> bool:
        return len(self.slots) == RELAY_CAPACITY


def relay_reset(rs: Optional[RelayStation] = None) -> RelayStation:
    return RelayStation()


def relay_step(
    rs: RelayStation,
    incoming: Token,
    downstream_stop: bool,
    cycle: Optional[int] = None,
) -> Tuple[Token, bool, RelayStation]:
    """Clock one relay station for one cycle.

    Returns ``(out, upstream_stop, rs_next)``. ``out`` and ``upstream_stop``
    are the registered values visible during this cycle; ``rs_next`` is the
    state after the edge.

    Raises :class:`RelayOverflow` when the upstream offers a token other
    than the one it was refused earlier, i.e. it ignored ``stop`` and the
    refused token would be lost.
    """
    slots = rs.slots
    out = slots[0] if slots else VOID
    stop = len(slots) == RELAY_CAPACITY
    if slots and not downstream_stop:
        slots = slots[1:]
    refused = rs.refused
    if incoming.kind is Kind.DATA:
        if refused is not None and incoming != refused:
            raise RelayOverflow(
                f"upstream offered {incoming} while {refused} was refused under stop "
                f"(occupancy {len(rs.slots)})",
                cycle,
            )
        if stop:
            refused = incoming
        else:
            slots = slots + (incoming,)
            refused = None
    return out, stop, RelayStation(slots, refused)
