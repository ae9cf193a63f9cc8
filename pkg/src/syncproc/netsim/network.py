"""Build and clock a latency-insensitive network.

Every cycle is evaluated in two phases.

Phase A (combinational). Register-driven wires are set first: source
heads, relay-station heads and stops, pearl output registers, sink stops.
Pearls are then evaluated so that any pearl feeding another pearl directly
(no relay station) comes after that consumer, because its ``out_blocked``
flags need the consumer's stop. The builder rejects a cycle of such direct
channels as a combinational loop.

Phase B (clock edge). A segment transfers iff ``valid and not stop``.
Relay stations shift, pearls that were enabled fire, sources and sinks
advance, the cycle counter increments.

A pearl has one output register per port. ``out_blocked`` for port j is
"register full and the channel stops it", i.e. the output cannot store a
new result this cycle.
"""

from __future__ import annotations

import copy
import graphlib
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

from ..elastic import VOID, ChannelWires, Kind, RelayOverflow, RelayStation, Token, relay_step
from ..mixing import name_key, splitmix64
from ..schedule import compile_schedule, emit_rom_image, parse_rom_image
from ..shells import (
    PearlStub,
    PortFlags,
    ShellDecision,
    carloni_step,
    fsm_initial,
    fsm_step,
    pearl_fire,
    shell_requirement,
    shiftreg_initial,
    shiftreg_step,
    sp_initial,
    sp_step,
)
from .config import SHELL_KINDS, NetworkConfig
from .trace import PearlStatus, Snapshot, Trace, Violation

_DATA = Kind.DATA


class NetworkError(ValueError):
    pass


class UnknownEndpoint(NetworkError):
    pass


class DanglingPort(NetworkError):
    pass


class DuplicateConnection(NetworkError):
    pass


class CombinationalLoop(NetworkError):
    pass


class UnknownShellKind(NetworkError):
    pass


class _Source:
    __slots__ = ("name", "key", "sample", "limit", "stalls", "created", "sent", "seg", "head")

    def __init__(self, name, sample, limit, stalls, seg):
        self.name = name
        self.key = name_key(name)
        self.sample = sample
        self.limit = limit
        self.stalls = frozenset(stalls)
        self.created = 0
        self.sent = 0
        self.seg = seg
        self.head = self.token(0)

    def token(self, index: int) -> Token:
        return Token(_DATA, self.name, index, 0, splitmix64(self.key, index))


class _Sink:
    __slots__ = ("name", "sample", "seg", "absorbed")

    def __init__(self, name, sample, seg):
        self.name = name
        self.sample = sample
        self.seg = seg
        self.absorbed = 0


class _Relay:
    __slots__ = ("label", "state", "in_seg", "out_seg")

    def __init__(self, label, in_seg, out_seg):
        self.label = label
        self.state = RelayStation()
        self.in_seg = in_seg
        self.out_seg = out_seg


class _Pearl:
    __slots__ = (
        "name", "kind", "shape", "step", "state", "next_state", "stub",
        "in_segs", "out_segs", "slots", "flags", "decision",
    )

    def __init__(self, name, kind, shape, step, state, stub):
        self.name = name
        self.kind = kind
        self.shape = shape
        self.step = step
        self.state = state
        self.next_state = state
        self.stub = stub
        self.in_segs = [None] * shape.n_inputs
        self.out_segs = [None] * shape.n_outputs
        self.slots: List[Optional[Token]] = [None] * shape.n_outputs
        self.flags = PortFlags(0, 0)
        self.decision = ShellDecision(False, 0, 0, shape.in_full)


class CycleRecord(NamedTuple):
    cycle: int
    transfers: int
    enables: Dict[str, bool]
    violations: List[Violation]


def _make_shell(spec) -> Tuple[Callable, object]:
    kind = spec.shell
    schedule = spec.schedule
    if kind == "carloni":
        shape = spec.shape
        return (lambda st, flags: (carloni_step(flags, shape), None)), None
    if kind == "fsm":
        return fsm_step, fsm_initial(schedule)
    if kind == "sp":
        if spec.rom is not None:
            program = spec.rom
            if program.shape != spec.shape:
                raise NetworkError(
                    f"pearl {spec.name}: ROM is for {program.shape.n_inputs} in / {program.shape.n_outputs} out"
                )
        else:
            # run from the ROM image, not the in-memory program
            program = parse_rom_image(emit_rom_image(compile_schedule(schedule)))
        return sp_step, sp_initial(program)
    if kind == "shiftreg":
        return shiftreg_step, shiftreg_initial(schedule, spec.activation)
    raise UnknownShellKind(f"pearl {spec.name}: unknown shell kind {kind!r} (choose from {', '.join(SHELL_KINDS)})")


class Network:
    """A built network; mutable sequential state, immutable structure."""

    def __init__(self, cfg: NetworkConfig, seed: int = 0):
        self.config = cfg
        self.seed = seed
        self.cycle = 0
        self.created = 0
        self.removed = 0
        self.lost = 0
        self._build(cfg)

    # -- construction ------------------------------------------------------

    def _build(self, cfg: NetworkConfig) -> None:
        names: Dict[str, str] = {}
        for group, items in (("pearl", cfg.pearls), ("source", cfg.sources), ("sink", cfg.sinks)):
            for item in items:
                if item.name in names:
                    raise NetworkError(f"name {item.name!r} used by a {names[item.name]} and a {group}")
                if "." in item.name:
                    raise NetworkError(f"name {item.name!r} must not contain '.'")
                names[item.name] = group

        self.pearls: List[_Pearl] = []
        by_name: Dict[str, _Pearl] = {}
        for spec in cfg.pearls:
            step, state = _make_shell(spec)
            p = _Pearl(spec.name, spec.shell, spec.shape, step, state, PearlStub(spec.name, spec.shape, salt=spec.salt))
            self.pearls.append(p)
            by_name[spec.name] = p
        source_specs = {s.name: s for s in cfg.sources}
        sink_specs = {s.name: s for s in cfg.sinks}

        self.sources: List[_Source] = []
        self.sinks: List[_Sink] = []
        self.relays: List[_Relay] = []
        self.channel_seg: Dict[str, int] = {}
        channel_names = set()
        used = set()
        deps = {p.name: set() for p in self.pearls}
        n_segs = 0

        for ch in cfg.channels:
            if ch.name in channel_names:
                raise DuplicateConnection(f"two channels named {ch.name!r}")
            channel_names.add(ch.name)
            first = n_segs
            last = n_segs + ch.relay_stations
            n_segs = last + 1
            for k in range(ch.relay_stations):
                self.relays.append(_Relay(f"{ch.name}#rs{k}", first + k, first + k + 1))

            kind, owner, port = self._endpoint(ch.src, by_name, source_specs, sink_specs, "out")
            if ch.src in used:
                raise DuplicateConnection(f"{ch.src} is connected more than once")
            used.add(ch.src)
            if kind == "source":
                s = source_specs[owner]
                self.sources.append(_Source(owner, s.pattern.sampler(self.seed, owner), s.limit, s.stall_cycles, first))
            else:
                by_name[owner].out_segs[port] = first

            kind2, owner2, port2 = self._endpoint(ch.dst, by_name, source_specs, sink_specs, "in")
            if ch.dst in used:
                raise DuplicateConnection(f"{ch.dst} is connected more than once")
            used.add(ch.dst)
            if kind2 == "sink":
                k = sink_specs[owner2]
                self.sinks.append(_Sink(owner2, k.pattern.sampler(self.seed, owner2), last))
            else:
                by_name[owner2].in_segs[port2] = last
            self.channel_seg[ch.name] = last
            if kind == "pearl" and kind2 == "pearl" and ch.relay_stations == 0:
                deps[owner].add(owner2)

        for p in self.pearls:
            for i, seg in enumerate(p.in_segs):
                if seg is None:
                    raise DanglingPort(f"{p.name}.in{i} is not connected")
            for j, seg in enumerate(p.out_segs):
                if seg is None:
                    raise DanglingPort(f"{p.name}.out{j} is not connected")
        for name in list(source_specs) + list(sink_specs):
            if name not in used:
                raise DanglingPort(f"{names[name]} {name} is not connected")

        try:
            order = list(graphlib.TopologicalSorter(deps).static_order())
        except graphlib.CycleError as exc:
            loop = exc.args[1]
            raise CombinationalLoop(
                "channels without relay stations form a loop through " + " -> ".join(loop)
            ) from None
        self.order = [by_name[n] for n in order]
        self.n_segs = n_segs
        self._data: List[Token] = [VOID] * n_segs
        self._stop: List[bool] = [False] * n_segs

    @staticmethod
    def _endpoint(ref, pearls, sources, sinks, direction):
        if "." in ref:
            owner, port = ref.split(".", 1)
            if owner not in pearls:
                raise UnknownEndpoint(f"no pearl named {owner!r} (in {ref!r})")
            if not port.startswith(direction) or not port[len(direction):].isdigit():
                raise UnknownEndpoint(f"{ref!r}: expected {owner}.{direction}<k> here")
            k = int(port[len(direction):])
            shape = pearls[owner].shape
            limit = shape.n_outputs if direction == "out" else shape.n_inputs
            if k >= limit:
                raise UnknownEndpoint(f"{ref!r}: pearl {owner} has {limit} {direction}put port(s)")
            return "pearl", owner, k
        if direction == "out" and ref in sources:
            return "source", ref, 0
        if direction == "in" and ref in sinks:
            return "sink", ref, 0
        raise UnknownEndpoint(f"{ref!r} is not a {'source' if direction == 'out' else 'sink'} or pearl port")

    # -- simulation --------------------------------------------------------

    def clone(self) -> "Network":
        return copy.deepcopy(self)

    def buffered(self) -> int:
        return sum(len(r.state.slots) for r in self.relays) + sum(
            1 for p in self.pearls for s in p.slots if s is not None
        )

    def _advance(self, violations: List[Violation]) -> int:
        t = self.cycle
        data = self._data
        stop = self._stop

        for src in self.sources:
            if src.sample(t) and (src.limit is None or src.created < src.limit):
                src.created += 1
            if src.created > src.sent and t not in src.stalls:
                data[src.seg] = src.head
            else:
                data[src.seg] = VOID
        for r in self.relays:
            slots = r.state.slots
            data[r.out_seg] = slots[0] if slots else VOID
            stop[r.in_seg] = len(slots) == 2
        for p in self.pearls:
            for seg, slot in zip(p.out_segs, p.slots):
                data[seg] = VOID if slot is None else slot
        for k in self.sinks:
            stop[k.seg] = k.sample(t)

        for p in self.order:
            in_valid = 0
            bit = 1
            for seg in p.in_segs:
                if data[seg].kind is _DATA:
                    in_valid |= bit
                bit <<= 1
            out_blocked = 0
            bit = 1
            for seg, slot in zip(p.out_segs, p.slots):
                if slot is not None and stop[seg]:
                    out_blocked |= bit
                bit <<= 1
            flags = PortFlags(in_valid, out_blocked)
            decision, p.next_state = p.step(p.state, flags)
            p.flags = flags
            p.decision = decision
            s2i = decision.stop_to_inputs
            for seg in p.in_segs:
                stop[seg] = bool(s2i & 1)
                s2i >>= 1

        # clock edge
        transfers = 0
        for src in self.sources:
            seg = src.seg
            if data[seg].kind is _DATA and not stop[seg]:
                src.sent += 1
                src.head = src.token(src.sent)
                self.created += 1
                transfers += 1
        for r in self.relays:
            incoming = data[r.in_seg]
            state = r.state
            ds_stop = stop[r.out_seg]
            if state.slots and not ds_stop:
                transfers += 1
            elif incoming.kind is not _DATA or (len(state.slots) == 2 and state.refused is incoming):
                continue  # nothing leaves, nothing new arrives: state unchanged
            try:
                _, _, r.state = relay_step(r.state, incoming, ds_stop, t)
            except RelayOverflow as exc:
                violations.append(Violation(t, "relay-overflow", r.label, str(exc)))
                # the refused token is gone; accept the new stream from here
                self.lost += 1
                _, _, r.state = relay_step(r.state._replace(refused=None), incoming, ds_stop, t)
        for p in self.pearls:
            decision = p.decision
            enabled = decision.enable
            consume = decision.consume if enabled else 0
            consumed = []
            i = 0
            # sensing shells stop every input they do not consume
            in_segs = p.in_segs if consume or p.kind == "shiftreg" else ()
            for seg in in_segs:
                tok = data[seg]
                taken = data[seg].kind is _DATA and not stop[seg]
                if consume >> i & 1:
                    if tok.kind is _DATA:
                        self.removed += 1
                    else:
                        violations.append(Violation(t, "garbage-read", f"{p.name}.in{i}", "consumed an invalid channel"))
                    consumed.append(tok)
                elif taken:
                    # handed over without stop but not sampled by the pearl
                    violations.append(Violation(t, "dropped-token", f"{p.name}.in{i}", str(tok)))
                    self.lost += 1
                i += 1
            slots = p.slots
            for j, seg in enumerate(p.out_segs):
                if slots[j] is not None and not stop[seg]:
                    slots[j] = None
                    transfers += 1
            if enabled and (consume or decision.produce):
                outputs, p.stub = pearl_fire(p.stub, consumed, decision.produce)
                for tok in outputs:
                    j = tok.port_index
                    if slots[j] is not None:
                        violations.append(Violation(t, "overwrite", f"{p.name}.out{j}", f"{slots[j]} lost"))
                        self.lost += 1
                    slots[j] = tok
                    self.created += 1
            p.state = p.next_state
        for k in self.sinks:
            seg = k.seg
            if data[seg].kind is _DATA and not stop[seg]:
                k.absorbed += 1
                self.removed += 1
        self.cycle = t + 1
        return transfers

    def step(self) -> CycleRecord:
        violations: List[Violation] = []
        transfers = self._advance(violations)
        return CycleRecord(
            self.cycle - 1,
            transfers,
            {p.name: p.decision.enable for p in self.pearls},
            violations,
        )

    def run(self, cycles: int) -> Trace:
        if cycles < 0:
            raise ValueError("cycles must be non-negative")
        chans = sorted(self.channel_seg.items())
        records = {name: [] for name, _ in chans}
        enables = {p.name: [] for p in self.pearls}
        violations: List[Violation] = []
        activity: List[int] = []
        start = self.cycle
        data, stop = self._data, self._stop
        wires = [(records[name], seg) for name, seg in chans]
        en = [(enables[p.name], p) for p in self.pearls]
        advance = self._advance
        for _ in range(cycles):
            activity.append(advance(violations))
            for rec, seg in wires:
                rec.append(ChannelWires(data[seg], stop[seg]))
            for rec, p in en:
                rec.append(p.decision.enable)
        return Trace(records, enables, violations, activity, start, self.snapshot())

    def snapshot(self) -> Snapshot:
        statuses = {}
        for p in self.pearls:
            phase, in_mask, out_mask = shell_requirement(p.kind, p.state, p.shape)
            statuses[p.name] = PearlStatus(
                p.kind,
                phase,
                in_mask & ~p.flags.in_valid,
                out_mask & p.flags.out_blocked,
                p.stub.firing_count,
            )
        return Snapshot(self.cycle, statuses, self.buffered())


def build_network(cfg: NetworkConfig, seed: int = 0) -> Network:
    return Network(cfg, seed)


def step(net: Network) -> CycleRecord:
    return net.step()


def run(net: Network, cycles: int) -> Trace:
    return net.run(cycles)
