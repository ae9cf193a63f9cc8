"""Network configuration and its JSON schema (``lis-network v1``).

::

    {
      "format": "lis-network v1",
      "pearls": [
        {"name": "filt", "inputs": 1, "outputs": 1, "shell": "sp",
         "schedule": ["sync in=1 out=0", "run 2", "sync in=1 out=1"],
         "salt": 0}
      ],
      "sources": [{"name": "adc", "pattern": {"bernoulli": 0.7, "seed": 1}}],
      "sinks":   [{"name": "dac", "pattern": "never"}],
      "channels": [
        {"from": "adc", "to": "filt.in0", "relay_stations": 1},
        {"from": "filt.out0", "to": "dac"}
      ]
    }

Pearl fields: ``schedule`` is inline text (a string or a list of lines,
``ports`` header optional) or ``schedule_file`` names a schedule file;
``rom`` / ``rom_file`` optionally give the sp-rom image the ``sp`` shell runs
instead of compiling the schedule; ``activation`` is the shift-register ring.
Source fields: ``pattern`` (token availability), ``limit`` (max tokens),
``stall_cycles`` (cycles on which the source offers nothing).
Sink fields: ``pattern`` (stop asserted). File paths are relative to the
config file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple, Union

from ..schedule import (
    IOSchedule,
    PortShape,
    SPProgram,
    emit_rom_image,
    format_schedule,
    parse_rom_image,
    parse_schedule_text,
)
from .patterns import Pattern

CONFIG_FORMAT = "lis-network v1"
SHELL_KINDS = ("carloni", "fsm", "sp", "shiftreg")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PearlSpec:
    name: str
    schedule: IOSchedule
    shell: str = "sp"
    rom: Optional[SPProgram] = None
    activation: Optional[Tuple[int, ...]] = None
    salt: int = 0

    @property
    def shape(self) -> PortShape:
        return self.schedule.shape


@dataclass(frozen=True)
class SourceSpec:
    name: str
    pattern: Pattern = Pattern("always")
    limit: Optional[int] = None
    stall_cycles: Tuple[int, ...] = ()


@dataclass(frozen=True)
class SinkSpec:
    name: str
    pattern: Pattern = Pattern("never")


@dataclass(frozen=True)
class ChannelSpec:
    src: str
    dst: str
    relay_stations: int = 0
    name: str = ""

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", f"{self.src}->{self.dst}")
        if self.relay_stations < 0:
            raise ConfigError(f"channel {self.name}: relay_stations must be >= 0")


@dataclass(frozen=True)
class NetworkConfig:
    pearls: Tuple[PearlSpec, ...] = ()
    sources: Tuple[SourceSpec, ...] = ()
    sinks: Tuple[SinkSpec, ...] = ()
    channels: Tuple[ChannelSpec, ...] = ()

    def __post_init__(self):
        for name in ("pearls", "sources", "sinks", "channels"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def channel(self, name: str) -> ChannelSpec:
        for c in self.channels:
            if c.name == name:
                return c
        raise KeyError(name)

    def with_shell(self, kind: str, pearls: Optional[Iterable[str]] = None) -> "NetworkConfig":
        """Copy with the shell kind of ``pearls`` (default: all) replaced."""
        chosen = None if pearls is None else set(pearls)
        return replace(
            self,
            pearls=tuple(
                replace(p, shell=kind) if chosen is None or p.name in chosen else p for p in self.pearls
            ),
        )

    def with_relays(self, channel: str, extra: int) -> "NetworkConfig":
        """Copy with ``extra`` relay stations added to one channel."""
        self.channel(channel)
        return replace(
            self,
            channels=tuple(
                replace(c, relay_stations=c.relay_stations + extra) if c.name == channel else c
                for c in self.channels
            ),
        )

    def to_json(self) -> Dict[str, Any]:
        pearls = []
        for p in self.pearls:
            d: Dict[str, Any] = {
                "name": p.name,
                "inputs": p.shape.n_inputs,
                "outputs": p.shape.n_outputs,
                "shell": p.shell,
                "schedule": format_schedule(p.schedule, header=False).splitlines(),
            }
            if p.rom is not None:
                d["rom"] = emit_rom_image(p.rom).splitlines()
            if p.activation is not None:
                d["activation"] = list(p.activation)
            if p.salt:
                d["salt"] = p.salt
            pearls.append(d)
        sources = []
        for s in self.sources:
            d = {"name": s.name, "pattern": s.pattern.to_json()}
            if s.limit is not None:
                d["limit"] = s.limit
            if s.stall_cycles:
                d["stall_cycles"] = list(s.stall_cycles)
            sources.append(d)
        return {
            "format": CONFIG_FORMAT,
            "pearls": pearls,
            "sources": sources,
            "sinks": [{"name": k.name, "pattern": k.pattern.to_json()} for k in self.sinks],
            "channels": [
                {"name": c.name, "from": c.src, "to": c.dst, "relay_stations": c.relay_stations}
                for c in self.channels
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, obj: Dict[str, Any], base_dir: Union[str, Path, None] = None) -> "NetworkConfig":
        base = Path(base_dir) if base_dir is not None else Path(".")
        fmt = obj.get("format", CONFIG_FORMAT)
        if fmt != CONFIG_FORMAT:
            raise ConfigError(f"unsupported config format {fmt!r} (want {CONFIG_FORMAT!r})")
        try:
            pearls = tuple(_pearl_from_json(p, base) for p in obj.get("pearls", []))
            sources = tuple(
                SourceSpec(
                    name=s["name"],
                    pattern=Pattern.from_json(s.get("pattern", "always")),
                    limit=s.get("limit"),
                    stall_cycles=tuple(int(c) for c in s.get("stall_cycles", ())),
                )
                for s in obj.get("sources", [])
            )
            sinks = tuple(
                SinkSpec(name=k["name"], pattern=Pattern.from_json(k.get("pattern", "never")))
                for k in obj.get("sinks", [])
            )
            channels = tuple(
                ChannelSpec(
                    src=c["from"],
                    dst=c["to"],
                    relay_stations=int(c.get("relay_stations", 0)),
                    name=c.get("name", ""),
                )
                for c in obj.get("channels", [])
            )
        except KeyError as exc:
            raise ConfigError(f"missing field {exc}") from None
        return cls(pearls, sources, sinks, channels)


def _lines(value: Union[str, list]) -> str:
    return "\n".join(value) if isinstance(value, list) else value


def _pearl_from_json(p: Dict[str, Any], base: Path) -> PearlSpec:
    name = p["name"]
    shape = PortShape(int(p["inputs"]), int(p["outputs"]))
    if "schedule_file" in p:
        text = (base / p["schedule_file"]).read_text()
    elif "schedule" in p:
        text = _lines(p["schedule"])
    else:
        raise ConfigError(f"pearl {name}: needs 'schedule' or 'schedule_file'")
    schedule = parse_schedule_text(text, shape)
    rom = None
    if "rom_file" in p:
        rom = parse_rom_image((base / p["rom_file"]).read_text())
    elif "rom" in p:
        rom = parse_rom_image(_lines(p["rom"]) + "\n")
    activation = tuple(int(b) for b in p["activation"]) if "activation" in p else None
    return PearlSpec(
        name=name,
        schedule=schedule,
        shell=p.get("shell", "sp"),
        rom=rom,
        activation=activation,
        salt=int(p.get("salt", 0)),
    )


def load_network(path: Union[str, Path]) -> NetworkConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return NetworkConfig.from_json(obj, path.parent)
