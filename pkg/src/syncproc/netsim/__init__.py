"""Cycle-accurate simulation of pearls, shells, relay stations, sources and sinks."""

from .config import (
    CONFIG_FORMAT,
    SHELL_KINDS,
    ChannelSpec,
    ConfigError,
    NetworkConfig,
    PearlSpec,
    SinkSpec,
    SourceSpec,
    load_network,
)
from .network import (
    CombinationalLoop,
    CycleRecord,
    DanglingPort,
    DuplicateConnection,
    Network,
    NetworkError,
    UnknownEndpoint,
    UnknownShellKind,
    build_network,
    run,
    step,
)
from .patterns import Pattern
from .trace import (
    DeadlockReport,
    Divergence,
    Equivalence,
    Throughput,
    Trace,
    UnmappedChannel,
    Violation,
    cycle_identical,
    detect_deadlock,
    duty_cycle,
    format_trace,
    latency_equivalent,
    throughput,
)
