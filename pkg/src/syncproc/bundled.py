"""Bundled schedules and network configs.

``viterbi-like.sched``: 5 ports (3 in, 2 out), 4 sync operations, 198 free-run cycles.
``rs-like.sched``: 4 ports (2 in, 2 out), 2957 sync operations, 1 free-run cycle.

Both are synthetic: only their port / operation / run counts follow the
decoder cores they are named after. ``write_bundled()`` regenerates the
files under ``syncproc/data``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict

from .schedule import IOSchedule, PortShape, format_schedule, schedule_from_ops

DATA_DIR = Path(__file__).parent / "data"


def path(name: str) -> Path:
    p = DATA_DIR / name
    if not p.exists():
        raise FileNotFoundError(f"no bundled file {name!r}; have: {', '.join(sorted(names()))}")
    return p


def names():
    return [p.name for p in DATA_DIR.iterdir() if p.is_file()]


def viterbi_like() -> IOSchedule:
    ops = [
        (0b111, 0b00, 66),
        (0b000, 0b01, 66),
        (0b011, 0b00, 33),
        (0b100, 0b10, 33),
    ]
    return schedule_from_ops(PortShape(3, 2), ops)


def rs_like(n_ops: int = 2957) -> IOSchedule:
    pattern = [(0b11, 0b00), (0b01, 0b00), (0b00, 0b01), (0b10, 0b11)]
    ops = [(*pattern[k % 4], 0) for k in range(n_ops)]
    ops[-1] = (*ops[-1][:2], 1)
    return schedule_from_ops(PortShape(2, 2), ops)


def demo_network() -> Dict:
    """Two pearls in a pipeline with stochastic source and sinks."""
    return {
        "format": "lis-network v1",
        "pearls": [
            {"name": "filt", "inputs": 1, "outputs": 1, "shell": "sp",
             "schedule": ["sync in=1 out=0", "run 2", "sync in=1 out=1"]},
            {"name": "dec", "inputs": 1, "outputs": 2, "shell": "fsm",
             "schedule": ["sync in=1 out=00", "run", "sync in=0 out=11"]},
        ],
        "sources": [{"name": "adc", "pattern": {"bernoulli": 0.8, "seed": 1}}],
        "sinks": [
            {"name": "y0", "pattern": {"bernoulli": 0.25, "seed": 2}},
            {"name": "y1", "pattern": {"period": 3, "offset": 0}},
        ],
        "channels": [
            {"name": "x", "from": "adc", "to": "filt.in0", "relay_stations": 1},
            {"name": "mid", "from": "filt.out0", "to": "dec.in0", "relay_stations": 1},
            {"name": "y0", "from": "dec.out0", "to": "y0", "relay_stations": 0},
            {"name": "y1", "from": "dec.out1", "to": "y1", "relay_stations": 2},
        ],
    }


def shiftreg_network(stall_cycles=(40,)) -> Dict:
    """One pearl fed in lock-step with its schedule (consumes at t = 1, 4, 7, ...).

    With ``stall_cycles`` empty the environment has zero jitter; each listed
    cycle withholds the source token for that cycle.
    """
    return {
        "format": "lis-network v1",
        "pearls": [
            {"name": "core", "inputs": 1, "outputs": 1, "shell": "shiftreg",
             "schedule": ["sync in=1 out=1", "run 2"]},
        ],
        "sources": [{"name": "src", "pattern": {"period": 3, "offset": 1}, "stall_cycles": list(stall_cycles)}],
        "sinks": [{"name": "snk", "pattern": "never"}],
        "channels": [
            {"name": "in", "from": "src", "to": "core.in0"},
            {"name": "out", "from": "core.out0", "to": "snk"},
        ],
    }


def deadlock_network() -> Dict:
    """Two SP pearls, each reading the other's output before writing its own."""
    pearl = lambda name: {
        "name": name, "inputs": 1, "outputs": 1, "shell": "sp",
        "schedule": ["sync in=1 out=0", "sync in=0 out=1"],
    }
    return {
        "format": "lis-network v1",
        "pearls": [pearl("ping"), pearl("pong")],
        "sources": [],
        "sinks": [],
        "channels": [
            {"name": "a", "from": "ping.out0", "to": "pong.in0", "relay_stations": 1},
            {"name": "b", "from": "pong.out0", "to": "ping.in0", "relay_stations": 1},
        ],
    }


def write_bundled(directory: Path = DATA_DIR) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "viterbi-like.sched").write_text(format_schedule(viterbi_like()))
    (directory / "rs-like.sched").write_text(format_schedule(rs_like()))
    (directory / "tiny.sched").write_text("# lis-sched v1\nports 1 1\nsync in=1 out=1\nrun 2\n")
    for name, cfg in (
        ("demo.json", demo_network()),
        ("shiftreg-jitter.json", shiftreg_network()),
        ("shiftreg-clean.json", shiftreg_network(())),
        ("deadlock.json", deadlock_network()),
    ):
        (directory / name).write_text(json.dumps(cfg, indent=2) + "\n")


if __name__ == "__main__":
    write_bundled()
