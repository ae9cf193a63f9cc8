"""Cyclic IO schedules and their compilation into synchronization programs.

A schedule lists, for one period of the IP, what every cycle needs: a
``Sync`` step waits for a subset of input ports to hold data and a subset of
output ports to be free, and a ``Run`` step just clocks the IP. Compiling
run-length encodes the ``Run`` steps, so each ``Sync`` step becomes one
operation ``(in_mask, out_mask, run_cycles)``.

Masks are plain ints: port ``i`` is bit ``i``.

Operation words are laid out MSB to LSB as ``in_mask | out_mask | run``::

    shape (3, 1), w_run 4, op (in=0b101, out=0b1, run=2)
    ->  101 1 0010  ->  0xB2
"""

from __future__ import annotations

import re
from functools import cached_property
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

MAX_PORTS = 32
RUN_LIMIT = 1 << 32

SCHEDULE_MAGIC = "# lis-sched v1"
ROM_MAGIC = "# sp-rom v1"


class ScheduleError(ValueError):
    pass


class EmptySchedule(ScheduleError):
    pass


class FirstStepNotSync(ScheduleError):
    pass


class MaskWidthMismatch(ScheduleError):
    pass


class RunFieldOverflow(ScheduleError):
    pass


class ScheduleParseError(ScheduleError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EncodingError(ValueError):
    pass


class RomFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class PortShape:
    n_inputs: int
    n_outputs: int

    def __post_init__(self):
        for n in (self.n_inputs, self.n_outputs):
            if not isinstance(n, int) or n < 0 or n > MAX_PORTS:
                raise ValueError(f"port count must be an int in [0, {MAX_PORTS}], got {n!r}")
        if self.n_inputs + self.n_outputs < 1:
            raise ValueError("a shape needs at least one port")

    @property
    def ports(self) -> int:
        return self.n_inputs + self.n_outputs

    @cached_property
    def in_full(self) -> int:
        return (1 << self.n_inputs) - 1

    @cached_property
    def out_full(self) -> int:
        return (1 << self.n_outputs) - 1


@dataclass(frozen=True)
class Sync:
    in_mask: int = 0
    out_mask: int = 0

    def __str__(self) -> str:
        return f"Sync(in={self.in_mask:#b}, out={self.out_mask:#b})"


@dataclass(frozen=True)
class Run:
    def __str__(self) -> str:
        return "Run"


RUN = Run()
Step = Union[Sync, Run]


@dataclass(frozen=True)
class IOSchedule:
    shape: PortShape
    steps: Tuple[Step, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def n_sync(self) -> int:
        return sum(1 for s in self.steps if isinstance(s, Sync))

    @property
    def n_run(self) -> int:
        return len(self.steps) - self.n_sync


class SyncOp(NamedTuple):
    in_mask: int
    out_mask: int
    run_cycles: int = 0


def min_run_width(max_run: int) -> int:
    return max(1, max_run.bit_length())


@dataclass(frozen=True)
class SPProgram:
    """Contents of the synchronization processor's operation memory.

    ``w_run`` defaults to the narrowest field that holds the largest run
    count. A wider field (e.g. read back from a ROM image) is kept as is.
    """

    shape: PortShape
    ops: Tuple[SyncOp, ...]
    w_run: int = field(default=0)

    def __post_init__(self):
        ops = tuple(SyncOp(*op) for op in self.ops)
        object.__setattr__(self, "ops", ops)
        if not ops:
            raise EmptySchedule("a program needs at least one operation")
        for op in ops:
            _check_masks(op.in_mask, op.out_mask, self.shape)
            if op.run_cycles < 0:
                raise ValueError("run_cycles must be non-negative")
            if op.run_cycles >= RUN_LIMIT:
                raise RunFieldOverflow(f"run of {op.run_cycles} cycles does not fit 32 bits")
        needed = min_run_width(max(op.run_cycles for op in ops))
        if self.w_run == 0:
            object.__setattr__(self, "w_run", needed)
        elif self.w_run < needed:
            raise RunFieldOverflow(f"w_run={self.w_run} cannot hold a run of {max(op.run_cycles for op in ops)}")

    @property
    def depth(self) -> int:
        return len(self.ops)

    @property
    def word_width(self) -> int:
        return self.shape.n_inputs + self.shape.n_outputs + self.w_run

    @property
    def rom_bits(self) -> int:
        return self.depth * self.word_width

    @property
    def period(self) -> int:
        """Enabled cycles in one pass over the program."""
        return sum(1 + op.run_cycles for op in self.ops)


def _check_masks(in_mask: int, out_mask: int, shape: PortShape, where: str = "") -> None:
    if in_mask < 0 or in_mask >> shape.n_inputs:
        raise MaskWidthMismatch(f"{where}in_mask {in_mask:#b} wider than {shape.n_inputs} input ports")
    if out_mask < 0 or out_mask >> shape.n_outputs:
        raise MaskWidthMismatch(f"{where}out_mask {out_mask:#b} wider than {shape.n_outputs} output ports")


def validate_schedule(s: IOSchedule) -> IOSchedule:
    if not s.steps:
        raise EmptySchedule("schedule has no steps")
    if not isinstance(s.steps[0], Sync):
        raise FirstStepNotSync(
            "schedule must start with a sync step; rotate it so a sync step comes first "
            "(trailing run steps attach to the last sync)"
        )
    for k, step in enumerate(s.steps):
        if isinstance(step, Sync):
            _check_masks(step.in_mask, step.out_mask, s.shape, where=f"step {k}: ")
        elif not isinstance(step, Run):
            raise ScheduleError(f"step {k}: not a Sync or Run step: {step!r}")
    return s


def compile_schedule(s: IOSchedule) -> SPProgram:
    """Run-length compress a schedule into one operation per sync step."""
    validate_schedule(s)
    ops: List[List[int]] = []
    for step in s.steps:
        if isinstance(step, Sync):
            ops.append([step.in_mask, step.out_mask, 0])
        else:
            ops[-1][2] += 1
    for op in ops:
        if op[2] >= RUN_LIMIT:
            raise RunFieldOverflow(f"run of {op[2]} cycles does not fit 32 bits")
    return SPProgram(s.shape, tuple(SyncOp(*op) for op in ops))


def expand_program(p: SPProgram) -> IOSchedule:
    steps: List[Step] = []
    for op in p.ops:
        steps.append(Sync(op.in_mask, op.out_mask))
        steps.extend([RUN] * op.run_cycles)
    return IOSchedule(p.shape, tuple(steps))


def encode_word(op: SyncOp, shape: PortShape, w_run: int) -> int:
    if w_run < 1:
        raise EncodingError("w_run must be at least 1")
    try:
        _check_masks(op.in_mask, op.out_mask, shape)
    except MaskWidthMismatch as exc:
        raise EncodingError(str(exc)) from None
    if op.run_cycles < 0 or op.run_cycles >> w_run:
        raise EncodingError(f"run_cycles {op.run_cycles} does not fit {w_run} bits")
    word = op.in_mask
    word = (word << shape.n_outputs) | op.out_mask
    return (word << w_run) | op.run_cycles


def decode_word(w: Union[int, str], shape: PortShape, w_run: int) -> SyncOp:
    """Invert :func:`encode_word`. ``w`` is an int or a '0'/'1' string."""
    width = shape.n_inputs + shape.n_outputs + w_run
    if isinstance(w, str):
        if len(w) != width or set(w) - {"0", "1"}:
            raise EncodingError(f"expected a {width}-bit binary string, got {w!r}")
        w = int(w, 2)
    if w < 0 or w >> width:
        raise EncodingError(f"word {w:#x} does not fit {width} bits")
    run = w & ((1 << w_run) - 1)
    w >>= w_run
    out_mask = w & shape.out_full
    in_mask = w >> shape.n_outputs
    return SyncOp(in_mask, out_mask, run)


def word_bits(word: int, width: int) -> str:
    return format(word, f"0{width}b") if width else ""


def hex_digits(word_width: int) -> int:
    return max(1, -(-word_width // 4))


def emit_rom_image(p: SPProgram) -> str:
    digits = hex_digits(p.word_width)
    lines = [
        ROM_MAGIC,
        f"inputs={p.shape.n_inputs} outputs={p.shape.n_outputs} wrun={p.w_run} depth={p.depth}",
    ]
    lines.extend(format(encode_word(op, p.shape, p.w_run), f"0{digits}X") for op in p.ops)
    return "\n".join(lines) + "\n"


_ROM_HEADER = re.compile(r"^inputs=(\d+) outputs=(\d+) wrun=(\d+) depth=(\d+)$")


def parse_rom_image(text: str) -> SPProgram:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != ROM_MAGIC:
        raise RomFormatError(f"first line must be {ROM_MAGIC!r}", 1)
    header = None
    words: List[Tuple[int, str]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("#"):
            continue
        if header is None:
            m = _ROM_HEADER.match(line)
            if not m:
                raise RomFormatError("expected 'inputs=<n> outputs=<n> wrun=<w> depth=<ops>'", lineno)
            header = tuple(int(g) for g in m.groups())
            continue
        words.append((lineno, line))
    if header is None:
        raise RomFormatError("missing header line")
    n_in, n_out, w_run, depth = header
    try:
        shape = PortShape(n_in, n_out)
    except ValueError as exc:
        raise RomFormatError(str(exc), 2) from None
    if len(words) != depth:
        raise RomFormatError(f"header says depth={depth} but found {len(words)} words")
    digits = hex_digits(n_in + n_out + w_run)
    ops = []
    for lineno, line in words:
        if len(line) != digits or not re.fullmatch(r"[0-9A-F]+", line):
            raise RomFormatError(f"expected {digits} uppercase hex digits, got {line!r}", lineno)
        try:
            ops.append(decode_word(int(line, 16), shape, w_run))
        except EncodingError as exc:
            raise RomFormatError(str(exc), lineno) from None
    try:
        return SPProgram(shape, tuple(ops), w_run)
    except ScheduleError as exc:
        raise RomFormatError(str(exc)) from None


# -- schedule text format ---------------------------------------------------
#
#   # lis-sched v1            (optional magic line)
#   ports <IN> <OUT>
#   sync in=<binary> out=<binary>
#   run [count]
#
# '#' starts a comment. Binary masks are written MSB first (port 0 is the
# rightmost digit); an empty mask means no ports.

_SYNC_FIELD = re.compile(r"^(in|out)=([01]*)$")


def parse_schedule_text(text: str, shape: Optional[PortShape] = None) -> IOSchedule:
    """Parse the line-oriented schedule format.

    If ``shape`` is given the ``ports`` header may be omitted (inline
    schedules inside a network config); if both are present they must agree.
    """
    steps: List[Step] = []
    seen_shape = None
    first_step_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0].lower()
        if head == "ports":
            if seen_shape is not None or steps:
                raise ScheduleParseError("'ports' must appear once, before any step", lineno)
            if len(words) != 3 or not all(w.isdigit() for w in words[1:]):
                raise ScheduleParseError("expected 'ports <inputs> <outputs>'", lineno)
            try:
                seen_shape = PortShape(int(words[1]), int(words[2]))
            except ValueError as exc:
                raise ScheduleParseError(str(exc), lineno) from None
        elif head == "sync":
            first_step_line = first_step_line or lineno
            masks = {"in": 0, "out": 0}
            for w in words[1:]:
                m = _SYNC_FIELD.match(w)
                if not m:
                    raise ScheduleParseError(f"malformed mask token {w!r} (want in=<binary> or out=<binary>)", lineno)
                masks[m.group(1)] = int(m.group(2), 2) if m.group(2) else 0
            steps.append(Sync(masks["in"], masks["out"]))
        elif head == "run":
            first_step_line = first_step_line or lineno
            if len(words) > 2 or (len(words) == 2 and not words[1].isdigit()):
                raise ScheduleParseError("expected 'run [count]'", lineno)
            count = int(words[1]) if len(words) == 2 else 1
            steps.extend([RUN] * count)
        else:
            raise ScheduleParseError(f"unknown directive {words[0]!r}", lineno)
    if seen_shape is None:
        if shape is None:
            raise ScheduleParseError("missing 'ports <inputs> <outputs>' header", first_step_line or 1)
        seen_shape = shape
    elif shape is not None and shape != seen_shape:
        raise ScheduleParseError(
            f"ports {seen_shape.n_inputs} {seen_shape.n_outputs} disagree with the expected "
            f"{shape.n_inputs} {shape.n_outputs}"
        )
    return IOSchedule(seen_shape, tuple(steps))


def format_schedule(s: IOSchedule, header: bool = True) -> str:
    out = []
    if header:
        out.append(SCHEDULE_MAGIC)
        out.append(f"ports {s.shape.n_inputs} {s.shape.n_outputs}")
    pending_runs = 0

    def flush():
        if pending_runs:
            out.append("run" if pending_runs == 1 else f"run {pending_runs}")

    for step in s.steps:
        if isinstance(step, Sync):
            flush()
            pending_runs = 0
            out.append(
                f"sync in={word_bits(step.in_mask, s.shape.n_inputs)} "
                f"out={word_bits(step.out_mask, s.shape.n_outputs)}"
            )
        else:
            pending_runs += 1
    flush()
    return "\n".join(out) + "\n"


def load_schedule(path: Union[str, Path]) -> IOSchedule:
    return parse_schedule_text(Path(path).read_text())


def schedule_from_ops(shape: PortShape, ops: Iterable[Sequence[int]]) -> IOSchedule:
    """Shorthand: build the expanded schedule of ``(in, out, run)`` triples."""
    return expand_program(SPProgram(shape, tuple(SyncOp(*op) for op in ops)))
