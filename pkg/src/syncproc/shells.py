"""Wrapper step machines that decide, cycle by cycle, whether the pearl runs.

Each shell sees :class:`PortFlags` (which inputs offer data, which outputs
cannot take a result) and answers with a :class:`ShellDecision`. The
stateful shells are pure functions ``step(state, flags) -> (decision,
state')``.

* ``carloni``  -- fire only when every input is valid and no output is blocked.
* ``fsm``      -- walk the expanded schedule; test only the ports a sync step names.
* ``sp``       -- the synchronization processor: reset / op-read / free-run
                  controller that executes ``(in_mask, out_mask, run)``
                  operations from an asynchronous ROM addressed by a modulo
                  read counter.
* ``shiftreg`` -- replay a fixed activation ring without sensing any port.

The fsm, sp and shiftreg shells all spend the power-up cycle in reset with
the clock gated, so their decision streams line up cycle for cycle.
"""

from __future__ import annotations

import enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .elastic import Kind, Token
from .mixing import GOLDEN, MASK64, mix64
from .schedule import IOSchedule, PortShape, SPProgram, Sync, SyncOp, validate_schedule


class PortFlags(NamedTuple):
    in_valid: int = 0
    out_blocked: int = 0


class ShellDecision(NamedTuple):
    enable: bool
    consume: int
    produce: int
    stop_to_inputs: int


def stall(shape: PortShape) -> ShellDecision:
    return ShellDecision(False, 0, 0, shape.in_full)


def decision_is_legal(d: ShellDecision, flags: PortFlags, shape: PortShape) -> bool:
    if d.consume & ~flags.in_valid or d.produce & flags.out_blocked:
        return False
    if not d.enable and (d.consume or d.produce):
        return False
    if d.consume >> shape.n_inputs or d.produce >> shape.n_outputs:
        return False
    return d.stop_to_inputs == shape.in_full & ~d.consume


# -- Carloni: combinational, all-or-nothing ---------------------------------

def carloni_step(flags: PortFlags, shape: PortShape) -> ShellDecision:
    in_full = shape.in_full
    if flags.in_valid & in_full == in_full and not flags.out_blocked & shape.out_full:
        return ShellDecision(True, in_full, shape.out_full, 0)
    return ShellDecision(False, 0, 0, in_full)


# -- synchronization processor ---------------------------------------------

class Phase(enum.Enum):
    RESET = "Reset"
    OP_READ = "OpRead"
    FREE_RUN = "FreeRun"


class SPShellState(NamedTuple):
    phase: Phase
    read_counter: int
    current_op: Optional[SyncOp]
    run_remaining: int
    program: SPProgram


def sp_initial(program: SPProgram) -> SPShellState:
    return SPShellState(Phase.RESET, 0, None, 0, program)


def _fetch(program: SPProgram, address: int) -> SPShellState:
    # asynchronous ROM: the word is on the bus in the same cycle
    return SPShellState(Phase.OP_READ, address, program.ops[address], 0, program)


def sp_step(st: SPShellState, flags: PortFlags) -> Tuple[ShellDecision, SPShellState]:
    program = st.program
    in_full = program.shape.in_full
    phase = st.phase
    if phase is Phase.OP_READ:
        op = st.current_op
        if op.in_mask & ~flags.in_valid or op.out_mask & flags.out_blocked:
            return ShellDecision(False, 0, 0, in_full), st
        decision = ShellDecision(True, op.in_mask, op.out_mask, in_full & ~op.in_mask)
        if op.run_cycles:
            return decision, SPShellState(Phase.FREE_RUN, st.read_counter, op, op.run_cycles, program)
        return decision, _fetch(program, (st.read_counter + 1) % len(program.ops))
    if phase is Phase.FREE_RUN:
        decision = ShellDecision(True, 0, 0, in_full)
        remaining = st.run_remaining - 1
        if remaining:
            return decision, SPShellState(Phase.FREE_RUN, st.read_counter, st.current_op, remaining, program)
        return decision, _fetch(program, (st.read_counter + 1) % len(program.ops))
    return ShellDecision(False, 0, 0, in_full), _fetch(program, 0)


# -- Mealy FSM over the expanded schedule ------------------------------------

class FsmShellState(NamedTuple):
    schedule: IOSchedule
    step_index: int = 0
    reset: bool = True


def fsm_initial(schedule: IOSchedule) -> FsmShellState:
    return FsmShellState(validate_schedule(schedule), 0, True)


def fsm_step(st: FsmShellState, flags: PortFlags) -> Tuple[ShellDecision, FsmShellState]:
    steps = st.schedule.steps
    in_full = st.schedule.shape.in_full
    if st.reset:
        return ShellDecision(False, 0, 0, in_full), FsmShellState(st.schedule, 0, False)
    step = steps[st.step_index]
    if step.__class__ is Sync:
        if step.in_mask & ~flags.in_valid or step.out_mask & flags.out_blocked:
            return ShellDecision(False, 0, 0, in_full), st
        decision = ShellDecision(True, step.in_mask, step.out_mask, in_full & ~step.in_mask)
    else:
        decision = ShellDecision(True, 0, 0, in_full)
    return decision, FsmShellState(st.schedule, (st.step_index + 1) % len(steps), False)


# -- shift-register activation ring ------------------------------------------

class ShiftRegShellState(NamedTuple):
    activation: Tuple[bool, ...]
    # schedule step replayed at each enabled position; None where gated
    io: Tuple[Optional[object], ...]
    position: int
    reset: bool
    shape: PortShape


def shiftreg_initial(schedule: IOSchedule, activation: Optional[Sequence[int]] = None) -> ShiftRegShellState:
    """Lay the schedule onto an activation ring.

    ``activation`` defaults to all ones (one schedule step per cycle). A
    custom ring must enable exactly ``len(schedule)`` positions; the k-th
    enabled position replays schedule step k.
    """
    validate_schedule(schedule)
    if activation is None:
        activation = [1] * len(schedule.steps)
    bits = tuple(bool(b) for b in activation)
    if not bits:
        raise ValueError("activation ring must not be empty")
    if sum(bits) != len(schedule.steps):
        raise ValueError(
            f"activation ring enables {sum(bits)} positions but the schedule has {len(schedule.steps)} steps"
        )
    steps = iter(schedule.steps)
    io = tuple(next(steps) if b else None for b in bits)
    return ShiftRegShellState(bits, io, 0, True, schedule.shape)


def shiftreg_step(st: ShiftRegShellState, flags: PortFlags) -> Tuple[ShellDecision, ShiftRegShellState]:
    if st.reset:
        return ShellDecision(False, 0, 0, 0), st._replace(reset=False)
    pos = st.position
    nxt = st._replace(position=(pos + 1) % len(st.activation))
    if not st.activation[pos]:
        return ShellDecision(False, 0, 0, 0), nxt
    step = st.io[pos]
    if step.__class__ is Sync:
        return ShellDecision(True, step.in_mask, step.out_mask, 0), nxt
    return ShellDecision(True, 0, 0, 0), nxt


# -- status for reports ------------------------------------------------------

def shell_requirement(kind: str, state, shape: PortShape) -> Tuple[str, int, int]:
    """(phase label, in_mask, out_mask) the shell is currently waiting on."""
    if kind == "carloni":
        return "combinational", shape.in_full, shape.out_full
    if kind == "sp":
        if state.phase is Phase.OP_READ:
            op = state.current_op
            return f"OpRead@{state.read_counter}", op.in_mask, op.out_mask
        if state.phase is Phase.FREE_RUN:
            return f"FreeRun@{state.read_counter}({state.run_remaining} left)", 0, 0
        return "Reset", 0, 0
    if kind == "fsm":
        if state.reset:
            return "Reset", 0, 0
        step = state.schedule.steps[state.step_index]
        if isinstance(step, Sync):
            return f"Sync@{state.step_index}", step.in_mask, step.out_mask
        return f"Run@{state.step_index}", 0, 0
    if kind == "shiftreg":
        if state.reset:
            return "Reset", 0, 0
        return f"Ring@{state.position}", 0, 0
    raise ValueError(f"unknown shell kind {kind!r}")


# -- pearl stub --------------------------------------------------------------
#
# Deterministic stand-in for the IP. It folds every consumed token value into
# a running digest and derives each produced value from the digest, the
# firing index and the port:
#
#     digest' = fold(digest, v) = mix64(digest ^ v)      over consumed values,
#                                                         in ascending port order
#     value_j = mix64(digest' ^ salt ^ mix64(firing * GOLDEN + j))
#
# A consumed Void (a read of an invalid channel) contributes GARBAGE_WORD.

GARBAGE_WORD = 0xDEADBEEFDEADBEEF


class PearlStub(NamedTuple):
    name: str
    shape: PortShape
    firing_count: int = 0
    digest: int = 0
    salt: int = 0


def output_value(digest: int, firing_index: int, port: int, salt: int = 0) -> int:
    return mix64(digest ^ salt ^ mix64((firing_index * GOLDEN + port) & MASK64))


def pearl_fire(
    p: PearlStub, consumed: Sequence[Token], produce_mask: int
) -> Tuple[List[Token], PearlStub]:
    """Fire the pearl once: fold ``consumed`` and emit one token per set bit
    of ``produce_mask`` (in ascending port order)."""
    digest = p.digest
    for tok in consumed:
        v = tok.value if tok.kind is Kind.DATA else GARBAGE_WORD
        digest = mix64(digest ^ v)
    firing = p.firing_count
    outputs = []
    j = 0
    mask = produce_mask
    while mask:
        if mask & 1:
            outputs.append(Token.data(p.name, firing, j, output_value(digest, firing, j, p.salt)))
        mask >>= 1
        j += 1
    return outputs, PearlStub(p.name, p.shape, firing + 1, digest, p.salt)
