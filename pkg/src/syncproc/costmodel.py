"""Structural area and speed proxies for FSM and SP wrappers.

These are counting models, not synthesis. The FSM proxy grows with the
schedule length: it needs a state per schedule step plus one sensing term per
port it names. The SP proxy needs only the 3-phase controller, two
counters and one comparator per port; the schedule lives in ROM bits, which
are reported separately and kept out of the slice estimate.

``slice_estimate = state_coeff * state_bits + term_coeff * logic_terms``
with default coefficients 0.5 / 0.5 (an FPGA slice holds two flip-flops and
two LUTs). They set the order of magnitude only, labelled "proxy".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .schedule import IOSchedule, SPProgram, Sync, compile_schedule, validate_schedule

# next-state logic of the 3-phase controller, run-counter load/decrement/zero
# test, read-counter increment and wrap, enable and stop gating
SP_CONTROL_TERMS = 16
# phase decode + enable gate after the port-readiness AND tree
SP_CONTROL_LEVELS = 3


def clog2(n: int) -> int:
    """ceil(log2(n)) for n >= 1."""
    if n < 1:
        raise ValueError("clog2 needs n >= 1")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class Calibration:
    state_coeff: Fraction = Fraction(1, 2)
    term_coeff: Fraction = Fraction(1, 2)

    def slices(self, state_bits: int, logic_terms: int) -> Fraction:
        return self.state_coeff * state_bits + self.term_coeff * logic_terms


DEFAULT_CALIBRATION = Calibration()


@dataclass(frozen=True)
class CostReport:
    kind: str
    state_bits: int
    logic_terms: int
    rom_bits: int
    depth_levels: int
    slice_estimate: Fraction
    calibration: Calibration = DEFAULT_CALIBRATION


def estimate_fsm(s: IOSchedule, calibration: Calibration = DEFAULT_CALIBRATION) -> CostReport:
    validate_schedule(s)
    n = len(s.steps)
    state_bits = clog2(n)
    terms = n
    for step in s.steps:
        if isinstance(step, Sync):
            terms += bin(step.in_mask).count("1") + bin(step.out_mask).count("1")
    depth = clog2(max(2, n)) + clog2(max(2, s.shape.ports))
    return CostReport("fsm", state_bits, terms, 0, depth, calibration.slices(state_bits, terms), calibration)


def estimate_sp(p: SPProgram, calibration: Calibration = DEFAULT_CALIBRATION) -> CostReport:
    state_bits = 2 + p.w_run + clog2(p.depth)
    terms = p.shape.n_inputs + p.shape.n_outputs + SP_CONTROL_TERMS
    depth = clog2(max(2, p.shape.ports)) + SP_CONTROL_LEVELS
    return CostReport("sp", state_bits, terms, p.rom_bits, depth, calibration.slices(state_bits, terms), calibration)


class DegenerateCost(ValueError):
    pass


@dataclass(frozen=True)
class Gains:
    area_gain_pct: Fraction
    freq_gain_pct: Fraction


def compare(fsm: CostReport, sp: CostReport) -> Gains:
    """Percent change going from the FSM to the SP (negative area = savings).

    Frequency is taken as inversely proportional to ``depth_levels``.
    """
    if fsm.slice_estimate <= 0 or fsm.depth_levels <= 0 or sp.depth_levels <= 0:
        raise DegenerateCost("cannot compute gains against a zero-cost report")
    area = (sp.slice_estimate - fsm.slice_estimate) / fsm.slice_estimate * 100
    freq = (Fraction(fsm.depth_levels, sp.depth_levels) - 1) * 100
    return Gains(area, freq)


def _pct(x: Fraction) -> str:
    return f"{float(x):+.0f}"


def cost_table(
    s: IOSchedule, name: str = "schedule", calibration: Calibration = DEFAULT_CALIBRATION,
    program: Optional[SPProgram] = None,
) -> str:
    """Aligned text table shaped like a Complexity / FSM / SP / Gain report."""
    program = program or compile_schedule(s)
    fsm = estimate_fsm(s, calibration)
    sp = estimate_sp(program, calibration)
    gains = compare(fsm, sp)
    complexity = f"{s.shape.ports} / {program.depth} / {sum(op.run_cycles for op in program.ops)}"
    header = ["", "Complexity", "FSM", "", "SP", "", "Gain (%)", ""]
    sub = ["", "Port/wait/run", "Sli.", "Lvl.", "Sli.", "Lvl.", "Sli.", "Fr."]
    row = [
        name,
        complexity,
        f"{float(fsm.slice_estimate):.1f}",
        str(fsm.depth_levels),
        f"{float(sp.slice_estimate):.1f}",
        str(sp.depth_levels),
        _pct(gains.area_gain_pct),
        _pct(gains.freq_gain_pct),
    ]
    widths = [max(len(r[i]) for r in (header, sub, row)) for i in range(len(row))]
    fmt = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    lines = [fmt(header), fmt(sub), fmt(row), ""]
    lines.append(
        f"FSM: state_bits={fsm.state_bits} logic_terms={fsm.logic_terms} rom_bits=0 depth_levels={fsm.depth_levels}"
    )
    lines.append(
        f"SP:  state_bits={sp.state_bits} logic_terms={sp.logic_terms} rom_bits={sp.rom_bits} "
        f"depth_levels={sp.depth_levels}"
    )
    lines.append(
        f"slice proxy (not synthesis) = {calibration.state_coeff} * state_bits + "
        f"{calibration.term_coeff} * logic_terms; ROM bits excluded"
    )
    return "\n".join(lines) + "\n"
