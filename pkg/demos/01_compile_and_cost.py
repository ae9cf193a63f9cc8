"""
From a schedule to a synchronization program
============================================

A wrapped IP core with a known, cyclic input/output schedule can be driven
by a tiny processor that reads operation words from a ROM. This script
compiles the two bundled schedules and compares the area and speed proxies
of a schedule-unrolled FSM wrapper with the ROM-driven one.
"""

from syncproc import bundled
from syncproc.costmodel import cost_table, estimate_fsm, estimate_sp
from syncproc.schedule import compile_schedule, emit_rom_image

# A schedule is a list of steps: "sync" steps name the ports to wait on,
# "run" steps let the core compute without looking at its ports.
viterbi = bundled.viterbi_like()
print(f"viterbi-like: {viterbi.shape.ports} ports, {viterbi.n_sync} sync steps, {viterbi.n_run} run steps")

# Compilation folds each run of "run" steps into the preceding sync step.
program = compile_schedule(viterbi)
for address, op in enumerate(program.ops):
    print(f"  op {address}: in={op.in_mask:03b} out={op.out_mask:02b} run={op.run_cycles}")

# Each op becomes one ROM word: input mask, output mask, run count.
print(emit_rom_image(program))

# The FSM wrapper needs a state per schedule step; the ROM-driven one does not.
for name, sched in (("viterbi-like", viterbi), ("rs-like", bundled.rs_like())):
    print(cost_table(sched, name=name))

# Growing the schedule only grows the ROM.
for n in (10, 100, 1000, 2957):
    s = bundled.rs_like(n)
    fsm, sp = estimate_fsm(s), estimate_sp(compile_schedule(s))
    print(f"{n:5d} ops  FSM terms {fsm.logic_terms:5d}  SP terms {sp.logic_terms}  SP rom bits {sp.rom_bits}")
