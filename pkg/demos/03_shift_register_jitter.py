"""
When the environment stutters
=============================

A shift-register wrapper replays a fixed activation pattern and never
looks at its ports. That is fine while the environment delivers exactly on
time. A single late token is enough to break it, while the sensing wrappers
just wait.
"""

from syncproc import bundled
from syncproc.netsim import build_network, cycle_identical, latency_equivalent, load_network

clean = load_network(bundled.path("shiftreg-clean.json"))
jitter = load_network(bundled.path("shiftreg-jitter.json"))
cycles = 200

reference = build_network(clean.with_shell("fsm")).run(cycles)
ring = build_network(clean).run(cycles)
print("no jitter: ring matches FSM cycle for cycle:", bool(cycle_identical(ring, reference)))

# The source withholds its token for one cycle (cycle 40).
broken = build_network(jitter).run(cycles)
print(f"one stall: ring wrapper recorded {len(broken.violations)} violations")
for v in broken.violations:
    print("   ", v)

for kind in ("fsm", "sp"):
    t = build_network(jitter.with_shell(kind)).run(cycles)
    verdict = latency_equivalent(reference, t)
    print(f"one stall: {kind} wrapper equivalent to the unstalled run: {verdict.equivalent}"
          f" ({sum(verdict.compared.values())} tokens)")
