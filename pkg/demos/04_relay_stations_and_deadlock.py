"""
Long wires, relay stations and a deadlock
=========================================

Relay stations cut long channels into one-cycle segments. Adding them
changes when tokens arrive, never which tokens arrive. The second half
shows what the simulator reports when two cores each wait for the other.
"""

import random

from syncproc import bundled
from syncproc.netsim import build_network, detect_deadlock, latency_equivalent, load_network, throughput

cfg = load_network(bundled.path("demo.json"))
base = build_network(cfg, seed=5).run(1500)
print("channel y0 steady rate with its original wiring:", throughput(base, "y0").steady)

rng = random.Random(3)
for _ in range(5):
    ch = rng.choice(cfg.channels).name
    extra = rng.randint(1, 3)
    t = build_network(cfg.with_relays(ch, extra), seed=5).run(1500)
    v = latency_equivalent(base, t)
    print(f"+{extra} relay(s) on {ch:4s}: equivalent={v.equivalent}, compared={sum(v.compared.values())}")

# Two cores, each reading the other's output before producing its own.
trace = build_network(load_network(bundled.path("deadlock.json"))).run(200)
print(detect_deadlock(trace, window=64))
