"""Synchronization-processor wrappers for latency-insensitive systems.

Modules
-------
elastic    tokens, channel wires, two-slot relay stations
schedule   IO schedules, compilation to SP programs, operation words, ROM images
shells     Carloni / FSM / SP / shift-register wrapper step machines, pearl stub
netsim     network construction, cycle-accurate simulation, trace analysis
costmodel  structural area / speed proxies for FSM and SP wrappers
"""

__version__ = "0.1.0"
