"""Random generators and small reference models shared by the tests."""

import random

from syncproc.netsim import (
    ChannelSpec,
    CombinationalLoop,
    NetworkConfig,
    Pattern,
    PearlSpec,
    SinkSpec,
    SourceSpec,
    build_network,
)
from syncproc.schedule import PortShape, SPProgram, SyncOp, expand_program
from syncproc.shells import PortFlags


def random_shape(rng: random.Random, max_ports: int = 6) -> PortShape:
    while True:
        n_in = rng.randint(0, max_ports)
        n_out = rng.randint(0, max_ports - n_in)
        if n_in + n_out:
            return PortShape(n_in, n_out)


def random_program(rng: random.Random, max_ports=6, max_depth=64, max_run=15, shape=None) -> SPProgram:
    shape = shape or random_shape(rng, max_ports)
    depth = rng.randint(1, max_depth)
    ops = [
        SyncOp(rng.getrandbits(shape.n_inputs) if shape.n_inputs else 0,
               rng.getrandbits(shape.n_outputs) if shape.n_outputs else 0,
               rng.randint(0, max_run))
        for _ in range(depth)
    ]
    return SPProgram(shape, tuple(ops))


def random_flags(rng: random.Random, shape: PortShape, cycles: int, p_valid=0.7, p_blocked=0.3):
    """Port-flag stream; each bit independently valid / blocked."""
    flags = []
    for _ in range(cycles):
        iv = sum(1 << i for i in range(shape.n_inputs) if rng.random() < p_valid)
        ob = sum(1 << j for j in range(shape.n_outputs) if rng.random() < p_blocked)
        flags.append(PortFlags(iv, ob))
    return flags


def decisions(step, state, flags):
    out = []
    for f in flags:
        d, state = step(state, f)
        out.append(d)
    return out


def _covering_program(rng, shape, max_ops=5, max_run=3):
    ops = []
    for _ in range(rng.randint(1, max_ops)):
        ops.append([
            sum(1 << i for i in range(shape.n_inputs) if rng.random() < 0.5),
            sum(1 << j for j in range(shape.n_outputs) if rng.random() < 0.5),
            rng.randint(0, max_run),
        ])
    # every port is touched at least once per period so streams keep moving
    for i in range(shape.n_inputs):
        if not any(op[0] >> i & 1 for op in ops):
            rng.choice(ops)[0] |= 1 << i
    for j in range(shape.n_outputs):
        if not any(op[1] >> j & 1 for op in ops):
            rng.choice(ops)[1] |= 1 << j
    return SPProgram(shape, tuple(SyncOp(*op) for op in ops))


def random_config(rng: random.Random, max_pearls=4, max_ports=6, kinds=("carloni", "fsm", "sp")) -> NetworkConfig:
    """Random well-formed network: every port wired once, no zero-relay loop."""
    pearls = []
    for k in range(rng.randint(1, max_pearls)):
        shape = random_shape(rng, max_ports)
        program = _covering_program(rng, shape)
        pearls.append(PearlSpec(f"p{k}", expand_program(program), rng.choice(kinds), salt=rng.getrandbits(16)))
    outs = [f"{p.name}.out{j}" for p in pearls for j in range(p.shape.n_outputs)]
    ins = [f"{p.name}.in{i}" for p in pearls for i in range(p.shape.n_inputs)]
    rng.shuffle(outs)
    rng.shuffle(ins)
    channels, sources, sinks = [], [], []
    for o in outs:
        if ins and rng.random() < 0.6:
            channels.append(ChannelSpec(o, ins.pop(), rng.randint(0, 2)))
        else:
            name = f"k{len(sinks)}"
            stop = Pattern("never") if rng.random() < 0.3 else Pattern("bernoulli", p=rng.uniform(0.0, 0.5), seed=rng.getrandbits(32))
            sinks.append(SinkSpec(name, stop))
            channels.append(ChannelSpec(o, name, rng.randint(0, 2)))
    for i in ins:
        name = f"s{len(sources)}"
        avail = Pattern("always") if rng.random() < 0.3 else Pattern("bernoulli", p=rng.uniform(0.3, 1.0), seed=rng.getrandbits(32))
        sources.append(SourceSpec(name, avail))
        channels.append(ChannelSpec(name, i, rng.randint(0, 2)))
    cfg = NetworkConfig(tuple(pearls), tuple(sources), tuple(sinks), tuple(channels))
    try:
        build_network(cfg)
    except CombinationalLoop:
        pearl_names = {p.name for p in pearls}
        channels = [
            ChannelSpec(c.src, c.dst, 1, c.name)
            if c.relay_stations == 0 and c.src.split(".")[0] in pearl_names and c.dst.split(".")[0] in pearl_names
            else c
            for c in channels
        ]
        cfg = NetworkConfig(tuple(pearls), tuple(sources), tuple(sinks), tuple(channels))
    return cfg


class ProducerModel:
    """Protocol-respecting upstream: queues new tokens and offers the oldest
    one until it is accepted."""

    def __init__(self, name="u"):
        self.name = name
        self.backlog = []
        self.count = 0

    def new_token(self):
        from syncproc.elastic import Token
        tok = Token.data(self.name, self.count, 0, self.count)
        self.count += 1
        self.backlog.append(tok)

    def offer(self):
        from syncproc.elastic import VOID
        return self.backlog[0] if self.backlog else VOID

    def accepted(self):
        self.backlog.pop(0)
