"""``syncproc`` command line: compile, simulate, check, cost.

Exit codes: 0 success / equivalent, 1 usage or parse error, 2 validation
error, 3 divergence or protocol violation.

Any FILE argument may be written ``bundled:<name>`` to use a file shipped in
``syncproc/data`` (e.g. ``bundled:rs-like.sched``, ``bundled:demo.json``).
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__, bundled
from .costmodel import DegenerateCost, cost_table
from .netsim import (
    SHELL_KINDS,
    ConfigError,
    NetworkError,
    build_network,
    cycle_identical,
    detect_deadlock,
    duty_cycle,
    format_trace,
    latency_equivalent,
    load_network,
    throughput,
)
from .schedule import (
    RomFormatError,
    ScheduleError,
    ScheduleParseError,
    compile_schedule,
    emit_rom_image,
    load_schedule,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_DIVERGED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _resolve(name: str) -> Path:
    if name.startswith("bundled:"):
        return bundled.path(name[len("bundled:"):])
    return Path(name)


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_schedule(name: str):
    path = _resolve(name)
    return path, load_schedule(path)


def cmd_compile(args) -> int:
    path, schedule = _load_schedule(args.schedule)
    program = compile_schedule(schedule)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rom_path = out_dir / f"{args.name or path.stem}.rom"
    image = emit_rom_image(program)
    first, rest = image.split("\n", 1)
    provenance = f"# tool=syncproc {__version__} source={path.name} sha256={_digest(path)}"
    rom_path.write_text(f"{first}\n{provenance}\n{rest}")
    print(f"ports={schedule.shape.n_inputs}/{schedule.shape.n_outputs} steps={len(schedule.steps)}")
    print(f"depth={program.depth} word_width={program.word_width} wrun={program.w_run} rom_bits={program.rom_bits}")
    print(f"wrote {rom_path}")
    return EXIT_OK


def _header(args, path: Path, extra=None):
    h = {"tool": f"syncproc-{__version__}", "seed": args.seed, "cycles": args.cycles, "config": f"{path.name}:{_digest(path)}"}
    if extra:
        h.update(extra)
    return h


def cmd_simulate(args) -> int:
    path = _resolve(args.network)
    cfg = load_network(path)
    net = build_network(cfg, seed=args.seed)
    trace = net.run(args.cycles)
    header = _header(args, path)
    print("# " + " ".join(f"{k}={v}" for k, v in header.items()))
    for name in sorted(trace.channels):
        tp = throughput(trace, name)
        print(f"channel {name}: transfers={tp.transfers} throughput={tp.total} steady={tp.steady}")
    for name in sorted(trace.enables):
        print(f"pearl {name}: duty={duty_cycle(trace, name)}")
    print(f"violations: {len(trace.violations)}")
    for v in trace.violations[: args.max_violations]:
        print(f"  {v}")
    report = detect_deadlock(trace, min(args.window, trace.cycles)) if trace.cycles else None
    print("deadlock: none" if report is None else f"deadlock: {report}")
    if args.trace:
        Path(args.trace).write_text(format_trace(trace, header, args.window))
        print(f"wrote {args.trace}")
    return EXIT_DIVERGED if trace.violations else EXIT_OK


def cmd_check(args) -> int:
    kinds = [k.strip() for k in args.shells.split(",")]
    if len(kinds) != 2 or any(k not in SHELL_KINDS for k in kinds):
        return _fail(EXIT_USAGE, f"--shells wants two of {', '.join(SHELL_KINDS)}, got {args.shells!r}")
    path = _resolve(args.network)
    cfg = load_network(path)
    traces = []
    for kind in kinds:
        traces.append(build_network(cfg.with_shell(kind), seed=args.seed).run(args.cycles))
    a, b = traces
    verdict = latency_equivalent(a, b)
    print("# " + " ".join(f"{k}={v}" for k, v in _header(args, path, {"shells": ",".join(kinds)}).items()))
    for name, n in sorted(verdict.compared.items()):
        print(f"channel {name}: {n} tokens compared")
    if not verdict:
        print(f"DIVERGENT: {verdict.divergence}")
        return EXIT_DIVERGED
    print(f"EQUIVALENT ({kinds[0]} vs {kinds[1]})")
    if a.cycles:
        print(f"cycle-identical: {'yes' if cycle_identical(a, b) else 'no'}")
    return EXIT_OK


def cmd_cost(args) -> int:
    path, schedule = _load_schedule(args.schedule)
    print(f"# tool=syncproc-{__version__} schedule={path.name}:{_digest(path)}")
    try:
        print(cost_table(schedule, name=path.stem), end="")
    except DegenerateCost as exc:
        return _fail(EXIT_INVALID, str(exc))
    return EXIT_OK


def _non_negative(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="syncproc", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"syncproc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", help="compile a schedule into an sp-rom image")
    p.add_argument("schedule")
    p.add_argument("-o", "--out-dir", default=".")
    p.add_argument("--name", help="ROM file stem (default: schedule file stem)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="run a network and summarize it")
    p.add_argument("network")
    p.add_argument("--cycles", type=_non_negative, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", help="write a lis-trace v1 file here")
    p.add_argument("--window", type=int, default=64, help="deadlock window in cycles")
    p.add_argument("--max-violations", type=int, default=20)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="compare a network under two shell kinds")
    p.add_argument("network")
    p.add_argument("--shells", default="fsm,sp")
    p.add_argument("--cycles", type=_non_negative, default=2048)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("cost", help="FSM vs SP area/speed proxy table")
    p.add_argument("schedule")
    p.set_defaults(func=cmd_cost)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScheduleParseError, RomFormatError, ConfigError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    except (FileNotFoundError, IsADirectoryError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    except (ScheduleError, NetworkError, ValueError) as exc:
        return _fail(EXIT_INVALID, str(exc))


if __name__ == "__main__":
    sys.exit(main())
