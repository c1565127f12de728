"""Command-line front end: run, translate, open, gen, analyze and verify."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .circuit import (
    SelfFeedingCircuit,
    bnl_to_circuit,
    circuit_from_json,
    circuit_to_bnl,
    circuit_to_json,
    parity_circuit,
)
from .fpcompile import FloatCodec, build_fp_op, default_raw_widths
from .fully_open import to_fully_open
from .harness import Codec, check_equivalence, kind_of
from .integers import IntCodec, build_int_op
from .nn import (
    NeuralNetwork,
    _pieces_from_json,
    load_network,
    network_to_json,
    simulate,
)
from .program import BnlProgram, analyze_dynamics, measure, run
from .sc import ScProgram, bnl_to_sc, format_sc, parse_sc, run_sc
from .softfloat import FloatSystem, parse_float
from .syntax import format_program, parse_program
from .translate import bnl_to_nn, build_network_program

EXIT_OK, EXIT_DIFFERENT, EXIT_USAGE = 0, 1, 2

SUFFIX_KIND = {".bnl": "bnl", ".sc": "sc", ".circ": "circ", ".nn": "nn"}


class UsageError(Exception):
    pass


def detect_kind(path: str) -> str:
    suffix = Path(path).suffix
    if suffix == ".json":
        suffix = Path(Path(path).stem).suffix
    if suffix not in SUFFIX_KIND:
        raise UsageError(f"cannot tell the kind of {path!r}; use a .bnl, .sc, .circ or .nn suffix")
    return SUFFIX_KIND[suffix]


def load(path: str, kind: str | None = None):
    kind = kind or detect_kind(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    if kind == "bnl":
        return parse_program(text)
    if kind == "sc":
        return parse_sc(text)
    if kind == "circ":
        return circuit_from_json(text)
    return load_network(path)


def dump(obj, header: str = "") -> str:
    if isinstance(obj, BnlProgram):
        return format_program(obj, header)
    if isinstance(obj, ScProgram):
        return format_sc(obj, header)
    if isinstance(obj, SelfFeedingCircuit):
        return circuit_to_json(obj) + "\n"
    if isinstance(obj, NeuralNetwork):
        return json.dumps(network_to_json(obj), indent=1) + "\n"
    raise TypeError(type(obj).__name__)


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def parse_system(text: str) -> FloatSystem:
    try:
        p, q, beta = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad system {text!r}; expected P,Q,B") from exc
    return FloatSystem(p, q, beta)


def write_report(path: str | None, data: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(data, indent=1, default=str) + "\n")


# -- commands ----------------------------------------------------------------------


def cmd_run(args) -> int:
    obj = load(args.file, args.kind)
    if isinstance(obj, NeuralNetwork):
        values = [parse_float(v.strip(), obj.system) for v in args.input.split(",") if v.strip()]
        _, outputs = simulate(obj, values, args.horizon)
        shown = [(n, " ".join(str(v) for v in vals)) for n, vals in outputs]
    else:
        runner = {BnlProgram: run, ScProgram: run_sc}.get(type(obj))
        if runner is None:
            from .circuit import run_self_feeding

            runner = run_self_feeding
        _, shown = runner(obj, args.input, args.horizon)
    for n, text in shown:
        print(f"{n}\t{text}")
    write_report(args.report, {"kind": kind_of(obj), "horizon": args.horizon, "outputs": shown})
    return EXIT_OK


def cmd_translate(args) -> int:
    direction = args.direction
    source_kind = {"sc2bnl": "sc", "bnl2sc": "bnl", "bnl2circ": "bnl", "circ2bnl": "circ", "nn2bnl": "nn", "bnl2nn": "bnl"}[
        direction
    ]
    obj = load(args.file, source_kind)
    header = ""
    if direction == "sc2bnl":
        from .sc import sc_to_bnl

        result = sc_to_bnl(obj)
        header = "translated from an SC program; every output round is shifted by +1"
    elif direction == "bnl2sc":
        result = bnl_to_sc(obj)
    elif direction == "bnl2circ":
        result = bnl_to_circuit(obj, args.mode)
    elif direction == "circ2bnl":
        result, delay = circuit_to_bnl(obj)
        header = f"translated from a self-feeding circuit; computation delay {delay}"
    elif direction == "nn2bnl":
        compiled = build_network_program(obj)
        result = compiled.program
        codec = compiled.codec
        header = (
            f"translated from a network over {obj.system}; value predicates land every {compiled.period} rounds\n"
            f"inputs: {len(obj.inputs)} values, each {codec.length} bits: exponent sign, fraction sign, "
            f"exponent one-hot blocks (MSB first), fraction one-hot blocks (MSB first)"
        )
    else:
        if not args.system:
            raise UsageError("bnl2nn needs --system P,Q,B")
        result = bnl_to_nn(obj, args.activation, parse_system(args.system))
    emit(dump(result, header), args.output)
    return EXIT_OK


def cmd_open(args) -> int:
    program = load(args.file, "bnl")
    opened, d = to_fully_open(program)
    emit(format_program(opened, f"fully-open form; computation delay {d + 1}"), args.output)
    return EXIT_OK


def _int_header(op: str, p: int, beta: int) -> str:
    codec = IntCodec(p, beta)
    width = {"compare": 1, "add": p + 1, "mul": 2 * p}[op]
    return "\n".join(
        [
            f"integer {op} over Z({p},{beta})",
            f"input: X then Y, each {codec.length} bits: sign bit (1 = '+', 0 = '-'),",
            f"  then {p} one-hot blocks of {beta} bits, most significant digit first;",
            "  inside a block bit d is set for digit d",
            f"output: Z in Z({width},{beta}) with the same layout"
            + ("; compare prints +1 for x > y and +0 otherwise" if op == "compare" else ""),
        ]
    )


def _fp_header(op: str, system: FloatSystem, raw: tuple[int, int] | None) -> str:
    std = FloatCodec(system)
    lines = [f"floating-point {op} over {system}"]
    if op == "normalize":
        rc = FloatCodec(system, raw)
        lines.append(
            f"input: one raw value of {rc.length} bits: exponent sign, fraction sign, {raw[1]} exponent blocks,"
            f" then the integer digit d0 and {raw[0]} fraction blocks"
        )
    else:
        count = 2 if op in ("add", "mul") else 1
        lines.append(
            f"input: {count} value(s) of {std.length} bits: exponent sign, fraction sign (1 = '+'),"
            f" {system.q} exponent blocks then {system.p} fraction blocks, one-hot of {system.beta} bits, MSB first"
        )
    lines.append(f"output: one value of {std.length} bits in the same layout")
    return "\n".join(lines)


def cmd_gen(args) -> int:
    if args.family == "parity":
        emit(circuit_to_json(parity_circuit(args.n)) + "\n", args.output)
        return EXIT_OK
    if args.family == "int":
        op = {"cmp": "compare"}.get(args.op, args.op)
        compiled = build_int_op(op, args.p, args.beta)
        header = _int_header(op, args.p, args.beta)
    else:
        system = FloatSystem(args.p, args.q, args.beta)
        op = {"norm": "normalize", "poly": "piecewise"}.get(args.op, args.op)
        pieces = None
        if op == "piecewise":
            if not args.pieces:
                raise UsageError("gen fp --op poly needs --pieces (relu, heaviside or a JSON piece table)")
            source = args.pieces
            data = source if source in ("relu", "heaviside", "identity") else json.loads(Path(source).read_text())
            pieces = _pieces_from_json(data, system)
        raw = default_raw_widths(system) if op == "normalize" else None
        compiled = build_fp_op(op, system, pieces, raw)
        header = _fp_header(op, system, raw)
    size, depth = measure(compiled.program)
    header += f"\noutput round {compiled.output_round}; size {size}; depth {depth}"
    emit(format_program(compiled.program, header), args.output)
    return EXIT_OK


def cmd_analyze(args) -> int:
    program = load(args.file, "bnl")
    report = analyze_dynamics(program, args.input)
    configs, outputs = run(program, args.input, report.transient + report.cycle_length)
    print(f"transient: {report.transient}")
    print(f"attractor: {report.kind} of length {report.cycle_length}")
    print(f"outputs up to the first repeat: {outputs}")
    write_report(
        args.report,
        {"transient": report.transient, "kind": report.kind, "cycle_length": report.cycle_length, "outputs": outputs},
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    left, right = load(args.left, args.left_kind), load(args.right, args.right_kind)
    try:
        codec = Codec.parse(args.codec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = check_equivalence(
        left,
        right,
        codec,
        args.inputs,
        args.outputs,
        args.horizon,
        args.seed,
        args.global_mode,
    )
    print(report.text())
    write_report(args.report, report.to_dict())
    return EXIT_OK if report.equivalent else EXIT_DIFFERENT


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netlogic", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = sorted(set(SUFFIX_KIND.values()))

    p = sub.add_parser("run", help="run a program, circuit or network and print its outputs")
    p.add_argument("kind", choices=kinds)
    p.add_argument("file")
    p.add_argument("--input", required=True, help="bit string, or comma-separated floats for networks")
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("translate", help="translate between program kinds")
    p.add_argument("direction", choices=["sc2bnl", "bnl2sc", "bnl2circ", "circ2bnl", "nn2bnl", "bnl2nn"])
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--mode", choices=["direct", "balanced"], default="direct", help="bnl2circ gate layout")
    p.add_argument("--activation", choices=["relu", "heaviside"], default="relu", help="bnl2nn node activation")
    p.add_argument("--system", help="bnl2nn number system P,Q,B")
    p.set_defaults(handler=cmd_translate, kind=None)

    p = sub.add_parser("open", help="rewrite a BNL program into fully-open form")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_open)

    p = sub.add_parser("gen", help="generate parity circuits and compiled arithmetic programs")
    gen = p.add_subparsers(dest="family", required=True)
    g = gen.add_parser("parity")
    g.add_argument("n", type=int)
    g.add_argument("-o", "--output")
    g = gen.add_parser("int")
    g.add_argument("--op", choices=["cmp", "add", "mul"], required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--beta", type=int, required=True)
    g.add_argument("-o", "--output")
    g = gen.add_parser("fp")
    g.add_argument("--op", choices=["norm", "add", "mul", "poly"], required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--beta", type=int, required=True)
    g.add_argument("--pieces", help="relu, heaviside, identity or a JSON piece table file")
    g.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("analyze", help="transient and attractor of a BNL program on one input")
    p.add_argument("file")
    p.add_argument("--input", required=True)
    p.add_argument("--report")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("verify", help="check asynchronous equivalence of two runnables")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--left-kind", choices=kinds)
    p.add_argument("--right-kind", choices=kinds)
    p.add_argument("--codec", default="id", help="id, int:P,B or float:P,Q,B")
    p.add_argument("--inputs", default="exhaustive", help="exhaustive or random:N")
    p.add_argument("--outputs", type=int, default=10, help="output emissions compared per input")
    p.add_argument("--horizon", type=int, help="rounds simulated per side (default: grown until enough outputs)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--global", dest="global_mode", action="store_true", help="also compare configurations")
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.handler(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


__all__ = ["build_parser", "main"]
