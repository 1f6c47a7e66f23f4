"""``locc-areas`` command line front end.

Exit codes: 0 success (or "true"), 1 false / not convertible / failed
verification, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .convert import choose_Q, colour_transform_nielsen
from .core import average_yield, format_rational, nielsen_condition
from .diagram import canonical_diagram, render
from .distill import colour_transform, distribution_from_profile, max_prob, optimal_distribution
from .errors import AreaError, InputError, NotConvertible
from .files import ProtocolFile, audit, diagram_to_json, parse_state
from .protocol import describe, kraus_convert

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: Optional[str], flag: str) -> str:
    if path is None:
        raise _Fail(EXIT_INPUT, f"{flag} is required")
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from None


def _state(path, flag="--state"):
    return parse_state(_read(path, flag))


def _rat_map(dist) -> dict:
    return {str(k): format_rational(v) for k, v in dist.items()}


def _emit(args, payload, text: str) -> None:
    if args.format == "json" or args.format is None:
        out = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    else:
        out = text if text.endswith("\n") else text + "\n"
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


def cmd_check(args) -> int:
    start, target = _state(args.state), _state(args.target, "--target")
    ok = nielsen_condition(start, target)
    _emit(args, {"convertible": ok}, f"convertible: {str(ok).lower()}")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_distill(args) -> int:
    start = _state(args.state)
    dist = optimal_distribution(start)
    e = average_yield(dist)
    payload = {
        "distribution": _rat_map(dist),
        "average_yield": round(e, 10),
        "distribution_float": {str(k): float(v) for k, v in dist.items()},
    }
    text = "\n".join(f"m={m}  p={format_rational(p)}" for m, p in dist.items()) + f"\naverage yield {e:.10f} ebits"
    if args.format == "ascii":
        text = render(canonical_diagram(start), "ascii")
    elif args.format == "svg":
        text = render(canonical_diagram(start), "svg")
    _emit(args, payload, text)
    if args.figure:
        from .plotting import save_figure

        save_figure(args.figure, [(canonical_diagram(start), "start diagram")], dict(dist))
    return EXIT_OK


def cmd_maxprob(args) -> int:
    start = _state(args.state)
    if args.m is None:
        raise _Fail(EXIT_INPUT, "-m is required")
    res = max_prob(start, args.m)
    payload = {
        "p_max": format_rational(res.p_max),
        "r0": res.r0,
        "h_max": format_rational(res.h_max),
        "target": [format_rational(h) for h in res.target.heights],
        "p_max_float": float(res.p_max),
    }
    text = (
        f"p_max = {format_rational(res.p_max)}  (r0 = {res.r0}, h_max = {format_rational(res.h_max)})\n"
        f"target profile: {', '.join(format_rational(h) for h in res.target.heights)}"
    )
    if args.format in ("ascii", "svg"):
        text = render(colour_transform(start, res.target), args.format)
    _emit(args, payload, text)
    if args.figure:
        from .plotting import save_figure

        d = colour_transform(start, res.target)
        save_figure(
            args.figure,
            [(canonical_diagram(start), "start"), (d, f"coloured target, m={args.m}")],
            dict(distribution_from_profile(res.target)),
        )
    return EXIT_OK


def cmd_convert(args) -> int:
    start, target = _state(args.state), _state(args.target, "--target")
    d, records = colour_transform_nielsen(start, target)
    Q = choose_Q(d)
    proto = kraus_convert(d, start, target, Q)
    pf = ProtocolFile("convert", start, target.padded(len(start)), d, proto, records, Q)
    if args.format in ("ascii", "svg"):
        _emit(args, None, render(d, args.format))
    elif args.format == "text":
        _emit(args, None, f"Q = {Q}\n" + describe(proto))
    else:
        out = pf.dumps()
        if args.out:
            Path(args.out).write_text(out, encoding="utf-8")
        else:
            sys.stdout.write(out)
    if args.figure:
        from .plotting import save_figure

        save_figure(args.figure, [(canonical_diagram(start), "start"), (d, f"slice-distinct colouring, Q={Q}")], slices=Q)
    return EXIT_OK


def cmd_render(args) -> int:
    if args.file:
        d = ProtocolFile.loads(_read(args.file, "FILE")).diagram
    else:
        start = _state(args.state)
        if args.target:
            d, _ = colour_transform_nielsen(start, _state(args.target, "--target"))
        else:
            d = canonical_diagram(start)
    args.format = args.format or "ascii"
    if args.format == "json":
        _emit(args, diagram_to_json(d), "")
    else:
        _emit(args, None, render(d, "ascii" if args.format == "text" else args.format))
    if args.figure:
        from .plotting import save_figure

        save_figure(args.figure, [(d, "area diagram")])
    return EXIT_OK


def cmd_verify(args) -> int:
    pf = ProtocolFile.loads(_read(args.file, "FILE"))
    checks = audit(pf, args.tol)
    ok = all(c.passed for c in checks)
    payload = {
        "kind": pf.kind,
        "passed": ok,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    }
    text = "\n".join(f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  ({c.detail})" if c.detail else "") for c in checks)
    _emit(args, payload, text)
    if args.figure:
        from .plotting import save_figure

        save_figure(args.figure, [(pf.diagram, f"{pf.kind} diagram")], slices=pf.Q or 0)
    return EXIT_OK if ok else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", metavar="FILE", help="start StateFile (use - for stdin)")
    common.add_argument("--target", metavar="FILE", help="target StateFile")
    common.add_argument("-m", type=int, help="size of the maximally entangled target")
    common.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "text", "svg", "ascii"))
    common.add_argument("--tol", type=float, default=1e-12, help="float cross-check tolerance (default 1e-12)")
    common.add_argument("--figure", metavar="PATH", help="also save a matplotlib figure (png, pdf, svg, ...)")

    parser = argparse.ArgumentParser(prog="locc-areas", description="Exact single-copy LOCC protocols from area diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="is the target reachable with certainty?").set_defaults(fn=cmd_check)
    sub.add_parser("distill", parents=[common], help="optimal distillation distribution").set_defaults(fn=cmd_distill)
    sub.add_parser("maxprob", parents=[common], help="best probability of an m-state").set_defaults(fn=cmd_maxprob)
    sub.add_parser("convert", parents=[common], help="synthesize a deterministic conversion").set_defaults(fn=cmd_convert)
    p = sub.add_parser("render", parents=[common], help="draw a diagram")
    p.add_argument("file", nargs="?", metavar="FILE", help="protocol file whose diagram to draw")
    p.set_defaults(fn=cmd_render)
    p = sub.add_parser("verify", parents=[common], help="re-check a stored protocol file")
    p.add_argument("file", metavar="FILE")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.fn(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotConvertible as exc:
        print(f"not convertible: {exc}", file=sys.stderr)
        return EXIT_FALSE
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AreaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FALSE


def run(argv: Optional[Sequence[str]] = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
