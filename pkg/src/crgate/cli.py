"""Command-line entry point: ``crgate sweep|point|validate|jcal|serve``.

Exit codes: 0 success, 1 runtime failure, 2 bad configuration or arguments,
3 when ``--strict`` is given and some sweep row is not ``ok``.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import __version__
from .errors import ConfigError, DomainError, OutputError, PoleError
from .frames import J_from_xi
from .sweep import FORMATS, Axis, emit, evaluate_point, load_config, run_sweep
from .validation import run_checks

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_STRICT = 0, 1, 2, 3

log = logging.getLogger("crgate")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="section.key = value file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config entry, e.g. device.J=0.004 (repeatable)")
    p.add_argument("--method", choices=("exact", "pert"))
    p.add_argument("--order", type=int, metavar="N", help="perturbative order")
    p.add_argument("--levels", type=int, metavar="D", help="levels kept per transmon")
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    p.add_argument("--format", choices=FORMATS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crgate", description="Cross-resonance effective Hamiltonians.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="1-D or 2-D grid over Omega, Delta or omega1")
    _common(sw)
    sw.add_argument("--threads", type=int, metavar="N")
    sw.add_argument("--strict", action="store_true", help="exit 3 if any row is not ok")

    pt = sub.add_parser("point", help="all sixteen Pauli rates at one operating point")
    _common(pt)
    pt.add_argument("--delta", type=float, metavar="GHZ", help="omega1 - omega2")
    pt.add_argument("--omega", type=float, metavar="GHZ", help="control drive amplitude")

    sub.add_parser("validate", help="run the analytic-oracle checks")

    jc = sub.add_parser("jcal", help="exchange coupling from a measured static ZZ shift")
    jc.add_argument("--xi", type=float, required=True, metavar="GHZ")
    jc.add_argument("--delta1", type=float, default=-0.330, metavar="GHZ")
    jc.add_argument("--delta2", type=float, default=-0.330, metavar="GHZ")
    jc.add_argument("--detuning", type=float, default=0.200, metavar="GHZ")

    sv = sub.add_parser("serve", help="HTTP service (needs the 'service' extra)")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    return parser


def _flag_overrides(args) -> list[str]:
    out = list(args.overrides)
    for flag, key in (("method", "method.name"), ("order", "method.order"),
                      ("levels", "device.d"), ("out", "output.path"),
                      ("format", "output.format"), ("threads", "run.threads")):
        value = getattr(args, flag, None)
        if value is not None:
            out.append(f"{key}={value}")
    return out


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    if args.config is None and not args.overrides:
        raise ConfigError("sweep needs --config or --set axis1.* entries")
    config = load_config(args.config, _flag_overrides(args))
    rows = run_sweep(config)
    text = emit(rows, config.format, config.out, config=config)
    _write(text, config.out)
    bad = [r for r in rows if r.status != "ok"]
    if bad:
        log.warning("%d of %d rows not ok", len(bad), len(rows))
    return EXIT_STRICT if args.strict and bad else EXIT_OK


def cmd_point(args) -> int:
    overrides = _flag_overrides(args)
    # a point is a one-row sweep; the axis only fixes the schema
    config = load_config(args.config, ["axis1.name=Omega", "axis1.start=0", "axis1.stop=0",
                                       "axis1.points=2", *overrides])
    point = {"Omega": args.omega if args.omega is not None else config.Omega}
    if args.delta is not None:
        point["Delta"] = args.delta
    config = replace(config, axis1=Axis("Omega", point["Omega"], point["Omega"], 2))
    row = evaluate_point(config, point)
    text = emit([row], config.format, config.out, config=config)
    _write(text, config.out)
    return EXIT_OK if row.status == "ok" else EXIT_FAIL


def cmd_validate(args) -> int:
    checks = run_checks()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def cmd_jcal(args) -> int:
    try:
        J = J_from_xi(args.xi, args.delta1, args.delta2, args.detuning)
    except (PoleError, DomainError) as exc:
        print(f"crgate: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"J = {J:.9g} GHz ({1e3 * J:.6g} MHz)")
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        import uvicorn

        from .service import app
    except ImportError as exc:
        print(f"crgate: serve needs the 'service' extra ({exc})", file=sys.stderr)
        return EXIT_FAIL
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "point": cmd_point, "validate": cmd_validate,
            "jcal": cmd_jcal, "serve": cmd_serve}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"crgate: config error {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"crgate: cannot write {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
