"""Command-line driver: ``vertex33 <verb> [options]``.

Exit status: 0 pass, 1 check failure, 2 input error, 3 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import report as R
from .catalog import catalog_listing
from .errors import Vertex33Error

log = logging.getLogger("vertex33")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="master seed for every random draw")
    parser.add_argument("--tol-ybe", type=float, default=1e-9)
    parser.add_argument("--tol-eigen", type=float, default=1e-8)
    parser.add_argument("--L", type=int, default=6, help="chain length")
    parser.add_argument("--M", type=int, default=2, help="particle number")
    parser.add_argument("--draws", type=int, default=20, help="random draws per check")
    parser.add_argument("--branch", type=int, default=None, help="restrict the M=2 solver to one eigenvector branch")
    parser.add_argument("--report", metavar="PATH", help="also write the structured report to PATH")
    parser.add_argument("--format", choices=("text", "structured"), default="text")
    parser.add_argument("-v", "--verbose", action="store_true")


def _model_arg(parser):
    parser.add_argument(
        "model",
        help="model file, inline JSON, or random:<family> for a seeded random catalog instance",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vertex33", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    for verb, text in (
        ("validate", "pattern and solvability constraints"),
        ("classify", "algebra class of T and matching catalog families"),
        ("spectrum", "exact sector spectrum for --L and --M"),
        ("bethe", "solve the M=2 Bethe equations and test them against the exact spectrum"),
    ):
        p = sub.add_parser(verb, help=text)
        _model_arg(p)
        _common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    _model_arg(p)
    p.add_argument("--suite", choices=("ybe", "spectrum", "reshetikhin", "all"), default="all")
    p.add_argument("--expect", choices=("fails", "holds", "any"), default="fails",
                   help="Reshetikhin verdict that counts as a pass")
    _common(p)

    p = sub.add_parser("reshetikhin", help="Reshetikhin criterion by least squares")
    _model_arg(p)
    p.add_argument("--expect", choices=("fails", "holds", "any"), default="any")
    _common(p)

    p = sub.add_parser("catalog", help="list, instantiate or sweep catalog families")
    csub = p.add_subparsers(dest="action", required=True)
    c = csub.add_parser("list")
    _common(c)
    c = csub.add_parser("instantiate")
    _model_arg(c)
    _common(c)
    c = csub.add_parser("sweep")
    _model_arg(c)
    c.add_argument("--param", required=True, help="family parameter to sweep")
    c.add_argument("--range", nargs=2, type=float, default=(-1.0, 1.0), metavar=("START", "STOP"))
    c.add_argument("--points", type=int, default=8)
    _common(c)
    return parser


def _config(args, model=None) -> R.SuiteConfig:
    return R.SuiteConfig(
        seed=args.seed,
        tol_ybe=args.tol_ybe,
        tol_eigen=args.tol_eigen,
        draws=args.draws,
        L=args.L,
        M=args.M,
        branch=args.branch,
        expect_reshetikhin=getattr(args, "expect", "fails"),
        model=model.describe() if model is not None else {},
    )


def _load(args) -> R.Model:
    src = args.model
    if src.startswith("random:"):
        return R.random_model(src.split(":", 1)[1], args.seed)
    return R.load_model(src)


def run(args) -> dict:
    if args.verb == "catalog" and args.action == "list":
        cfg = _config(args)
        return R.make_report("catalog list", cfg, {"families": catalog_listing()})
    model = _load(args)
    cfg = _config(args, model)
    if args.verb == "validate":
        return R.validate(model, cfg)
    if args.verb == "classify":
        return R.classify_model(model, cfg)
    if args.verb == "verify":
        return R.verify(model, args.suite, cfg)
    if args.verb == "spectrum":
        return R.spectrum_report(model, cfg)
    if args.verb == "bethe":
        return R.bethe_report(model, cfg)
    if args.verb == "reshetikhin":
        return R.reshetikhin_report(model, cfg)
    if args.action == "instantiate":
        if model.entry is None:
            raise R.InputError("instantiate needs a catalog spec")
        return R.catalog_instantiate(model, cfg)
    values = np.linspace(args.range[0], args.range[1], args.points)
    return R.catalog_sweep(model, args.param, values, cfg)


def _emit(report: dict, args) -> None:
    text = R.dumps(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text if args.format == "structured" else R.render_text(report))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    command = args.verb + (f" {args.action}" if args.verb == "catalog" else "")
    try:
        report = run(args)
    except Vertex33Error as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        err = {
            "report_version": R.REPORT_VERSION,
            "command": command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "exit_code": exc.exit_code,
        }
        report_data = getattr(exc, "report", None)
        if report_data is not None:
            err["constraints"] = report_data.as_dict()
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(R.dumps(err))
        if args.format == "structured":
            sys.stdout.write(R.dumps(err))
        return exc.exit_code
    _emit(report, args)
    return 0 if report.get("passed", True) else 1


if __name__ == "__main__":
    sys.exit(main())
