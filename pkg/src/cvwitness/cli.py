"""Command-line front end (``cvw`` / ``python -m cvwitness``).

Exit status: 0 if any criterion detected entanglement, 1 if none did,
2 on bad input.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .exceptions import InputError
from .gaussian import (
    ModePartition,
    WeightVector,
    builtin,
    duan_check,
    gaussian_ppt_check,
    load_covariance,
    mancini_check,
    prop1a_check,
    prop1b_check,
    tlur_check,
)
from .hlstate import HLParams, prop2_check, scan_hl_region, write_scan_csv
from .optimizer import OptimizerConfig, optimize_weights

EXIT_DETECTED, EXIT_CLEAN, EXIT_INPUT = 0, 1, 2

CRITERIA = ("prop1a", "prop1b", "duan", "mancini", "tlur", "ppt")


@dataclass
class RunManifest:
    command: str
    inputs: dict
    seed: int = None
    results: list = field(default_factory=list)
    tool_version: str = __version__

    def to_dict(self):
        results = [r if isinstance(r, dict) else r.to_dict() for r in self.results]
        return {
            "command": self.command,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "inputs": self.inputs,
            "results": results,
        }


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_weights(text, part):
    if text == "paper":
        if (part.m_modes_A, part.n_modes_B) != (2, 2):
            raise InputError("--weights paper is defined for a 2:2 partition only")
        return WeightVector.werner_wolf()
    if text == "uniform":
        return WeightVector.uniform(part)
    if "/" not in text:
        raise InputError("explicit weights look like 'a1,a2,...,a2M/b1,...,b2N'")
    left, right = text.split("/", 1)
    w = WeightVector(_float_list(left), _float_list(right))
    w.check(part)
    return w


def _load_state(args):
    if (args.builtin is None) == (args.input is None):
        raise InputError("give exactly one of --builtin or --input")
    if args.builtin is not None:
        return builtin(args.builtin)
    try:
        return load_covariance(args.input)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from exc


def cmd_check_gaussian(args):
    cov = _load_state(args)
    part = ModePartition.parse(args.partition)
    part.check(cov)
    criteria = [c.strip() for c in args.criteria.split(",") if c.strip()]
    unknown = sorted(set(criteria) - set(CRITERIA))
    if unknown or not criteria:
        raise InputError(f"unknown criteria {unknown}; choose from {','.join(CRITERIA)}")

    manifest = RunManifest(
        "check-gaussian",
        inputs={
            "state": args.builtin or args.input,
            "partition": str(part),
            "weights": args.weights,
            "criteria": criteria,
        },
        seed=args.seed,
    )
    for name in criteria:
        if name == "prop1a":
            if args.weights == "optimize":
                config = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters,
                                         seed=args.seed)
                result = optimize_weights(cov, part, config)
                report = result.best_report
                report.details["objective"] = result.best_objective
                report.details["converged"] = int(result.converged)
            else:
                report = prop1a_check(cov, part, _parse_weights(args.weights, part))
        elif name == "ppt":
            report = gaussian_ppt_check(cov, part)
        else:
            if (part.m_modes_A, part.n_modes_B) != (1, 1):
                raise InputError(f"{name} needs a two-mode state with partition 1:1")
            if name == "prop1b":
                report = prop1b_check(cov, args.sign)
            elif name == "duan":
                report = duan_check(cov, args.duan_a)
            elif name == "tlur":
                report = tlur_check(cov, args.duan_a)
            else:
                mancini = _float_list(args.mancini)
                if len(mancini) != 4:
                    raise InputError("--mancini takes four numbers a1,a2,b1,b2")
                report = mancini_check(cov, *mancini)
        manifest.results.append(report)
    return manifest


def cmd_hl(args):
    p = HLParams(args.a, args.c)
    report = prop2_check(p, args.levels)
    return RunManifest("hl", inputs={"a": args.a, "c": args.c, "levels": args.levels},
                       results=[report])


def cmd_hl_scan(args):
    rows = scan_hl_region(args.steps, args.levels)
    try:
        with open(args.out, "w", newline="") as fh:
            write_scan_csv(rows, fh)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from exc
    n_detected = sum(r.detected for r in rows)
    summary = {"points": len(rows), "detected": n_detected, "out": args.out}
    return RunManifest("hl-scan",
                       inputs={"steps": args.steps, "levels": args.levels, "out": args.out},
                       results=[summary])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvw",
        description="Trace-norm separability criteria for continuous-variable states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("check-gaussian", help="run covariance-matrix criteria")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--builtin", help="werner-wolf, vacuum<n>, tmsv:r=<x>, tmsv-ancilla:r=<x>")
    src.add_argument("--input", help="covariance JSON document")
    g.add_argument("--partition", required=True, help="M:N split, A = first M modes")
    g.add_argument("--weights", default="paper",
                   help="paper, uniform, optimize, or 'a1,...,a2M/b1,...,b2N'")
    g.add_argument("--criteria", default="prop1a,ppt",
                   help=f"comma-separated subset of {','.join(CRITERIA)}")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--restarts", type=int, default=OptimizerConfig.restarts)
    g.add_argument("--max-iters", type=int, default=OptimizerConfig.max_iters)
    g.add_argument("--sign", choices=("plus", "minus", "best"), default="best")
    g.add_argument("--duan-a", type=float, default=1.0, help="parameter a for duan and tlur")
    g.add_argument("--mancini", default="1,1,1,-1", help="a1,a2,b1,b2")
    g.set_defaults(func=cmd_check_gaussian)

    h = sub.add_parser("hl", help="truncated R-matrix test on one Horodecki-Lewenstein state")
    h.add_argument("--a", type=float, required=True)
    h.add_argument("--c", type=float, required=True)
    h.add_argument("--levels", type=int, default=3)
    h.set_defaults(func=cmd_hl)

    s = sub.add_parser("hl-scan", help="scan the (a, c) triangle and write a CSV")
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--levels", type=int, default=3)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_hl_scan)

    for p in (g, h, s):
        p.add_argument("--manifest", help="also write the run manifest as JSON here")
    return parser


def _emit(manifest, out):
    out.write(f"command\t{manifest.command}\n")
    out.write(f"tool_version\t{manifest.tool_version}\n")
    for result in manifest.results:
        out.write("\n")
        if isinstance(result, dict):
            out.write("\n".join(f"{k}\t{v}" for k, v in result.items()) + "\n")
        else:
            out.write(result.to_tsv() + "\n")


def _any_detected(manifest):
    for r in manifest.results:
        if isinstance(r, dict):
            if r.get("detected", 0) > 0:
                return True
        elif r.detected:
            return True
    return False


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = args.func(args)
        if args.manifest:
            with open(args.manifest, "w") as fh:
                json.dump(manifest.to_dict(), fh, indent=2, default=_json_default)
                fh.write("\n")
    except (InputError, OSError) as exc:
        print(f"cvw: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(manifest, out)
    return EXIT_DETECTED if _any_detected(manifest) else EXIT_CLEAN


def _json_default(obj):
    if isinstance(obj, (np.generic, np.ndarray)):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())
