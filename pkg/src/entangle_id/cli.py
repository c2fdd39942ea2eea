"""Command-line interface.

Every subcommand reads JSON state files, calls one library function and
prints a JSON report::

    {"command": ..., "inputs": ..., "result": ..., "tool_version": ...}

Exit codes: 0 success, 2 usage error, 3 domain error (message on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Sequence

from . import __version__
from .approximation import brute_force_oracle, min_over_k_bound, solve_pure_approximation
from .catalysis import search_catalyst, verify_catalyst
from .errors import EntangleIdError, InvariantViolation, ParseError
from .majorization import compare, locc_convertible, majorizes
from .protocol import (
    Catalysis,
    FixedStateImpostor,
    HonestBob,
    LoccImpostor,
    MaximallyEntangled,
    ProtocolConfig,
    SeparableImpostor,
    estimate_false_accept,
)
from .schmidt import (
    DEFAULT_TOL,
    BipartitePureState,
    SchmidtVector,
    ToleranceConfig,
    schmidt_spectrum,
)

SEED_ENV = "ENTANGLE_ID_SEED"
SIG_DIGITS = 12


class UsageError(Exception):
    pass


def parse_state(text: str, tol: ToleranceConfig = DEFAULT_TOL) -> SchmidtVector | BipartitePureState:
    """Parse a state document.

    Either ``{"schmidt": [p1, p2, ...]}`` (any order; sorted here) or
    ``{"dims": [dA, dB], "amplitudes": [[re, im], ...]}`` in row-major order.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("state document must be a JSON object")
    has_schmidt = "schmidt" in doc
    has_amp = "dims" in doc or "amplitudes" in doc
    if has_schmidt == has_amp:
        raise InvariantViolation("exactly one of 'schmidt' or 'dims'+'amplitudes' must be present")

    if has_schmidt:
        values = doc["schmidt"]
        if not isinstance(values, list) or not all(_is_number(x) for x in values):
            raise ParseError("'schmidt' must be a list of numbers")
        for i, x in enumerate(values):
            if x < -tol.eq_tol:
                raise InvariantViolation(f"schmidt[{i}] = {x!r} is negative")
        return SchmidtVector(tuple(sorted((float(x) for x in values), reverse=True)), tol)

    dims, amps = doc.get("dims"), doc.get("amplitudes")
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) for x in dims)):
        raise ParseError("'dims' must be a list of two integers")
    if not isinstance(amps, list) or not all(
        isinstance(a, list) and len(a) == 2 and all(_is_number(x) for x in a) for a in amps
    ):
        raise ParseError("'amplitudes' must be a list of [re, im] pairs")
    return BipartitePureState.from_flat(dims, [complex(re, im) for re, im in amps], tol)


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def as_spectrum(state: SchmidtVector | BipartitePureState, tol: ToleranceConfig) -> SchmidtVector:
    if isinstance(state, SchmidtVector):
        return state
    return schmidt_spectrum(state, tol)


def round_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def serialize(report: dict) -> str:
    return json.dumps(round_floats(report), indent=2) + "\n"


def make_report(command: str, inputs: dict, result: dict) -> dict:
    return {"command": command, "inputs": inputs, "result": result, "tool_version": __version__}


def _load(path: str, tol: ToleranceConfig) -> SchmidtVector:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read state file {path!r}: {exc.strerror}") from None
    try:
        return as_spectrum(parse_state(text, tol), tol)
    except EntangleIdError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _cmd_osc(args, tol):
    v = _load(args.state, tol)
    return {"state": args.state}, {"schmidt": v.tolist()}


def _cmd_majorize(args, tol):
    a, b = _load(args.a, tol), _load(args.b, tol)
    return {"a": a.tolist(), "b": b.tolist()}, {"majorizes": majorizes(a, b, tol)}


def _cmd_convertible(args, tol):
    s, t = _load(args.source, tol), _load(args.target, tol)
    return {"source": s.tolist(), "target": t.tolist()}, {"convertible": locc_convertible(s, t, tol)}


def _cmd_compare(args, tol):
    a, b = _load(args.a, tol), _load(args.b, tol)
    return {"a": a.tolist(), "b": b.tolist()}, {"ordering": compare(a, b, tol).value}


def _cmd_catalyze_verify(args, tol):
    s, t, c = _load(args.source, tol), _load(args.target, tol), _load(args.catalyst, tol)
    inputs = {"source": s.tolist(), "target": t.tolist(), "catalyst": c.tolist()}
    return inputs, verify_catalyst(s, t, c, tol).to_dict()


def _cmd_catalyze_search(args, tol):
    s, t = _load(args.source, tol), _load(args.target, tol)
    found = search_catalyst(s, t, args.catalyst_dim, args.resolution, tol)
    inputs = {
        "source": s.tolist(),
        "target": t.tolist(),
        "catalyst_dim": args.catalyst_dim,
        "resolution": args.resolution,
    }
    return inputs, {"catalyst": None if found is None else found.tolist()}


def _cmd_approx_bound(args, tol):
    p, r = _load(args.target, tol), _load(args.source, tol)
    k_star, bound = min_over_k_bound(p, r, tol)
    return {"target": p.tolist(), "source": r.tolist()}, {"k_star": k_star, "bound": bound}


def _cmd_approx_solve(args, tol):
    p, r = _load(args.target, tol), _load(args.source, tol)
    result = solve_pure_approximation(p, r, tol).to_dict()
    inputs = {"target": p.tolist(), "source": r.tolist()}
    if args.oracle:
        oracle = brute_force_oracle(p, r, args.resolution, tol)
        inputs["resolution"] = args.resolution
        result["oracle"] = oracle.to_dict()
    return inputs, result


_STRATEGIES = {
    "honest": HonestBob,
    "separable": SeparableImpostor,
    "locc": LoccImpostor,
}


def _cmd_protocol_simulate(args, tol):
    inputs: dict = {"kind": args.kind}
    if args.kind == "maximally-entangled":
        if args.dim is None:
            raise UsageError("--dim is required for --kind maximally-entangled")
        kind = MaximallyEntangled(args.dim)
        inputs["dim"] = args.dim
    else:
        missing = [f for f in ("source", "target", "catalyst") if getattr(args, f) is None]
        if missing:
            raise UsageError("--kind catalysis requires " + ", ".join(f"--{m}" for m in missing))
        s, t, c = _load(args.source, tol), _load(args.target, tol), _load(args.catalyst, tol)
        kind = Catalysis(s, t, c)
        inputs.update(source=s.tolist(), target=t.tolist(), catalyst=c.tolist())

    if args.strategy == "fixed":
        if args.spectrum is None:
            raise UsageError("--strategy fixed requires --spectrum")
        spec = _load(args.spectrum, tol)
        strategy = FixedStateImpostor(spec)
        inputs["spectrum"] = spec.tolist()
    else:
        strategy = _STRATEGIES[args.strategy]()

    seed = args.seed if args.seed is not None else _env_seed()
    config = ProtocolConfig(kind, args.rounds, tol)
    est = estimate_false_accept(config, strategy, args.trials, seed, workers=args.workers)
    inputs.update(strategy=args.strategy, rounds=args.rounds, trials=args.trials, seed=seed)
    return inputs, est.to_dict()


def _env_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="override every default tolerance")
    parser = _Parser(prog="entangle-id", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    parser.set_defaults(tol=None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("osc", parents=[common], help="ordered Schmidt coefficients of a state")
    p.add_argument("--state", required=True)
    p.set_defaults(func=_cmd_osc, name="osc")

    p = sub.add_parser("majorize", parents=[common], help="does A's spectrum majorize B's")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=_cmd_majorize, name="majorize")

    p = sub.add_parser("convertible", parents=[common], help="Nielsen LOCC convertibility source -> target")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(func=_cmd_convertible, name="convertible")

    p = sub.add_parser("compare", parents=[common], help="entanglement ordering of A relative to B")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=_cmd_compare, name="compare")

    cat = sub.add_parser("catalyze", help="catalyst verification and search")
    cat_sub = cat.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = cat_sub.add_parser("verify", parents=[common])
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--catalyst", required=True)
    p.set_defaults(func=_cmd_catalyze_verify, name="catalyze verify")
    p = cat_sub.add_parser("search", parents=[common])
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--catalyst-dim", type=int, required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.set_defaults(func=_cmd_catalyze_search, name="catalyze search")

    ap = sub.add_parser("approx", help="best LOCC approximation of a target")
    ap_sub = ap.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ap_sub.add_parser("bound", parents=[common], help="min-over-k single-constraint bound")
    p.add_argument("--target", required=True)
    p.add_argument("--source", required=True)
    p.set_defaults(func=_cmd_approx_bound, name="approx bound")
    p = ap_sub.add_parser("solve", parents=[common], help="active-set solution of the full problem")
    p.add_argument("--target", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force grid")
    p.add_argument("--resolution", type=int, default=120, help="grid resolution for --oracle")
    p.set_defaults(func=_cmd_approx_solve, name="approx solve")

    pr = sub.add_parser("protocol", help="Monte Carlo protocol simulation")
    pr_sub = pr.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = pr_sub.add_parser("simulate", parents=[common])
    p.add_argument("--kind", choices=["maximally-entangled", "catalysis"], required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--catalyst")
    p.add_argument("--strategy", choices=["honest", "separable", "locc", "fixed"], required=True)
    p.add_argument("--spectrum", help="state file for --strategy fixed")
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV}, else 0")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_protocol_simulate, name="protocol simulate")
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[int, dict | None]:
    """Dispatch ``argv``; returns the exit code and the report (if any)."""
    try:
        args = build_parser().parse_args(argv)
        tol = DEFAULT_TOL if args.tol is None else ToleranceConfig.uniform(args.tol)
        inputs, result = args.func(args, tol)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2, None
    except EntangleIdError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3, None
    return 0, make_report(args.name, inputs, result)


def main(argv: Sequence[str] | None = None) -> int:
    code, report = run(argv)
    if report is not None:
        sys.stdout.write(serialize(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
