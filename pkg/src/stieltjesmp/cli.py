"""JSON-in / JSON-out command line front end.

Subcommands: classify, schur, poly, solve, verify, oracle.  Inputs are
files holding the JSON layouts from :mod:`stieltjesmp.serialize`; output
is deterministic JSON on stdout (sorted keys, floats at a fixed number of
significant digits) so runs can be golden-file tested.

Exit codes: 0 success, 2 parse/usage error, 3 precondition violation,
4 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import measures, pairs, respoly, schur, serialize, solver
from .hankel import MomentSequence, classify
from .matcore import (
    DEFAULT_TOL,
    GrowthError,
    InconsistencyError,
    PreconditionError,
    SingularDenominatorError,
    ToleranceConfig,
)
from .measures import DiscreteMeasure
from .serialize import dumps, sig

__all__ = ["CliConfig", "main"]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFICATION = 4


@dataclasses.dataclass(frozen=True)
class CliConfig:
    """Resolved command-line options shared by all subcommands."""

    tol: ToleranceConfig = DEFAULT_TOL
    grid: tuple | None = None
    ladder: tuple | None = None
    digits: int = 15

    def __post_init__(self):
        for name in (f.name for f in dataclasses.fields(self.tol)):
            if getattr(self.tol, name) <= 0:
                raise PreconditionError(f"tolerance {name} must be positive")
        if self.digits < 1:
            raise PreconditionError("digits must be at least 1")


def _parse_tol(items) -> ToleranceConfig:
    overrides = {}
    names = {f.name for f in dataclasses.fields(ToleranceConfig)}
    for item in items or ():
        name, eq, value = item.partition("=")
        if not eq or name not in names:
            raise ValueError(
                f"bad --tol entry {item!r}; expected name=value with name in "
                f"{sorted(names)}")
        overrides[name] = float(value)
    return dataclasses.replace(DEFAULT_TOL, **overrides)


def _parse_grid(text: str | None):
    if text is None:
        return None
    points = tuple(complex(part.strip().replace("i", "j"))
                   for part in text.split(",") if part.strip())
    if not points:
        raise ValueError("--grid must name at least one point")
    return points


def _parse_ladder(text: str | None):
    if text is None:
        return None
    levels = tuple(float(part) for part in text.split(",") if part.strip())
    if not levels or any(y <= 0 for y in levels):
        raise ValueError("--ladder must be positive heights")
    return levels


def _config(args) -> CliConfig:
    return CliConfig(
        tol=_parse_tol(getattr(args, "tol", None)),
        grid=_parse_grid(getattr(args, "grid", None)),
        ladder=_parse_ladder(getattr(args, "ladder", None)),
        digits=getattr(args, "digits", 15),
    )


def _load(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _clean(obj, digits: int):
    """Recursively coerce report values into JSON-safe primitives."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return sig(float(obj), digits)
    if isinstance(obj, (complex, np.complexfloating)):
        return [sig(obj.real, digits), sig(obj.imag, digits)]
    if isinstance(obj, np.ndarray):
        return serialize.matrix_to_json(obj)
    if isinstance(obj, dict):
        return {k: _clean(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v, digits) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_json"):
        return _clean(obj.to_json(), digits)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(payload, cfg: CliConfig) -> None:
    print(dumps(_clean(payload, cfg.digits)))


def _sequence(obj: dict) -> MomentSequence:
    alpha, mats = serialize.sequence_from_json(obj)
    return MomentSequence(alpha, tuple(mats))


def _samples(fun, grid) -> list:
    out = []
    for z in grid:
        try:
            out.append({"z": complex(z), "F": fun(complex(z))})
        except SingularDenominatorError:
            continue
    return out


def cmd_classify(args) -> int:
    cfg = _config(args)
    seq = _sequence(_load(args.path))
    _emit(classify(seq, cfg.tol).to_json(), cfg)
    return EXIT_OK


def cmd_schur(args) -> int:
    cfg = _config(args)
    seq = _sequence(_load(args.path))
    if args.k < 0 or args.k > seq.m:
        raise PreconditionError(
            f"transform order k={args.k} out of range 0..{seq.m}")
    out = schur.k_th_transform(seq, args.k, cfg.tol)
    payload = {"k": args.k, "sequence": out.to_json()}
    if args.trace:
        payload["trace"] = schur.transform_trace(seq, cfg.tol).to_json()
    _emit(payload, cfg)
    return EXIT_OK


def cmd_poly(args) -> int:
    cfg = _config(args)
    seq = _sequence(_load(args.path))
    v, w = respoly.compose_resolvent(seq, cfg.tol)
    _emit({"q": seq.q, "m": seq.m, "v": v.to_json(), "w": w.to_json()}, cfg)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _config(args)
    obj = _load(args.path)
    seq = _sequence(obj["sequence"])
    parameter = serialize.pair_from_json(obj["parameter"])
    mode = args.mode or obj.get("mode", "leq")
    req = solver.SolutionRequest(seq, parameter, mode)
    grid = cfg.grid if cfg.grid is not None else pairs.default_grid(seq.alpha)

    tag, rank, _ = solver.case_of(seq, cfg.tol)
    sol = solver.solve(req, cfg.tol, grid)
    report = measures.verify_solution(sol, seq, mode, cfg.tol, cfg.ladder)
    payload = {
        "case": tag,
        "rank": rank,
        "rational_function": serialize.rational_to_json(sol),
        "samples": _samples(sol, grid),
        "verification_report": report,
    }
    _emit(payload, cfg)
    return EXIT_OK if report["ok"] else EXIT_VERIFICATION


def cmd_verify(args) -> int:
    cfg = _config(args)
    obj = _load(args.path)
    seq = _sequence(obj["sequence"])
    fun = serialize.rational_from_json(obj["function"])
    mode = args.mode or obj.get("mode", "leq")
    report = measures.verify_solution(fun, seq, mode, cfg.tol, cfg.ladder)
    _emit(report, cfg)
    return EXIT_OK if report["ok"] else EXIT_VERIFICATION


def _random_measure(spec: dict, seed) -> DiscreteMeasure:
    rng = np.random.default_rng(spec.get("seed", seed) or 0)
    q = int(spec["q"])
    atoms = int(spec.get("atoms", spec.get("m", 1) + 1))
    alpha = float(spec.get("alpha", 0.0))
    nodes = np.sort(alpha + rng.uniform(0.3, 8.0, size=atoms))
    weights = []
    for _ in range(atoms):
        b = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
        weights.append(b @ b.conj().T + 0.05 * np.eye(q))
    return DiscreteMeasure(alpha, tuple(float(x) for x in nodes),
                           tuple(weights))


def cmd_oracle(args) -> int:
    cfg = _config(args)
    spec = _load(args.path)
    if "atoms" in spec and isinstance(spec["atoms"], list):
        alpha, nodes, weights = serialize.measure_from_json(spec)
        mu = DiscreteMeasure(alpha, tuple(nodes), tuple(weights))
        m = int(spec.get("m", max(2 * (len(nodes) - 1), 0)))
    else:
        mu = _random_measure(spec, args.seed)
        m = int(spec.get("m", 1))
    seq = measures.moments(mu, m)
    fun = measures.stieltjes_transform(mu)
    grid = cfg.grid if cfg.grid is not None else pairs.default_grid(mu.alpha)
    payload = {
        "measure": mu.to_json(),
        "sequence": seq.to_json(),
        "classification": classify(seq, cfg.tol).to_json(),
        "transform": serialize.rational_to_json(fun),
        "samples": _samples(fun, grid),
    }
    _emit(payload, cfg)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                   help="override a tolerance field (repeatable)")
    p.add_argument("--grid", help="comma-separated complex grid points")
    p.add_argument("--ladder", help="comma-separated imaginary-axis heights")
    p.add_argument("--digits", type=int, default=15,
                   help="significant digits in output floats")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stieltjesmp",
        description="Truncated half-axis matrix moment problems: classify, "
                    "transform, build resolvents, solve, verify.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="cone membership report for a sequence")
    p.add_argument("path")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("schur", help="k-th algorithm transform of a sequence")
    p.add_argument("path")
    p.add_argument("-k", type=int, default=1, help="transform order")
    p.add_argument("--trace", action="store_true",
                   help="include all stages and the diagonal")
    _add_common(p)
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("poly", help="resolvent matrix polynomials of a sequence")
    p.add_argument("path")
    _add_common(p)
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("solve", help="solve for a parameter pair and verify")
    p.add_argument("path")
    p.add_argument("--mode", choices=("leq", "eq"))
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a rational function against moments")
    p.add_argument("path")
    p.add_argument("--mode", choices=("leq", "eq"))
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="measure fixture: moments and transform")
    p.add_argument("path")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (SingularDenominatorError, GrowthError, InconsistencyError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except json.JSONDecodeError as exc:
        print(f"parse error at line {exc.lineno}, column {exc.colno}: "
              f"{exc.msg}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, KeyError, TypeError, ValueError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
