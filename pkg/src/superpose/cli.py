"""Command-line front end.

Exit codes: 0 success, 1 a verification campaign found a violated bound,
2 usage, input or numerical error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds, harness, linalg
from .errors import ParseError, SuperposeError
from .states import PureState, SuperpositionInput, classify_relation, concurrence, Relation

log = logging.getLogger("superpose")

SEED_ENV = "SUPERPOSE_SEED"
EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2


# ---------------------------------------------------------------------------
# state files

def emit_state(s: PureState) -> dict:
    v = s.vector()
    return {"n": s.n, "m": s.m, "re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


def parse_state(obj) -> tuple[PureState, float]:
    """Validate a JSON state object; return the normalized state and the original norm."""
    if not isinstance(obj, dict):
        raise ParseError("state must be a JSON object")
    dims = {}
    for key in ("n", "m"):
        val = obj.get(key)
        if isinstance(val, bool) or not isinstance(val, int) or val < 1:
            raise ParseError(f"field '{key}' must be a positive integer, got {val!r}")
        dims[key] = val
    size = dims["n"] * dims["m"]
    parts = {}
    for key in ("re", "im"):
        arr = obj.get(key)
        if not isinstance(arr, list):
            raise ParseError(f"field '{key}' must be a list of {size} numbers")
        if len(arr) != size:
            raise ParseError(f"field '{key}' has {len(arr)} entries, expected n*m = {size}")
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in arr):
            raise ParseError(f"field '{key}' must contain only numbers")
        vals = np.array(arr, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ParseError(f"field '{key}' contains non-finite values")
        parts[key] = vals
    mat = (parts["re"] + 1j * parts["im"]).reshape(dims["n"], dims["m"])
    norm = linalg.frobenius_norm(mat)
    if norm == 0.0:
        raise ParseError("state amplitudes are all zero")
    return PureState(mat / norm), norm


def load_state(path) -> PureState:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON: {exc}") from exc
    state, norm = parse_state(obj)
    log.info("loaded %s: %dx%d, normalization factor %s", path, state.n, state.m, repr(norm))
    return state


# ---------------------------------------------------------------------------
# formatting

def _text(x) -> str:
    if isinstance(x, float):
        return f"{x:.7g}"
    if isinstance(x, (list, tuple)):
        return "(" + ", ".join(_text(v) for v in x) + ")"
    if x is None:
        return "n/a"
    return str(x)


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, tuple)):
        return ";".join(_csv_cell(v) for v in x)
    return str(x)


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0]) if rows else []
    w.writerow(keys)
    for row in rows:
        w.writerow([_csv_cell(row[k]) for k in keys])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _render(fmt: str, data: dict | list[dict], text: str) -> str:
    if fmt == "json":
        return _json(data)
    if fmt == "csv":
        return _csv(data if isinstance(data, list) else [data])
    return text


# ---------------------------------------------------------------------------
# argument types

def _existing_path(value: str) -> str:
    if not Path(value).is_file():
        raise argparse.ArgumentTypeError(f"no such file: {value}")
    return value


def _dims(value: str) -> tuple[tuple[int, int], ...]:
    out = []
    for token in value.split(","):
        token = token.strip().lower()
        try:
            n, m = token.split("x")
            out.append((int(n), int(m)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad dims token {token!r}; expected NxM") from None
    if not out:
        raise argparse.ArgumentTypeError("empty dims list")
    return tuple(out)


def _unit_interval(value: str) -> float:
    x = float(value)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"{value} is not in [0, 1]")
    return x


def _range(value: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {value!r}; expected LO,HI") from None
    return lo, hi


def _seed(value: str) -> int:
    seed = int(value, 0)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None,
                        help="output format (default: json for verify, text otherwise)")
    common.add_argument("--seed", type=_seed, default=None,
                        help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--tolerance", type=float, default=harness.DEFAULT_TOLERANCE,
                        help="violation tolerance for verification (default: %(default)s)")
    common.add_argument("-o", "--output", default=None, help="write output here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="superpose", parents=[common],
                                description="Concurrence of superposed bipartite pure states.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("concurrence", parents=[common], help="concurrence of one state")
    c.add_argument("state", type=_existing_path)

    b = sub.add_parser("bounds", parents=[common], help="bounds for alpha*psi + beta*phi")
    b.add_argument("psi", type=_existing_path)
    b.add_argument("phi", type=_existing_path)
    b.add_argument("--alpha-sq", type=_unit_interval, required=True)
    b.add_argument("--phase", type=float, default=0.0, help="relative phase of beta (radians)")
    b.add_argument("--theorem", choices=("auto", "T1", "T2", "T3"), default="auto")
    b.add_argument("--force", action="store_true", help="apply T1/T2 even if the premise fails")

    v = sub.add_parser("verify", parents=[common], help="Monte Carlo verification campaign")
    v.add_argument("--theorem", choices=harness.CAMPAIGN_KINDS, required=True)
    v.add_argument("--trials", type=int, required=True)
    v.add_argument("--dims", type=_dims, default=None,
                   help="comma-separated NxM list (default: 2x4,3x4,3x6,4x4; Weyl: 2x2..8x8)")
    v.add_argument("--alpha-sq-range", type=_range, default=(0.0, 1.0))
    v.add_argument("--partitions", type=int, default=1)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--records", default=None, help="also write per-trial records to this file")
    v.add_argument("--records-format", choices=("csv", "jsonl"), default="csv")
    v.add_argument("--inject-fault", action="store_true",
                   help="negate the tolerance to exercise the failure exit code")

    s = sub.add_parser("sweep", parents=[common], help="bounds on a |alpha|^2 grid")
    s.add_argument("psi", type=_existing_path)
    s.add_argument("phi", type=_existing_path)
    s.add_argument("--steps", type=int, default=11)
    s.add_argument("--theorem", choices=("auto", "T1", "T2", "T3"), default="auto")
    s.add_argument("--force", action="store_true")

    r = sub.add_parser("replay", parents=[common], help="replay the matrix identities of the proofs")
    r.add_argument("psi", type=_existing_path)
    r.add_argument("phi", type=_existing_path)
    r.add_argument("--alpha-sq", type=_unit_interval, required=True)
    r.add_argument("--phase", type=float, default=0.0)
    return p


# ---------------------------------------------------------------------------
# commands

def _cmd_concurrence(args) -> tuple[str, int]:
    s = load_state(args.state)
    c = concurrence(s)
    data = {"concurrence": c, "n": s.n, "m": s.m}
    return _render(args.format or "text", data, f"C = {c:.7g}\n"), EXIT_OK


def _report_text(rep: bounds.BoundReport) -> str:
    lines = [
        f"theorem = {rep.theorem.value}",
        f"lower = {_text(rep.lower_combined)}",
        f"actual = {_text(rep.actual_concurrence)}",
        f"upper = {_text(rep.upper_combined)}",
        f"lower_symmetric = {_text(rep.lower_symmetric)}",
        f"upper_symmetric = {_text(rep.upper_symmetric)}",
        f"lower_individual = {_text(rep.lower_individual)}",
        f"upper_individual = {_text(rep.upper_individual)}",
        f"rank_r = {rep.rank_r}",
        f"norm_sq = {_text(rep.norm_sq)}",
        f"condition = {_text(rep.condition_flag)}",
    ]
    if rep.warning:
        lines.append(f"warning = {rep.warning}")
    return "\n".join(lines) + "\n"


def _superposition(args) -> SuperpositionInput:
    psi = load_state(args.psi)
    phi = load_state(args.phi)
    return SuperpositionInput.from_alpha_sq(args.alpha_sq, psi, phi, phase=args.phase)


def _cmd_bounds(args) -> tuple[str, int]:
    inp = _superposition(args)
    rep = bounds.bounds(inp, args.theorem, force=args.force)
    if rep.warning:
        log.warning(rep.warning)
    return _render(args.format or "text", rep.to_dict(), _report_text(rep)), EXIT_OK


def _cmd_verify(args) -> tuple[str, int]:
    dims = args.dims
    if dims is None:
        dims = (tuple((d, d) for d in range(2, 9)) if args.theorem == "Weyl"
                else ((2, 4), (3, 4), (3, 6), (4, 4)))
    cfg = harness.CampaignConfig(
        theorem=args.theorem, trials=args.trials, dims=dims, seed=args.seed,
        tolerance=args.tolerance, alpha_sq_range=args.alpha_sq_range,
        emit=args.records_format if args.records else None, inject_fault=args.inject_fault,
    )
    summary, records = harness.run_campaign(cfg, partitions=args.partitions, workers=args.workers,
                                            keep_records=bool(args.records))
    log.info("campaign %s: %d trials in %.3f s", cfg.theorem, summary.total, summary.runtime)
    if args.records:
        writer = harness.records_to_csv if cfg.emit == "csv" else harness.records_to_jsonl
        Path(args.records).write_text(writer(records))
    data = summary.to_dict()
    text = "".join(f"{k} = {_text(v)}\n" for k, v in data.items())
    code = EXIT_VIOLATION if summary.violations else EXIT_OK
    if code:
        log.error("%d of %d trials violated a bound", summary.violations, summary.total)
    return _render(args.format or "json", data, text), code


def _cmd_sweep(args) -> tuple[str, int]:
    psi = load_state(args.psi)
    phi = load_state(args.phi)
    rows = harness.sweep_alpha(psi, phi, args.steps, args.theorem, force=args.force)
    data = [dict(zip(harness.SWEEP_FIELDS, row.as_tuple())) for row in rows]
    text = "  ".join(f"{k:>15}" for k in harness.SWEEP_FIELDS) + "\n"
    text += "".join("  ".join(f"{v:>15.7g}" for v in row.as_tuple()) + "\n" for row in rows)
    return _render(args.format or "text", data, text), EXIT_OK


def _cmd_replay(args) -> tuple[str, int]:
    inp = _superposition(args)
    psi, phi = inp.state_psi, inp.state_phi
    kind = classify_relation(psi, phi, bounds.PREMISE_TOL).kind
    name, replay = {
        Relation.BIORTHOGONAL: ("T1", harness.derivation_replay_t1),
        Relation.TRACE_ORTHOGONAL: ("T2", harness.derivation_replay_t2),
        Relation.GENERAL: ("T3", harness.derivation_replay_t3),
    }[kind]
    res = replay(psi, phi, inp.alpha, inp.beta)
    data = {"replay": name, "ok": res.ok, "identity_residual": res.identity_residual,
            "max_excess": res.max_excess, "degenerate": res.degenerate}
    text = "".join(f"{k} = {_text(v)}\n" for k, v in data.items())
    return _render(args.format or "text", data, text), EXIT_OK if res.ok else EXIT_VIOLATION


COMMANDS = {
    "concurrence": _cmd_concurrence,
    "bounds": _cmd_bounds,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "replay": _cmd_replay,
}


def _resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return _seed(env)
        except (ValueError, argparse.ArgumentTypeError):
            raise ParseError(f"${SEED_ENV}={env!r} is not a valid seed") from None
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return EXIT_ERROR if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        args.seed = _resolve_seed(args.seed)
        print(f"superpose: seed={args.seed}", file=sys.stderr)
        out, code = COMMANDS[args.command](args)
    except SuperposeError as exc:
        print(f"superpose {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
