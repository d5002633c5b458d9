"""Command-line front end.

Subcommands:
  bound   compute one bound (gamma2 / adv / advpm / madv / madv-sweep) for a
          function and matrix choice
  verify  run a verification suite over the builtin corpus
  dpt     evaluate the closed-form bound calculators over a parameter grid

JSON is the canonical output format (sorted keys, compact separators); CSV is
a lossy projection that drops witness payloads.  Output files are written
atomically, and identical invocations (including --seed) produce identical
bytes: wall-clock timing goes to stderr only.

Exit codes: 0 success, 2 usage/parse error, 3 solver stall, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
import warnings

import numpy as np

from . import __version__, bounds, dpt, gram, verify
from .report import canonical_json

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STALL = 3
EXIT_VERIFY = 4

SCHEMA_VERSION = 1


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _thread_cap() -> None:
    cap = os.environ.get("ADVBOUND_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _atomic_write(path: str, data: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".advbound-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(payload: dict, fmt: str, out_path: str | None,
          csv_rows: list[dict] | None = None) -> None:
    if fmt == "json":
        text = canonical_json(payload) + "\n"
    else:
        rows = csv_rows if csv_rows is not None else [payload]
        buf = io.StringIO()
        fields = sorted({k for r in rows for k in r})
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in fields})
        text = buf.getvalue()
    if out_path:
        _atomic_write(out_path, text)
    else:
        sys.stdout.write(text)


def _envelope(command: str, config: dict) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "config": config,
    }


def _resolve_matrix(func_spec: str, choice: str):
    f = gram.resolve_function(func_spec)
    g = gram.build_gram_set(f)
    if choice == "JminusF":
        return g, g.J - g.F
    return g, g.sigma(choice)


# ----------------------------------------------------------------- bound

def run_bound(args) -> int:
    config = {
        "function": args.function, "bound": args.bound, "matrix": args.matrix,
        "c": args.c, "seed": args.seed, "format": args.format,
    }
    try:
        g, mat = _resolve_matrix(args.function, args.matrix)
    except gram.FunctionSpecError as e:
        raise CliError(str(e)) from e
    deltas = list(g.deltas)

    if args.bound == "gamma2":
        rep = bounds.gamma2(mat, seed=args.seed)
    elif args.bound == "adv":
        rep = bounds.adv(mat, deltas, seed=args.seed)
    elif args.bound == "advpm":
        rep = bounds.adv(mat, deltas, seed=args.seed, pm=True)
    elif args.bound == "madv":
        if args.c is None:
            raise CliError("--c is required for --bound madv")
        if not args.c > 1:
            raise CliError("--c must exceed 1")
        rep = bounds.madv_fixed_c(mat, deltas, args.c)
    elif args.bound == "madv-sweep":
        rep = bounds.madv_sweep(mat, deltas)
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown bound {args.bound!r}")

    payload = _envelope("bound", config)
    payload["report"] = rep.to_dict()
    stalled = rep.status not in ("ok", "uncertified")
    csv_row = dict(rep.summary())
    csv_row.pop("residuals", None)
    _emit(payload, args.format, args.output, csv_rows=[csv_row])
    if stalled:
        print(f"solver did not converge: status={rep.status}", file=sys.stderr)
        return EXIT_STALL
    return EXIT_OK


# ---------------------------------------------------------------- verify

def run_verify(args) -> int:
    config = {"suite": args.suite, "seed": args.seed, "format": args.format}
    reports = verify.run_suite(args.suite, seed=args.seed)
    table = [row for rep in reports for row in rep.table()]
    payload = _envelope("verify", config)
    payload["checks"] = table
    payload["passed"] = all(rep.passed for rep in reports)
    _emit(payload, args.format, args.output, csv_rows=table)
    for row in table:
        mark = "PASS" if row["ok"] else "FAIL"
        print(f"[{mark}] {row['suite']}/{row['name']} "
              f"residual={row['residual']:.3e} tol={row['tolerance']:.0e}",
              file=sys.stderr)
    return EXIT_OK if payload["passed"] else EXIT_VERIFY


# ------------------------------------------------------------------- dpt

def _parse_k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if lo_i < 1 or hi_i < lo_i:
            raise CliError(f"bad k range {text!r}")
        return list(range(lo_i, hi_i + 1))
    k = int(text)
    if k < 1:
        raise CliError("k must be positive")
    return [k]


def run_dpt(args) -> int:
    config = {
        "formula": args.formula, "k": args.k, "delta": args.delta,
        "gamma": args.gamma, "d": args.d, "lam": args.lam, "K": args.K,
        "mu": args.mu, "adv": args.adv, "q14": args.q14, "format": args.format,
    }
    try:
        ks = _parse_k_range(args.k)
    except ValueError as e:
        raise CliError(str(e)) from e

    rows = []
    try:
        for k in ks:
            params = dpt.DptParams(
                k=k, delta=args.delta, gamma=args.gamma, d=args.d,
                lam=args.lam, K=args.K, mu=args.mu,
            )
            row = {"k": k, "delta": args.delta}
            if args.formula == "sdpt":
                if args.adv is None:
                    raise CliError("--adv is required for sdpt")
                main, other = dpt.sdpt_bounds(params, args.adv, args.q14)
                row.update(value=main, q14_value=other)
            elif args.formula == "xor":
                if args.adv is None:
                    raise CliError("--adv is required for xor")
                main, other = dpt.xor_bounds(params, args.adv, args.q14)
                row.update(value=main, q14_value=other)
            elif args.formula == "phase":
                if args.adv is None:
                    raise CliError("--adv is required for phase")
                general, special = dpt.phase_sdpt_bound(params, args.adv)
                row.update(gamma=args.gamma, value=general, special=special)
            elif args.formula == "product-sigma":
                value, vacuous = dpt.product_sigma_bound(params)
                row.update(gamma=args.gamma, d=args.d, lam=args.lam,
                           value=value, vacuous=vacuous)
            elif args.formula == "threshold":
                tail, corollary = dpt.threshold_tail(params)
                row.update(K=args.K, mu=args.mu, value=tail, corollary=corollary)
            else:  # pragma: no cover
                raise CliError(f"unknown formula {args.formula!r}")
            if "vacuous" not in row:
                row["vacuous"] = bool(row["value"] <= 0)
            rows.append(row)
    except dpt.DptError as e:
        raise CliError(str(e)) from e

    payload = _envelope("dpt", config)
    payload["table"] = rows
    _emit(payload, args.format, args.output, csv_rows=rows)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="advbound",
        description="Adversary-method lower bounds and direct-product "
                    "bound calculators for explicit finite functions.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", default=None,
                       help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bound", help="compute one bound for a function")
    b.add_argument("--function", required=True,
                   help="builtin (OR:2, PARITY:3, EQ:3, ...) or a spec file")
    b.add_argument("--bound", required=True,
                   choices=("gamma2", "adv", "advpm", "madv", "madv-sweep"))
    b.add_argument("--matrix", default="F", choices=("F", "sigma_f", "JminusF"),
                   help="target matrix (default F)")
    b.add_argument("--c", type=float, default=None, help="madv parameter c > 1")
    common(b)
    b.set_defaults(func=run_bound)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", default="all",
                   choices=verify.SUITES + ("all",))
    common(v)
    v.set_defaults(func=run_verify)

    d = sub.add_parser("dpt", help="evaluate bound calculators over a grid")
    d.add_argument("--formula", required=True,
                   choices=("sdpt", "xor", "phase", "product-sigma", "threshold"))
    d.add_argument("--k", default="1", help="copies: integer or range lo..hi")
    d.add_argument("--delta", type=float, required=True)
    d.add_argument("--gamma", type=float, default=1.0)
    d.add_argument("--d", type=float, default=0.0)
    d.add_argument("--lam", type=float, default=2.0)
    d.add_argument("--K", type=int, default=1)
    d.add_argument("--mu", type=float, default=1.0)
    d.add_argument("--adv", type=float, default=None,
                   help="additive bound value for sdpt/xor/phase")
    d.add_argument("--q14", type=float, default=None,
                   help="bounded-error query complexity, if known")
    common(d)
    d.set_defaults(func=run_dpt)
    return ap


def main(argv: list[str] | None = None) -> int:
    _thread_cap()
    warnings.filterwarnings("ignore", message="Solution may be inaccurate")
    np.set_printoptions(legacy=False)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else EXIT_OK
    t0 = time.monotonic()
    try:
        code = args.func(args)
    except CliError as e:
        print(json.dumps({"error": str(e), "code": e.code}), file=sys.stderr)
        return e.code
    except RuntimeError as e:  # solver-level failures
        print(json.dumps({"error": str(e), "code": EXIT_STALL}), file=sys.stderr)
        return EXIT_STALL
    print(f"elapsed: {time.monotonic() - t0:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
