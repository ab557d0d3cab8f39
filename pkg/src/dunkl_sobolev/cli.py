"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 parameter or definiteness error, 3 quadrature
accuracy, 4 verification failure. Settings resolve as built-in defaults <
``$DUNKL_PRECISION`` < ``--preset`` < ``--job`` file < explicit flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .classical import FAMILIES, gauss_quadrature
from .coherence import MODES, companion, eps_consistency_residuals
from .config import FORMATS, PRECISIONS, PRESETS, JobConfig, load_job, merge
from .errors import (
    DegeneracyError, DomainError, ExprError, NumericalError, ParameterError, QuadratureAccuracyError,
)
from .fourier import expand, partial_sum, sobolev_error
from .sobolev import coherence_diagnostic
from .verify import run_verify

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_PARAM, EXIT_QUAD, EXIT_VERIFY = 0, 1, 2, 3, 4
SAMPLE_POINTS = 201


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ----------------------------------------------------------------- output

def _num(x) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def to_json(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    return _num(obj)


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, str)):
        return str(x)
    return _num(x)


def to_csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render(cfg: JobConfig, command: str, tables: dict) -> str:
    """Tables are name -> (header, rows); CSV output separates them by blank lines."""
    if cfg.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "config": cfg.to_dict()}
        for name, (header, rows) in tables.items():
            doc[name] = [dict(zip(header, [_plain(v) for v in row])) for row in rows]
        return to_json(doc) + "\n"
    parts = []
    for name, (header, rows) in tables.items():
        block = to_csv(header, rows)
        parts.append(block if len(tables) == 1 else f"# {name}\n{block}")
    return "\n".join(parts)


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    return float(v)


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# --------------------------------------------------------------- commands

def cmd_coherence(cfg: JobConfig, args) -> tuple[dict, int]:
    pair = cfg.pair()
    res = eps_consistency_residuals(pair, cfg.N)
    rows = []
    for n in range(cfg.N + 1):
        tg = pair.tilde_gamma[n] if n >= 1 else None
        rows.append([n, pair.eps[n], tg, pair.r[n], res[n - 1] if n >= 1 else None])
    tables = {"rows": (["n", "eps", "tilde_gamma", "r", "consistency_residual"], rows)}
    comp = companion(pair)
    info = [["D", float(pair.D)], ["kappa", float(comp.kappa)], ["t0", float(comp.t0)],
            ["positive_through", pair.positive_through]]
    if pair.Lambda is not None:
        info.append(["Lambda_closed_form", float(pair.Lambda)])
    info.append(["v", comp.template.describe() if comp.template is not None else "moments only"])
    info += [["note", note] for note in comp.notes]
    tables["summary"] = (["key", "value"], info)
    return tables, EXIT_OK


def cmd_sobolev(cfg: JobConfig, args) -> tuple[dict, int]:
    ctx = cfg.context()
    rows = []
    for n in range(cfg.N + 1):
        a = ctx.a[n] if n < len(ctx.a) else None
        eta = ctx.eta[n] if n < len(ctx.eta) else None
        e = coherence_diagnostic(ctx, n) if 2 <= n <= cfg.N else None
        rows.append([n, a, eta, ctx.s[n], e])
    tables = {"rows": (["n", "a", "eta", "s", "e_n"], rows)}
    if ctx.definite_through < cfg.N:
        tables["summary"] = (["key", "value"], [["definite_through", ctx.definite_through]])
    if args.dump_polys:
        coeff_rows = [[n, k, c] for n, S in enumerate(ctx.S) for k, c in enumerate(S.coeffs)]
        tables["polys"] = (["n", "k", "coeff"], coeff_rows)
    return tables, EXIT_OK


def _sample_grid(cfg: JobConfig) -> np.ndarray:
    lo, hi = cfg.measure().support
    if not np.isfinite(lo):
        lo, hi = -4.0, 4.0
    return np.linspace(lo, hi, SAMPLE_POINTS)


def cmd_expand(cfg: JobConfig, args) -> tuple[dict, int]:
    f = cfg.expr()
    ctx = cfg.context()
    job = expand(ctx, f, cfg.N, cfg.quad_nodes)
    rows = []
    for n in range(cfg.N + 1):
        w = job.w[n] if n < len(job.w) and n <= cfg.N - 2 else None
        rows.append([n, w, job.fcoef[n], job.F[n], sobolev_error(job, n)])
    tables = {"rows": (["n", "w", "f", "F", "sobolev_error"], rows)}
    sample_path = args.samples
    if sample_path is None and args.out:
        sample_path = os.path.splitext(args.out)[0] + ".samples.txt"
    if sample_path:
        x = _sample_grid(cfg)
        fx = np.asarray(f.f(x), dtype=float)
        px = np.asarray(partial_sum(job, cfg.N, x), dtype=float)
        lines = ["# x f(x) partial_sum(x)"] + [f"{_num(a)} {_num(b)} {_num(c)}" for a, b, c in zip(x, fx, px)]
        _write(sample_path, "\n".join(lines) + "\n")
    return tables, EXIT_OK


def _parse_perturb(text: str | None) -> dict | None:
    if not text:
        return None
    out = {}
    for part in text.split(","):
        try:
            k, v = part.split("=")
            out[int(k)] = float(v)
        except ValueError as exc:
            raise UsageError(f"--perturb-eta expects INDEX=DELTA[,INDEX=DELTA], got {text!r}") from exc
    return out


def cmd_verify(cfg: JobConfig, args) -> tuple[dict, int]:
    report = run_verify(cfg, _parse_perturb(args.perturb_eta))
    checks = [[c.name, "pass" if c.passed else ("info" if c.informational else "fail"), c.value, c.tol, c.detail]
              for c in report.checks]
    tables = {"checks": (["check", "status", "value", "tol", "detail"], checks)}
    if report.discrepancies:
        rows = [[d.item, d.printed, d.default, d.compat, d.oracle, d.note] for d in report.discrepancies]
        tables["discrepancies"] = (["item", "printed", "default", "paper_compat", "oracle", "note"], rows)
    return tables, EXIT_OK if report.passed else EXIT_VERIFY


def cmd_quad(cfg: JobConfig, args) -> tuple[dict, int]:
    measure = cfg.measure() if args.measure == "u" else cfg.measure().derived()
    q = gauss_quadrature(measure, cfg.quad_nodes, cfg.precision)
    rows = [[i, x, w] for i, (x, w) in enumerate(zip(q.nodes, q.weights))]
    rows += [[f"mass{j}", x, m] for j, (x, m) in enumerate(q.point_masses)]
    return {"rows": (["i", "node", "weight"], rows)}, EXIT_OK


COMMANDS = {
    "coherence": cmd_coherence,
    "sobolev": cmd_sobolev,
    "expand": cmd_expand,
    "verify": cmd_verify,
    "quad": cmd_quad,
}


# ------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("job")
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--job", help="JSON job file; explicit flags override its values")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--mu", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--eps0", type=float)
    g.add_argument("--eps1", type=float)
    g.add_argument("--xi", type=float)
    g.add_argument("--n", dest="N", type=int)
    g.add_argument("--f", help="target function, e.g. 'x*exp(-(x-0.2)^2)'")
    g.add_argument("--mode", choices=MODES)
    g.add_argument("--precision", choices=PRECISIONS)
    g.add_argument("--quad-nodes", dest="quad_nodes", type=int)
    g.add_argument("--format", choices=FORMATS)
    g.add_argument("--out", help="output file (default stdout)")
    parser = _Parser(prog="dunkl-sobolev", description="Dunkl-Sobolev orthogonal polynomials and expansions")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("coherence", parents=[common], help="eps_n, gamma~_n, r_n of the coherent pair")
    p = sub.add_parser("sobolev", parents=[common], help="a_n, eta_n, s_n and the e_n diagnostic")
    p.add_argument("--dump-polys", action="store_true", help="also emit S_n coefficients")
    p = sub.add_parser("expand", parents=[common], help="Fourier coefficients of --f")
    p.add_argument("--samples", help="file for the (x, f(x), partial sum) grid")
    p = sub.add_parser("verify", parents=[common], help="invariant suite and discrepancy report")
    p.add_argument("--perturb-eta", help="INDEX=DELTA offsets applied to eta in the e_n check")
    p = sub.add_parser("quad", parents=[common], help="Gauss rule for u or its lowered family")
    p.add_argument("--measure", choices=("u", "w"), default="u")
    return parser


_JOB_FIELDS = ("family", "mu", "alpha", "lam", "eps0", "eps1", "xi", "N", "f", "mode", "precision",
               "quad_nodes", "format")


def resolve_config(args) -> JobConfig:
    cfg = JobConfig()
    env = os.environ.get("DUNKL_PRECISION")
    if env:
        cfg = merge(cfg, {"precision": env})
    if args.preset:
        cfg = replace(PRESETS[args.preset], precision=cfg.precision)
    if args.job:
        cfg = merge(cfg, load_job(args.job))
    cfg = merge(cfg, {k: getattr(args, k) for k in _JOB_FIELDS})
    return cfg.validate()


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args)
        if args.command == "expand" and not cfg.f:
            raise UsageError("expand needs a target function (--f)")
        tables, code = COMMANDS[args.command](cfg, args)
        _write(args.out, render(cfg, args.command, tables))
        return code
    except (UsageError, ExprError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        index = getattr(exc, "index", None)
        where = f" (index {index})" if isinstance(exc, DegeneracyError) and index is not None else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return EXIT_PARAM
    except (QuadratureAccuracyError, NumericalError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUAD


if __name__ == "__main__":
    sys.exit(main())
