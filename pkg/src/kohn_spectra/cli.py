"""Command line: ``kohn-spectra {basis,matrix,blocks,eigs,bound,sweep}``.

Exit codes: 0 success, 1 bad configuration, 2 a checked inequality failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .harmonics import basis_hm, basis_hpq_derivative
from .operator import assemble_full, closed_form_block, block_upper_coeff, spectrum_multiplicity
from .poly import ComplexRational, RossiParam, format_coefficient, parse_coefficient, parse_polynomial
from .tridiag import bound_chain, sweep

EXIT_OK, EXIT_CONFIG, EXIT_ASSERT = 0, 1, 2
SWEEP_COLUMNS = ["k", "parity", "t", "h", "lambda_min", "det_ratio", "paper_bound", "corrected_bound"]


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    m: Optional[int] = None
    k: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    kmax: Optional[int] = None
    t: list[Fraction] = field(default_factory=list)
    parity: str = "odd"
    fmt: str = "text"
    mode: str = "exact"
    tol: float = 1e-12
    out: Optional[str] = None
    header: bool = True

    def validate(self) -> None:
        for value in self.t:
            if not 0 <= value < 1:
                raise ConfigError(f"t = {value} outside [0, 1)")
        if self.k is not None and self.k < 1:
            raise ConfigError("--k must be >= 1")
        if self.kmax is not None and self.kmax < 1:
            raise ConfigError("--kmax must be >= 1")
        for name in ("m", "p", "q"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(f"--{name} must be >= 0")
        if not self.tol > 0:
            raise ConfigError("--tol must be positive")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a rational number: {text!r}") from None


def parse_grid(text: str) -> list[Fraction]:
    """``lo:hi:step`` -> exact rationals lo, lo+step, ..., up to and including hi."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--t-grid wants lo:hi:step, got {text!r}")
    lo, hi, step = (parse_rational(x) for x in parts)
    if step <= 0 or hi < lo:
        raise ConfigError(f"empty or backwards grid {text!r}")
    out, x = [], lo
    while x <= hi:
        out.append(x)
        x += step
    return out


def _fmt_float(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.17g}"


def _header(lines: list[str], cfg: RunConfig) -> str:
    if not cfg.header:
        return ""
    stamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    return "".join(f"# {line}\n" for line in [f"kohn-spectra {cfg.command}; generated {stamp}", *lines])


# ------------------------------------------------------------------- commands


def cmd_basis(cfg: RunConfig) -> tuple[str, int]:
    if cfg.m is not None:
        basis = basis_hm(cfg.m)
        label = f"H_{cfg.m}(S^3), dimension {len(basis)}"
    elif cfg.p is not None and cfg.q is not None:
        basis = basis_hpq_derivative(cfg.p, cfg.q)
        label = f"H_{{{cfg.p},{cfg.q}}}(S^3), dimension {len(basis)}"
    else:
        raise ConfigError("basis needs --m, or both --p and --q")
    polys = [str(f) for f in basis]
    if cfg.fmt == "json":
        return json.dumps(polys, indent=1) + "\n", EXIT_OK
    return _header([label], cfg) + "".join(p + "\n" for p in polys), EXIT_OK


def _single_t(cfg: RunConfig) -> Fraction:
    if len(cfg.t) != 1:
        raise ConfigError(f"{cfg.command} needs exactly one --t")
    return cfg.t[0]


def cmd_matrix(cfg: RunConfig) -> tuple[str, int]:
    if cfg.m is None:
        raise ConfigError("matrix needs --m")
    t = RossiParam(_single_t(cfg))
    mat = assemble_full(cfg.m, t, mode=cfg.mode)
    h_text = format_coefficient(ComplexRational(t.h))
    if cfg.mode == "exact":
        cells = [[format_coefficient(c) for c in row] for row in mat.entries]
    else:
        cells = [[_fmt_float(float(np.real(c))) for c in row] for row in mat.entries]
    if cfg.fmt == "json":
        doc = {
            "m": cfg.m,
            "t": format_coefficient(ComplexRational(t.t_abs)),
            "h": h_text,
            "h_factored": True,
            "convention": "column j = coordinates of the image of basis vector j",
            "basis": [str(f) for f in mat.basis],
            "entries": cells,
        }
        if cfg.header:
            doc["generated"] = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
        return json.dumps(doc, indent=1) + "\n", EXIT_OK
    width = max((len(c) for row in cells for c in row), default=1)
    body = "".join(" ".join(c.rjust(width) for c in row) + "\n" for row in cells)
    head = _header(
        [f"H_{cfg.m}(S^3), t = {format_coefficient(ComplexRational(t.t_abs))}",
         f"h factored out; h = {h_text}"],
        cfg,
    )
    return head + body, EXIT_OK


def parse_matrix(text: str) -> list[list[ComplexRational]]:
    """Read back the exact entries written by ``matrix`` (JSON or text)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return [[parse_coefficient(c) for c in row] for row in json.loads(stripped)["entries"]]
    rows = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        rows.append([parse_coefficient(c) for c in line.split()])
    return rows


def cmd_blocks(cfg: RunConfig) -> tuple[str, int]:
    if cfg.k is None:
        raise ConfigError("blocks needs --k")
    t = RossiParam(_single_t(cfg) if cfg.t else Fraction(0))
    buf = io.StringIO()
    buf.write(_header([f"t = {format_coefficient(ComplexRational(t.t_abs))}; h factored out; "
                       "u_j = -|t| * u_j_coeff; subdiagonal = -|t|"], cfg))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "kind", "j", "d_j", "u_j_coeff"])
    for kind in ("V", "W"):
        block = closed_form_block(cfg.k, kind, t)
        for j in range(1, cfg.k + 1):
            coeff = block_upper_coeff(cfg.k, kind, j) if j < cfg.k else ""
            writer.writerow([cfg.k, kind, j, format_coefficient(ComplexRational(block.diag[j - 1])), coeff])
    return buf.getvalue(), EXIT_OK


def cmd_eigs(cfg: RunConfig) -> tuple[str, int]:
    t = RossiParam(_single_t(cfg))
    if cfg.k is not None:
        pairs = spectrum_multiplicity(cfg.k, t)
        label = f"H_{2 * cfg.k - 1}(S^3) from V/W blocks"
    elif cfg.m is not None:
        vals = assemble_full(cfg.m, t, mode="numeric").eigenvalues()
        pairs = []
        for v in vals:
            if pairs and math.isclose(pairs[-1][0], v, rel_tol=1e-9, abs_tol=1e-9 * float(t.h)):
                pairs[-1] = (pairs[-1][0], pairs[-1][1] + 1)
            else:
                pairs.append((float(v), 1))
        label = f"H_{cfg.m}(S^3) from full assembly"
    else:
        raise ConfigError("eigs needs --k or --m")
    if cfg.fmt == "json":
        doc = [{"eigenvalue": v, "multiplicity": n} for v, n in pairs]
        return json.dumps(doc, indent=1) + "\n", EXIT_OK
    buf = io.StringIO()
    buf.write(_header([f"{label}, t = {format_coefficient(ComplexRational(t.t_abs))}; h included"], cfg))
    sep = "," if cfg.fmt == "csv" else " "
    buf.write(f"eigenvalue{sep}multiplicity\n")
    for v, n in pairs:
        buf.write(f"{_fmt_float(v)}{sep}{n}\n")
    return buf.getvalue(), EXIT_OK


def _report_row(rep) -> list:
    return [
        rep.k,
        rep.parity,
        _fmt_float(float(rep.t_abs)),
        _fmt_float(rep.h),
        _fmt_float(rep.lambda_min),
        _fmt_float(rep.det_ratio),
        _fmt_float(rep.analytic_bound),
        _fmt_float(rep.corrected_bound),
    ]


def _render_reports(reports, cfg: RunConfig, lines: list[str]) -> str:
    if cfg.fmt == "json":
        doc = [dict(zip(SWEEP_COLUMNS, [r.k, r.parity, float(r.t_abs), r.h, r.lambda_min,
                                        r.det_ratio, r.analytic_bound, r.corrected_bound]))
               for r in reports]
        for row, rep in zip(doc, reports):
            row["holds"] = rep.holds
            for key, val in row.items():
                if isinstance(val, float) and math.isnan(val):
                    row[key] = None
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(_header(lines, cfg))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for rep in reports:
        writer.writerow(_report_row(rep))
    return buf.getvalue()


def cmd_bound(cfg: RunConfig) -> tuple[str, int]:
    if cfg.k is None:
        raise ConfigError("bound needs --k")
    t = _single_t(cfg)
    if t == 0:
        raise ConfigError("bound needs 0 < t < 1")
    rep = bound_chain(cfg.k, t, tol=cfg.tol)
    text = _render_reports([rep], cfg, ["odd piece H_{2k-1}; all values include h"])
    return text, EXIT_OK if rep.holds else EXIT_ASSERT


def cmd_sweep(cfg: RunConfig) -> tuple[str, int]:
    if cfg.kmax is None:
        raise ConfigError("sweep needs --kmax")
    if not cfg.t:
        raise ConfigError("sweep needs --t-grid or --t")
    if any(t == 0 for t in cfg.t):
        raise ConfigError("sweep grid must lie in (0, 1)")
    reports = sweep(cfg.kmax, cfg.t, cfg.parity, tol=cfg.tol)
    failed = any(not r.holds for r in reports if r.parity == "odd")
    text = _render_reports(reports, cfg, [f"parity {cfg.parity}, k = 1..{cfg.kmax}; all values include h"])
    return text, EXIT_ASSERT if failed else EXIT_OK


COMMANDS = {
    "basis": cmd_basis,
    "matrix": cmd_matrix,
    "blocks": cmd_blocks,
    "eigs": cmd_eigs,
    "bound": cmd_bound,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kohn-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=["text", "csv", "json"], default=None)
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--no-header", dest="header", action="store_false")
    common.add_argument("--t", action="append", default=[], help="parameter |t| as p/q")
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--mode", choices=["exact", "numeric"], default="exact")

    p = sub.add_parser("basis", parents=[common], help="harmonic basis of H_m or H_{p,q}")
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p = sub.add_parser("matrix", parents=[common], help="full matrix on H_m (h factored)")
    p.add_argument("--m", type=int)
    p = sub.add_parser("blocks", parents=[common], help="V/W block coefficients on H_{2k-1}")
    p.add_argument("--k", type=int)
    p = sub.add_parser("eigs", parents=[common], help="eigenvalues with multiplicities")
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p = sub.add_parser("bound", parents=[common], help="smallest eigenvalue and its bounds")
    p.add_argument("--k", type=int)
    p = sub.add_parser("sweep", parents=[common], help="bound reports over k and a t grid")
    p.add_argument("--kmax", type=int)
    p.add_argument("--t-grid", help="lo:hi:step, exact rationals")
    p.add_argument("--parity", choices=["odd", "even", "both"], default="odd")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    default_fmt = "csv" if args.command in ("blocks", "bound", "sweep") else "text"
    ts = [parse_rational(x) for x in args.t]
    if getattr(args, "t_grid", None):
        ts.extend(parse_grid(args.t_grid))
    cfg = RunConfig(
        command=args.command,
        m=getattr(args, "m", None),
        k=getattr(args, "k", None),
        p=getattr(args, "p", None),
        q=getattr(args, "q", None),
        kmax=getattr(args, "kmax", None),
        t=ts,
        parity=getattr(args, "parity", "odd"),
        fmt=args.fmt or default_fmt,
        mode=args.mode,
        tol=args.tol,
        out=args.out,
        header=args.header,
    )
    cfg.validate()
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        text, code = COMMANDS[cfg.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"kohn-spectra: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_ASSERT:
        print("kohn-spectra: bound chain violated", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
