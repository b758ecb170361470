"""Command-line front end.

Subcommands ``eigen``, ``gaps``, ``bands``, ``asym`` and ``verify`` share one
set of flags. Exit codes: 0 ok, 1 configuration error, 2 a sector violates the
size condition, 3 an iteration did not converge.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import asymptotics, oracle
from .potential import KroneckerPotential, PotentialError, new_potential
from .series import SectorIndex, SectorKind, SeriesError, TruncationParams, first, g_map
from .solver import (
    ApplicabilityError,
    ContractionError,
    EigenSolution,
    SolverError,
    localization_interval,
    solve_pair,
    solve,
)

PI2 = math.pi**2
EXIT_OK, EXIT_CONFIG, EXIT_VIOLATED, EXIT_NONCONVERGED = 0, 1, 2, 3
FORMATS = ("table", "json", "csv")
DET_TOL = 1e-10
DISC_TOL = 1e-8


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    pi_units: bool = False
    r: int = 5
    s: int = 5
    tol: float = 1e-14
    max_iter: int = 100
    n_max: int = 2
    relaxed: bool = False
    oracle: bool = False
    eps: float = 1.0
    format: str = "table"
    output_path: Optional[str] = None

    def validate(self):
        if self.a is None:
            raise ConfigError("a is required")
        if self.c is None:
            raise ConfigError("c is required")
        if self.n_max < 0:
            raise ConfigError("n_max must be >= 0")
        if not self.eps > 0:
            raise ConfigError("eps must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        self.potential()
        self.truncation()
        return self

    @property
    def unit(self) -> float:
        return PI2 if self.pi_units else 1.0

    def potential(self) -> KroneckerPotential:
        try:
            if self.b is None:
                return new_potential(self.a * self.unit, self.c)
            return KroneckerPotential(self.a * self.unit, self.b * self.unit, self.c)
        except PotentialError as exc:
            raise ConfigError(str(exc)) from None

    def truncation(self) -> TruncationParams:
        try:
            return TruncationParams(self.r, self.s, self.tol, self.max_iter)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def as_dict(self, p) -> dict:
        return {
            "a": p.a / self.unit,
            "b": p.b / self.unit,
            "c": p.c,
            "pi_units": self.pi_units,
            "r": self.r,
            "s": self.s,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "n_max": self.n_max,
            "relaxed": self.relaxed,
            "eps": self.eps,
        }


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _coerce(name, value):
    kind = {"a": float, "b": float, "c": float, "tol": float, "eps": float,
            "r": int, "s": int, "max_iter": int, "n_max": int,
            "pi_units": bool, "relaxed": bool, "oracle": bool,
            "format": str, "output_path": str}[name]
    if value is None:
        return None
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be true or false")
        return value
    if kind is int and (isinstance(value, bool) or float(value) != int(value)):
        raise ConfigError(f"{name} must be an integer")
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} has invalid value {value!r}") from None


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the JSON config file (if any) with flags; flags win."""
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        for key, value in data.items():
            name = key.replace("-", "_")
            if name == "output":
                name = "output_path"
            if name not in _FIELDS:
                raise ConfigError(f"config: unknown field {key!r}")
            values[name] = _coerce(name, value)
    for name in _FIELDS:
        flag = "output" if name == "output_path" else name
        value = getattr(args, flag, None)
        if value is not None:
            values[name] = value
    return RunConfig(**values).validate()


# ---------------------------------------------------------------- computing

def _num(x):
    """JSON/CSV number: full precision, NaN and inf as null."""
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def _fmt(x, width=0) -> str:
    s = "-" if x is None or (isinstance(x, float) and not math.isfinite(x)) else f"{x:.12g}"
    return s.rjust(width)


def _status(result):
    if isinstance(result, EigenSolution):
        return result.condition.value if result.converged else "nonconverged"
    if isinstance(result, (ApplicabilityError, ContractionError)):
        return "violated"
    return "failed"


def solve_all(p, t, n_max, relaxed):
    """Solver result (or raised error) per sector, in output order."""
    out = []
    try:
        out.append((first(), solve(p, t, first(), relaxed)))
    except (SolverError, SeriesError) as exc:
        out.append((first(), exc))
    for n in range(1, n_max + 1):
        for kind in (SectorKind.PERIODIC, SectorKind.ANTIPERIODIC):
            try:
                pair = solve_pair(p, t, kind, n, relaxed)
            except (SolverError, SeriesError) as exc:
                pair = (exc, exc)
            for j, res in zip((1, 2), pair):
                sector = res.sector if isinstance(res, EigenSolution) else None
                if sector is None:
                    sector = SectorIndex(kind, n, j)
                out.append((sector, res))
    return out


def _value(res):
    return res.value if isinstance(res, EigenSolution) else None


def _bound(res):
    return res.total_bound if isinstance(res, EigenSolution) else None


def _oracle_values(p, n_max):
    """Oracle eigenvalues keyed by sector label."""
    table = oracle.bands_and_gaps(p, max(n_max, 1))
    vals = {"lambda_0": table.lambda0}
    for (n, l1, l2), (_, m1, m2) in zip(table.periodic, table.antiperiodic):
        vals[f"lambda_{n},1"], vals[f"lambda_{n},2"] = l1, l2
        vals[f"mu_{n},1"], vals[f"mu_{n},2"] = m1, m2
    return table, vals


def build_report(cfg: RunConfig) -> dict:
    p = cfg.potential()
    t = cfg.truncation()
    u = cfg.unit
    results = solve_all(p, t, cfg.n_max, cfg.relaxed)
    by_label = {sec.label: res for sec, res in results}
    ovals = _oracle_values(p, cfg.n_max)[1] if cfg.oracle else {}

    def scaled(x):
        return None if x is None else x / u

    eigen = []
    for sec, res in results:
        row = {
            "sector": sec.label,
            "n": sec.n,
            "j": sec.j,
            "value": _num(scaled(_value(res))),
            "bound": _num(scaled(_bound(res))),
            "iterations": res.iterations if isinstance(res, EigenSolution) else None,
            "condition": _status(res),
        }
        if cfg.oracle:
            row["oracle"] = _num(scaled(ovals.get(sec.label)))
        eigen.append(row)

    def diff(hi, lo):
        if hi is None or lo is None:
            return None
        return hi - lo

    def bsum(*labels):
        bs = [_bound(by_label[k]) for k in labels]
        return None if any(b is None for b in bs) else sum(bs)

    gaps = []
    for n in range(1, cfg.n_max + 1):
        for k, sym in ((2 * n - 1, "mu"), (2 * n, "lambda")):
            lo, hi = f"{sym}_{n},1", f"{sym}_{n},2"
            pred = asymptotics.gap_prediction(p, k)
            row = {
                "k": k,
                "length": _num(scaled(diff(_value(by_label[hi]), _value(by_label[lo])))),
                "bound": _num(scaled(bsum(lo, hi))),
                "first_order": _num(pred.first_order / u),
                "second_order": _num(pred.second_order / u),
            }
            if cfg.oracle:
                row["oracle"] = _num(scaled(ovals[hi] - ovals[lo]))
            gaps.append(row)

    edges = ["lambda_0"]
    for n in range(1, cfg.n_max + 1):
        edges += [f"mu_{n},1", f"mu_{n},2", f"lambda_{n},1", f"lambda_{n},2"]
    left = [edges[0]] + edges[2::2]
    right = edges[1::2]
    bands = []
    for k, (lo, hi) in enumerate(zip(left, right), start=1):
        row = {
            "k": k,
            "left": _num(scaled(_value(by_label[lo]))),
            "right": _num(scaled(_value(by_label[hi]))),
        }
        if cfg.oracle:
            row["oracle_left"] = _num(ovals[lo] / u)
            row["oracle_right"] = _num(ovals[hi] / u)
        bands.append(row)

    return {"config": cfg.as_dict(p), "eigenvalues": eigen, "gaps": gaps, "bands": bands}


def exit_code(report) -> int:
    status = {row["condition"] for row in report["eigenvalues"]}
    if "violated" in status:
        return EXIT_VIOLATED
    if status & {"nonconverged", "failed"}:
        return EXIT_NONCONVERGED
    return EXIT_OK


def asym_rows(cfg: RunConfig) -> list:
    """Per index ``k``: oracle edges, asymptotic edges, scaled residual, gap predictions."""
    p = cfg.potential()
    u = cfg.unit
    table = oracle.bands_and_gaps(p, max(cfg.n_max, 1))
    rows = []
    for n in range(1, cfg.n_max + 1):
        for k, kind, pair in ((2 * n - 1, SectorKind.ANTIPERIODIC, table.antiperiodic[n - 1]),
                              (2 * n, SectorKind.PERIODIC, table.periodic[n - 1])):
            o1, o2 = pair[1], pair[2]
            s1, s2 = (SectorIndex(kind, n, j) for j in (1, 2))
            e1, e2 = asymptotics.eigen_asym(p, s1), asymptotics.eigen_asym(p, s2)
            pred = asymptotics.gap_prediction(p, k)
            rows.append({
                "k": k,
                "n": n,
                "kind": kind.value,
                "oracle_1": _num(o1 / u),
                "oracle_2": _num(o2 / u),
                "asym_1": _num(e1 / u),
                "asym_2": _num(e2 / u),
                "scaled_residual": _num(n * n * max(abs(e1 - o1), abs(e2 - o2)) / u),
                "gap_oracle": _num((o2 - o1) / u),
                "first_order": _num(pred.first_order / u),
                "second_order": _num(pred.second_order / u),
                "first_order_zero": bool(pred.first_order <= 1e-12 * max(1.0, p.M)),
                "condition_c_value": _num(asymptotics.condition_c_value(p, k)),
                "condition_c": bool(asymptotics.condition_c(p, k, cfg.eps)),
            })
    return rows


# ---------------------------------------------------------------- verify

def verify_checks(cfg: RunConfig) -> list:
    """``(name, status, detail)`` with status PASS, FAIL or SKIP."""
    p = cfg.potential()
    t = cfg.truncation()
    n_max = max(cfg.n_max, 1)
    checks = []

    def add(name, ok, detail=""):
        checks.append((name, "PASS" if ok else "FAIL", detail))

    table, ovals = _oracle_values(p, n_max)
    lam = np.linspace(-50.0, max(5000.0, (2 * math.pi * (n_max + 1)) ** 2), 1000)
    # Tolerance relative to the size of the products that cancel in det.
    worst = 0.0
    for x in lam:
        m = oracle.monodromy(p, x)
        scale = max(1.0, abs(m.m11 * m.m22), abs(m.m12 * m.m21))
        worst = max(worst, abs(m.det - 1.0) / scale)
    add("oracle det = 1", worst <= DET_TOL, f"max |det-1| / scale = {worst:.3g}")

    for label, value in ovals.items():
        level = -2.0 if label.startswith("mu") else 2.0
        dev = abs(oracle.discriminant(p, value) - level)
        add(f"oracle disc({label}) = {level:+.0f}", dev <= DISC_TOL, f"{dev:.3g}")

    edges = table.edges()
    ordered = all(x <= y for x, y in zip(edges, edges[1:])) and edges[0] < edges[1]
    add("interlacing", ordered, f"{len(edges)} edges")

    for label, value in ovals.items():
        if label == "lambda_0":
            continue
        sec = _sector_from_label(label)
        iv = localization_interval(p, sec)
        add(f"localization {label}", value in iv, f"[{iv.lo:.6g}, {iv.hi:.6g}]")

    for sec, res in solve_all(p, t, cfg.n_max, cfg.relaxed):
        name = f"solver {sec.label}"
        if isinstance(res, (ApplicabilityError, ContractionError)):
            checks.append((name, "SKIP", str(res)))
            continue
        if not isinstance(res, EigenSolution):
            add(name, False, str(res))
            continue
        if not res.converged:
            add(name, False, f"no convergence after {res.iterations} iterations")
            continue
        try:
            g_map(p, t, dataclasses.replace(sec, j=res.branch), res.value)
            add(f"reality {sec.label}", True)
        except SeriesError as exc:
            add(f"reality {sec.label}", False, str(exc))
        err = abs(res.value - ovals[sec.label])
        if not res.certified:
            checks.append((name, "SKIP", f"uncertified, |err| = {err:.3g}"))
            continue
        add(name, err <= res.total_bound, f"|err| = {err:.3g} <= bound {res.total_bound:.3g}")
    return checks


def _sector_from_label(label):
    sym, rest = label.split("_")
    n, j = (int(v) for v in rest.split(","))
    kind = SectorKind.PERIODIC if sym == "lambda" else SectorKind.ANTIPERIODIC
    return SectorIndex(kind, n, j)


# ---------------------------------------------------------------- rendering

def _csv(rows) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else (repr(v) if isinstance(v, float) else v)
                         for k, v in row.items()})
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _table(rows, columns) -> str:
    widths = {c: max(len(c), *(len(_cell(r[c])) for r in rows)) if rows else len(c) for c in columns}
    lines = ["  ".join(c.rjust(widths[c]) for c in columns)]
    for r in rows:
        lines.append("  ".join(_cell(r[c]).rjust(widths[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float) or v is None:
        return _fmt(v)
    return str(v)


def render(cfg: RunConfig, section: str, report: dict) -> str:
    if cfg.format == "json":
        return _json(report)
    rows = report[section]
    if cfg.format == "csv":
        return _csv(rows)
    return _table(rows, list(rows[0]) if rows else [])


# ---------------------------------------------------------------- commands

def cmd_eigen(cfg: RunConfig):
    """Solve lambda_0 and every pair up to n_max."""
    report = build_report(cfg)
    return exit_code(report), render(cfg, "eigenvalues", report)


def cmd_gaps(cfg: RunConfig):
    """Gap lengths with asymptotic predictions."""
    report = build_report(cfg)
    return exit_code(report), render(cfg, "gaps", report)


def cmd_bands(cfg: RunConfig):
    """Band intervals from the computed edges."""
    report = build_report(cfg)
    return exit_code(report), render(cfg, "bands", report)


def cmd_asym(cfg: RunConfig):
    """Asymptotic formulas against the transfer-matrix spectrum."""
    rows = asym_rows(cfg)
    if cfg.format == "json":
        return EXIT_OK, _json({"config": cfg.as_dict(cfg.potential()), "asymptotics": rows})
    if cfg.format == "csv":
        return EXIT_OK, _csv(rows)
    return EXIT_OK, _table(rows, list(rows[0]) if rows else [])


def cmd_verify(cfg: RunConfig):
    """Run the certificate checks; exit 0 iff all pass."""
    checks = verify_checks(cfg)
    failed = any(status == "FAIL" for _, status, _ in checks)
    code = EXIT_NONCONVERGED if failed else EXIT_OK
    rows = [{"check": n, "status": s, "detail": d} for n, s, d in checks]
    if cfg.format == "json":
        return code, _json({"config": cfg.as_dict(cfg.potential()), "checks": rows})
    if cfg.format == "csv":
        return code, _csv(rows)
    lines = [f"{s:4s}  {n}" + (f"  ({d})" if d else "") for n, s, d in checks]
    lines.append(f"{'FAIL' if failed else 'PASS'}  all checks")
    return code, "\n".join(lines) + "\n"


COMMANDS = {"eigen": cmd_eigen, "gaps": cmd_gaps, "bands": cmd_bands,
            "asym": cmd_asym, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the configuration code, keeping 2 for violated conditions."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="kpbloch",
        description="Bloch eigenvalues, gaps and bands of the Kronig-Penney operator.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, help="step value on [0, c] (negative)")
    common.add_argument("--b", type=float, help="step value on (c, 1]; derived from the zero mean if omitted")
    common.add_argument("--c", type=float, help="step position in (0, 1)")
    common.add_argument("--pi-units", action="store_const", const=True, dest="pi_units",
                        help="a, b and printed energies in units of pi^2")
    common.add_argument("--r", type=int, help="series depth (default 5)")
    common.add_argument("--s", type=int, help="Fourier window half-width (default 5)")
    common.add_argument("--tol", type=float, help="iteration step tolerance (default 1e-14)")
    common.add_argument("--max-iter", type=int, dest="max_iter", help="iteration cap (default 100)")
    common.add_argument("--n-max", type=int, dest="n_max", help="largest pair index (default 2)")
    common.add_argument("--relaxed", action="store_const", const=True,
                        help="accept the weaker size condition (no certificate)")
    common.add_argument("--oracle", action="store_const", const=True,
                        help="add transfer-matrix reference values")
    common.add_argument("--eps", type=float, help="epsilon of the c-admissibility test (default 1)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--output", help="write the report to this file")
    common.add_argument("--config", help="JSON file with any of the above (flags override)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__doc__, description=fn.__doc__)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, text = COMMANDS[args.command](cfg)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
