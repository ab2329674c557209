"""``hexpoly`` command line: phase sweeps, correlations, partition functions,
spectral scans, infinite-volume limits and the verification suite.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, kasteleyn, limits, spectral, verification
from .lattice import build_hex_torus, nw_pair
from .params import PolygonParams

# Sector order of the pf_* columns.
PF_COLUMNS = (("pf_k11", (1, 1)), ("pf_k1m1", (1, -1)), ("pf_km11", (-1, 1)), ("pf_km1m1", (-1, -1)))


def fmt(x) -> str:
    """17 significant digits; ``inf``/``nan`` literals; strings pass through."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(x):
    if isinstance(x, str) or x is None:
        return x
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return fmt(x) if not math.isfinite(x) else float(fmt(x))


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def render(self, kind: str) -> str:
        if kind == "json":
            doc = {"columns": self.columns, "rows": [dict(zip(self.columns, map(_json_value, r))) for r in self.rows]}
            if self.summary:
                doc["summary"] = {k: _json_value(v) for k, v in self.summary.items()}
            return json.dumps(doc, indent=2) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(x) for x in r])
        return buf.getvalue()


def _sweep(spec: str) -> np.ndarray:
    try:
        lo, hi, steps = spec.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"sweep must look like lo:hi:steps, got {spec!r}")
    if steps < 1:
        raise argparse.ArgumentTypeError("sweep needs at least one step")
    return np.linspace(lo, hi, steps)


def _int_range(spec: str) -> list[int]:
    if ":" in spec:
        lo, hi = spec.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(spec)]


def _params(args) -> PolygonParams:
    if args.alpha is None or args.beta is None or args.gamma is None:
        raise SystemExit("error: --alpha, --beta and --gamma are required")
    return PolygonParams(args.alpha, args.beta, args.gamma)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

PHASE_COLUMNS = ["alpha", "beta", "gamma", "U", "V", "S", "T", "gamma1", "gamma2", "phase"]


def phase_row(a: float, b: float, g: float, tol: float) -> list:
    ind = spectral.uvst(a, b, g)
    bounds = spectral.phase_boundaries(a, b)
    verdict = spectral.classify(a, b, g, tol)
    return [a, b, g, *ind.as_tuple(), bounds.gamma1, bounds.gamma2, verdict.phase.value]


def cmd_phase(args) -> Table:
    table = Table(PHASE_COLUMNS)
    if args.sweep:
        axes = [_sweep(s) for s in args.sweep]
        if len(axes) == 1:
            axes *= 3
        if len(axes) != 3:
            raise SystemExit("error: give --sweep once (all axes) or three times (alpha, beta, gamma)")
        if np.any(np.concatenate(axes) <= 0):
            raise SystemExit("error: sweep values must be positive")
        for a in axes[0]:
            for b in axes[1]:
                for g in axes[2]:
                    table.rows.append(phase_row(float(a), float(b), float(g), args.tol))
    else:
        p = _params(args)
        table.rows.append(phase_row(*p.as_tuple(), args.tol))
    return table


def cmd_corr(args) -> Table:
    p = _params(args)
    if args.n < 2:
        raise SystemExit("error: --n must be at least 2")
    seps = _int_range(args.sep)
    lat = build_hex_torus(args.n)
    for s in seps:
        nw_pair(lat, s)  # validates the separation
    cols = ["n", "sep", "M", "M2"] + [c for c, _ in PF_COLUMNS] + ["flag"]
    table = Table(cols)
    results = kasteleyn.correlation_sweep(args.n, p, seps)
    for s, res in zip(seps, results):
        scaled = dict(zip(kasteleyn.SECTORS, res.scaled_pfaffians()))
        pfs = [scaled[sec] for _, sec in PF_COLUMNS]
        flag = "critical" if res.critical else ""
        table.rows.append([args.n, s, res.value, res.value * res.value, *pfs, flag])
    return table


def cmd_zn(args) -> Table:
    p = _params(args)
    cols = ["n", "alpha", "beta", "gamma", "log_Z", "Z"]
    log_z = kasteleyn.log_partition_Z(args.n, p)
    z = math.exp(log_z) if log_z < 709 else math.inf
    row = [args.n, *p.as_tuple(), log_z, z]
    if args.oracle:
        from . import oracle

        cols.append("Z_oracle")
        row.append(oracle.brute_Z(build_hex_torus(args.n), p))
    return Table(cols, [row])


def cmd_spectral(args) -> Table:
    p = _params(args)
    poly = spectral.char_poly_polygon(*p.as_tuple())
    tm = spectral.torus_min(poly, args.grid)
    cols = [
        "alpha", "beta", "gamma", "const", "coef_w", "coef_z", "coef_w_over_z",
        "torus_min", "argmin_z", "argmin_w", "P_1_1", "P_m1_1", "P_1_m1", "P_m1_m1",
    ]
    corners = [poly(z, w).real for z, w in ((1, 1), (-1, 1), (1, -1), (-1, -1))]
    row = [
        *p.as_tuple(), poly[0, 0], poly[0, 1], poly[1, 0], poly[-1, 1],
        tm.value, _fmt_complex(tm.z), _fmt_complex(tm.w), *corners,
    ]
    return Table(cols, [row])


def _fmt_complex(z: complex) -> str:
    return f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}j"


def cmd_limit(args) -> Table:
    p = _params(args)
    est = limits.lambda_estimate(p, args.max_sep, args.grid)
    table = Table(["sep", "m2", "delta_rel"], [list(r) for r in est.table])
    table.summary = {"lambda": est.value, "converged": est.converged, "phase": est.phase}
    return table


def cmd_verify(args) -> Table:
    factory = None
    if args.corrupt_orientation:
        factory = lambda g: g.flipped(0)  # noqa: E731
    results = verification.run_all(args.level, factory)
    # timings go to stderr only, so reruns give identical tables
    table = Table(["criterion", "name", "status", "worst", "tolerance"])
    for r in results:
        status = "skip" if not r.ran else ("pass" if r.passed else "fail")
        table.rows.append([r.number, r.name, status, r.worst, r.tolerance])
        print(r.line(), file=sys.stderr)
    table.summary = {"passed": all(r.passed for r in results)}
    return table


COMMANDS = {
    "phase": cmd_phase,
    "corr": cmd_corr,
    "zn": cmd_zn,
    "spectral": cmd_spectral,
    "limit": cmd_limit,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write output here (plus FILE.manifest.json)")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--alpha", type=float)
    params.add_argument("--beta", type=float)
    params.add_argument("--gamma", type=float)

    parser = argparse.ArgumentParser(prog="hexpoly", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hexpoly {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase", parents=[common, params], help="classify parameter points")
    p.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL)
    p.add_argument("--sweep", action="append", help="lo:hi:steps; once for all axes or three times")

    p = sub.add_parser("corr", parents=[common, params], help="finite-n order parameter M_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sep", default="1", help="separation in periods, or lo:hi")

    p = sub.add_parser("zn", parents=[common, params], help="partition function Z_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="also enumerate (n <= 4)")

    p = sub.add_parser("spectral", parents=[common, params], help="characteristic polynomial scan")
    p.add_argument("--grid", type=int, default=512)

    p = sub.add_parser("limit", parents=[common, params], help="m_inf^2 decay table and Lambda")
    p.add_argument("--grid", type=int, default=limits.DEFAULT_GRID)
    p.add_argument("--max-sep", type=int, default=limits.DEFAULT_MAX_SEP)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--corrupt-orientation", action="store_true", help=argparse.SUPPRESS)
    return parser


def _manifest(args, elapsed: float) -> dict:
    skip = {"command", "format", "out"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {
        "command": args.command,
        "parameters": params,
        "format": args.format,
        "tool_version": __version__,
        "quadrature_rule": limits.DEFAULT_RULE,
        "wall_time_s": round(elapsed, 3),
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        table = COMMANDS[args.command](args)
    except (ValueError, limits.CriticalParameters) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = table.render(args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        with open(args.out + ".manifest.json", "w") as fh:
            json.dump(_manifest(args, time.perf_counter() - t0), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)
    if args.command == "verify" and not table.summary["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
