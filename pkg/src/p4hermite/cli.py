"""Command-line front end: reproducible CSV/JSON dumps of zeros, boundaries, charts and checks."""

from __future__ import annotations

import argparse
import json
import sys
import time

import mpmath

from . import __version__
from . import asymptotics as asy
from .errors import NearPole, P4Error
from .exact_algebra import DEFAULT_PREC, check_specializations, check_symmetry
from .painleve4 import (FAMILIES, FamilyParams, build_solution, check_lemma_switch,
                        check_psi_representations, check_sum_rule, p4_residual, scaled_eval)
from .rootfinder import scaled_zero_cloud

MAX_DIGITS = 25


# ---------------------------------------------------------------- formatting

def fmt_real(v, prec: int) -> str:
    """Shortest decimal that round-trips at ``prec`` bits, capped at 25 significant digits."""
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    with mpmath.workprec(prec):
        v = mpmath.mpf(v)
        if v == 0:
            return "0.0"
        for d in range(1, MAX_DIGITS + 1):
            s = mpmath.nstr(v, d, min_fixed=-5, max_fixed=12)
            if mpmath.mpf(s) == v:
                return s
        return s


def fmt_complex(z, prec: int) -> list:
    if isinstance(z, complex):
        return [repr(z.real), repr(z.imag)]
    z = mpmath.mpc(z)
    return [fmt_real(z.real, prec), fmt_real(z.imag, prec)]


class Table:
    def __init__(self, command: str, params: dict, columns: list):
        self.meta = {"tool": f"p4hermite {__version__}", "command": command}
        self.meta.update(params)
        self.columns = columns
        self.rows: list = []
        self.sections: dict = {}

    def section(self, name: str, columns: list) -> list:
        rows: list = []
        self.sections[name] = (columns, rows)
        return rows

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"meta": self.meta, "columns": self.columns, "rows": self.rows}
            for name, (cols, rows) in self.sections.items():
                doc[name] = {"columns": cols, "rows": rows}
            return json.dumps(doc, indent=1) + "\n"
        lines = [f"# {k}: {v}" for k, v in self.meta.items()]
        lines.append(",".join(self.columns))
        lines.extend(",".join(row) for row in self.rows)
        for name, (cols, rows) in self.sections.items():
            lines.append(f"# section: {name}")
            lines.append(",".join(cols))
            lines.extend(",".join(row) for row in rows)
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- argument parsing

def _floats(text: str, counts=(2, 4)) -> list:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if len(vals) not in counts:
        raise argparse.ArgumentTypeError(f"expected {' or '.join(map(str, counts))} numbers, got {text!r}")
    return vals


def _window(text):
    return _floats(text, (2, 4))


def _complex(text):
    vals = _floats(text, (1, 2))
    return complex(vals[0], vals[1] if len(vals) > 1 else 0.0)


def _int_list(text):
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=DEFAULT_PREC)
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="default csv (json for verify)")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="p4hermite",
                                description="Rational Painleve-IV solutions and their large-parameter asymptotics.")
    p.add_argument("--version", action="version", version=f"p4hermite {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("zeros", parents=[common], help="zeros of H_{m,n} in a scaled variable")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--scale", choices=("m", "n"), default="m")

    s = sub.add_parser("boundary", parents=[common], help="boundary curve of the elliptic region E_r")
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--samples", type=int, default=asy.SAMPLES_PER_QUADRANT, help="rays per quadrant")

    s = sub.add_parser("compare", parents=[common], help="exact versus leading-order values on the real axis")
    s.add_argument("--family", choices=FAMILIES, default="I")
    s.add_argument("--m", type=_int_list, required=True, help="comma list, paired with --n")
    s.add_argument("--n", type=_int_list, required=True)
    s.add_argument("--window", type=_window, default=[1.1, 3.0], help="x0,x1 (real range)")
    s.add_argument("--samples", type=int, default=40)

    s = sub.add_parser("phase", parents=[common], help="sign chart of Re phi~ in the z-plane")
    s.add_argument("--x", type=_complex, required=True, help="re or re,im")
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--window", type=_window, default=[-3.0, 3.0, -3.0, 3.0])
    s.add_argument("--grid", type=int, default=101)
    s.add_argument("--sigma", action="store_true", help="append the traced band")

    s = sub.add_parser("sigma", parents=[common], help="zero level line of Re phi~ from a to b")
    s.add_argument("--x", type=_complex, required=True)
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--samples", type=int, default=20000, help="maximum tracing steps")

    s = sub.add_parser("verify", parents=[common], help="exact identity suites")
    s.add_argument("--max-mn", type=int, default=6)
    return p


def _validate(p: argparse.ArgumentParser, a: argparse.Namespace):
    if a.format is None:
        a.format = "json" if a.command == "verify" else "csv"
    if a.precision_bits < 64:
        p.error("--precision-bits must be >= 64")
    if getattr(a, "samples", 4) < 4:
        p.error("--samples must be >= 4")
    if getattr(a, "r", 1.0) < 1:
        p.error("--r must be >= 1")
    if a.command == "zeros" and (a.m < 1 or a.n < 1):
        p.error("zeros needs --m, --n >= 1")
    if a.command == "compare":
        if len(a.m) != len(a.n):
            p.error("--m and --n lists must have the same length")
        if any(m < 1 or n < 1 or m < n for m, n in zip(a.m, a.n)):
            p.error("compare needs m >= n >= 1 (so that r = m/n >= 1)")
        if len(a.window) != 2 and len(a.window) != 4 or a.window[1] <= a.window[0]:
            p.error("--window must give an increasing real range x0,x1")
    if a.command == "phase":
        if len(a.window) != 4 or a.window[1] <= a.window[0] or a.window[3] <= a.window[2]:
            p.error("--window must be x0,x1,y0,y1 with x0<x1 and y0<y1")
        if a.grid < 1:
            p.error("--grid must be >= 1")
    if a.command == "verify" and a.max_mn < 0:
        p.error("--max-mn must be >= 0")


# ---------------------------------------------------------------- commands

def cmd_zeros(a) -> Table:
    prec = a.precision_bits
    rs = scaled_zero_cloud(a.m, a.n, a.scale, prec, seed=a.seed)
    t = Table("zeros", {"m": a.m, "n": a.n, "scale": a.scale,
                        "variable": "x = y/m^(1/2)" if a.scale == "m" else "chi = y/n^(1/2)",
                        "precision_bits": prec, "seed": a.seed, "degree": rs.source_degree,
                        "sweeps": rs.iterations, "flagged_clusters": len(rs.clusters)},
              ["re", "im", "residual", "flagged"])
    for z, res, flag in zip(rs.roots, rs.residuals, rs.flagged):
        t.rows.append(fmt_complex(z, prec) + [repr(res), str(int(flag))])
    return t


def cmd_boundary(a) -> Table:
    prec = a.precision_bits
    bc = asy.trace_boundary(a.r, a.samples, prec)
    xc = bc.corner
    t = Table("boundary", {"r": a.r, "samples_per_quadrant": a.samples, "precision_bits": prec,
                           "seed": a.seed, "corner": ",".join(fmt_complex(xc, prec)),
                           "real_axis_crossing": fmt_real(bc.real_crossing, prec),
                           "imag_axis_crossing": fmt_real(bc.imag_crossing, prec),
                           "points": len(bc)},
              ["re", "im", "residual"])
    for z, res in zip(bc.points, bc.residuals):
        t.rows.append(fmt_complex(z, prec) + [repr(res)])
    return t


def cmd_compare(a) -> Table:
    prec = a.precision_bits
    x0, x1 = a.window[0], a.window[1]
    k = a.samples
    xs = [x0 + (x1 - x0) * i / (k - 1) for i in range(k)]
    pairs = list(zip(a.m, a.n))
    t = Table("compare", {"family": a.family, "pairs": " ".join(f"({m},{n})" for m, n in pairs),
                          "x_range": f"{x0},{x1}", "samples": k, "precision_bits": prec, "seed": a.seed},
              ["m", "n", "r", "x", "exact_re", "exact_im", "approx_re", "approx_im", "abs_error", "status"])
    for m, n in pairs:
        w = build_solution(a.family, m, n)
        r = m / n
        for x in xs:
            approx = asy.asymptotic_w(a.family, x, r, prec, warn=False)
            status = "interior" if asy.in_elliptic_region(x, r) else "ok"
            try:
                exact = scaled_eval(w, x, prec)
                ex = fmt_complex(exact, prec)
                with mpmath.workprec(prec):
                    err = fmt_real(abs(exact - approx), prec)
            except NearPole:
                ex, err, status = ["", ""], "", "near_pole"
            t.rows.append([str(m), str(n), repr(r), repr(x)] + ex + fmt_complex(approx, prec) + [err, status])
    return t


def cmd_phase(a) -> Table:
    prec = a.precision_bits
    ch = asy.phase_chart(a.x, a.r, a.window, a.grid, prec)
    sd = asy.spectral_data(a.x, a.r, prec)
    marks = {name: ",".join(fmt_complex(getattr(sd, name), prec)) for name in ("a", "b", "c")}
    t = Table("phase", {"x": f"{a.x.real!r},{a.x.imag!r}", "r": a.r, "window": ",".join(map(repr, a.window)),
                        "grid": a.grid, "precision_bits": prec, "seed": a.seed,
                        **{f"mark_{k}": v for k, v in marks.items()}},
              ["i", "j", "re", "im", "sign"])
    for i, row in enumerate(ch.signs):
        for j, v in enumerate(row):
            z = ch.coordinates(i, j)
            t.rows.append([str(i), str(j), repr(z.real), repr(z.imag), str(v)])
    if a.sigma:
        rows = t.section("sigma", ["re", "im"])
        for z in asy.trace_sigma(sd):
            rows.append(fmt_complex(z, prec))
    return t


def cmd_sigma(a) -> Table:
    prec = a.precision_bits
    sd = asy.spectral_data(a.x, a.r, prec)
    pts = asy.trace_sigma(sd, a.samples)
    t = Table("sigma", {"x": f"{a.x.real!r},{a.x.imag!r}", "r": a.r, "max_steps": a.samples,
                        "precision_bits": prec, "seed": a.seed, "points": len(pts)},
              ["re", "im", "re_phi_tilde"])
    for z in pts:
        t.rows.append(fmt_complex(z, prec) + [repr(asy.re_phi_tilde(z, sd))])
    return t


def run_verify(max_mn: int) -> dict:
    """Exact identity suites for every valid index up to ``max_mn``."""
    suites: dict = {}

    def record(name, label, fn):
        entry = suites.setdefault(name, {"checked": [], "failed": []})
        entry["checked"].append(label)
        try:
            ok = bool(fn())
        except P4Error as exc:
            ok = False
            label = f"{label}: {type(exc).__name__}: {exc}"
        if not ok:
            entry["failed"].append(label)

    K = max_mn
    for fam in FAMILIES:
        for m in range(K + 1):
            for n in range(K + 1):
                try:
                    FamilyParams.of(fam, m, n)
                except P4Error:
                    continue
                record("p4_residual", f"{fam},{m},{n}",
                       lambda: p4_residual(build_solution(fam, m, n)).is_zero())
    for m in range(1, K + 1):
        for n in range(1, m + 1):
            record("lemma_switch", f"{m},{n}", lambda: check_lemma_switch(m, n))
            record("psi_representation", f"{m},{n}", lambda: check_psi_representations(m, n))
    for m in range(K + 1):
        for n in range(K + 1):
            record("symmetry", f"{m},{n}", lambda: check_symmetry(m, n))
    for k in range(K + 1):
        record("specialization", f"{k}", lambda: check_specializations(k))
    for m in range(1, K + 1):
        for n in range(1, K + 1):
            record("sum_rule", f"{m},{n}", lambda: check_sum_rule(m, n))
    for entry in suites.values():
        entry["pass"] = not entry["failed"]
    return {"max_mn": max_mn, "pass": all(e["pass"] for e in suites.values()), "suites": suites}


def cmd_verify(a) -> Table:
    report = run_verify(a.max_mn)
    t = Table("verify", {"max_mn": a.max_mn, "precision_bits": a.precision_bits, "seed": a.seed,
                         "pass": report["pass"]},
              ["suite", "index", "pass"])
    for name, entry in report["suites"].items():
        failed = set(entry["failed"])
        for label in entry["checked"]:
            t.rows.append([name, label.replace(",", " "), str(label not in failed).lower()])
    t.report = report
    return t


COMMANDS = {"zeros": cmd_zeros, "boundary": cmd_boundary, "compare": cmd_compare,
            "phase": cmd_phase, "sigma": cmd_sigma, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    started = time.monotonic()
    try:
        table = COMMANDS[args.command](args)
    except P4Error as exc:
        print(f"p4hermite {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.command == "verify" and args.format == "json":
        text = json.dumps({"meta": table.meta, **table.report}, indent=1) + "\n"
    else:
        text = table.render(args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.out} ({time.monotonic() - started:.1f} s)", file=sys.stderr)
    if args.command == "verify" and not table.meta["pass"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
