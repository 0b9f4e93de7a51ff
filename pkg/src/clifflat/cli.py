"""Command-line front end: verification suites, solution builders, dispersion scans, symbolic checks.

Exit codes: 0 all pass-class checks passed, 1 a pass-class check failed,
2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import chebyshev as cb
from . import clifford as cl
from . import lattice as lf
from . import momentum as mo
from . import opcalc as oc
from . import suites

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
VOLATILE_KEY = "timing"  # excluded when comparing reports
KG_TOL = 1e-9
DIRAC_TOL = 1e-9


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    dim: int = 1
    h: float = 1.0
    mass: float = 0.0
    box: list[list[int]] = field(default_factory=list)
    seed: int = 0
    trials: int = 100
    tolerances: dict = field(default_factory=dict)
    semantics: str = "s1"
    mass_term: str = "k"
    convention: str = "static"
    outputs: dict = field(default_factory=dict)


# ---------------------------------------------------------------- parsing helpers

def parse_box(text: str | None, n: int, default: tuple[int, int] = (-4, 4)
              ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``lo:hi`` for every axis, or one ``lo:hi`` per axis separated by commas."""
    if text is None:
        return (default[0],) * n, (default[1],) * n
    parts = text.split(",")
    if len(parts) == 1:
        parts = parts * n
    if len(parts) != n:
        raise UsageError(f"--box needs 1 or {n} ranges, got {len(parts)}")
    lo, hi = [], []
    for p in parts:
        try:
            a, b = p.split(":")
            lo.append(int(a))
            hi.append(int(b))
        except ValueError:
            raise UsageError(f"bad box range {p!r}, expected lo:hi") from None
        if lo[-1] > hi[-1]:
            raise UsageError(f"empty box range {p!r}")
    return tuple(lo), tuple(hi)


def parse_amplitude(text: str | None, n: int) -> cl.Multivector:
    """``blade:value,...`` with blades as index strings (``12`` is e_1 e_2, ``0`` the scalar)."""
    sig = cl.cl0n(n)
    if text is None:
        return cl.Multivector.scalar(sig)
    out = cl.Multivector.zero(sig)
    for item in text.split(","):
        try:
            blade, value = item.split(":")
            coeff = complex(value)
        except ValueError:
            raise UsageError(f"bad amplitude entry {item!r}, expected blade:value") from None
        indices = [] if blade in ("", "0") else [int(c) for c in blade]
        if any(not 1 <= i <= n for i in indices) or len(set(indices)) != len(indices):
            raise UsageError(f"blade {blade!r} is not a product of distinct generators 1..{n}")
        out = out + cl.Multivector.blade(sig, *indices, coeff=coeff)
    return out


def parse_weights(text: str | None, n: int) -> tuple[float, ...] | None:
    if text is None:
        return None
    try:
        w = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad weights {text!r}") from None
    if len(w) != n:
        raise UsageError(f"--weights needs {n} values, got {len(w)}")
    return w


# ---------------------------------------------------------------- output

def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    atomic_write(path, buf.getvalue())


def field_csv(f: lf.Field, path: str | Path) -> None:
    header = [f"k{j}" for j in range(1, f.box.n + 1)] + ["blade_mask", "re", "im"]
    atomic_csv(path, header, f.csv_rows())


def _envelope(cfg: RunConfig, body: dict, started: float) -> dict:
    return {
        "schema": SCHEMA,
        "command": cfg.command,
        "config": asdict(cfg),
        "seed": cfg.seed,
        **body,
        VOLATILE_KEY: {
            "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
            "wall_seconds": round(time.perf_counter() - started, 3),
        },
    }


def _emit(report: dict, path: str | None) -> None:
    text = dumps_report(report)
    if path:
        atomic_write(path, text)


def _check_dim(dim: int) -> None:
    if dim < 1:
        raise UsageError(f"--dim must be >= 1, got {dim}")
    if dim > 6:
        raise UsageError(f"--dim above 6 is not supported, got {dim}")


def _check_h(h: float) -> None:
    if not h > 0:
        raise UsageError(f"--h must be positive, got {h}")


# ---------------------------------------------------------------- commands

def cmd_verify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    _check_dim(args.dim)
    _check_h(args.h)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    names = list(suites.SUITES) if args.suites is None else args.suites.split(",")
    unknown = [s for s in names if s not in suites.SUITES]
    if unknown:
        raise UsageError(f"unknown suites {unknown}; choose from {list(suites.SUITES)}")
    cfg = RunConfig("verify", dim=args.dim, h=args.h, seed=args.seed, trials=args.trials,
                    outputs={"report": args.report})
    scfg = suites.SuiteConfig(dim=args.dim, h=args.h, seed=args.seed, trials=args.trials)
    results = suites.run_suites(scfg, names, threads=suites.thread_count())
    counts = {suites.PASS: 0, suites.FAIL: 0, suites.REPORT_ONLY: 0}
    for checks in results.values():
        for c in checks:
            counts[c.status] += 1
            if c.status == suites.FAIL:
                print(f"FAIL {c.id}: residual {c.max_residual:.3e} >= {c.tolerance:.1e}")
    ok = suites.all_pass(results)
    body = {"suites": {k: [c.to_json() for c in v] for k, v in results.items()},
            "summary": {**counts, "all_pass": ok}}
    _emit(_envelope(cfg, body, started), args.report)
    print(f"verify: {counts['pass']} pass, {counts['fail']} fail, "
          f"{counts['report-only']} report-only")
    return EXIT_OK if ok else EXIT_FAIL


def _solve_common(args: argparse.Namespace, command: str) -> tuple[RunConfig, lf.LatticeBox]:
    _check_dim(args.dim)
    _check_h(args.h)
    if args.mass < 0:
        raise UsageError("--mass must be >= 0")
    lo, hi = parse_box(args.box, args.dim)
    box = lf.LatticeBox(args.dim, float(args.h), lo, hi)
    cfg = RunConfig(command, dim=args.dim, h=args.h, mass=args.mass,
                    box=[list(lo), list(hi)], seed=args.seed,
                    outputs={"out": args.out, "report": args.report})
    return cfg, box


def cmd_solve_kg(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    cfg, box = _solve_common(args, "solve-kg")
    cfg.tolerances = {"kg_residual": KG_TOL}
    try:
        sol = cb.build_kg_solution(args.dim, args.h, args.mass,
                                   parse_weights(args.weights, args.dim),
                                   parse_amplitude(args.amplitude, args.dim), box)
    except cb.ChebyshevError as exc:
        raise UsageError(str(exc)) from None
    residual = lf.kg_residual(sol.field, args.mass)[1]
    mean_value = lf.kg_mean_value_residual(sol.field, args.mass)[1]
    status = suites.PASS if residual < KG_TOL else suites.FAIL
    body = {"params": sol.params.to_json(), "box": box.to_json(),
            "kg_residual": residual, "kg_mean_value_residual": mean_value,
            "kg_constraint_defect": sol.params.kg_constraint_defect(), "status": status}
    if args.out:
        field_csv(sol.field, args.out)
    _emit(_envelope(cfg, body, started), args.report)
    print(f"solve-kg: interior residual {residual:.3e} ({status})")
    return EXIT_OK if status == suites.PASS else EXIT_FAIL


def _with_suffix(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{tag}{p.suffix or '.csv'}"))


def cmd_solve_dirac(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    cfg, box = _solve_common(args, "solve-dirac")
    cfg.semantics, cfg.mass_term, cfg.convention = args.semantics, args.mass_term, args.convention
    try:
        f_plus, f_minus, rep = cb.build_dirac_solutions(
            args.dim, args.h, args.mass, parse_amplitude(args.amplitude, args.dim), box,
            lf.Semantics(args.semantics), lf.MassTerm(args.mass_term),
            cb.Convention(args.convention), parse_weights(args.weights, args.dim))
    except (cb.ChebyshevError, lf.LatticeError) as exc:
        raise UsageError(str(exc)) from None
    form = rep["x_mass_form"]
    residual = max(*form["cross"], form["full"])
    asserted = args.mass_term == "k" and args.semantics == "s1"
    if asserted:
        cfg.tolerances = {"coupled": DIRAC_TOL}
        status = suites.PASS if residual < DIRAC_TOL else suites.FAIL
    else:
        status = suites.REPORT_ONLY
    if args.out:
        field_csv(f_plus.field, _with_suffix(args.out, "plus"))
        field_csv(f_minus.field, _with_suffix(args.out, "minus"))
    _emit(_envelope(cfg, {"solution": rep, "coupled_residual": residual, "status": status},
                    started), args.report)
    print(f"solve-dirac: coupled residual {residual:.3e} ({status})")
    return EXIT_FAIL if status == suites.FAIL else EXIT_OK


def cmd_dispersion(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    _check_dim(args.dim)
    _check_h(args.h)
    try:
        grid = mo.BrillouinGrid(args.dim, args.h, args.grid)
    except mo.MomentumError as exc:
        raise UsageError(str(exc)) from None
    cfg = RunConfig("dispersion", dim=args.dim, h=args.h, mass=args.mass,
                    outputs={"out": args.out, "report": args.report})
    body: dict = {"operator": args.operator, "grid": args.grid,
                  "symbol_note": "dh symbol second-block term uses the factor 2/h derived "
                                 "from D_h = (D- + D+)/2 + (h/2) dalembert; a bare sin^2 "
                                 "term does not reproduce the dispersion"}
    if args.zeros:
        try:
            scan = mo.zero_scan(grid, args.operator, args.mass)
        except mo.MomentumError as exc:
            raise UsageError(str(exc)) from None
        body["zeros"] = scan.to_json()
        print(f"dispersion: {scan.torus_count} torus zeros "
              f"({scan.closed_count} on the closed cube)")
    if args.out:
        header = [f"xi{j}" for j in range(1, args.dim + 1)] + ["magnitude"]
        atomic_csv(args.out, header, mo.dispersion_rows(grid, args.operator, args.mass))
    report = _envelope(cfg, body, started)
    if args.zeros and not args.report:
        sys.stdout.write(dumps_report(body["zeros"]))
    _emit(report, args.report)
    return EXIT_OK


OPCALC_CHECKS = ("leibniz", "nilpotent", "laplacian")


def cmd_opcalc(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    _check_dim(args.dim)
    cfg = RunConfig("opcalc", dim=args.dim, outputs={"report": args.report})
    checks = OPCALC_CHECKS if args.check == "all" else (args.check,)
    dirs = {"plus": (1,), "minus": (-1,), "both": (1, -1)}[args.sign]
    verdicts: list[oc.Verdict] = []
    for name in checks:
        if name == "laplacian":
            verdicts.append(oc.check_laplacian_factorization(args.dim))
        for d in dirs if name != "laplacian" else ():
            fn = oc.check_leibniz if name == "leibniz" else oc.check_nilpotent
            verdicts.append(fn(args.dim, d))
    ok = True
    for v in verdicts:
        print(f"{v.check} {v.variant} n={v.n}: {v.label}")
        if not v.equal:
            ok = False
            print(f"  lhs: {v.lhs.sexpr()}")
            print(f"  rhs: {v.rhs.sexpr()}")
    body = {"verdicts": [v.to_json() for v in verdicts], "all_pass": ok}
    _emit(_envelope(cfg, body, started), args.report)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors must exit 2, also for subparsers
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clifflat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, dim_default=1):
        sp.add_argument("--dim", type=int, default=dim_default)
        sp.add_argument("--h", type=float, default=1.0)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--report", help="write the JSON report here")

    v = sub.add_parser("verify", help="run the verification suites")
    common(v, dim_default=3)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--suites", help=f"comma list from {','.join(suites.SUITES)}")
    v.set_defaults(func=cmd_verify)

    for name, func in (("solve-kg", cmd_solve_kg), ("solve-dirac", cmd_solve_dirac)):
        s = sub.add_parser(name, help=f"build a Chebyshev {name[6:]} solution")
        common(s)
        s.add_argument("--mass", type=float, default=1.0)
        s.add_argument("--box", help="lo:hi for every axis or lo:hi,lo:hi,... per axis")
        s.add_argument("--weights", help="comma list summing to 1")
        s.add_argument("--amplitude", help="blade:value[,blade:value...], e.g. 0:1,12:0.5")
        s.add_argument("--out", help="CSV output path")
        if name == "solve-dirac":
            s.add_argument("--convention", choices=[c.value for c in cb.Convention],
                           default="static")
            s.add_argument("--mass-term", choices=[m.value for m in lf.MassTerm], default="k")
            s.add_argument("--semantics", choices=[m.value for m in lf.Semantics], default="s1")
        s.set_defaults(func=func)

    d = sub.add_parser("dispersion", help="symbol magnitudes and zero scans")
    common(d)
    d.add_argument("--grid", type=int, default=64)
    d.add_argument("--operator", choices=[k.value for k in mo.SymbolKind], default="dh")
    d.add_argument("--mass", type=float, default=0.0)
    d.add_argument("--out", help="CSV output path")
    d.add_argument("--zeros", action="store_true", help="emit the zero report")
    d.set_defaults(func=cmd_dispersion)

    o = sub.add_parser("opcalc", help="symbolic identity checks")
    common(o)
    o.add_argument("--check", choices=OPCALC_CHECKS + ("all",), default="all")
    o.add_argument("--sign", choices=("plus", "minus", "both"), default="both")
    o.set_defaults(func=cmd_opcalc)
    return p


def _glue_values(argv: Sequence[str]) -> list[str]:
    """Attach values such as ``-4:4`` to their flag so argparse does not read them as options."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--box", "--weights", "--amplitude"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"clifflat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"clifflat: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
