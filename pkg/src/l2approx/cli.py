"""Command-line front end.

    l2approx validate    --input circle
    l2approx betti       --input wedge --j 1 --bc both --m 2:1024:x2
    l2approx density     --input circle --j 0 --m 16,32,64 --lambdas linspace:0:4:41
    l2approx determinant --input torus --j 0 --m 2,4,8

``--input`` takes a path or the name of a bundled fixture.  Exit codes: 0 on
success, 1 when a checked inequality fails, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import FIXTURES, fixture_path
from .analysis import (
    ConvergenceReport,
    DetClassReport,
    Study,
    betti_convergence,
    det_class_report,
    sandwich_check,
)
from .cellcomplex import PeriodicComplex, load_file
from .config import Tolerances
from .folner import FolnerBox, build_piece, collar_count
from .laurent import evaluate_many

COMMANDS = ("validate", "betti", "density", "determinant")
SCHEMA_PATH = Path(__file__).parent / "schemas" / "summary.schema.json"


class UsageError(ValueError):
    pass


# --- argument parsing --------------------------------------------------------

def _int_items(text: str) -> list[int]:
    """``1,2,5``, inclusive ranges ``2-6``, and geometric ranges ``lo:hi:xF``."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            parts = item.split(":")
            if len(parts) != 3 or not parts[2].startswith("x"):
                raise UsageError(f"geometric range must look like lo:hi:xF, got {item!r}")
            lo, hi, factor = int(parts[0]), int(parts[1]), int(parts[2][1:])
            if lo < 1 or factor < 2:
                raise UsageError(f"bad geometric range {item!r}")
            v = lo
            while v <= hi:
                out.append(v)
                v *= factor
        elif "-" in item[1:]:
            lo, hi = item.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(item))
    return out


def parse_m_list(text: str) -> tuple[int, ...]:
    try:
        ms = _int_items(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not ms:
        raise UsageError("--m list is empty")
    if ms[0] < 1 or any(b <= a for a, b in zip(ms, ms[1:])):
        raise UsageError(f"--m must be positive and strictly increasing, got {ms}")
    return tuple(ms)


def parse_lambdas(text: str) -> tuple[float, ...]:
    try:
        if text.startswith(("logspace:", "linspace:")):
            kind, a, b, n = text.split(":")
            a, b, n = float(a), float(b), int(n)
            if n < 1:
                raise UsageError("grid needs at least one point")
            if kind == "logspace":
                if a <= 0 or b <= 0:
                    raise UsageError("logspace endpoints must be positive")
                vals = np.geomspace(a, b, n)
            else:
                vals = np.linspace(a, b, n)
        else:
            vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse --lambdas {text!r}: {exc}") from exc
    vals = tuple(float(v) for v in vals)
    if not vals or any(v < 0 or not math.isfinite(v) for v in vals):
        raise UsageError("--lambdas must be nonempty, finite and nonnegative")
    return vals


def parse_tol(items: list[str]) -> Tolerances:
    tol = Tolerances()
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            tol = tol.override(**{name.strip(): value})
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    return tol


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str
    j: tuple[int, ...] | None = None
    bc: tuple[str, ...] = ("absolute",)
    m_list: tuple[int, ...] = (2, 4, 8, 16, 32)
    lambdas: tuple[float, ...] = (0.0, 0.1, 0.5, 1.0, 2.0)
    oracle_grid: int | None = None
    out: Path | None = None
    seed: int = 0
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if any(b <= a for a, b in zip(self.m_list, self.m_list[1:])):
            raise UsageError("m_list must be strictly increasing")
        if self.oracle_grid is not None and (self.oracle_grid < 2 or self.oracle_grid % 2):
            raise UsageError(f"--oracle-grid must be even and >= 2, got {self.oracle_grid}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help=f"document path or fixture name {FIXTURES}")
    common.add_argument("--j", help="degrees, e.g. 0, 0-2 or 0,2 (default: all)")
    common.add_argument("--bc", choices=("absolute", "relative", "both"), default="absolute")
    common.add_argument("--m", default="2,4,8,16,32", help="box sizes: list, a-b, or lo:hi:xF")
    common.add_argument("--lambdas", default="0,0.1,0.5,1,2", help="LIST, logspace:a:b:n or linspace:a:b:n")
    common.add_argument("--oracle-grid", type=int, help="torus grid points per axis (even)")
    common.add_argument("--out", type=Path, help="output directory for CSV/JSON files")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized self-checks")
    parser = argparse.ArgumentParser(prog="l2approx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _resolve_input(text: str) -> Path:
    if text in FIXTURES and not Path(text).exists():
        return fixture_path(text)
    return Path(text)


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        input=ns.input,
        j=None if ns.j is None else tuple(_int_items(ns.j)),
        bc=("absolute", "relative") if ns.bc == "both" else (ns.bc,),
        m_list=parse_m_list(ns.m),
        lambdas=parse_lambdas(ns.lambdas),
        oracle_grid=ns.oracle_grid,
        out=ns.out,
        seed=ns.seed,
        tol=parse_tol(ns.tol),
    )


# --- output ------------------------------------------------------------------

def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def write_csv(path: Path, columns, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in columns])


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, Path):
        return v.as_posix()
    return v


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _summary(cfg: RunConfig, cx: PeriodicComplex, results: list[dict], verdict: str) -> dict:
    return {
        "command": cfg.command,
        "complex": {"name": cx.name, "deck_rank": cx.d, "dims": cx.dims()},
        "config": {"j": list(cfg.j or ()), "bc": list(cfg.bc), "m_list": list(cfg.m_list),
                   "lambdas": list(cfg.lambdas), "oracle_grid": cfg.oracle_grid,
                   "seed": cfg.seed, "tolerances": vars(cfg.tol)},
        "results": results,
        "verdict": verdict,
    }


# --- commands ----------------------------------------------------------------

def cmd_validate(cfg: RunConfig, cx: PeriodicComplex, study: Study) -> int:
    fam = study.family
    dims = ",".join(str(n) for n in cx.dims())
    print(f"dims: [{dims}]; K_0²={fam.K2[0]}; chain complex OK")
    for j in range(cx.top_dim + 1):
        print(f"  j={j}: cells={cx.count(j)} C_j={fam.C[j]} b_j={fam.b[j]} "
              f"K_j²={fam.K2[j]} (cancelled row sum {fam.K2_rowsum[j]}, C_j*b_j={fam.local_bound(j)})")
    for w in cx.warnings:
        print(f"  warning: {w}")
    # randomized spot check of the symbol: Hermitian, PSD and bounded by K_j^2
    rng = np.random.default_rng(cfg.seed)
    thetas = rng.random((64, cx.d))
    ok = True
    for j in range(cx.top_dim + 1):
        if not cx.count(j):
            continue
        mats = evaluate_many(fam.delta[j], thetas)
        herm = np.allclose(mats, np.conj(np.swapaxes(mats, 1, 2)))
        eig = np.linalg.eigvalsh(mats)
        good = herm and eig.min() >= -cfg.tol.tol_psd and eig.max() <= fam.K2[j] + 1e-9
        ok &= bool(good)
        print(f"  symbol check j={j}: {'OK' if good else 'FAIL'} (max eigenvalue {eig.max():.6g})")
    piece = build_piece(cx, FolnerBox(cfg.m_list[0], cx.d))
    print(f"  m={piece.m}: cells per dim {[piece.count(j) for j in range(cx.top_dim + 1)]}, "
          f"boundary {len(piece.boundary)}, Ndot_0={collar_count(piece, 0)}")
    return 0 if ok else 1


def _degrees(cfg: RunConfig, cx: PeriodicComplex) -> tuple[int, ...]:
    if cfg.j is None:
        return tuple(range(cx.top_dim + 1))
    if not cfg.j or min(cfg.j) < 0 or max(cfg.j) > cx.top_dim:
        raise UsageError(f"--j must select degrees within 0..{cx.top_dim}")
    return tuple(sorted(set(cfg.j)))


def cmd_betti(cfg: RunConfig, cx: PeriodicComplex, study: Study) -> int:
    results = []
    for j in _degrees(cfg, cx):
        for bc in cfg.bc:
            rep: ConvergenceReport = betti_convergence(study, j, bc, cfg.m_list, cfg.oracle_grid)
            if cfg.out:
                write_csv(cfg.out / f"betti_j{j}_{bc}.csv", ConvergenceReport.COLUMNS, rep.rows)
            last = rep.rows[-1]
            print(f"j={j} {bc}: F_m(0)={fmt(last['F_m_0'])} at m={last['m']}, "
                  f"oracle {fmt(rep.b2_oracle)} ± {fmt(rep.b2_error)}, "
                  f"residual {fmt(rep.final_residual)} -> {rep.verdict}")
            results.append({"j": j, "bc": bc, "final_m": last["m"], "final_F_m_0": last["F_m_0"],
                            "b2_oracle": rep.b2_oracle, "b2_error": rep.b2_error,
                            "final_residual": rep.final_residual, "tolerance": rep.tolerance,
                            "verdict": rep.verdict})
    verdict = "PASS" if all(r["verdict"] == "PASS" for r in results) else "FAIL"
    if cfg.out:
        write_json(cfg.out / "betti_summary.json", _summary(cfg, cx, results, verdict))
    return 0 if verdict == "PASS" else 1


def cmd_density(cfg: RunConfig, cx: PeriodicComplex, study: Study) -> int:
    results = []
    for j in _degrees(cfg, cx):
        dens = study.density(j, cfg.oracle_grid)
        for bc in cfg.bc:
            columns = ["lambda", *[f"F_m{m}" for m in cfg.m_list], "F_oracle", "F_oracle_error",
                       *[f"g_m{m}" for m in cfg.m_list]]
            rows = []
            for lam in cfg.lambdas:
                row = {"lambda": lam, "F_oracle": dens.F(lam), "F_oracle_error": float(dens.F_error(lam))}
                for m in cfg.m_list:
                    s = study.summary(j, m, bc)
                    row[f"F_m{m}"] = s.F(lam)
                    row[f"g_m{m}"] = (s.E(lam) - s.E(0.0)) / s.N
                rows.append(row)
            if cfg.out:
                write_csv(cfg.out / f"density_j{j}_{bc}.csv", columns, rows)
            window = cfg.m_list[-cfg.tol.window:]
            sandwich = sandwich_check(study, j, cfg.lambdas, window,
                                      oracle_grid=cfg.oracle_grid, bc=bc)
            print(f"j={j} {bc}: {len(rows)} lambda values, m={list(cfg.m_list)}, "
                  f"oracle b2={fmt(dens.betti)}; sandwich over m={list(window)}: "
                  f"{'OK' if sandwich.ok else 'violated'}")
            results.append({"j": j, "bc": bc, "oracle_grid": dens.grid_size,
                            "oracle_offset": dens.offset, "b2_oracle": dens.betti,
                            "sandwich_window": list(window), "sandwich_ok": sandwich.ok,
                            "sandwich_violations": len(sandwich.violations), "verdict": "PASS"})
    if cfg.out:
        write_json(cfg.out / "density_summary.json", _summary(cfg, cx, results, "PASS"))
    return 0


def cmd_determinant(cfg: RunConfig, cx: PeriodicComplex, study: Study) -> int:
    results = []
    for j in _degrees(cfg, cx):
        for bc in cfg.bc:
            rep: DetClassReport = det_class_report(study, j, bc, cfg.m_list, cfg.oracle_grid)
            if cfg.out:
                write_csv(cfg.out / f"determinant_j{j}_{bc}.csv", DetClassReport.COLUMNS, rep.rows)
            for r in rep.rows:
                det = f" det'={r['det_prime']}" if r["det_prime"] != "" else ""
                print(f"j={j} {bc} m={r['m']}: log det'/N={r['log_det_prime_normalized']:.6g}{det} "
                      f"I_m={r['I_m']:.6g} slack={r['functional_slack']:.3g}")
            print(f"j={j} {bc}: oracle log det'_pi={rep.oracle_log_det:.6g} ± {rep.oracle_log_det_error:.2g}, "
                  f"I={rep.oracle_I:.6g} (cutoff {rep.oracle_cutoff:.3g}) -> {rep.verdict}")
            results.append({"j": j, "bc": bc, "K2": rep.K2, "oracle_log_det": rep.oracle_log_det,
                            "oracle_log_det_error": rep.oracle_log_det_error,
                            "oracle_I": rep.oracle_I, "oracle_cutoff": rep.oracle_cutoff,
                            "liminf_window": rep.liminf_window,
                            "liminf_slack": rep.liminf_slack, "checks": rep.checks,
                            "verdict": rep.verdict})
    verdict = "PASS" if all(r["verdict"] == "PASS" for r in results) else "FAIL"
    if cfg.out:
        write_json(cfg.out / "determinant_summary.json", _summary(cfg, cx, results, verdict))
    return 0 if verdict == "PASS" else 1


HANDLERS = {"validate": cmd_validate, "betti": cmd_betti, "density": cmd_density,
            "determinant": cmd_determinant}


def run(cfg: RunConfig) -> int:
    path = _resolve_input(cfg.input)
    cx = load_file(path)
    return HANDLERS[cfg.command](cfg, cx, Study(cx, cfg.tol))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, ArithmeticError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
