"""Command-line front end: ``gliders --config PATH [--seed U64] [--workers N] [--out DIR]``."""
from __future__ import annotations

import argparse
import csv
import io
import logging
import subprocess
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .ca import render_ascii, simulate, write_pgm
from .config import ConfigError, ExperimentConfig, parse_config
from .entrytime import run_cdf_experiment
from .factors import commutation_check, lifted_cdf_experiment, project_rows
from .measures import estimate_asymptotic_variance, sample_window
from .oracle import (IncrementSpec, MinimaComparisonParams, oracle_csv,
                     simulate_minima_comparison)

log = logging.getLogger("gliders")


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--tags", "--always", "--dirty"], cwd=here,
                             capture_output=True, text=True, timeout=5)
    except (OSError, subprocess.SubprocessError):
        return f"v{__version__}"
    desc = out.stdout.strip()
    if out.returncode != 0 or not desc:
        return f"v{__version__}"
    return desc if desc.startswith("v") else f"v{__version__}-g{desc}"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    log.info("wrote %s", path)


def _horizon(cfg):
    return None if cfg["horizon"] == "auto" else cfg["horizon"]


def _report_cdf(cdf) -> None:
    for x, e, t, s in zip(cdf.xs, cdf.estimates, cdf.theoretical, cdf.standard_errors):
        print(f"x={x:g} empirical={e:.4f} theoretical={t:.4f} |diff|={abs(e - t):.4f} stderr={s:.4f}")


def _run_simulate(cfg: ExperimentConfig, out: Path) -> None:
    fac = cfg.factor()
    local = fac.source_rule if fac is not None else cfg.rule().local_rule()
    r, steps, width = local.radius, cfg["steps"], cfg["width"]
    window = sample_window(cfg.sampler(), -r * steps, width - 1 + r * steps, cfg["trial"])
    diagram = [row.restrict(0, width - 1) for row in simulate(window, local, steps)]
    path = out / cfg["pgm"]
    try:
        write_pgm(path, diagram)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    log.info("wrote %s", path)
    _write(out / cfg["ascii"], render_ascii(diagram))
    print(f"simulated {steps} steps on {width} cells -> {path}")


def _run_entrytime(cfg: ExperimentConfig, out: Path) -> None:
    cdf = run_cdf_experiment(cfg.sampler(), cfg.rule(), cfg["n"], cfg["xs"], cfg["trials"],
                             cfg["side"], cfg["workers"], horizon=_horizon(cfg))
    _write(out / cfg["csv"], cdf.to_csv())
    _report_cdf(cdf)


def _run_factor_entrytime(cfg: ExperimentConfig, out: Path) -> None:
    cdf = lifted_cdf_experiment(cfg.factor(), cfg.sampler(), cfg["n"], cfg["xs"], cfg["trials"],
                                cfg["side"], cfg["workers"], horizon=_horizon(cfg))
    _write(out / cfg["csv"], cdf.to_csv())
    _report_cdf(cdf)


def _run_factor_check(cfg: ExperimentConfig, out: Path) -> bool:
    fac = cfg.factor()
    reports = []
    if cfg["exhaustive_width"]:
        reports.append(("exhaustive", cfg["exhaustive_width"],
                        commutation_check(fac, width=cfg["exhaustive_width"], exhaustive=True)))
    if cfg["samples"]:
        rng = np.random.default_rng(cfg["seed"])
        reports.append(("random", cfg["width"],
                        commutation_check(fac, cfg["samples"], cfg["width"], rng)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["factor_name", "mode", "width", "checked", "passed", "counterexample"])
    ok = True
    for mode, width, rep in reports:
        ce = "" if rep.counterexample is None else "".join(map(str, rep.counterexample.cells))
        w.writerow([fac.name, mode, width, rep.checked, str(rep.passed).lower(), ce])
        print(f"{fac.name} {mode} width={width} checked={rep.checked} passed={rep.passed}")
        ok &= rep.passed
    _write(out / cfg["csv"], buf.getvalue())
    return ok


def _run_oracle(cfg: ExperimentConfig, out: Path) -> None:
    inc = IncrementSpec.fair() if cfg["increment"] == "fair" else IncrementSpec.three_point(cfg["p"])
    results = []
    for y, z in zip(cfg["y"], cfg["z"]):
        res = simulate_minima_comparison(MinimaComparisonParams(y, z, cfg["epsilon"]),
                                         cfg["walk_steps"], cfg["trials"], cfg["seed"], inc,
                                         cfg["workers"])
        results.append(res)
        print(f"y={y:g} z={z:g} eps={cfg['epsilon']:g} empirical={res.empirical:.4f} "
              f"closed_form={res.closed_form:.4f} |diff|={abs(res.empirical - res.closed_form):.4f}")
    _write(out / cfg["csv"], oracle_csv(results))


def _run_mix(cfg: ExperimentConfig, out: Path) -> None:
    fac = cfg.factor()
    projection = None
    if fac is not None:
        projection = lambda states: project_rows(states[None, :], fac.sft)[0]
    d = estimate_asymptotic_variance(cfg.sampler(), cfg["sample_length"], cfg["lag"],
                                     projection, cfg["trial"])
    header = ["mean", "asymptotic_variance", "standard_variance", "long_run_variance",
              "marginal_variance", "mean_stderr", "lag", "sample_length", "verdict"]
    f = lambda v: format(float(v), ".6g")
    row = [f(d.mean_estimate), f(d.asymptotic_variance_estimate), f(d.standard_variance_estimate),
           f(d.long_run_variance), f(d.marginal_variance), f(d.mean_stderr), str(d.lag_used),
           str(d.sample_length), d.verdict]
    _write(out / cfg["csv"], ",".join(header) + "\n" + ",".join(row) + "\n")
    print(f"mean={d.mean_estimate:.4g} long_run_variance={d.long_run_variance:.4g} verdict={d.verdict}")


RUNNERS = {
    "simulate": _run_simulate,
    "entrytime": _run_entrytime,
    "factor-entrytime": _run_factor_entrytime,
    "factor-check": _run_factor_check,
    "oracle": _run_oracle,
    "mix-diagnose": _run_mix,
}


def run(cfg: ExperimentConfig, out: Path | str = ".") -> int:
    """Execute one config; returns the process exit status."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    log.info("command=%s config_digest=%s version=%s workers=%d",
             cfg.command, cfg.digest(), version_string(), cfg["workers"])
    result = RUNNERS[cfg.command](cfg, out)
    log.info("wall_time=%.3fs", time.perf_counter() - start)
    return 1 if result is False else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gliders", description="Gliders automata experiments.")
    p.add_argument("--config", required=True, type=Path, help="experiment config file")
    p.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
    p.add_argument("--workers", type=int, help="worker threads (output does not depend on it)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        log.error("cannot read %s: %s", args.config, exc.strerror or exc)
        return 2
    try:
        cfg = parse_config(text).with_overrides(seed=args.seed, workers=args.workers)
        return run(cfg, args.out)
    except ConfigError as exc:
        log.error("%s: %s", args.config, exc)
        return 2
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
