"""Command-line experiment harness.

Configuration is one JSON document; command-line flags override its fields
(flag > config > default). Example::

    {
      "model_path": "model.json",          # or "model": {...}, or omit for the reference model
      "w": 2.0,
      "scheme": {"family": "uniform", "sigma": 0.1, "rule": "constant", "seed": 0},
      "t": [0.3, 0.7], "N": [8, 16, 32],
      "p": 2.0, "trials": 0, "seed": 0,
      "out": null, "format": "csv"
    }

``scheme.sigma`` may also be a power law ``{"scale": c, "exponent": beta}``
meaning ``sigma(N) = c * N**-beta``. Exit codes: 0 ok, 1 validation error,
2 verification failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from . import verify as verify_suites
from .bounds import BoundReport, HoelderPair, bound_report, find_n0
from .errors import NumericalError, ValidationError
from .kernels import SamplingGrid
from .sampling import AveragingScheme
from .simulate import evaluate, factorize, monte_carlo_mse, sample_path
from .spectral import ProcessModel, load_model, model_from_dict, reference_model

log = logging.getLogger("avgsample")

CSV_FIELDS = ("t", "N", "w", "sigma", "p", "exact_mse", "mc_mse", "mc_se", "thm2", "lemma1",
              "thm3", "remark3", "ratio_thm3", "n0_flag")

EXIT_OK, EXIT_VALIDATION, EXIT_SUITE, EXIT_NUMERICAL = 0, 1, 2, 3


@dataclass
class SchemeSpec:
    family: str = "point"
    sigma: Callable[[int], float] = field(default=lambda N: 0.0)
    rule: str = "constant"
    seed: int = 0

    def at(self, N: int) -> AveragingScheme:
        return AveragingScheme(self.family, self.sigma(N), rule=self.rule, seed=self.seed)


@dataclass
class ExperimentConfig:
    model: ProcessModel
    grid: SamplingGrid
    scheme: SchemeSpec
    ts: List[float]
    Ns: List[int]
    pair: HoelderPair
    trials: int = 0
    seed: int = 0
    out: Optional[str] = None
    format: str = "csv"


def _require(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ValidationError(f"config.{path}: {msg}")


def _real_list(value, path: str) -> List[float]:
    values = value if isinstance(value, list) else [value]
    _require(all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
                 for v in values), path, "expected finite real number(s)")
    return [float(v) for v in values]


def _parse_sigma(value, family: str) -> Callable[[int], float]:
    if family == "point":
        _require(value in (None, 0, 0.0), "scheme.sigma", "point family requires sigma = 0")
        return lambda N: 0.0
    if isinstance(value, dict):
        _require(set(value) <= {"scale", "exponent"}, "scheme.sigma", "power law takes scale, exponent")
        c = float(value.get("scale", 1.0))
        beta = float(value.get("exponent", 0.0))
        _require(c > 0, "scheme.sigma.scale", "must be > 0")
        return lambda N, c=c, beta=beta: c * float(N) ** -beta
    _require(isinstance(value, (int, float)) and value > 0, "scheme.sigma", "must be a positive number")
    sigma = float(value)
    return lambda N: sigma


def build_config(doc: dict, base_dir: Path = Path("."), overrides: Optional[dict] = None) -> ExperimentConfig:
    doc = {**doc, **{k: v for k, v in (overrides or {}).items() if v is not None}}
    if "model" in doc and "model_path" in doc:
        raise ValidationError("config: give either model or model_path, not both")
    if "model" in doc:
        _require(isinstance(doc["model"], dict), "model", "expected an object")
        model = model_from_dict(doc["model"])
    elif "model_path" in doc:
        model = load_model(base_dir / doc["model_path"])
    else:
        model = reference_model(int(doc.get("reference_seed", 2011)))

    w = doc.get("w", 2.0)
    _require(isinstance(w, (int, float)) and w > 0, "w", "must be a positive number")
    grid = SamplingGrid(float(w))
    _require(grid.w > model.gamma, "w", f"must exceed the model's exponential type {model.gamma}")

    sdoc = doc.get("scheme", {})
    _require(isinstance(sdoc, dict), "scheme", "expected an object")
    family = sdoc.get("family", "point")
    _require(family in ("point", "uniform", "triangular"), "scheme.family", f"unknown family {family!r}")
    rule = sdoc.get("rule", "constant")
    _require(rule in ("constant", "random"), "scheme.rule", f"unknown rule {rule!r}")
    scheme = SchemeSpec(family, _parse_sigma(sdoc.get("sigma"), family), rule, int(sdoc.get("seed", 0)))

    ts = _real_list(doc.get("t", [0.3]), "t")
    Ns = doc.get("N", [8, 16, 32, 64, 128, 256, 512])
    Ns = Ns if isinstance(Ns, list) else [Ns]
    _require(all(isinstance(N, int) and not isinstance(N, bool) and N >= 1 for N in Ns), "N",
             "all N must be integers >= 1")
    for N in Ns:
        try:
            scheme.at(N).check_grid(grid)
        except ValidationError as exc:
            raise ValidationError(f"config.scheme.sigma: {exc}") from None

    p = doc.get("p", 2.0)
    _require(isinstance(p, (int, float)) and p > 1, "p", "Hoelder exponent must be > 1")
    trials = doc.get("trials", 0)
    _require(isinstance(trials, int) and trials >= 0, "trials", "must be an integer >= 0")
    seed = doc.get("seed", 0)
    _require(isinstance(seed, int) and 0 <= seed < 2**64, "seed", "must be an unsigned 64-bit integer")
    fmt = doc.get("format", "csv")
    _require(fmt in ("csv", "json"), "format", "must be csv or json")
    return ExperimentConfig(model, grid, scheme, ts, sorted(Ns), HoelderPair(float(p)),
                            trials, seed, doc.get("out"), fmt)


def cmd_bounds(config: ExperimentConfig, with_mc: bool = False, workers: int = 1):
    """One :class:`BoundReport` per ``(t, N)`` plus its ``n0_flag``, ordered by ``(t, N)``.

    Cells are independent; with ``workers > 1`` they run on a thread pool and
    are re-assembled in ``(t, N)`` order.
    """
    cells = [(t, N) for t in sorted(config.ts) for N in config.Ns]

    def run(cell):
        t, N = cell
        scheme = config.scheme.at(N)
        mc = None
        if with_mc:
            mc = monte_carlo_mse(config.model, scheme, config.grid, t, N, config.trials, config.seed)
        return bound_report(config.model, scheme, config.grid, t, N, config.pair, mc)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(run, cells))
    else:
        reports = [run(c) for c in cells]
    rows = []
    k = len(config.Ns)
    for i in range(0, len(reports), k):
        block = reports[i:i + k]
        n0 = find_n0(config.Ns, [r.dominated for r in block])
        rows.extend((r, None if n0 is None else int(r.N >= n0)) for r in block)
    return rows


def cmd_mse(config: ExperimentConfig):
    if config.trials < 2:
        raise ValidationError("config.trials: mse needs at least 2 Monte Carlo trials")
    return cmd_bounds(config, with_mc=True)


def cmd_verify(config: ExperimentConfig) -> dict:
    return verify_suites.run_all(config.model, config.grid, config.seed, trials=config.trials)


def cmd_simulate(config: ExperimentConfig):
    real = sample_path(config.model, factorize(config.model.measure), config.seed)
    ts = np.asarray(sorted(config.ts))
    return list(zip(ts.tolist(), np.atleast_1d(evaluate(real, ts)).tolist()))


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value)) if isinstance(value, float) else str(value)


def report_record(report: BoundReport, n0_flag: Optional[int]) -> dict:
    return {
        "t": report.t, "N": report.N, "w": report.w, "sigma": report.sigma, "p": report.p,
        "exact_mse": report.exact, "mc_mse": report.mc, "mc_se": report.mc_se,
        "thm2": report.thm2, "lemma1": report.lemma1, "thm3": report.thm3,
        "remark3": report.remark3, "ratio_thm3": report.ratios["exact/thm3"], "n0_flag": n0_flag,
    }


def render_rows(rows, fmt: str) -> str:
    records = [report_record(r, flag) for r, flag in rows]
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        writer.writerow([_fmt(rec[k]) for k in CSV_FIELDS])
    return buf.getvalue()


def render_path(samples, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{"t": t, "re": z.real, "im": z.imag} for t, z in samples], indent=2) + "\n"
    lines = ["t,re,im"] + [f"{t!r},{z.real!r},{z.imag!r}" for t, z in samples]
    return "\n".join(lines) + "\n"


def render_findings(findings: dict) -> str:
    return json.dumps(findings, indent=2, sort_keys=True) + "\n"


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avgsample", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("bounds", "tabulate bounds against exact errors"),
                        ("mse", "bounds plus Monte Carlo error estimates"),
                        ("verify", "run every verification suite"),
                        ("simulate", "dump one realization as t,re,im")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path)
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--trials", type=int)
        p.add_argument("--p", type=float)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc, base = {}, Path(".")
        if args.config is not None:
            try:
                doc = json.loads(args.config.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read config {args.config}: {exc}") from None
            if not isinstance(doc, dict):
                raise ValidationError("config: top level must be a JSON object")
            base = args.config.parent
        overrides = {"seed": args.seed, "trials": args.trials, "p": args.p,
                     "format": args.format, "out": None if args.out is None else str(args.out)}
        if args.command == "verify":
            overrides["format"] = "json"
        config = build_config(doc, base, overrides)

        status = EXIT_OK
        if args.command in ("bounds", "mse"):
            rows = cmd_bounds(config) if args.command == "bounds" else cmd_mse(config)
            text = render_rows(rows, config.format)
        elif args.command == "simulate":
            text = render_path(cmd_simulate(config), config.format)
        else:
            findings = cmd_verify(config)
            text = render_findings(findings)
            if not findings["passed"]:
                failed = [s["name"] for s in findings["suites"] if not s["passed"]]
                log.error("verification failed: %s", ", ".join(failed))
                status = EXIT_SUITE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if config.out is None:
        sys.stdout.write(text)
    else:
        Path(config.out).write_text(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
