"""Experiment runners, result tables and the verification harness.

Every sweep is a list of independent per-point tasks.  Tasks may run on a
thread pool, but results are merged by task index, so the emitted tables do
not depend on the worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .config import ExperimentConfig, from_dict
from .dimension import AnalyticLebesgue, EmpiricalSample, inequality_check, pointwise_dimension_fit
from .errors import CapacityError, InsufficientDataError, UsageError
from .mixing import FourierMode, decay_classify, decay_profile
from .recurrence import RadiusGrid, long_fly_check, recurrence_rate_fit, return_curve
from .stats import bootstrap_ci
from .symbolic import GridPartition, build_partition, entropy_from_rows, repetition_times
from .systems import ToralAutomorphism, analytic_invariants, validate_toral_matrix
from .torus import TorusPoint, random_lattice

EXIT_OK, EXIT_PREDICTION, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3
NOT_APPLICABLE = "hypotheses violated — theorem not applicable"


# ---------------------------------------------------------------- tables

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return ""
        return repr(v)
    return str(v)


@dataclass
class ResultTable:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def digest(self) -> str:
        return hashlib.sha256(self.to_csv().encode("utf-8")).hexdigest()

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


@dataclass
class RunResult:
    kind: str
    config: ExperimentConfig
    tables: dict[str, ResultTable]
    summary: dict[str, Any]
    gnuplot: dict[str, np.ndarray] = field(default_factory=dict)
    exit_code: int = EXIT_OK
    wall_time: float = 0.0


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None if math.isnan(v) else str(v)
    return obj


def write_outputs(result: RunResult, out_dir: str | Path) -> Path:
    """Write ``<kind>_<table>.csv`` files, optional ``.dat`` files and ``<kind>.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = {}
    for name, table in result.tables.items():
        fname = f"{name}.csv" if name == result.kind else f"{result.kind}_{name}.csv"
        text = table.to_csv()
        (out / fname).write_bytes(text.encode("utf-8"))
        entries[name] = {"file": fname, "rows": len(table.rows), "columns": list(table.columns),
                         "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()}
    if result.config.gnuplot:
        for name, data in result.gnuplot.items():
            lines = [f"{x!r} {y!r}" for x, y in np.asarray(data, dtype=float).tolist()]
            (out / f"{result.kind}_{name}.dat").write_text("\n".join(lines) + "\n", encoding="utf-8")
    doc = {
        "kind": result.kind,
        "version": __version__,
        "seed": result.config.seed,
        "config": result.config.to_dict(),
        "config_hash": result.config.digest(),
        "wall_time": result.wall_time,
        "exit_code": result.exit_code,
        "tables": entries,
        "summary": result.summary,
    }
    path = out / f"{result.kind}.json"
    path.write_text(json.dumps(_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n",
                    encoding="utf-8")
    return path


def check_outputs(summary_path: str | Path) -> list[str]:
    """Recompute the config hash and table digests recorded in a summary; return the mismatches."""
    path = Path(summary_path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    problems = []
    try:
        cfg = from_dict(doc["config"])
        if cfg.digest() != doc["config_hash"]:
            problems.append("config hash does not match the embedded config")
    except (UsageError, KeyError, TypeError) as exc:
        problems.append(f"embedded config is invalid: {exc}")
    for name, entry in doc.get("tables", {}).items():
        f = path.parent / entry["file"]
        if not f.exists():
            problems.append(f"missing table {entry['file']}")
            continue
        data = f.read_bytes()
        if hashlib.sha256(data).hexdigest() != entry["sha256"]:
            problems.append(f"table {entry['file']} was modified")
        n_rows = len(list(csv.reader(io.StringIO(data.decode("utf-8"))))) - 1
        if n_rows != entry["rows"]:
            problems.append(f"table {entry['file']} has {n_rows} rows, summary says {entry['rows']}")
    return problems


# ---------------------------------------------------------------- scheduling

@dataclass(frozen=True)
class Failure:
    kind: str  # insufficient | capacity
    message: str
    partial: Any = None


def _guarded(fn: Callable) -> Callable:
    def run(item):
        try:
            return fn(item)
        except InsufficientDataError as exc:
            return Failure("insufficient", str(exc))
        except CapacityError as exc:
            return Failure("capacity", str(exc), exc.partial)
    return run


def parallel_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """``[fn(x) for x in items]`` on a thread pool; results are keyed by position."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    results: dict[int, Any] = {}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(fn, x): i for i, x in enumerate(items)}
        for fut, i in futures.items():
            results[i] = fut.result()
    return [results[i] for i in range(len(items))]


def sample_points(seed: int, n: int, k: int) -> list[TorusPoint]:
    """The first ``n`` base points of the master stream; prefixes agree across ``n``."""
    rng = np.random.default_rng(seed)
    return [TorusPoint.random(rng, k) for _ in range(n)]


def _points_table(points: Sequence[TorusPoint]) -> ResultTable:
    k = points[0].k if points else 1
    cols = ("point_index",) + tuple(f"u{c + 1}" for c in range(k)) + tuple(f"x{c + 1}" for c in range(k))
    rows = [(i, *[int(v) for v in p.coords], *[float(v) for v in p.to_real()]) for i, p in enumerate(points)]
    return ResultTable("points", cols, rows)


def _mean(values) -> float | None:
    return math.fsum(values) / len(values) if values else None


def _median(values) -> float | None:
    values = [v for v in values if v is not None and math.isfinite(v)]
    return float(np.median(values)) if values else None


def _ci(values, seed: int):
    values = [v for v in values if v is not None and math.isfinite(v)]
    if len(values) < 30:
        return None
    return list(bootstrap_ci(values, seed=seed))


# ---------------------------------------------------------------- experiments

def _recurrence(cfg: ExperimentConfig, system, points) -> tuple[dict, dict, dict, list]:
    g = cfg.grid
    grid = RadiusGrid.exponential(g.m_min, g.m_max, g.step)
    n_max = cfg.recurrence.n_max

    def task(x):
        curve = return_curve(system, x, grid, n_max)
        try:
            return curve, recurrence_rate_fit(curve), None
        except InsufficientDataError as exc:
            return curve, None, str(exc)

    results = parallel_map(task, points, cfg.threads)
    table = ResultTable("recurrence", ("point_index", "seed", "radius", "tau", "censored", "slope_lower",
                                       "slope_upper", "slope_ls", "stderr", "r2", "envelopes_agree", "status"))
    violations = 0
    for i, (curve, fit, err) in enumerate(results):
        cells = (None,) * 6 if fit is None else (fit.lower.slope, fit.upper.slope, fit.ls.slope,
                                                 fit.ls.stderr_slope, fit.ls.r_squared, fit.agree)
        status = "ok" if fit else "insufficient"
        for r, t, c in zip(curve.radii, curve.tau, curve.censored):
            table.rows.append((i, cfg.seed, float(r), int(t), bool(c)) + cells + (status,))
        violations += int(np.any(np.diff(curve.tau) < 0))
    ok = [f for _, f, _ in results if f is not None]
    ls = [f.ls.slope for f in ok]
    summary = {
        "points_requested": len(points),
        "fits_ok": len(ok),
        "fits_insufficient": len(points) - len(ok),
        "censored_entries": int(sum(c.censored.sum() for c, _, _ in results)),
        "radii": list(grid.radii),
        "n_max": n_max,
        "median_slope_ls": _median(ls),
        "median_slope_lower": _median([f.lower.slope for f in ok]),
        "median_slope_upper": _median([f.upper.slope for f in ok]),
        "mean_slope_ls": _mean(ls),
        "bootstrap_ci_ls": _ci(ls, cfg.seed),
        "monotonicity_violations": violations,
    }
    med = []
    for j, r in enumerate(grid.radii):
        taus = [c.tau[j] for c, _, _ in results if not c.censored[j]]
        if taus:
            med.append((math.log(1 / r), float(np.median(np.log(taus)))))
    return {"recurrence": table}, summary, {"median_log_tau": np.array(med)}, [f for _, f, _ in results]


def _measure_model(cfg: ExperimentConfig, k: int):
    if cfg.dimension.model == "analytic":
        return AnalyticLebesgue(k)
    return EmpiricalSample.lebesgue(k, cfg.dimension.samples, cfg.seed)


def _dimension(cfg: ExperimentConfig, system, points):
    g = cfg.grid
    radii = RadiusGrid.exponential(g.m_min, g.m_max, g.step).array
    model = _measure_model(cfg, system.dimension)

    def task(x):
        curve = model.ball_curve(x, radii)
        try:
            return curve, pointwise_dimension_fit(model, x, radii), None
        except InsufficientDataError as exc:
            return curve, None, str(exc)

    results = parallel_map(task, points, cfg.threads)
    table = ResultTable("dimension", ("point_index", "radius", "mu_hat", "stderr", "slope_lower", "slope_upper",
                                      "slope_ls", "status"))
    for i, ((mu, err), fit, _) in enumerate(results):
        cells = (None,) * 3 if fit is None else (fit.lower.slope, fit.upper.slope, fit.ls.slope)
        for r, m, e in zip(radii, mu, err):
            table.rows.append((i, float(r), float(m), float(e)) + cells + ("ok" if fit else "insufficient",))
    ok = [f for _, f, _ in results if f is not None]
    lower = [f.lower.slope for f in ok]
    summary = {
        "points_requested": len(points),
        "fits_ok": len(ok),
        "fits_insufficient": len(points) - len(ok),
        "model": cfg.dimension.model,
        "median_slope_ls": _median([f.ls.slope for f in ok]),
        "median_slope_lower": _median(lower),
        "median_slope_upper": _median([f.upper.slope for f in ok]),
        "mean_slope_ls": _mean([f.ls.slope for f in ok]),
        "hd_estimate": float(np.quantile(lower, 0.95)) if len(lower) >= 50 else None,
    }
    med = []
    for j, r in enumerate(radii):
        mus = [c[0][j] for c, _, _ in results if c[0][j] > 0]
        if mus:
            med.append((math.log(r), float(np.median(np.log(mus)))))
    return {"dimension": table}, summary, {"median_log_mu": np.array(med)}, [f for _, f, _ in results]


def _observable(cfg: ExperimentConfig, k: int) -> FourierMode:
    q = list(cfg.correlation.q)
    if len(q) > k:
        raise UsageError(f"frequency vector {q} is longer than the dimension {k}")
    return FourierMode(tuple(q + [0] * (k - len(q))), cfg.correlation.phase)


def _correlation(cfg: ExperimentConfig, system):
    c = cfg.correlation
    phi = _observable(cfg, system.dimension)
    series = decay_profile(system, phi, phi, c.n_max, c.samples, cfg.seed, c.estimator)
    cls = decay_classify(series)
    table = ResultTable("correlation", ("lag", "cov_hat", "stderr", "above_floor", "noise_floor"))
    for n, v, e, a, f in zip(series.lags, series.cov, series.stderr, series.above_floor, series.noise_floor):
        table.rows.append((int(n), float(v), float(e), bool(a), float(f)))
    summary = {
        "observable": {"q": list(phi.q), "phase": phi.phase, "lipschitz": phi.lipschitz_constant},
        "samples": c.samples,
        "estimator": c.estimator,
        "decay_class": cls.kind,
        "rate": cls.rate,
        "exponent": cls.exponent,
        "lags_used": cls.lags_used,
        "r2_exponential": cls.r2_exponential,
        "r2_polynomial": cls.r2_polynomial,
        "superpolynomial_compatible": cls.superpolynomial_compatible,
    }
    gp = np.column_stack([series.lags, np.abs(series.cov)])
    return {"correlation": table}, summary, {"abs_cov": gp}, cls


def _entropy(cfg: ExperimentConfig, system, points):
    e = cfg.entropy
    partition = GridPartition(e.g, system.dimension)
    n_values = list(range(e.n_min, e.n_max + 1, e.n_step))
    rows = parallel_map(lambda x: repetition_times(system, x, n_values, partition, e.k_max), points, cfg.threads)
    table = ResultTable("entropy", ("point_index", "n", "R_n", "censored", "log_R_over_n"))
    violations = 0
    for i, row in enumerate(rows):
        seq = []
        for n in n_values:
            cens = not isinstance(row[n], int)
            val = e.k_max if cens else row[n]
            seq.append(val)
            table.rows.append((i, n, val, cens, math.log(val) / n))
        violations += int(np.any(np.diff(seq) < 0))
    summary: dict[str, Any] = {
        "points_requested": len(points),
        "partition": {"type": "grid", "g": e.g, "cells": partition.n_cells},
        "n_values": n_values,
        "k_max": e.k_max,
        "monotonicity_violations": violations,
    }
    try:
        est = entropy_from_rows(n_values, rows, e.k_max)
    except InsufficientDataError as exc:
        summary.update(status="insufficient", error=str(exc), censored_profile=exc.profile)
        return {"entropy": table}, summary, {}, None
    summary.update(
        status="ok",
        slope=est.slope,
        stderr_slope=est.fit.stderr_slope,
        r2=est.fit.r_squared,
        median_rate=est.median_rate.tolist(),
        mean_rate=est.mean_rate.tolist(),
        censored_fraction=est.censored_fraction.tolist(),
    )
    gp = np.column_stack([est.n_values, est.median_log_r])
    return {"entropy": table}, summary, {"median_log_R": gp}, est


def _longfly(cfg: ExperimentConfig, system, points):
    lf = cfg.longfly
    model = AnalyticLebesgue(system.dimension)
    task = _guarded(lambda x: long_fly_check(system, x, lf.r, lf.delta, lf.epsilon, model, lf.budget))
    results = parallel_map(task, points, cfg.threads)
    table = ResultTable("longfly", ("point_index", "status", "n_lo", "n_hi", "passed", "violation", "vacuous"))
    passed = checked = capacity = 0
    for i, rep in enumerate(results):
        status = "ok"
        if isinstance(rep, Failure):
            status, rep = rep.kind, rep.partial
            capacity += 1
        else:
            checked += 1
            passed += int(rep.passed)
        table.rows.append((i, status, rep.n_lo, rep.n_hi, rep.passed, rep.violation, rep.vacuous))
    summary = {
        "points_requested": len(points),
        "checked": checked,
        "capacity_limited": capacity,
        "passed": passed,
        "pass_rate": passed / checked if checked else None,
        "vacuous": int(sum(bool(r[-1]) for r in table.rows)),
        "r": lf.r, "delta": lf.delta, "epsilon": lf.epsilon,
    }
    return {"longfly": table}, summary, {}, summary


def _partition(cfg: ExperimentConfig, system):
    p = cfg.partition
    k = system.dimension
    n = p.samples or math.ceil((4 / p.s) ** k)
    samples = random_lattice(np.random.default_rng(cfg.seed), n, k)
    part, diag = build_partition(samples, p.s, AnalyticLebesgue(k), seed=cfg.seed, depth=p.depth)
    cols = ("cell_index", "radius") + tuple(f"u{c + 1}" for c in range(k)) + tuple(f"x{c + 1}" for c in range(k))
    table = ResultTable("partition", cols)
    for i, (c, r) in enumerate(zip(part.centers, part.radii)):
        table.rows.append((i, float(r), *[int(v) for v in c], *[float(v) / 2.0**64 for v in c]))
    summary = {
        "samples": n, "s": p.s, "depth": p.depth,
        "cells": diag.n_cells, "coverage": diag.coverage,
        "boundary_c": diag.boundary_c, "boundary_a": diag.boundary_a,
        "boundary_eps": list(diag.boundary_eps), "boundary_mass": list(diag.boundary_mass),
    }
    gp = np.column_stack([diag.boundary_eps, diag.boundary_mass])
    return {"partition": table}, summary, {"boundary_mass": gp}


def _validate(cfg: ExperimentConfig, system):
    inv = analytic_invariants(system)
    summary: dict[str, Any] = {"system": cfg.system.system, "dimension": inv.k, "entropy": inv.h,
                               "lambda_max": inv.lambda_max}
    if isinstance(system, ToralAutomorphism):
        rep = validate_toral_matrix(system.matrix)
        summary.update(
            matrix=[list(r) for r in system.matrix], det=rep.det, char_poly=list(rep.char_poly),
            irreducible_factors=[[list(f), m] for f, m in rep.irreducible_factors],
            cyclotomic_divisors=list(rep.cyclotomic_divisors),
            eigenvalue_moduli=list(rep.eigenvalue_moduli),
            ergodic=rep.is_ergodic, hyperbolic=rep.is_hyperbolic,
            has_unit_root_eigenvalue=rep.has_unit_root_eigenvalue,
        )
    return {}, summary, {}


# ---------------------------------------------------------------- verification

@dataclass(frozen=True)
class Prediction:
    key: str
    name: str
    value: Any
    target: str
    passed: bool | None  # None when the sub-run errored
    detail: str = ""


@dataclass
class VerificationReport:
    system: str
    predictions: list[Prediction]
    hypotheses_hold: bool
    errors: dict[str, str]

    @property
    def verdict(self) -> str:
        if not self.hypotheses_hold:
            return NOT_APPLICABLE
        return "pass" if all(p.passed for p in self.predictions) else "fail"

    @property
    def exit_code(self) -> int:
        return EXIT_PREDICTION if self.verdict == "fail" else EXIT_OK

    def by_key(self) -> dict[str, Prediction]:
        return {p.key: p for p in self.predictions}


def _sub(errors: dict, name: str, fn: Callable):
    try:
        return fn()
    except (InsufficientDataError, CapacityError, UsageError) as exc:
        errors[name] = f"{type(exc).__name__}: {exc}"
        return None


def verify(cfg: ExperimentConfig) -> tuple[VerificationReport, RunResult]:
    """Run every sub-experiment and test predictions (a)-(f) against the analytic invariants."""
    system = cfg.build_system()
    inv = analytic_invariants(system)
    t = cfg.tolerances
    k = system.dimension
    errors: dict[str, str] = {}
    tables: dict[str, ResultTable] = {}
    summary: dict[str, Any] = {"invariants": {"k": inv.k, "h": inv.h, "lambda_max": inv.lambda_max}}
    gnuplot: dict[str, np.ndarray] = {}

    def absorb(prefix, out):
        if out is None:
            return None
        tabs, summ, gp, extra = out
        for name, tab in tabs.items():
            tables[name] = tab
        gnuplot.update({f"{prefix}_{n}": v for n, v in gp.items()})
        summary[prefix] = summ
        return summ, extra

    n_pts = max(cfg.recurrence.points, cfg.dimension.points, cfg.entropy.points, cfg.longfly.points)
    points = sample_points(cfg.seed, n_pts, k)
    tables["points"] = _points_table(points)
    rec = absorb("recurrence", _sub(errors, "recurrence",
                                    lambda: _recurrence(cfg, system, points[:cfg.recurrence.points])))
    dim = absorb("dimension", _sub(errors, "dimension",
                                   lambda: _dimension(cfg, system, points[:cfg.recurrence.points])))
    cor = absorb("correlation", _sub(errors, "correlation", lambda: _correlation(cfg, system)))
    ent = absorb("entropy", _sub(errors, "entropy", lambda: _entropy(cfg, system, points[:cfg.entropy.points])))
    lfy = absorb("longfly", _sub(errors, "longfly", lambda: _longfly(cfg, system, points[:cfg.longfly.points])))
    if ent and ent[0].get("status") != "ok":
        errors["entropy"] = ent[0]["error"]

    preds = []
    med = rec[0]["median_slope_ls"] if rec else None
    if med is None:
        preds.append(Prediction("a", "median recurrence slope vs dimension", None, f"{inv.k} ± {t.slope}", None,
                                errors.get("recurrence", "no usable fits")))
    else:
        preds.append(Prediction("a", "median recurrence slope vs dimension", med, f"{inv.k} ± {t.slope}",
                                abs(med - inv.k) <= t.slope))

    if rec and dim:
        r_fits = [f or (math.inf, math.inf) for f in rec[1]]
        d_fits = [f or (-math.inf, -math.inf) for f in dim[1]]
        ineq = inequality_check(r_fits, d_fits, t.inequality, t.inequality_fraction)
        preds.append(Prediction("b", "recurrence <= dimension + tol (both envelopes)", ineq.fraction,
                                f">= {t.inequality_fraction}", ineq.passed,
                                f"{int(ineq.point_ok.sum())}/{ineq.point_ok.size} points; unusable fits count as failures"))
    else:
        preds.append(Prediction("b", "recurrence <= dimension + tol (both envelopes)", None,
                                f">= {t.inequality_fraction}", None, "sub-run error"))

    if cor:
        cls = cor[1]
        preds.append(Prediction("c", "decay class super-polynomial compatible", cls.kind,
                                "exponential or censored", cls.superpolynomial_compatible))
    else:
        preds.append(Prediction("c", "decay class super-polynomial compatible", None, "exponential or censored",
                                None, errors.get("correlation", "")))

    if ent and ent[1] is not None:
        slope = ent[1].slope
        if inv.h > 0:
            ok, target = abs(slope - inv.h) <= t.entropy_rel * inv.h, f"{inv.h:.4f} ± {t.entropy_rel:.0%}"
        else:
            ok, target = abs(slope) <= t.entropy_abs, f"0 ± {t.entropy_abs}"
        preds.append(Prediction("d", "entropy slope vs analytic entropy", slope, target, ok))
    else:
        preds.append(Prediction("d", "entropy slope vs analytic entropy", None, f"{inv.h:.4f}", None,
                                errors.get("entropy", "")))

    bound = inv.h / inv.lambda_max if inv.lambda_max > 0 else 0.0
    if med is None:
        preds.append(Prediction("e", "median recurrence slope >= h/lambda+ - tol", None,
                                f">= {bound - t.conformal:.4f}", None, "no usable fits"))
    else:
        preds.append(Prediction("e", "median recurrence slope >= h/lambda+ - tol", med,
                                f">= {bound - t.conformal:.4f}", med >= bound - t.conformal))

    rate = lfy[0]["pass_rate"] if lfy else None
    if rate is None:
        preds.append(Prediction("f", "long-fly pass rate", None, f">= {t.longfly_rate}", None,
                                errors.get("longfly", "no point checked within budget")))
    else:
        preds.append(Prediction("f", "long-fly pass rate", rate, f">= {t.longfly_rate}", rate >= t.longfly_rate,
                                f"{lfy[0]['capacity_limited']} points beyond budget"))

    hypotheses = bool(cor and cor[1].superpolynomial_compatible)
    if isinstance(system, ToralAutomorphism):
        hypotheses = hypotheses and validate_toral_matrix(system.matrix).is_ergodic
    report = VerificationReport(cfg.system.system, preds, hypotheses, errors)
    table = ResultTable("verify", ("key", "name", "value", "target", "passed", "detail"))
    for p in preds:
        table.rows.append((p.key, p.name, p.value, p.target, "error" if p.passed is None else p.passed, p.detail))
    tables = {"verify": table, **tables}
    summary.update(verdict=report.verdict, hypotheses_hold=hypotheses, errors=errors,
                   predictions={p.key: {"name": p.name, "value": p.value, "target": p.target,
                                        "passed": p.passed, "detail": p.detail} for p in preds})
    return report, RunResult("verify", cfg, tables, summary, gnuplot, report.exit_code)


# ---------------------------------------------------------------- entry point

def run(cfg: ExperimentConfig) -> RunResult:
    """Run the experiment named by ``cfg.kind``."""
    t0 = time.perf_counter()
    system = cfg.build_system()
    k = system.dimension
    code = EXIT_OK
    if cfg.kind == "verify":
        result = verify(cfg)[1]
        result.wall_time = time.perf_counter() - t0
        return result
    if cfg.kind == "recurrence":
        points = sample_points(cfg.seed, cfg.recurrence.points, k)
        tables, summary, gp, _ = _recurrence(cfg, system, points)
        code = EXIT_CAPACITY if summary["fits_ok"] == 0 else EXIT_OK
    elif cfg.kind == "dimension":
        points = sample_points(cfg.seed, cfg.dimension.points, k)
        tables, summary, gp, _ = _dimension(cfg, system, points)
        code = EXIT_CAPACITY if summary["fits_ok"] == 0 else EXIT_OK
    elif cfg.kind == "correlation":
        points = []
        tables, summary, gp, _ = _correlation(cfg, system)
    elif cfg.kind == "entropy":
        points = sample_points(cfg.seed, cfg.entropy.points, k)
        tables, summary, gp, _ = _entropy(cfg, system, points)
        code = EXIT_OK if summary["status"] == "ok" else EXIT_CAPACITY
    elif cfg.kind == "longfly":
        points = sample_points(cfg.seed, cfg.longfly.points, k)
        tables, summary, gp, _ = _longfly(cfg, system, points)
        code = EXIT_CAPACITY if summary["capacity_limited"] else EXIT_OK
    elif cfg.kind == "partition":
        points = []
        tables, summary, gp = _partition(cfg, system)
    elif cfg.kind == "validate":
        points = []
        tables, summary, gp = _validate(cfg, system)
    else:
        raise UsageError(f"unknown experiment kind {cfg.kind!r}")
    if points:
        tables = {"points": _points_table(points), **tables}
    return RunResult(cfg.kind, cfg, tables, summary, gp, code, time.perf_counter() - t0)
