"""Command-line front end: run scenario files and the bundled example suite.

    qsdkit <task> scenario.json [--format human|json|csv] [--out FILE]
    qsdkit run scenario.json
    qsdkit suite [DIR] [--manifest FILE] [--jobs N]

Exit codes: 0 ok, 1 failed expectation or unexpected error, 2 parse error,
3 validation error, 4 solver did not converge, 5 infeasible task.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import applications as app
from . import asymptotics as asy
from . import strategies as strat
from .errors import Infeasible, NoConvergence, ParseError, QSDError, ValidationError
from .io import (
    REPORT_SCHEMA,
    TASKS,
    Scenario,
    decode_matrix,
    dumps,
    finite_or_str,
    parse_scenario,
    to_jsonable,
)
from .minerror import TAU_CERT
from .operators import DEFAULT_CAP, Povm
from .qubit import solve_qubit
from .solve import solve_min_error

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_VALIDATION, EXIT_NOCONV, EXIT_INFEASIBLE = 0, 1, 2, 3, 4, 5
SUITE_HEADER = ["scenario", "task", "status", "value", "detail"]


def toolkit_version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "0.1.0"


@dataclass(frozen=True)
class Report:
    scenario: dict
    task: str
    values: dict
    certificate: dict | None
    residuals: list | None
    checks: list
    passed: bool
    primary: str
    version: str = field(default_factory=toolkit_version)
    wall_time: float = 0.0
    schema: str = REPORT_SCHEMA

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "schema": self.schema,
            "version": self.version,
            "task": self.task,
            "scenario": self.scenario,
            "primary": self.primary,
            "values": self.values,
            "certificate": self.certificate,
            "residuals": self.residuals,
            "checks": self.checks,
            "passed": self.passed,
        }
        if timing:
            d["wall_time"] = self.wall_time
        return to_jsonable(d)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(
            scenario=d["scenario"],
            task=d["task"],
            values=d["values"],
            certificate=d["certificate"],
            residuals=d["residuals"],
            checks=d["checks"],
            passed=d["passed"],
            primary=d["primary"],
            version=d["version"],
            wall_time=d.get("wall_time", 0.0),
            schema=d["schema"],
        )


def _cert_dict(cert) -> dict:
    return {
        "dual_feasibility_gap": cert.dual_feasibility_gap,
        "complementarity_residual": cert.complementarity_residual,
        "pairwise_residual": cert.pairwise_residual,
        "primal_dual_gap": cert.primal_dual_gap,
        "suboptimality_bound": cert.suboptimality_bound,
        "tol": cert.tol,
        "passed": cert.passed,
    }


def _opt(s: Scenario, key: str, default):
    return s.options.get(key, default)


# task handlers return (values, certificate, residuals, primary key)

def _task_min_error(s: Scenario):
    res = solve_min_error(s.ensemble, _opt(s, "tol_cert", TAU_CERT), _opt(s, "max_iter", 10_000))
    if not res.passed:
        raise NoConvergence("minimum-error certificate not passed", res)
    vals = {"p_guess": res.p_guess, "method": res.method, "povm": [np.asarray(m) for m in res.povm.elements], "K": res.K}
    return vals, _cert_dict(res.certificate), list(res.residuals), "p_guess"


def _task_qubit(s: Scenario):
    sol = solve_qubit(s.ensemble, _opt(s, "tol_cert", TAU_CERT))
    if not sol.passed:
        raise NoConvergence("qubit certificate not passed", sol.result)
    vals = {
        "p_guess": sol.p_guess,
        "center": sol.ball.center,
        "radius": sol.ball.radius,
        "active_set": list(sol.active_set),
        "method": sol.method,
        "povm": [np.asarray(m) for m in sol.povm.elements],
    }
    return vals, _cert_dict(sol.certificate), list(sol.result.residuals), "p_guess"


def _task_usd(s: Scenario):
    e = s.ensemble
    ok, why = strat.usd_feasible(e)
    if not ok:
        raise Infeasible(why)
    pure = all(strat._is_pure(r) for r in e.states)
    if len(e) == 2 and pure:
        res = strat.usd_two_pure(strat._pure_vector(e.states[0]), strat._pure_vector(e.states[1]), e.priors)
    else:
        res = strat.usd_reciprocal(e)
    p = np.einsum("kab,iba->ik", res.povm.stack, np.array(e.states)).real[:, : len(e)]
    cross = float(np.max(np.abs(p - np.diag(np.diag(p))))) if len(e) > 1 else 0.0
    vals = {
        "success_prob": res.success_prob,
        "inconclusive_rate": res.inconclusive_rate,
        "error_prob": res.error_prob,
        "max_cross_click": cross,
        "coefficients": res.coefficients,
        "strategy": res.strategy,
    }
    return vals, None, None, "inconclusive_rate"


def _task_maxconf(s: Scenario):
    res = strat.max_confidence(s.ensemble)
    vals = {
        "confidences": res.confidences,
        "inconclusive_weight": res.inconclusive_weight,
        "inconclusive_element": res.povm.elements[-1],
        "degenerate": list(res.degenerate),
        "strategy": res.strategy,
    }
    return vals, None, None, "confidences"


def _task_fixed_rate(s: Scenario):
    e = s.ensemble
    if "inconclusive" in s.params:
        m = decode_matrix(s.params["inconclusive"], "params.inconclusive")
        prob = strat.fixed_rate_reduction(e, m)
        res = solve_min_error(prob.projected)
        q = prob.rate
        vals = {"rate": q, "p_correct": (1 - q) * res.p_guess, "p_error": (1 - q) * (1 - res.p_guess), "strategy": "fixed-rate"}
        return vals, _cert_dict(res.certificate), None, "p_error"
    rates = s.params.get("rates", [0.0])
    curve = strat.error_vs_inconclusive_curve(e, rates, seed=_opt(s, "seed", 0))
    vals = {"rates": curve.rates, "errors": curve.errors, "label": curve.label, "strategy": "fixed-rate"}
    return vals, None, None, "errors"


def _task_chernoff(s: Scenario):
    if "p0" in s.params:
        res = asy.chernoff_classical(s.params["p0"], s.params["p1"])
    else:
        if s.ensemble is None or len(s.ensemble) < 2:
            raise ValidationError("chernoff needs an ensemble of at least two states or params p0/p1")
        if len(s.ensemble) > 2:
            return {"xi": finite_or_str(asy.chernoff_multi(s.ensemble.states))}, None, None, "xi"
        res = asy.chernoff_two(*s.ensemble.states)
    vals = {"xi": finite_or_str(res.xi), "s_star": res.s_star, "disjoint": res.disjoint, "grid_flag": res.grid_beats_refined}
    return vals, None, None, "xi"


def _task_finite_n(s: Scenario):
    e = s.ensemble
    if len(e) != 2:
        raise ValidationError("finite-n needs two states")
    est = asy.finite_n_error(*e.states, priors=tuple(e.priors), n_max=int(s.params.get("n_max", 10)), cap=_opt(s, "cap", DEFAULT_CAP))
    ch = asy.chernoff_two(*e.states).xi
    vals = {
        "n": est.n_values,
        "p_error": est.error_probs,
        "fitted_exponent": finite_or_str(est.fitted_exponent),
        "fit_residual": est.fit_residual,
        "chernoff_xi": finite_or_str(ch),
    }
    return vals, None, None, "fitted_exponent"


def _task_witness(s: Scenario):
    p = s.params
    if "table" in p:
        table = {(int(a), int(b)): float(v) for a, b, v in p["table"]}
    elif "csv" in p:
        base = Path(s.path).parent if s.path else Path(".")
        table = app.read_witness_csv(base / p["csv"])
    else:
        table = None
    if table is None:
        n = int(p["N"])
        vals = {"N": n, "bounds": [app.witness_bound(n, d) for d in range(2, n + 1)], "dims": list(range(2, n + 1))}
        return vals, None, None, "bounds"
    rep = app.witness_report(table)
    vals = {
        "W": rep.value,
        "N": rep.n,
        "bounds": [rep.bounds[d] for d in sorted(rep.bounds)],
        "dims": sorted(rep.bounds),
        "certified_min_dimension": rep.certified_min_dimension,
    }
    return vals, None, None, "W"


def _task_min_entropy(s: Scenario):
    res = solve_min_error(s.ensemble, _opt(s, "tol_cert", TAU_CERT))
    if not res.passed:
        raise NoConvergence("minimum-error certificate not passed", res)
    return {"H_min": float(-np.log2(res.p_guess)), "p_guess": res.p_guess}, _cert_dict(res.certificate), None, "H_min"


def _task_nosignaling(s: Scenario):
    rep = app.nosignaling_saturation(s.ensemble, _opt(s, "tol_cert", TAU_CERT))
    vals = {"p_guess": rep.p_guess, "p": rep.p, "sum_p": float(rep.p.sum()), "product": rep.product, "decomposition_error": rep.decomposition_error, "certified": rep.certified}
    return vals, None, None, "product"


def _task_exclusion(s: Scenario):
    if "pbr" in s.params:
        pb = s.params["pbr"]
        theta = float(pb["theta"]) if "theta" in pb else float(np.arccos(pb["overlap"]))
        ens = app.pbr_ensemble(theta, int(pb["n"]), _opt(s, "cap", DEFAULT_CAP))
    elif s.ensemble is not None:
        ens = s.ensemble
    else:
        raise ValidationError("exclusion needs an ensemble or params.pbr")
    res = app.exclusion_solve(ens, max_iter=_opt(s, "max_iter", 10_000), tol_cert=_opt(s, "tol_cert", TAU_CERT))
    vals = {"value": res.value, "gap": res.gap, "perfect": res.perfect, "certified": res.certified, "dual_trace": float(np.trace(res.dual_K).real)}
    return vals, None, None, "value"


def _task_unitary(s: Scenario):
    U1 = decode_matrix(s.params["U1"], "params.U1")
    U2 = decode_matrix(s.params["U2"], "params.U2")
    anc = bool(s.params.get("ancilla", True))
    rep = app.unitary_distinguishability(U1, U2, use_ancilla=anc)
    plain = app.unitary_distinguishability(U1, U2, use_ancilla=False)
    vals = {
        "u": rep.u,
        "p_guess": rep.p_guess,
        "perfect": rep.perfect,
        "certified": bool(rep.certified),
        "label": rep.label,
        "u_without_ancilla": plain.u,
        "perfect_without_ancilla": plain.perfect,
        "hull_distance": rep.hull_distance,
    }
    try:
        vals["repetition_n"] = app.unitary_repetition_n(U1, U2, int(s.params.get("n_cap", 1000)))
    except QSDError:
        vals["repetition_n"] = None
    return vals, None, None, "u"


def _task_mutual_info(s: Scenario):
    e = s.ensemble
    if "povm" in s.params:
        povm = Povm([decode_matrix(m, "params.povm") for m in s.params["povm"]])
        source = "given"
    else:
        povm = solve_min_error(e).povm
        source = "minimum-error"
    vals = {"I": app.mutual_information(e, povm), "chi": app.holevo_chi(e), "povm_source": source}
    return vals, None, None, "I"


HANDLERS = {
    "min-error": _task_min_error,
    "qubit-geometric": _task_qubit,
    "usd": _task_usd,
    "max-confidence": _task_maxconf,
    "fixed-rate": _task_fixed_rate,
    "chernoff": _task_chernoff,
    "finite-n": _task_finite_n,
    "witness": _task_witness,
    "min-entropy": _task_min_entropy,
    "no-signaling": _task_nosignaling,
    "exclusion": _task_exclusion,
    "unitary": _task_unitary,
    "mutual-info": _task_mutual_info,
}


def _as_float(v):
    if isinstance(v, str):
        return float(v)
    return v


def _check_expect(values: dict, expect: dict) -> list:
    checks = []
    tol = float(expect.get("tol", 1e-9))
    rtol = float(expect.get("rtol", 0.0))
    for key, want in sorted(expect.get("values", {}).items()):
        got = values.get(key)
        if got is None:
            checks.append({"name": f"{key} == expected", "ok": False, "detail": "missing"})
            continue
        if isinstance(want, (bool, str)) or isinstance(got, (bool, str)) and not isinstance(want, (int, float)):
            ok = got == want
            err = 0.0 if ok else 1.0
        else:
            g = np.asarray(to_jsonable(got), dtype=float)
            w = np.asarray(want, dtype=float)
            ok = g.shape == w.shape and bool(np.all(np.abs(g - w) <= tol + rtol * np.abs(w)))
            err = float(np.max(np.abs(g - w))) if g.shape == w.shape else math.inf
        checks.append({"name": f"{key} == expected", "ok": bool(ok), "detail": f"max deviation {err:.3e}"})
    for kind, op in (("upper", lambda g, b: g <= b), ("lower", lambda g, b: g >= b)):
        for key, bound in sorted(expect.get(kind, {}).items()):
            g = np.asarray(to_jsonable(values.get(key, math.nan)), dtype=float)
            ok = bool(np.all(op(g, float(bound))))
            checks.append({"name": f"{key} {'<=' if kind == 'upper' else '>='} {bound}", "ok": ok, "detail": f"value {np.max(g) if kind == 'upper' else np.min(g):.6g}"})
    return checks


def run_scenario(scenario: Scenario) -> Report:
    """Solve one scenario and compare against its ``expect`` block, if any."""
    t0 = time.perf_counter()
    values, cert, residuals, primary = HANDLERS[scenario.task](scenario)
    values = to_jsonable(values)
    checks = _check_expect(values, scenario.expect)
    if "certified" in scenario.expect:
        c = cert["passed"] if cert is not None else values.get("certified")
        checks.append({"name": "certificate passed", "ok": bool(c) == bool(scenario.expect["certified"]), "detail": str(c)})
    passed = all(c["ok"] for c in checks)
    echo = {"name": scenario.name, "task": scenario.task, "source": scenario.source}
    return Report(
        scenario=to_jsonable(echo),
        task=scenario.task,
        values=values,
        certificate=to_jsonable(cert),
        residuals=to_jsonable(residuals),
        checks=checks,
        passed=passed,
        primary=primary,
        wall_time=time.perf_counter() - t0,
    )


def _primary_text(report: Report) -> str:
    v = report.values.get(report.primary)
    if isinstance(v, float):
        return repr(v)
    return json.dumps(v, sort_keys=True)


def format_report(report: Report, fmt: str = "human", timing: bool = True) -> str:
    if fmt == "json":
        return dumps(report.to_dict(timing=timing))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k in sorted(report.values):
            v = report.values[k]
            w.writerow([k, repr(v) if isinstance(v, float) else json.dumps(v, sort_keys=True)])
        w.writerow(["passed", report.passed])
        return buf.getvalue()
    lines = [f"scenario: {report.scenario['name']} ({report.task})", f"{report.primary}: {_primary_text(report)}"]
    for k in sorted(report.values):
        v = report.values[k]
        if k == report.primary or isinstance(v, list) and v and isinstance(v[0], list):
            continue
        lines.append(f"  {k}: {v}")
    if report.certificate is not None:
        c = report.certificate
        lines.append(f"certificate: {'passed' if c['passed'] else 'FAILED'} (dual gap {c['dual_feasibility_gap']:.2e}, complementarity {c['complementarity_residual']:.2e})")
    for c in report.checks:
        lines.append(f"check {'ok  ' if c['ok'] else 'FAIL'} {c['name']} [{c['detail']}]")
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, NoConvergence):
        return EXIT_NOCONV
    if isinstance(exc, Infeasible):
        return EXIT_INFEASIBLE
    if isinstance(exc, (ValidationError, QSDError, ValueError, KeyError)):
        return EXIT_VALIDATION
    return EXIT_FAIL


def bundled_scenarios() -> Path:
    return Path(str(resources.files("qsdkit") / "scenarios"))


def _suite_files(directory: Path, manifest: Path | None) -> list[Path]:
    if manifest is None and (directory / "manifest.json").exists():
        manifest = directory / "manifest.json"
    if manifest is not None:
        data = json.loads(Path(manifest).read_text())
        files = [directory / f for f in data["scenarios"]]
    else:
        files = [p for p in directory.glob("*.json") if p.name != "manifest.json"]
    return sorted(files, key=lambda p: p.name)


def _suite_row(path: Path, overrides: dict) -> list:
    try:
        s = parse_scenario(path)
        s = replace(s, options={**s.options, **overrides})
        rep = run_scenario(s)
        failed = [c["name"] for c in rep.checks if not c["ok"]]
        return [s.name, s.task, "pass" if rep.passed else "fail", _primary_text(rep), "; ".join(failed)]
    except Exception as exc:  # the suite records failures and keeps going
        return [path.stem, "", "error", "", f"{type(exc).__name__}: {exc} (exit {_exit_code(exc)})"]


def run_suite(directory=None, manifest=None, jobs: int = 1, overrides: dict | None = None) -> tuple[str, bool]:
    """Run every scenario in a directory; returns (CSV text, all passed)."""
    directory = bundled_scenarios() if directory is None else Path(directory)
    files = _suite_files(directory, Path(manifest) if manifest else None)
    overrides = overrides or {}
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda p: _suite_row(p, overrides), files))
    else:
        rows = [_suite_row(p, overrides) for p in files]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUITE_HEADER)
    w.writerows(rows)
    return buf.getvalue(), all(r[2] == "pass" for r in rows)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsdkit", description="Quantum state discrimination toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--format", choices=("human", "json", "csv"), default="human")
        p.add_argument("--tol", type=float, help="certificate tolerance")
        p.add_argument("--seed", type=int, help="seed for searches")
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--cap", type=int, help="tensor-power dimension cap")
        p.add_argument("--no-timing", action="store_true", help="omit wall time from JSON output")

    for name in TASKS + ("run",):
        p = sub.add_parser(name, help="run a scenario file" if name == "run" else f"run a {name} scenario")
        p.add_argument("scenario")
        common(p)
    p = sub.add_parser("suite", help="run a directory of scenarios (default: bundled examples)")
    p.add_argument("directory", nargs="?")
    p.add_argument("--manifest")
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    return parser


def _overrides(args) -> dict:
    o = {}
    for flag, key in (("tol", "tol_cert"), ("seed", "seed"), ("max_iter", "max_iter"), ("cap", "cap")):
        v = getattr(args, flag, None)
        if v is not None:
            o[key] = v
    return o


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    if args.command == "suite":
        try:
            text, ok = run_suite(args.directory, args.manifest, args.jobs, _overrides(args))
        except (OSError, ValueError, KeyError) as exc:
            sys.stderr.write(f"error: cannot read manifest: {exc}\n")
            return EXIT_PARSE
        _emit(text, args.out)
        return EXIT_OK if ok else EXIT_FAIL
    try:
        s = parse_scenario(args.scenario)
        if args.command != "run" and s.task != args.command:
            raise ValidationError(f"scenario task '{s.task}' does not match subcommand '{args.command}'")
        s = replace(s, options={**s.options, **_overrides(args)})
        report = run_scenario(s)
    except Exception as exc:
        partial = getattr(exc, "result", None)
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        if partial is not None and hasattr(partial, "p_guess"):
            sys.stderr.write(f"partial result: p_guess={partial.p_guess!r}\n")
        return _exit_code(exc)
    _emit(format_report(report, args.format, timing=not args.no_timing), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
