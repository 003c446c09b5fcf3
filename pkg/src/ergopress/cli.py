"""Batch front end: config-driven experiments with machine-readable output.

A run is described by a JSON config (or assembled from flags), dispatched
to the computation modules, and reported as comma-separated tables plus a
structured JSON summary.  Outputs are deterministic for a fixed config
and seed: no timestamps or timings go into the files (wall-clock is
printed to stdout only), so reruns are byte-identical.

Subcommands: pressure, capacity, spectrum, correlation, vp-check,
inverse-vp, gap-example, transfer-check, suite.  Exit code 0 iff every
check in the report passed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import compactify
from .coverpressure import Cover, capacity_pressures, critical_alpha, pressure_refined
from .multifractal import correlation_entropy, legendre_check, t_curve
from .shifts import Potential, ShiftSystem, SubsetSpec, make_full_shift
from .transfer import (
    equilibrium_markov,
    inverse_vp_probe,
    perturbed_invariant_measures,
    power_pressure_check,
    transfer_pressure,
    vp_residual,
)

TASKS = ("pressure", "capacity", "spectrum", "correlation", "vp_check",
         "inverse_vp", "gap_example", "transfer_check", "property_suite")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise ConfigError(f"config-error at '{path}': {message}")


@dataclass
class ExperimentConfig:
    task: str
    system_spec: dict
    potential_spec: dict
    subset_spec: dict | None
    budget: dict
    seed: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        _require(isinstance(raw, dict), "", "config must be a JSON object")
        task = raw.get("task")
        _require(task in TASKS, "task", f"must be one of {TASKS}")
        system = raw.get("system", {"kind": "full_shift", "k": 2})
        _require(isinstance(system, dict) and "kind" in system, "system",
                 "must be an object with a 'kind'")
        kind = system["kind"]
        _require(kind in ("full_shift", "sft", "line_doubling"),
                 "system.kind", "must be full_shift | sft | line_doubling")
        if kind == "full_shift":
            _require(isinstance(system.get("k"), int) and system["k"] >= 2,
                     "system.k", "must be an integer >= 2")
        if kind == "sft":
            adj = system.get("adjacency")
            _require(isinstance(adj, list) and adj and
                     all(isinstance(row, list) and len(row) == len(adj)
                         for row in adj),
                     "system.adjacency", "must be a square 0/1 matrix")
        potential = raw.get("potential", {"kind": "zero"})
        _require(isinstance(potential, dict), "potential", "must be an object")
        pkind = potential.get("kind", "table")
        _require(pkind in ("zero", "constant", "table", "named"),
                 "potential.kind", "must be zero | constant | table | named")
        if pkind == "table":
            _require(isinstance(potential.get("depth"), int)
                     and potential["depth"] >= 1,
                     "potential.depth", "must be an integer >= 1")
            _require(isinstance(potential.get("table"), dict),
                     "potential.table", "must map words to values")
        if pkind == "named":
            _require(potential.get("name") == "arccot",
                     "potential.name", "only 'arccot' is available")
        subset = raw.get("subset")
        if subset is not None:
            _require(isinstance(subset, dict) and subset.get("kind") in
                     ("whole", "sub_sft", "cylinders"),
                     "subset.kind", "must be whole | sub_sft | cylinders")
        budget = raw.get("budget", {})
        _require(isinstance(budget, dict), "budget", "must be an object")
        for key in ("tol",):
            if key in budget:
                _require(budget[key] > 0, f"budget.{key}", "must be positive")
        if "q_grid" in budget:
            q = budget["q_grid"]
            ok = (isinstance(q, list) and q) or \
                 (isinstance(q, dict) and {"lo", "hi", "step"} <= set(q))
            _require(ok, "budget.q_grid",
                     "must be a list or {lo, hi, step}")
            if task == "correlation":
                grid = _q_grid(budget)
                _require(not np.isclose(grid, 1.0).any(), "budget.q_grid",
                         "must exclude q = 1 for correlation tasks")
        seed = raw.get("seed", 0)
        _require(isinstance(seed, int), "seed", "must be an integer")
        return cls(task, system, potential, subset, budget, seed)

    # -- builders ----------------------------------------------------------

    def build_system(self) -> ShiftSystem | None:
        kind = self.system_spec["kind"]
        if kind == "full_shift":
            return make_full_shift(self.system_spec["k"])
        if kind == "sft":
            return ShiftSystem(self.system_spec["adjacency"])
        return None  # line_doubling has no symbolic system

    def build_potential(self, system: ShiftSystem) -> Potential:
        kind = self.potential_spec.get("kind", "table")
        if kind == "zero":
            return Potential.zero(system)
        if kind == "constant":
            return Potential.constant(system, float(self.potential_spec["value"]))
        if kind == "named":
            raise ConfigError("config-error at 'potential.kind': the named "
                              "potential only applies to the line model")
        table = {tuple(int(c) for c in key.split(",")): float(v)
                 for key, v in self.potential_spec["table"].items()}
        return Potential(system, self.potential_spec["depth"], table)

    def build_subset(self, system: ShiftSystem) -> SubsetSpec:
        if self.subset_spec is None:
            return SubsetSpec.whole(system)
        kind = self.subset_spec["kind"]
        if kind == "whole":
            return SubsetSpec.whole(system)
        if kind == "sub_sft":
            return SubsetSpec.sub_sft(system, self.subset_spec["adjacency"])
        return SubsetSpec.cylinders(system, self.subset_spec["words"])


def _q_grid(budget: dict) -> np.ndarray:
    q = budget.get("q_grid", {"lo": -5.0, "hi": 5.0, "step": 0.05})
    if isinstance(q, list):
        return np.asarray([float(x) for x in q])
    n = int(round((q["hi"] - q["lo"]) / q["step"]))
    return np.round(q["lo"] + q["step"] * np.arange(n + 1), 12)


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    oracle: str  # what the value was compared against, or "estimate-only"


@dataclass
class TaskResult:
    task: str
    values: dict
    checks: list
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass
class RunReport:
    config: ExperimentConfig
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


# ---------------------------------------------------------------------------
# task handlers


def _task_pressure(cfg: ExperimentConfig) -> TaskResult:
    system = cfg.build_system()
    potential = cfg.build_potential(system)
    subset = cfg.build_subset(system)
    tol = cfg.budget.get("tol", 1e-4)
    depths = cfg.budget.get("depths", [potential.depth])
    n_max = cfg.budget.get("n_max", 20)
    est = pressure_refined(subset, potential, depths, n_max, tol)
    checks = []
    values = {"pressure": est.value, "bracket": list(est.bracket)}
    if subset.kind == SubsetSpec.WHOLE and system.irreducible:
        oracle = transfer_pressure(system, potential)
        values["oracle"] = oracle
        checks.append(Check("pressure vs transfer oracle",
                            abs(est.value - oracle) <= 2 * tol,
                            est.value, 2 * tol, f"transfer={oracle:.12g}"))
    else:
        checks.append(Check("pressure bracket width",
                            est.bracket[1] - est.bracket[0] <= tol,
                            est.value, tol, "estimate-only"))
    lo, hi = capacity_pressures(subset, potential, Cover(system, depths[-1]),
                                max(8, n_max))
    rows = [(n, f"{ll:.12g}", f"{s:.12g}") for n, ll, s in hi.diagnostics["rows"]]
    checks.append(Check("chain P <= upper capacity + 2tol",
                        est.value <= hi.value + 2 * tol,
                        hi.value - est.value, 2 * tol, "internal chain"))
    return TaskResult("pressure", values, checks,
                      {"pressure_diagnostics": (("N", "log_lambda", "slope"),
                                                rows)})


def _task_capacity(cfg: ExperimentConfig) -> TaskResult:
    system = cfg.build_system()
    potential = cfg.build_potential(system)
    subset = cfg.build_subset(system)
    tol = cfg.budget.get("tol", 1e-3)
    n_max = cfg.budget.get("n_max", 24)
    depth = cfg.budget.get("depths", [potential.depth])[-1]
    lo, hi = capacity_pressures(subset, potential, Cover(system, depth), n_max)
    values = {"cp_lower": lo.value, "cp_upper": hi.value}
    checks = [Check("lower <= upper", lo.value <= hi.value + 1e-12,
                    hi.value - lo.value, 0.0, "internal chain")]
    if subset.kind == SubsetSpec.WHOLE and system.irreducible:
        oracle = transfer_pressure(system, potential)
        values["oracle"] = oracle
        checks.append(Check("upper capacity vs transfer oracle",
                            abs(hi.value - oracle) <= tol, hi.value, tol,
                            f"transfer={oracle:.12g}"))
    rows = [(n, f"{ll:.12g}", f"{s:.12g}") for n, ll, s in hi.diagnostics["rows"]]
    return TaskResult("capacity", values, checks,
                      {"capacity_diagnostics": (("N", "log_lambda", "slope"),
                                                rows)})


def _task_spectrum(cfg: ExperimentConfig) -> TaskResult:
    system = cfg.build_system()
    potential = cfg.build_potential(system)
    curve = t_curve(system, potential, _q_grid(cfg.budget))
    rows = [(f"{q:.12g}", f"{t:.12g}", f"{a:.12g}", f"{e:.12g}")
            for q, t, a, e in zip(curve.q_grid, curve.t_values,
                                  curve.alpha_values, curve.spectrum_values)]
    checks = []
    i0, i1 = curve.index_of(0.0), curve.index_of(1.0)
    if i0 is not None:
        checks.append(Check("T(0) equals topological entropy",
                            abs(curve.t_values[i0] - curve.entropy_top) <= 1e-9,
                            float(curve.t_values[i0]), 1e-9,
                            f"entropy={curve.entropy_top:.12g}"))
    if i1 is not None:
        checks.append(Check("T(1) vanishes", abs(curve.t_values[i1]) <= 1e-9,
                            float(curve.t_values[i1]), 1e-9, "exact 0"))
    chk = legendre_check(curve)
    if chk.skipped:
        values = {"legendre": "skipped (degenerate spectrum)"}
    else:
        values = {"legendre_forward": chk.forward_defect,
                  "legendre_reverse": chk.reverse_defect}
        checks.append(Check("Legendre duality defect", chk.max_defect <= 1e-4,
                            chk.max_defect, 1e-4, "grid transform"))
    return TaskResult("spectrum", values, checks,
                      {"spectrum": (("q", "T", "alpha", "E"), rows)})


def _task_correlation(cfg: ExperimentConfig) -> TaskResult:
    system = cfg.build_system()
    potential = cfg.build_potential(system)
    n = cfg.budget.get("n", 20)
    tol = cfg.budget.get("tol", 1e-3)
    grid = _q_grid(cfg.budget) if "q_grid" in cfg.budget \
        else np.array([0.5, 2.0, 3.0])
    curve = correlation_entropy(system, potential, grid, n)
    mu = equilibrium_markov(system, potential)
    rows = [(f"{q:.12g}", f"{f:.12g}", f"{d:.12g}")
            for q, f, d in zip(curve.q_grid, curve.formula_values,
                               curve.direct_values)]
    checks = [
        Check("formula vs direct cylinder sums", curve.max_mismatch() <= tol,
              curve.max_mismatch(), tol, "cylinder sums"),
        Check("limit at q=1 equals measure entropy",
              abs(curve.limit_at_one - mu.entropy) <= tol,
              curve.limit_at_one, tol, f"entropy={mu.entropy:.12g}"),
    ]
    return TaskResult("correlation",
                      {"limit_at_one": curve.limit_at_one, "n": n},
                      checks,
                      {"correlation": (("q", "h_formula", "h_direct"), rows)})


def _task_vp_check(cfg: ExperimentConfig) -> TaskResult:
    system = cfg.build_system()
    potential = cfg.build_potential(system)
    count = cfg.budget.get("samples", 200)
    rng = np.random.default_rng(cfg.seed)
    mu = equilibrium_markov(system, potential)
    worst = min(vp_residual(system, potential, m)
                for m in perturbed_invariant_measures(mu, count, rng))
    at_eq = vp_residual(system, potential, mu)
    checks = [
        Check("residual nonnegative over random invariant measures",
              worst >= -1e-9, worst, 1e-9, "variational inequality"),
        Check("residual vanishes at the equilibrium state",
              abs(at_eq) <= 1e-9, at_eq, 1e-9, "equilibrium state"),
    ]
    return TaskResult("vp_check", {"worst_residual": worst,
                                   "equilibrium_residual": at_eq}, checks)


def _task_inverse_vp(cfg: ExperimentConfig) -> TaskResult:
    system = cfg.build_system()
    potential = cfg.build_potential(system)
    n = cfg.budget.get("n", 14)
    mu = equilibrium_markov(system, potential)
    value = inverse_vp_probe(system, potential, mu, n)
    target = mu.entropy + mu.integrate(potential)
    ceiling = transfer_pressure(system, potential)
    slack = cfg.budget.get("tol", 3.0 / math.sqrt(n))
    checks = [
        Check("probe within the variational sandwich",
              target - slack <= value <= ceiling + slack,
              value, slack, f"[h+int, P] = [{target:.6g}, {ceiling:.6g}]"),
    ]
    return TaskResult("inverse_vp", {"probe": value, "target": target,
                                     "pressure": ceiling, "n": n}, checks)


def _task_gap_example(cfg: ExperimentConfig) -> TaskResult:
    cert = compactify.gap_example(
        arc_count=cfg.budget.get("arc_count", 64),
        n_range=tuple(cfg.budget.get("n_range", (16, 40))))
    checks = [
        Check("gap equals pi/2 on the inventory side",
              abs(cert.gap - math.pi / 2) <= 1e-12, cert.gap, 1e-12,
              "measure inventory"),
        Check("estimator reproduces the compactified pressure",
              abs(cert.estimator.value - cert.pressure_compactified) <= 1e-2,
              cert.estimator.value, 1e-2, f"pi={math.pi:.12g}"),
        Check("compactified entropy vanishes",
              abs(cert.entropy_estimate) <= 1e-2, cert.entropy_estimate,
              1e-2, "slope of log cell count"),
    ]
    values = {"gap": cert.gap,
              "pressure_compactified": cert.pressure_compactified,
              "sup_over_invariant_measures": cert.sup_over_invariant_measures,
              "estimator": cert.estimator.value,
              "entropy_estimate": cert.entropy_estimate,
              "line_inventory": [m.name for m in cert.line_inventory],
              "compactified_inventory": [m.name for m in
                                         cert.compactified_inventory]}
    return TaskResult("gap_example", values, checks)


def _task_transfer_check(cfg: ExperimentConfig) -> TaskResult:
    model = compactify.LineDoublingModel()
    arc_count = cfg.budget.get("arc_count", 64)
    n_range = tuple(cfg.budget.get("n_range", (16, 40)))
    line_est, circle_est = compactify.compactification_transfer_check(
        model, arc_count=arc_count, n_range=n_range)
    combined = 2 * max(line_est.bracket[1] - line_est.bracket[0],
                       circle_est.bracket[1] - circle_est.bracket[0], 1e-3)
    checks = [
        Check("line and circle covers agree",
              abs(line_est.value - circle_est.value) <= combined,
              abs(line_est.value - circle_est.value), combined,
              "cover transfer"),
        Check("both estimates near pi",
              abs(line_est.value - math.pi) <= 0.05
              and abs(circle_est.value - math.pi) <= 0.05,
              circle_est.value, 0.05, f"pi={math.pi:.12g}"),
    ]
    return TaskResult("transfer_check",
                      {"line": line_est.value, "circle": circle_est.value},
                      checks)


def _task_property_suite(cfg: ExperimentConfig) -> TaskResult:
    """A fast bundle of the structural identities, one check per property."""
    system = make_full_shift(2)
    zero = Potential.zero(system)
    phi = Potential.depth_one(system, [0.0, math.log(2.0)])
    cover = Cover(system, 1)
    whole = SubsetSpec.whole(system)
    tol = cfg.budget.get("tol", 1e-4)
    rng = np.random.default_rng(cfg.seed)

    def chain():
        est_p = critical_alpha(whole, phi, cover, tol)
        lo, hi = capacity_pressures(whole, phi, cover, 20)
        ok = est_p.value <= lo.value + 2 * tol and lo.value <= hi.value + 2 * tol
        return Check("chain P <= lower <= upper capacity", ok,
                     est_p.value, 2 * tol, "internal chain")

    def monotone():
        z1 = SubsetSpec.cylinders(system, [(0, 0)])
        z2 = SubsetSpec.cylinders(system, [(0,)])
        p1 = critical_alpha(z1, phi, cover, tol).value
        p2 = critical_alpha(z2, phi, cover, tol).value
        return Check("monotone under subset inclusion", p1 <= p2 + 2 * tol,
                     p2 - p1, 2 * tol, "nested cylinders")

    def union():
        z1 = SubsetSpec.cylinders(system, [(0, 0)])
        z2 = SubsetSpec.cylinders(system, [(1, 0)])
        z12 = SubsetSpec.cylinders(system, [(0, 0), (1, 0)])
        p = critical_alpha(z12, phi, cover, tol).value
        pm = max(critical_alpha(z1, phi, cover, tol).value,
                 critical_alpha(z2, phi, cover, tol).value)
        return Check("union pressure equals max of parts",
                     abs(p - pm) <= 2 * tol, abs(p - pm), 2 * tol,
                     "finite union")

    def lipschitz():
        vals = rng.normal(size=(4, 2))
        ok = True
        worst = 0.0
        for row in vals:
            pa = Potential.depth_one(system, row)
            pb = Potential.depth_one(system, row + rng.normal(scale=0.3, size=2))
            gap = abs(transfer_pressure(system, pa) - transfer_pressure(system, pb))
            bound = pa.sup_minus(pb)
            worst = max(worst, gap - bound)
            ok = ok and gap <= bound + 1e-9
        return Check("pressure is 1-Lipschitz in the potential", ok, worst,
                     1e-9, "transfer oracle")

    def gibbs():
        for _ in range(5):
            dim = int(rng.integers(2, 5))
            adj = _random_irreducible(rng, dim)
            sys_r = ShiftSystem(adj)
            vals = rng.normal(size=dim)
            mu = equilibrium_markov(sys_r, Potential.depth_one(sys_r, vals))
            gap = math.log(mu.eigenvalue) - mu.entropy - mu.potential_integral
            if abs(gap) > 1e-9:
                return Check("Gibbs identity", False, gap, 1e-9, "eigendata")
        return Check("Gibbs identity", True, 0.0, 1e-9, "eigendata")

    def power():
        lhs, rhs = power_pressure_check(system, phi, 2)
        return Check("pressure of the squared system", abs(lhs - rhs) <= 1e-9,
                     lhs - rhs, 1e-9, "power identity")

    def invariant_subset():
        sub = SubsetSpec.sub_sft(system, [[1, 1], [1, 0]])
        p = critical_alpha(sub, zero, cover, tol).value
        lo, hi = capacity_pressures(sub, zero, cover, 24)
        golden = math.log((1 + math.sqrt(5)) / 2)
        ok = abs(p - golden) <= 1e-3 and abs(hi.value - golden) <= 1e-3 \
            and abs(p - lo.value) <= 2 * tol
        return Check("invariant subset: three pressures coincide", ok,
                     p, 1e-3, f"golden={golden:.12g}")

    props = [chain, monotone, union, lipschitz, gibbs, power, invariant_subset]
    jobs = cfg.budget.get("jobs", 1)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            checks = list(pool.map(lambda f: f(), props))
    else:
        checks = [f() for f in props]
    return TaskResult("property_suite",
                      {"properties": len(checks)}, checks)


def _random_irreducible(rng, dim: int) -> np.ndarray:
    adj = (rng.random((dim, dim)) < 0.5).astype(np.int64)
    for i in range(dim):  # a full cycle plus a loop keeps it primitive
        adj[i, (i + 1) % dim] = 1
    adj[0, 0] = 1
    return adj


_HANDLERS = {
    "pressure": _task_pressure,
    "capacity": _task_capacity,
    "spectrum": _task_spectrum,
    "correlation": _task_correlation,
    "vp_check": _task_vp_check,
    "inverse_vp": _task_inverse_vp,
    "gap_example": _task_gap_example,
    "transfer_check": _task_transfer_check,
    "property_suite": _task_property_suite,
}


def run(config: ExperimentConfig) -> RunReport:
    """Dispatch one experiment config and collect its report."""
    handler = _HANDLERS[config.task]
    start = time.perf_counter()
    result = handler(config)
    result.wall_clock = time.perf_counter() - start
    return RunReport(config, [result])


def emit_tables(report: RunReport, out_dir) -> list[Path]:
    """Write the report's tables as CSV plus a JSON summary.

    File contents depend only on the config and seed (timings and other
    run-specific data stay out), so reruns are byte-identical.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"io-error: cannot create output dir {out}: {exc}")
    written = []
    summary = {"task": report.config.task, "passed": report.passed,
               "checks": [], "values": {}}
    for result in report.results:
        for name, (header, rows) in result.tables.items():
            path = out / f"{name}.csv"
            lines = [",".join(header)]
            lines += [",".join(str(c) for c in row) for row in rows]
            path.write_text("\n".join(lines) + "\n")
            written.append(path)
        summary["values"][result.task] = _jsonable(result.values)
        for c in result.checks:
            summary["checks"].append({
                "task": result.task, "name": c.name, "passed": bool(c.passed),
                "value": _jsonable(c.value), "tolerance": c.tolerance,
                "oracle": c.oracle,
            })
    path = out / "summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ergopress",
        description="Cover-based topological pressure experiments")
    parser.add_argument("task", choices=[t.replace("_", "-") for t in TASKS]
                        + ["suite"])
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON experiment config")
    parser.add_argument("--out", type=Path, default=Path("ergopress-out"))
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except OSError as exc:
            print(f"io-error: cannot read config: {exc}", file=sys.stderr)
            return 2
        except json.JSONDecodeError as exc:
            print(f"config-error: invalid JSON: {exc}", file=sys.stderr)
            return 2
    task = args.task.replace("-", "_")
    raw["task"] = "property_suite" if task == "suite" else task
    if args.tol is not None:
        raw.setdefault("budget", {})["tol"] = args.tol
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.jobs != 1:
        raw.setdefault("budget", {})["jobs"] = args.jobs

    try:
        config = ExperimentConfig.from_dict(raw)
        report = run(config)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    files = emit_tables(report, args.out)
    for result in report.results:
        for c in result.checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"[{status}] {result.task}: {c.name} "
                  f"(value={_jsonable(c.value)!r:.40s}, tol={c.tolerance:g}, "
                  f"vs {c.oracle})")
        print(f"{result.task}: wall-clock {result.wall_clock:.2f}s")
    print("wrote:", ", ".join(str(f) for f in files))
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
