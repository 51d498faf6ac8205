"""Verification reports: per-check records, JSON/text rendering and the runner."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

from .. import __version__
from .checks import CHECKS, CheckContext
from .scenario import Scenario

SCHEMA_VERSION = "1.0"


def _json_float(x: float):
    # JSON has no inf/nan; keep them as strings so the report stays parseable
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _from_json_float(x):
    if isinstance(x, str):
        return float(x)
    return x


@dataclass
class CheckRecord:
    check: str
    anchor: str
    parameters: dict
    residual: float
    tolerance: float
    verdict: str
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["residual"] = _json_float(self.residual)
        d["tolerance"] = _json_float(self.tolerance)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> CheckRecord:
        return cls(
            d["check"], d["anchor"], dict(d["parameters"]),
            _from_json_float(d["residual"]), _from_json_float(d["tolerance"]),
            d["verdict"], d.get("wall_time"),
        )


def verdict(residual: float, tolerance: float) -> str:
    # NaN residuals compare False and fail
    return "PASS" if residual <= tolerance else "FAIL"


@dataclass
class VerificationReport:
    scenario: dict
    records: list = field(default_factory=list)
    engine_version: str = __version__
    schema_version: str = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def by_check(self) -> dict:
        out: dict = {}
        for r in self.records:
            out.setdefault(r.check, []).append(r)
        return out

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "engine_version": self.engine_version,
            "scenario": self.scenario,
            "passed": self.passed,
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, d: dict) -> VerificationReport:
        return cls(
            scenario=d["scenario"],
            records=[CheckRecord.from_dict(r) for r in d["records"]],
            engine_version=d["engine_version"],
            schema_version=d["schema_version"],
        )


def _worst(records: list) -> CheckRecord:
    """Record closest to (or furthest past) its tolerance."""
    def key(r):
        if not math.isfinite(r.residual):
            return math.inf
        return r.residual / r.tolerance if r.tolerance > 0 else (math.inf if r.residual > 0 else 0.0)
    return max(records, key=key)


def render_text(report: VerificationReport) -> str:
    lines = [
        f"dual-bbgky verification report (engine {report.engine_version}, schema {report.schema_version})",
        f"scenario: {report.scenario.get('source') or '<inline>'}  seed={report.scenario.get('seed')}",
        "",
        f"{'check':30s} {'records':>7s} {'failed':>6s} {'worst residual':>15s} {'tolerance':>11s}  verdict",
    ]
    for check, recs in report.by_check().items():
        w = _worst(recs)
        nfail = sum(not r.passed for r in recs)
        lines.append(
            f"{check:30s} {len(recs):7d} {nfail:6d} {w.residual:15.3e} {w.tolerance:11.3e}  {'PASS' if nfail == 0 else 'FAIL'}"
        )
    total = len(report.records)
    nfail = len(report.failures())
    lines.append("")
    lines.append(f"{total - nfail}/{total} records passed; overall {'PASS' if report.passed else 'FAIL'}")
    for r in report.failures():
        lines.append(f"  FAIL {r.check} {json.dumps(r.parameters, sort_keys=True)} residual={r.residual:.3e} tol={r.tolerance:.3e}")
    return "\n".join(lines) + "\n"


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode()
    if fmt == "text":
        return render_text(report).encode()
    raise ValueError(f"unknown report format {fmt!r}; expected json or text")


def parse_report(data: bytes | str) -> VerificationReport:
    return VerificationReport.from_dict(json.loads(data))


def run_scenario(scenario: Scenario, deterministic: bool = True) -> VerificationReport:
    """Run the requested checks in order and collect their records.

    A failing identity only produces FAIL records; exceptions from the
    engine (capacity, I/O) propagate.  In deterministic mode wall times are
    left out so repeated runs give byte-identical JSON.
    """
    ctx = CheckContext(scenario.seed, list(scenario.times), list(scenario.gamma_values), scenario.instances, scenario.spec_for)
    echo = scenario.to_dict()
    echo["source"] = scenario.source
    report = VerificationReport(scenario=echo)
    for check_id in scenario.checks:
        info = CHECKS[check_id]
        default_tol = scenario.tolerance_overrides.get(check_id, info.tolerance)
        start = time.perf_counter()
        results = info.run(ctx)
        elapsed = time.perf_counter() - start
        per_record = None if deterministic or not results else elapsed / len(results)
        for item in results:
            params, residual = item[0], float(item[1])
            tol = float(item[2]) if len(item) > 2 and check_id not in scenario.tolerance_overrides else float(default_tol)
            report.records.append(
                CheckRecord(check_id, info.anchor, params, residual, tol, verdict(residual, tol), per_record)
            )
    return report
