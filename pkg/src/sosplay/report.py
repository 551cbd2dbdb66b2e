"""Test report model and its two renderings.

The machine-readable form is JSON lines, one record per line, each with a
``record`` key:

``feature``   {feature, path}
``scenario``  {feature, scenario, tags, status, trace}
``step``      {feature, scenario, step, keyword, status, diagnostic}
``summary``   {scenarios: {...counts}, steps: {...counts}, wall_time}

``step`` is the step text, ``trace`` the scenario's canonical event lines and
``diagnostic`` either null or an object with ``reason``, ``message``,
``pattern``, ``pending`` and ``trace_tail``.  Records appear in execution
order: a feature, then each scenario followed by its steps.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional

PASSED, FAILED, PENDING, SKIPPED = "passed", "failed", "pending", "skipped"
STEP_STATUSES = (PASSED, FAILED, PENDING, SKIPPED)


@dataclass
class Diagnostic:
    reason: str  # quiescent | stuck | step-bound | pending | ambiguous | error
    message: str
    pattern: Optional[str] = None
    pending: list = field(default_factory=list)
    trace_tail: list = field(default_factory=list)


@dataclass
class StepReport:
    keyword: str
    text: str
    status: str
    diagnostic: Optional[Diagnostic] = None


@dataclass
class ScenarioReport:
    name: str
    tags: list
    steps: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return PASSED if all(s.status == PASSED for s in self.steps) else FAILED

    @property
    def failure(self) -> Optional[StepReport]:
        for s in self.steps:
            if s.status in (FAILED, PENDING):
                return s
        return None


@dataclass
class FeatureReport:
    name: str
    path: Optional[str] = None
    scenarios: list = field(default_factory=list)


@dataclass
class TestReport:
    __test__ = False  # not a pytest class

    features: list = field(default_factory=list)
    wall_time: float = 0.0

    def scenarios(self):
        for f in self.features:
            yield from f.scenarios

    def scenario_counts(self) -> Counter:
        c = Counter(s.status for s in self.scenarios())
        c["total"] = sum(1 for _ in self.scenarios())
        return c

    def step_counts(self) -> Counter:
        c = Counter(st.status for s in self.scenarios() for st in s.steps)
        c["total"] = sum(1 for s in self.scenarios() for _ in s.steps)
        return c

    @property
    def pending_scenarios(self) -> int:
        return sum(1 for s in self.scenarios() if any(st.status == PENDING for st in s.steps))

    @property
    def ok(self) -> bool:
        return all(s.status == PASSED for s in self.scenarios())


def _counts_text(counts: Counter, noun: str, order) -> str:
    parts = [f"{counts[k]} {k}" for k in order if counts[k]]
    inner = f" ({', '.join(parts)})" if parts else ""
    return f"{counts['total']} {noun}{inner}"


def render_pretty(report: TestReport, trace: bool = False) -> str:
    out = []
    for feature in report.features:
        out.append(f"Feature: {feature.name}")
        for scen in feature.scenarios:
            mark = "✔" if scen.status == PASSED else "✘"
            tags = f"  {' '.join(scen.tags)}" if scen.tags else ""
            out.append(f"  {mark} Scenario: {scen.name}{tags}")
            for step in scen.steps:
                symbol = {PASSED: "✔", FAILED: "✘", PENDING: "?", SKIPPED: "-"}[step.status]
                out.append(f"      {symbol} {step.keyword} {step.text}  [{step.status}]")
                d = step.diagnostic
                if d is not None:
                    out.append(f"          {d.reason}: {d.message}")
                    if d.pending:
                        out.append("          pending requests:")
                        out.extend(f"            {p}" for p in d.pending)
                    if d.trace_tail:
                        out.append("          last events:")
                        out.extend(f"            {t}" for t in d.trace_tail)
            if trace:
                out.append("      trace:")
                out.extend(f"        {line}" for line in scen.trace)
        out.append("")
    out.append(_counts_text(report.scenario_counts(), "scenarios", (PASSED, FAILED)))
    out.append(_counts_text(report.step_counts(), "steps", STEP_STATUSES))
    out.append(f"wall time {report.wall_time:.3f}s")
    return "\n".join(out) + "\n"


def render_json_lines(report: TestReport) -> str:
    def dump(obj):
        return json.dumps(obj, sort_keys=True, ensure_ascii=False)

    lines = []
    for feature in report.features:
        lines.append(dump({"record": "feature", "feature": feature.name, "path": feature.path}))
        for scen in feature.scenarios:
            lines.append(
                dump(
                    {
                        "record": "scenario",
                        "feature": feature.name,
                        "scenario": scen.name,
                        "tags": list(scen.tags),
                        "status": scen.status,
                        "trace": list(scen.trace),
                    }
                )
            )
            for step in scen.steps:
                lines.append(
                    dump(
                        {
                            "record": "step",
                            "feature": feature.name,
                            "scenario": scen.name,
                            "step": step.text,
                            "keyword": step.keyword,
                            "status": step.status,
                            "diagnostic": asdict(step.diagnostic) if step.diagnostic else None,
                        }
                    )
                )
    sc, st = report.scenario_counts(), report.step_counts()
    lines.append(
        dump(
            {
                "record": "summary",
                "scenarios": {k: sc[k] for k in ("total", PASSED, FAILED)},
                "steps": {k: st[k] for k in ("total",) + STEP_STATUSES},
                "wall_time": report.wall_time,
            }
        )
    )
    return "\n".join(lines) + "\n"


FORMATS = ("pretty", "json-lines")


def write_report(report: TestReport, format: str = "pretty", trace: bool = False) -> str:
    if format == "pretty":
        return render_pretty(report, trace=trace)
    if format == "json-lines":
        return render_json_lines(report)
    raise ValueError(f"unknown report format {format!r}")


def read_report(text: str) -> TestReport:
    """Rebuild a report from its JSON-lines rendering."""
    report = TestReport()
    feature = scenario = None
    for line in text.split("\n"):
        if not line.strip():
            continue
        rec = json.loads(line)
        kind = rec["record"]
        if kind == "feature":
            feature = FeatureReport(rec["feature"], rec["path"])
            report.features.append(feature)
        elif kind == "scenario":
            scenario = ScenarioReport(rec["scenario"], list(rec["tags"]), [], list(rec["trace"]))
            feature.scenarios.append(scenario)
        elif kind == "step":
            diag = Diagnostic(**rec["diagnostic"]) if rec["diagnostic"] else None
            scenario.steps.append(StepReport(rec["keyword"], rec["step"], rec["status"], diag))
        elif kind == "summary":
            report.wall_time = rec["wall_time"]
        else:
            raise ValueError(f"unknown record type {kind!r}")
    return report
