"""Executes Gherkin features against scenario programs.

Each usage scenario runs on a fresh engine.  Trigger steps inject an event and
run the engine to quiescence; ``eventually`` steps look for a matching event
after the current checkpoint, running the engine further if needed, and move
the checkpoint past the match.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .engine import DEFAULT_MAX_STEPS, Engine, format_trace
from .events import ANY, Event, EventPattern, Message, matches
from .gherkin import (
    AmbiguousStepError,
    FeatureSpec,
    PendingStep,
    StepKind,
    StepRegistry,
    filter_by_tags,
    load_feature,
    match_step,
)
from .report import (
    FAILED,
    PASSED,
    PENDING,
    SKIPPED,
    Diagnostic,
    FeatureReport,
    ScenarioReport,
    StepReport,
    TestReport,
)

TRACE_TAIL = 8


class StepFailed(AssertionError):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class StepMisuse(RuntimeError):
    pass


@dataclass(frozen=True)
class EngineSuite:
    """A named engine factory together with the step definitions run against it."""

    name: str
    factory: Callable[..., Engine]
    steps: StepRegistry
    description: str = ""


_SUITES: dict[str, EngineSuite] = {}


def register_engine(name, factory, steps, description="", replace=True) -> EngineSuite:
    if name in _SUITES and not replace:
        raise ValueError(f"engine {name!r} already registered")
    suite = EngineSuite(name, factory, steps, description)
    _SUITES[name] = suite
    return suite


def get_engine(name) -> EngineSuite:
    try:
        return _SUITES[name]
    except KeyError:
        known = ", ".join(sorted(_SUITES)) or "none"
        raise KeyError(f"unknown engine {name!r} (registered: {known})") from None


def engine_names() -> list[str]:
    return sorted(_SUITES)


@dataclass
class RunConfig:
    features: Sequence = ()
    tags: Optional[str] = None
    max_steps: int = DEFAULT_MAX_STEPS
    trace: bool = False
    format: str = "pretty"
    engine: str = "composed"

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass
class StepContext:
    """Handle passed to step actions as their first argument."""

    engine: Engine
    max_steps: int = DEFAULT_MAX_STEPS
    checkpoint: int = 0
    kind: Optional[StepKind] = None
    data: dict = field(default_factory=dict)

    @property
    def trace(self) -> list[Event]:
        return self.engine.trace

    def event(self, sender: str, receiver: str, message: str, *params) -> Event:
        return Event(
            self.engine.role(sender), self.engine.role(receiver), Message(message, len(params)), params
        )

    def pattern(self, sender, receiver, message: str, *params) -> EventPattern:
        return EventPattern(
            ANY if sender is None else sender,
            ANY if receiver is None else receiver,
            Message(message, len(params)),
            params,
        )

    def _budget(self) -> int:
        return self.max_steps - self.engine.step_count

    def _tail(self):
        start = max(0, len(self.trace) - TRACE_TAIL)
        return format_trace(self.trace[start:], start)

    def _livelock(self, what: str):
        raise StepFailed(
            Diagnostic(
                "step-bound",
                f"step bound of {self.max_steps} exhausted while {what} (possible livelock)",
                trace_tail=self._tail(),
            )
        )

    def run(self):
        """Run the engine to quiescence within the remaining step budget."""
        budget = self._budget()
        if budget < 1:
            if self.engine.select_event() is None:
                return self.engine.quiescent()
            self._livelock("running the engine")
        result = self.engine.run_to_quiescence(budget)
        if result.bound_exceeded:
            self._livelock("running the engine")
        return result.quiescent

    def trigger(self, event: Event) -> None:
        if self.kind not in (StepKind.GIVEN, StepKind.WHEN):
            raise StepMisuse("trigger is only allowed in Given/When steps")
        self.engine.inject(event)
        self.run()

    def _find(self, pattern):
        for i in range(self.checkpoint, len(self.trace)):
            if matches(pattern, self.trace[i]):
                return i
        return None

    def eventually(self, pattern: EventPattern) -> Event:
        if self.kind is not StepKind.THEN:
            raise StepMisuse("eventually is only allowed in Then steps")
        pos = self._find(pattern)
        if pos is None:
            if self._budget() < 1 and self.engine.select_event() is not None:
                self._livelock(f"waiting for {pattern}")
            result = self.engine.run_to_quiescence(max(1, self._budget()))
            if result.bound_exceeded:
                self._livelock(f"waiting for {pattern}")
            pos = self._find(pattern)
            if pos is None:
                q = result.quiescent
                pending = [str(p) for p in q.pending]
                if q.blocked_external is not None:
                    pending.append(f"[queue] {q.blocked_external} (blocked)")
                if q.stuck:
                    reason = "stuck"
                    msg = f"{pattern} not observed; engine stuck with pending requests"
                else:
                    reason = "quiescent"
                    msg = f"{pattern} not observed; engine quiescent"
                raise StepFailed(Diagnostic(reason, msg, str(pattern), pending, self._tail()))
        self.checkpoint = pos + 1
        return self.trace[pos]


def _run_scenario(feature, scenario, factory, registry, config) -> ScenarioReport:
    engine = factory(max_steps=config.max_steps)
    ctx = StepContext(engine, config.max_steps)
    report = ScenarioReport(scenario.name, sorted(feature.effective_tags(scenario)))
    failed = False
    for step in scenario.steps:
        if failed:
            report.steps.append(StepReport(step.keyword, step.text, SKIPPED))
            continue
        status, diag = PASSED, None
        try:
            found = match_step(registry, step.kind, step.text)
        except AmbiguousStepError as exc:
            found, status, diag = None, FAILED, Diagnostic("ambiguous", str(exc))
        if found is None and status == PASSED:
            status, diag = PENDING, Diagnostic("pending", f"no step definition for {step.kind.value} {step.text!r}")
        if found is not None:
            binding, captures = found
            ctx.kind = step.kind
            try:
                binding.action(ctx, *captures)
            except PendingStep as exc:
                status, diag = PENDING, Diagnostic("pending", str(exc) or "step not implemented")
            except StepFailed as exc:
                status, diag = FAILED, exc.diagnostic
            except Exception as exc:  # any step error fails the step
                status = FAILED
                diag = Diagnostic("error", f"{type(exc).__name__}: {exc}", trace_tail=ctx._tail())
        if status != PASSED:
            failed = True
        report.steps.append(StepReport(step.keyword, step.text, status, diag))
    report.trace = format_trace(engine.trace)
    return report


def run_feature(feature: FeatureSpec, factory, registry: StepRegistry, config: RunConfig = None) -> FeatureReport:
    config = config or RunConfig()
    out = FeatureReport(feature.name, feature.path)
    for scenario in feature.scenarios:
        out.scenarios.append(_run_scenario(feature, scenario, factory, registry, config))
    return out


def collect_feature_paths(paths) -> list[Path]:
    """Expand directories to their ``*.feature`` files (sorted, recursive)."""
    out = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(p.rglob("*.feature")))
        elif p.is_file():
            out.append(p)
        else:
            raise FileNotFoundError(f"no such feature file or directory: {p}")
    return out


def run_suite(features, config: RunConfig, *, factory=None, steps=None) -> TestReport:
    """Run features (FeatureSpec objects or paths) after tag filtering.

    Without an explicit factory/steps the engine named in ``config`` is
    looked up in the engine registry.
    """
    if factory is None or steps is None:
        suite = get_engine(config.engine)
        factory = factory or suite.factory
        steps = steps or suite.steps
    specs = []
    for f in features:
        if isinstance(f, FeatureSpec):
            specs.append(f)
        else:
            specs.extend(load_feature(p) for p in collect_feature_paths([f]))
    specs = filter_by_tags(specs, config.tags)
    t0 = time.perf_counter()
    report = TestReport()
    for spec in specs:
        report.features.append(run_feature(spec, factory, steps, config))
    report.wall_time = time.perf_counter() - t0
    return report
