"""Gherkin subset: parsing, printing, skeleton generation, step matching and
tag filtering.

Supported: ``Feature:``, ``Scenario:``, ``Given/When/Then/And`` steps,
``@tag`` lines directly above a Feature or Scenario header, ``#`` comments
and blank lines.  Scenario outlines, backgrounds, tables and doc-strings are
not supported.
"""

from __future__ import annotations

import inspect
import keyword
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional


class StepKind(str, Enum):
    GIVEN = "Given"
    WHEN = "When"
    THEN = "Then"


STEP_KEYWORDS = ("Given", "When", "Then", "And")


class GherkinParseError(ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = f"{path or '<text>'}:{line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class AmbiguousStepError(LookupError):
    pass


class TagExpressionError(ValueError):
    pass


class PendingStep(Exception):
    """Raised by a step body that has not been implemented yet."""


@dataclass(frozen=True)
class Step:
    keyword: str  # as written, may be "And"
    kind: StepKind  # resolved, never And
    text: str
    line: int = field(default=0, compare=False)

    def __str__(self):
        return f"{self.keyword} {self.text}"


@dataclass(frozen=True)
class UsageScenario:
    name: str
    tags: frozenset = frozenset()
    steps: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    scenarios: tuple = ()
    tags: frozenset = frozenset()
    path: Optional[str] = field(default=None, compare=False)

    def effective_tags(self, scenario: UsageScenario) -> frozenset:
        return scenario.tags | self.tags


_TAG = re.compile(r"@[^\s@,]+")


def _parse_tags(line, lineno, path):
    tags = line.split()
    for t in tags:
        if not _TAG.fullmatch(t):
            raise GherkinParseError(f"malformed tag {t!r}", lineno, path)
    return tags


def parse_feature(text: str, path: Optional[str] = None) -> FeatureSpec:
    feature_name = None
    feature_tags: frozenset = frozenset()
    scenarios = []
    current = None  # [name, tags, steps, line]
    last_kind = None
    pending_tags: list[str] = []

    def close():
        if current is not None:
            scenarios.append(UsageScenario(current[0], frozenset(current[1]), tuple(current[2]), current[3]))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            pending_tags.extend(_parse_tags(line, lineno, path))
            continue
        if line.startswith("Feature:"):
            if feature_name is not None:
                raise GherkinParseError("only one Feature per file", lineno, path)
            feature_name = line[len("Feature:"):].strip()
            feature_tags = frozenset(pending_tags)
            pending_tags = []
            continue
        if line.startswith("Scenario:"):
            if feature_name is None:
                raise GherkinParseError("Scenario before Feature", lineno, path)
            close()
            current = [line[len("Scenario:"):].strip(), pending_tags, [], lineno]
            pending_tags = []
            last_kind = None
            continue
        word = line.split(None, 1)[0]
        if word in STEP_KEYWORDS:
            if pending_tags:
                raise GherkinParseError("tags must precede a Feature or Scenario", lineno, path)
            if current is None:
                raise GherkinParseError("step before any Scenario", lineno, path)
            step_text = line[len(word):].strip()
            if not step_text:
                raise GherkinParseError(f"empty {word} step", lineno, path)
            if word == "And":
                if last_kind is None:
                    raise GherkinParseError("And without a preceding step", lineno, path)
                kind = last_kind
            else:
                kind = StepKind(word)
            last_kind = kind
            current[2].append(Step(word, kind, step_text, lineno))
            continue
        raise GherkinParseError(f"unrecognised line {line!r}", lineno, path)

    close()
    if feature_name is None:
        raise GherkinParseError("no Feature header", None, path)
    if pending_tags:
        raise GherkinParseError("dangling tags at end of file", None, path)
    if not scenarios:
        raise GherkinParseError("feature has no scenarios", None, path)
    return FeatureSpec(feature_name, tuple(scenarios), feature_tags, path)


def load_feature(path) -> FeatureSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_feature(fh.read(), str(path))


def print_feature(feature: FeatureSpec) -> str:
    lines = []
    if feature.tags:
        lines.append(" ".join(sorted(feature.tags)))
    lines.append(f"Feature: {feature.name}")
    for scenario in feature.scenarios:
        lines.append("")
        if scenario.tags:
            lines.append("  " + " ".join(sorted(scenario.tags)))
        lines.append(f"  Scenario: {scenario.name}")
        for step in scenario.steps:
            lines.append(f"    {step.keyword} {step.text}")
    return "\n".join(lines) + "\n"


# -- step bindings ---------------------------------------------------------


@dataclass(frozen=True)
class StepBinding:
    kind: StepKind
    pattern: str
    action: Callable
    regex: re.Pattern = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", StepKind(self.kind))
        regex = re.compile(self.pattern)
        object.__setattr__(self, "regex", regex)
        _check_arity(self.action, regex.groups, self.pattern)


def _check_arity(action, groups, pattern):
    params = list(inspect.signature(action).parameters.values())
    if any(p.kind is p.VAR_POSITIONAL for p in params):
        return
    positional = [p for p in params if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)]
    # the first positional parameter receives the step context
    if len(positional) - 1 != groups:
        raise ValueError(
            f"step {pattern!r} captures {groups} group(s) but its action takes {len(positional) - 1}"
        )


class StepRegistry:
    def __init__(self, bindings: Iterable[StepBinding] = ()):
        self.bindings: list[StepBinding] = list(bindings)

    def add(self, kind, pattern: str, action: Callable) -> StepBinding:
        binding = StepBinding(StepKind(kind), pattern, action)
        self.bindings.append(binding)
        return binding

    def _decorator(self, kind, pattern):
        def deco(fn):
            self.add(kind, pattern, fn)
            return fn

        return deco

    def given(self, pattern):
        return self._decorator(StepKind.GIVEN, pattern)

    def when(self, pattern):
        return self._decorator(StepKind.WHEN, pattern)

    def then(self, pattern):
        return self._decorator(StepKind.THEN, pattern)

    def merged(self, other: StepRegistry) -> StepRegistry:
        return StepRegistry(self.bindings + other.bindings)

    def match(self, kind, text):
        return match_step(self, kind, text)

    def __len__(self):
        return len(self.bindings)


def match_step(registry: StepRegistry, kind, text: str):
    """Return ``(binding, captures)`` or None when no binding matches.

    Raises AmbiguousStepError when more than one binding of ``kind`` matches.
    """
    kind = StepKind(kind)
    found = []
    for binding in registry.bindings:
        if binding.kind is not kind:
            continue
        m = binding.regex.fullmatch(text)
        if m:
            found.append((binding, m.groups()))
    if len(found) > 1:
        patterns = ", ".join(repr(b.pattern) for b, _ in found)
        raise AmbiguousStepError(f"{kind.value} {text!r} matches {patterns}")
    return found[0] if found else None


# -- skeletons -------------------------------------------------------------

_QUOTED = re.compile(r'"[^"]*"')
CAPTURE = '"([^"]*)"'
_SPECIAL = re.compile(r"([.^$*+?{}\[\]\\|()])")


def _escape(text):
    # re.escape would also escape spaces, which makes patterns hard to read
    return _SPECIAL.sub(r"\\\1", text)


def step_pattern(text: str) -> str:
    """Anchored pattern for a step; quoted strings become capture groups."""
    parts = []
    last = 0
    for m in _QUOTED.finditer(text):
        parts.append(_escape(text[last:m.start()]))
        parts.append(CAPTURE)
        last = m.end()
    parts.append(_escape(text[last:]))
    return "^" + "".join(parts) + "$"


@dataclass(frozen=True)
class Stub:
    kind: StepKind
    pattern: str
    text: str  # first step text that produced the stub

    @property
    def captures(self) -> int:
        return re.compile(self.pattern).groups


def skeleton_stubs(*features: FeatureSpec) -> list[Stub]:
    stubs, seen = [], set()
    for feature in features:
        for scenario in feature.scenarios:
            for step in scenario.steps:
                key = (step.kind, step_pattern(step.text))
                if key not in seen:
                    seen.add(key)
                    stubs.append(Stub(step.kind, key[1], step.text))
    return stubs


def _identifier(text, taken):
    base = re.sub(r"\W+", "_", _QUOTED.sub("x", text).lower()).strip("_") or "step"
    if base[0].isdigit() or keyword.iskeyword(base):
        base = "step_" + base
    name, n = base, 2
    while name in taken:
        name, n = f"{base}_{n}", n + 1
    taken.add(name)
    return name


def generate_skeletons(*features: FeatureSpec, registry_name: str = "steps") -> str:
    """Python source with one pending step definition per distinct step."""
    out = [
        "from sosplay.gherkin import PendingStep, StepRegistry",
        "",
        f"{registry_name} = StepRegistry()",
    ]
    taken: set[str] = set()
    for stub in skeleton_stubs(*features):
        args = "".join(f", arg{i}" for i in range(1, stub.captures + 1))
        out += [
            "",
            "",
            f"@{registry_name}.{stub.kind.value.lower()}({stub.pattern!r})",
            f"def {_identifier(stub.text, taken)}(ctx{args}):",
            '    raise PendingStep("implement here")',
        ]
    return "\n".join(out) + "\n"


# -- tags ------------------------------------------------------------------


def parse_tag_expression(expr: Optional[str]) -> frozenset:
    if expr is None or not expr.strip():
        return frozenset()
    tags = [t.strip() for t in expr.split(",")]
    for t in tags:
        if not _TAG.fullmatch(t):
            raise TagExpressionError(f"malformed tag expression {expr!r}")
    return frozenset(tags)


def filter_by_tags(features: Iterable[FeatureSpec], expr: Optional[str]) -> list[FeatureSpec]:
    """Keep scenarios carrying any of the comma-separated tags (OR)."""
    wanted = parse_tag_expression(expr)
    features = list(features)
    if not wanted:
        return features
    out = []
    for f in features:
        kept = tuple(s for s in f.scenarios if f.effective_tags(s) & wanted)
        if kept:
            out.append(FeatureSpec(f.name, kept, f.tags, f.path))
    return out
