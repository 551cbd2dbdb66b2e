"""Executable scenario-based requirements: a behavioral-programming engine,
inter/intra-system composition and a Gherkin test harness."""

from .composition import Composition, CompositionError, RoleBinding, compose, unify
from .engine import (
    DEFAULT_MAX_STEPS,
    Before,
    Engine,
    EventTemplate,
    Let,
    Quiescent,
    ScenarioDefinition,
    ScenarioProgram,
    Selected,
    StepBoundExceeded,
    Sync,
    Var,
    before,
    let,
    request,
    request_flexible,
    start,
    wait_for,
)
from .events import ANY, Event, EventPattern, Message, Mock, Role, RoleRegistry, matches, register_role

__version__ = "0.1.0"
