"""Deterministic behavioral-programming engine.

Scenario bodies are explicit step programs (lists of :class:`Sync`,
:class:`Let` and :class:`Before` nodes) so that an instance's position is
plain data.  Each live instance sits at exactly one sync point declaring the
events it requests, waits for and blocks.  At every step the engine picks one
requested (or injected) event that no live instance blocks:

* live instances are scanned in activation order, each instance's requests in
  declaration order, and the first unblocked candidate wins;
* injected events are only consulted once no internal candidate exists
  (super-step discipline), strictly in FIFO order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .events import Event, EventPattern, Message, Role, matches

DEFAULT_MAX_STEPS = 10_000
LEVELS = ("inter", "intra")


class StepBoundExceeded(RuntimeError):
    pass


class ProgramError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    """Reference to a scenario-local binding inside a template or pattern."""

    name: str


def _bind_value(value, bindings):
    if isinstance(value, Var):
        try:
            return bindings[value.name]
        except KeyError:
            raise ProgramError(f"unbound variable {value.name!r}") from None
    return value


def bind_pattern(pattern: EventPattern, bindings) -> EventPattern:
    if not any(isinstance(p, Var) for p in pattern.params):
        return pattern
    params = tuple(_bind_value(p, bindings) for p in pattern.params)
    return EventPattern(pattern.sender, pattern.receiver, pattern.message, params)


@dataclass(frozen=True)
class EventTemplate:
    sender: Role
    receiver: Role
    message: Message
    params: tuple = ()
    flexible: bool = False

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.params) != self.message.arity:
            raise ProgramError(
                f"{self.message.name} takes {self.message.arity} parameter(s), got {len(self.params)}"
            )

    def instantiate(self, bindings) -> Event:
        params = tuple(_bind_value(p, bindings) for p in self.params)
        return Event(self.sender, self.receiver, self.message, params, flexible=self.flexible)


@dataclass(frozen=True)
class Sync:
    requests: Sequence[EventTemplate] = ()
    waits: Sequence[EventPattern] = ()
    blocks: Sequence[EventPattern] = ()

    def __post_init__(self):
        for name in ("requests", "waits", "blocks"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not (self.requests or self.waits or self.blocks):
            raise ProgramError("a sync point must request, wait for or block something")


@dataclass(frozen=True)
class Let:
    """Bind ``name`` to ``fn(*args)``; Var arguments are resolved first."""

    name: str
    fn: Callable
    args: tuple = ()


@dataclass(frozen=True)
class Before:
    """Run ``body`` while ``guard`` is blocked; the block lifts when the body ends."""

    guard: EventPattern
    body: Sequence = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))


Node = Union[Sync, Let, Before]


def request(sender: Role, receiver: Role, message: Message, *params) -> Sync:
    return Sync(requests=[EventTemplate(sender, receiver, message, params)])


def request_flexible(sender: Role, receiver: Role, message: Message, *params) -> Sync:
    """Request with default parameters; any event with the same sender,
    receiver and signature satisfies it."""
    return Sync(requests=[EventTemplate(sender, receiver, message, params, flexible=True)])


def wait_for(*patterns: EventPattern) -> Sync:
    return Sync(waits=patterns)


def let(name: str, fn: Callable, *args) -> Let:
    return Let(name, fn, args)


def before(guard: EventPattern, body: Iterable[Node]) -> Before:
    return Before(guard, tuple(body))


@dataclass(frozen=True)
class ScenarioDefinition:
    id: str
    body: Sequence[Node]
    trigger: Optional[EventPattern] = None
    # names bound positionally to the trigger event's parameters
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "params", tuple(self.params))
        if self.params and self.trigger is None:
            raise ProgramError(f"scenario {self.id!r} binds parameters but has no trigger")
        if self.trigger is not None and len(self.params) > self.trigger.message.arity:
            raise ProgramError(f"scenario {self.id!r} binds more parameters than its trigger carries")


@dataclass
class ScenarioProgram:
    level: str
    roles: object  # RoleRegistry
    definitions: list = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ProgramError(f"level must be one of {LEVELS}, not {self.level!r}")
        self.definitions = list(self.definitions)
        seen = set()
        for d in self.definitions:
            if d.id in seen:
                raise ProgramError(f"duplicate scenario id {d.id!r}")
            seen.add(d.id)

    def add(self, definition: ScenarioDefinition) -> ScenarioDefinition:
        if any(d.id == definition.id for d in self.definitions):
            raise ProgramError(f"duplicate scenario id {definition.id!r}")
        self.definitions.append(definition)
        return definition

    def scenario(self, id, *, trigger=None, params=()):
        """Decorator form: the decorated function returns the body nodes."""

        def deco(fn):
            self.add(ScenarioDefinition(id, tuple(fn()), trigger=trigger, params=params))
            return fn

        return deco


@dataclass(frozen=True)
class SyncDeclaration:
    requested: tuple = ()
    waited: tuple = ()
    blocked: tuple = ()


@dataclass
class _Frame:
    body: tuple
    index: int = 0
    guard: Optional[EventPattern] = None


@dataclass
class ScenarioInstance:
    serial: int
    definition: ScenarioDefinition
    level: str
    bindings: dict
    trigger: Optional[Event] = None
    frames: list = field(default_factory=list)
    sync: Optional[SyncDeclaration] = None

    @property
    def label(self) -> str:
        return f"{self.definition.id}#{self.serial}"

    @property
    def terminated(self) -> bool:
        return self.sync is None

    @property
    def active_blocks(self) -> tuple:
        return tuple(f.guard for f in self.frames if f.guard is not None)

    @property
    def position(self) -> tuple:
        return tuple(f.index for f in self.frames)

    def blocked(self) -> tuple:
        if self.sync is None:
            return ()
        return self.sync.blocked + self.active_blocks


@dataclass(frozen=True)
class Selected:
    index: int
    event: Event
    external: bool = False


@dataclass(frozen=True)
class PendingRequest:
    instance: str
    event: Event
    reason: str  # "blocked" or "delegated"

    def __str__(self):
        return f"[{self.instance}] {self.event} ({self.reason})"


@dataclass(frozen=True)
class Quiescent:
    stuck: bool
    pending: tuple = ()
    blocked_external: Optional[Event] = None


@dataclass(frozen=True)
class RunResult:
    events: tuple
    quiescent: Optional[Quiescent] = None
    bound_exceeded: bool = False


@dataclass(frozen=True)
class StepRecord:
    """Engine state at one selection, kept for trace replay."""

    index: int
    event: Event
    external: bool
    # (label, requested, delegated flags, waited, blocked)
    syncs: tuple
    external_head: Optional[Event]


class Engine:
    def __init__(
        self,
        programs,
        *,
        bindings: Optional[dict] = None,
        delegated: Iterable[str] = (),
        max_steps: int = DEFAULT_MAX_STEPS,
        record: bool = False,
    ):
        if isinstance(programs, ScenarioProgram):
            programs = [programs]
        self.programs = list(programs)
        if max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        self.max_steps = max_steps
        self.step_count = 0
        self.trace: list[Event] = []
        self.queue: deque[Event] = deque()
        self.instances: list[ScenarioInstance] = []
        self.history: Optional[list[StepRecord]] = [] if record else None
        self._serial = 0
        self._bindings = dict(bindings or {})
        self._delegated = frozenset(delegated)

        ids = set()
        for prog in self.programs:
            for d in prog.definitions:
                if d.id in ids:
                    raise ProgramError(f"duplicate scenario id {d.id!r}")
                ids.add(d.id)

        self._roles: dict[str, Role] = {}
        for prog in self.programs:
            for role in prog.roles:
                self._roles.setdefault(role.name, role)

        for prog in self.programs:
            for d in prog.definitions:
                if d.trigger is None:
                    self._spawn(prog.level, d, {}, None)

    # -- roles -----------------------------------------------------------

    def resolve(self, role: Role) -> Role:
        name = self._bindings.get(role.name, role.name)
        return self._roles.get(name, role)

    def role(self, name: str) -> Role:
        name = self._bindings.get(name, name)
        try:
            return self._roles[name]
        except KeyError:
            raise KeyError(f"unknown role {name!r}") from None

    def canonical(self, event: Event) -> Event:
        return event.with_roles(self.resolve(event.sender), self.resolve(event.receiver))

    def is_delegated(self, level: str, event: Event) -> bool:
        return (
            event.flexible
            and level == "inter"
            and (event.sender.name in self._delegated or event.receiver.name in self._delegated)
        )

    # -- instances -------------------------------------------------------

    def _spawn(self, level, definition, bindings, trigger):
        self._serial += 1
        inst = ScenarioInstance(
            self._serial, definition, level, dict(bindings), trigger, [_Frame(definition.body)]
        )
        self._advance(inst)
        if not inst.terminated:
            self.instances.append(inst)
        return inst

    def _advance(self, inst: ScenarioInstance):
        inst.sync = None
        while inst.frames:
            frame = inst.frames[-1]
            if frame.index >= len(frame.body):
                inst.frames.pop()
                continue
            node = frame.body[frame.index]
            frame.index += 1
            if isinstance(node, Sync):
                inst.sync = SyncDeclaration(
                    tuple(self.canonical(t.instantiate(inst.bindings)) for t in node.requests),
                    tuple(bind_pattern(p, inst.bindings) for p in node.waits),
                    tuple(bind_pattern(p, inst.bindings) for p in node.blocks),
                )
                return
            if isinstance(node, Let):
                args = tuple(_bind_value(a, inst.bindings) for a in node.args)
                inst.bindings[node.name] = node.fn(*args)
            elif isinstance(node, Before):
                inst.frames.append(_Frame(node.body, guard=bind_pattern(node.guard, inst.bindings)))
            else:
                raise ProgramError(f"unknown body node {node!r}")

    # -- selection -------------------------------------------------------

    def blocked_patterns(self) -> list[EventPattern]:
        out = []
        for inst in self.instances:
            out.extend(inst.blocked())
        return out

    def _select(self):
        blocked = self.blocked_patterns()
        for inst in self.instances:
            for ev in inst.sync.requested:
                if self.is_delegated(inst.level, ev):
                    continue
                if not any(matches(b, ev) for b in blocked):
                    return ev, False
        if self.queue:
            head = self.queue[0]
            if not any(matches(b, head) for b in blocked):
                return head, True
        return None

    def select_event(self) -> Optional[Event]:
        picked = self._select()
        return picked[0] if picked else None

    def inject(self, event: Event) -> None:
        if event.flexible:
            raise ValueError("injected events must be concrete, not flexible")
        self.queue.append(self.canonical(event))

    def quiescent(self) -> Quiescent:
        blocked = self.blocked_patterns()
        pending = []
        for inst in self.instances:
            for ev in inst.sync.requested:
                if self.is_delegated(inst.level, ev):
                    pending.append(PendingRequest(inst.label, ev, "delegated"))
                elif any(matches(b, ev) for b in blocked):
                    pending.append(PendingRequest(inst.label, ev, "blocked"))
        head = self.queue[0] if self.queue else None
        return Quiescent(bool(pending), tuple(pending), head)

    @staticmethod
    def _satisfies(sync: SyncDeclaration, event: Event) -> bool:
        for r in sync.requested:
            if r == event or (r.flexible and r.signature == event.signature):
                return True
        return any(matches(w, event) for w in sync.waited)

    def step(self) -> Union[Selected, Quiescent]:
        picked = self._select()
        if picked is None:
            return self.quiescent()
        if self.step_count >= self.max_steps:
            raise StepBoundExceeded(f"step bound of {self.max_steps} exceeded")
        event, external = picked
        if self.history is not None:
            self.history.append(self._snapshot(event, external))
        if external:
            self.queue.popleft()
        index = len(self.trace)
        self.trace.append(event)

        for inst in [i for i in self.instances if self._satisfies(i.sync, event)]:
            self._advance(inst)
        self.instances = [i for i in self.instances if not i.terminated]

        for prog in self.programs:
            for d in prog.definitions:
                if d.trigger is not None and matches(d.trigger, event):
                    self._spawn(prog.level, d, dict(zip(d.params, event.params)), event)

        self.step_count += 1
        return Selected(index, event, external)

    def run_to_quiescence(self, max_steps: Optional[int] = None) -> RunResult:
        if max_steps is None:
            max_steps = self.max_steps
        if max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        events = []
        for _ in range(max_steps):
            try:
                result = self.step()
            except StepBoundExceeded:
                return RunResult(tuple(events), None, True)
            if isinstance(result, Quiescent):
                return RunResult(tuple(events), result)
            events.append(result.event)
        if self._select() is None:
            return RunResult(tuple(events), self.quiescent())
        return RunResult(tuple(events), None, True)

    def _snapshot(self, event, external) -> StepRecord:
        syncs = tuple(
            (
                inst.label,
                inst.sync.requested,
                tuple(self.is_delegated(inst.level, r) for r in inst.sync.requested),
                inst.sync.waited,
                inst.blocked(),
            )
            for inst in self.instances
        )
        head = self.queue[0] if self.queue else None
        return StepRecord(len(self.trace), event, external, syncs, head)


def start(*programs: ScenarioProgram, **kwargs) -> Engine:
    return Engine(list(programs), **kwargs)


def replay_safety(history: Sequence[StepRecord]) -> list[str]:
    """Check every recorded selection against the sync states it was made in.

    Returns human-readable violations; an empty list means the trace is safe.
    """
    problems = []
    for rec in history:
        blocked = [b for *_, bl in rec.syncs for b in bl]
        hit = [str(b) for b in blocked if matches(b, rec.event)]
        if hit:
            problems.append(f"step {rec.index}: {rec.event} selected while blocked by {hit}")
        if rec.external:
            ok = rec.external_head is not None and rec.external_head == rec.event
        else:
            ok = any(
                r == rec.event and not d
                for _, requested, delegated, _, _ in rec.syncs
                for r, d in zip(requested, delegated)
            )
        if not ok:
            problems.append(f"step {rec.index}: {rec.event} was neither requested nor the queue head")
    return problems


def format_trace(events: Iterable[Event], start: int = 0) -> list[str]:
    return [f"{i}: {ev}" for i, ev in enumerate(events, start)]

