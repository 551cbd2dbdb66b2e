"""Joint execution of an inter-system program with intra-system programs.

An intra program describes the internals of one constituent system (its
*system role*, shared by name with the inter level).  Abstract roles the
intra program talks to, such as a generic route requester, are bound to an
inter-level role implementing that interface.  Once a system has an intra
program, every inter-level flexible request touching that system is
*delegated*: it can no longer fire with its default parameters and must be
satisfied by a concrete event coming from the intra program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .engine import DEFAULT_MAX_STEPS, Engine, ScenarioProgram
from .events import Event, Role


class CompositionError(ValueError):
    pass


@dataclass(frozen=True)
class RoleBinding:
    interface: str
    concrete: Role
    owner: ScenarioProgram = field(compare=False)


@dataclass
class Composition:
    inter: ScenarioProgram
    intra: Sequence = ()  # (program, system role name) pairs
    bindings: Sequence[RoleBinding] = ()

    def __post_init__(self):
        self.intra = [(prog, _role_name(system)) for prog, system in self.intra]
        self.bindings = list(self.bindings)
        self.validate()

    def validate(self):
        inter = self.inter
        if inter.level != "inter":
            raise CompositionError("the first program must be inter-level")
        systems = set()
        for prog, system in self.intra:
            if prog.level != "intra":
                raise CompositionError(f"program {prog.name or '?'} is not intra-level")
            if system not in inter.roles:
                raise CompositionError(f"system role {system!r} is unknown at inter level")
            if system not in prog.roles:
                raise CompositionError(f"intra program does not declare its system role {system!r}")
            if system in systems:
                raise CompositionError(f"system {system!r} bound to more than one intra program")
            systems.add(system)

        bound = {}
        for b in self.bindings:
            if b.concrete.name not in inter.roles:
                raise CompositionError(f"binding target {b.concrete.name!r} is not an inter-level role")
            if not inter.roles[b.concrete.name].implements(b.interface):
                raise CompositionError(
                    f"{b.concrete.name!r} does not implement interface {b.interface!r}"
                )
            if not any(b.owner is prog for prog, _ in self.intra):
                raise CompositionError(f"binding for {b.interface!r} names an uncomposed program")
            if b.interface not in b.owner.roles:
                raise CompositionError(f"intra program has no role {b.interface!r} to bind")
            bound[b.interface] = b.concrete.name

        inter_names = inter.roles.names()
        for prog, system in self.intra:
            shared = (prog.roles.names() & inter_names) - {system}
            if shared:
                raise CompositionError(f"role names clash across levels: {sorted(shared)}")
        self._bound = bound
        self._systems = systems

    def engine(self, *, max_steps: int = DEFAULT_MAX_STEPS, record: bool = False) -> Engine:
        programs = [self.inter] + [prog for prog, _ in self.intra]
        return Engine(
            programs,
            bindings=self._bound,
            delegated=self._systems,
            max_steps=max_steps,
            record=record,
        )


def _role_name(role) -> str:
    return role.name if isinstance(role, Role) else role


def compose(inter, intra=(), bindings=(), *, max_steps=DEFAULT_MAX_STEPS, record=False) -> Engine:
    return Composition(inter, intra, bindings).engine(max_steps=max_steps, record=record)


def unify(flexible: Event, concrete: Event, bindings: Optional[dict] = None) -> Optional[Event]:
    """Return ``concrete`` if it may stand in for the flexible request.

    ``bindings`` maps interface role names to the concrete role names they
    are bound to; roles compare equal after that substitution.
    """
    if not flexible.flexible:
        raise ValueError("unify expects a flexible request as first argument")
    bindings = bindings or {}

    def same(a: Role, b: Role) -> bool:
        return bindings.get(a.name, a.name) == bindings.get(b.name, b.name)

    if flexible.message != concrete.message:
        return None
    if not same(flexible.sender, concrete.sender) or not same(flexible.receiver, concrete.receiver):
        return None
    return concrete
