"""Roles, messages, events and event patterns.

Everything here is an immutable value type.  Events render to a canonical
single-line text form, ``sender -> receiver . message(p1, p2)``, which is
what traces and reports carry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Union


class _Wildcard:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ANY"

    def __reduce__(self):
        return (_Wildcard, ())


#: Matches any role or parameter value in an :class:`EventPattern`.
ANY = _Wildcard()


@dataclass(frozen=True)
class Mock:
    """Opaque stand-in value; two mocks are equal iff their labels are."""

    label: str

    def __str__(self):
        return f"mock:{self.label}"


ParamValue = Union[str, int, Mock]


def check_param(value) -> ParamValue:
    if isinstance(value, bool) or not isinstance(value, (str, int, Mock)):
        raise TypeError(f"unsupported parameter value {value!r} (expected text, integer or Mock)")
    return value


def format_param(value) -> str:
    if value is ANY:
        return "*"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


class DuplicateRoleError(ValueError):
    pass


class UnknownRoleError(KeyError):
    pass


@dataclass(frozen=True)
class Role:
    name: str
    interfaces: frozenset = frozenset()

    def implements(self, interface: str) -> bool:
        return interface in self.interfaces

    def __str__(self):
        return self.name


class RoleRegistry:
    """Name-unique collection of roles."""

    def __init__(self, roles: Iterable[Role] = ()):
        self._roles: dict[str, Role] = {}
        for role in roles:
            self.register(role.name, role.interfaces)

    def register(self, name: str, interfaces: Iterable[str] = ()) -> Role:
        if name in self._roles:
            raise DuplicateRoleError(f"role {name!r} already registered")
        role = Role(name, frozenset(interfaces))
        self._roles[name] = role
        return role

    def __getitem__(self, name: str) -> Role:
        try:
            return self._roles[name]
        except KeyError:
            raise UnknownRoleError(name) from None

    def get(self, name, default=None):
        return self._roles.get(name, default)

    def __contains__(self, name) -> bool:
        return name in self._roles

    def __iter__(self):
        return iter(self._roles.values())

    def __len__(self):
        return len(self._roles)

    def names(self) -> set[str]:
        return set(self._roles)

    def interfaces(self) -> set[str]:
        out = set()
        for role in self._roles.values():
            out |= role.interfaces
        return out


def register_role(registry: RoleRegistry, name: str, interfaces: Iterable[str] = ()) -> Role:
    return registry.register(name, interfaces)


@dataclass(frozen=True)
class Message:
    name: str
    arity: int = 0

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be non-negative")


@dataclass(frozen=True)
class Event:
    sender: Role
    receiver: Role
    message: Message
    params: tuple = ()
    # Set on events produced by a flexible request; not part of identity.
    flexible: bool = field(default=False, compare=False)

    def __post_init__(self):
        params = tuple(check_param(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if len(params) != self.message.arity:
            raise ValueError(
                f"{self.message.name} takes {self.message.arity} parameter(s), got {len(params)}"
            )

    @property
    def signature(self):
        return (self.sender.name, self.receiver.name, self.message)

    def with_roles(self, sender: Role, receiver: Role) -> Event:
        return Event(sender, receiver, self.message, self.params, self.flexible)

    def __str__(self):
        args = ", ".join(format_param(p) for p in self.params)
        return f"{self.sender.name} -> {self.receiver.name} . {self.message.name}({args})"


@dataclass(frozen=True)
class EventPattern:
    """Matcher over events.  Role fields name a role or an interface (or ANY);
    the message signature is always fixed."""

    sender: object
    receiver: object
    message: Message
    params: tuple = None

    def __post_init__(self):
        params = self.params
        if params is None:
            params = (ANY,) * self.message.arity
        params = tuple(params)
        object.__setattr__(self, "params", params)
        if not isinstance(self.message, Message):
            raise TypeError("pattern message must be a Message (never a wildcard)")
        if len(params) != self.message.arity:
            raise ValueError(
                f"pattern for {self.message.name} needs {self.message.arity} parameter slot(s)"
            )
        for slot in ("sender", "receiver"):
            value = getattr(self, slot)
            if isinstance(value, Role):
                object.__setattr__(self, slot, value.name)

    def __str__(self):
        args = ", ".join(format_param(p) for p in self.params)
        s = "*" if self.sender is ANY else self.sender
        r = "*" if self.receiver is ANY else self.receiver
        return f"{s} -> {r} . {self.message.name}({args})"


def _role_matches(field_value, role: Role) -> bool:
    if field_value is ANY:
        return True
    return field_value == role.name or field_value in role.interfaces


def matches(pattern: EventPattern, event: Event) -> bool:
    if pattern.message != event.message:
        return False
    if not _role_matches(pattern.sender, event.sender):
        return False
    if not _role_matches(pattern.receiver, event.receiver):
        return False
    return all(p is ANY or p == v for p, v in zip(pattern.params, event.params))


def pattern_for(event: Event) -> EventPattern:
    """Exact pattern for one event."""
    return EventPattern(event.sender.name, event.receiver.name, event.message, event.params)
