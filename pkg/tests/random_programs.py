"""Random small BP programs in the oracle's plain-data format, plus an adapter
that builds the equivalent ``sosplay`` program."""

import random

from sosplay.engine import Before, EventTemplate, ScenarioDefinition, ScenarioProgram, Sync
from sosplay.events import ANY, EventPattern, Message, RoleRegistry

INTERFACES = {"a": ("I",), "b": (), "c": ("I",)}
ROLES = tuple(INTERFACES)
ARITY = {"m0": 0, "m1": 1, "m2": 1}
VALUES = (1, 2)


def random_event(rng):
    msg = rng.choice(tuple(ARITY))
    params = tuple(rng.choice(VALUES) for _ in range(ARITY[msg]))
    return (rng.choice(ROLES), rng.choice(ROLES), msg, params)


def random_pattern(rng, event_pool):
    base = rng.choice(event_pool) if event_pool and rng.random() < 0.8 else random_event(rng)
    s, r, m, p = base
    if rng.random() < 0.3:
        s = "*"
    elif rng.random() < 0.15 and INTERFACES[s]:
        s = "I"
    if rng.random() < 0.3:
        r = "*"
    p = tuple("*" if rng.random() < 0.4 else v for v in p)
    return (s, r, m, p)


def random_sync(rng, pool):
    while True:
        req = []
        for _ in range(rng.choice((0, 1, 1, 1, 2))):
            ev = rng.choice(pool) if rng.random() < 0.7 else random_event(rng)
            req.append((ev, rng.random() < 0.15))
        wait = [random_pattern(rng, pool) for _ in range(rng.choice((0, 0, 1)))]
        block = [random_pattern(rng, pool) for _ in range(rng.choice((0, 0, 0, 1)))]
        if req or wait or block:
            return {"req": req, "wait": wait, "block": block}


def random_program(rng, max_scenarios=4, max_syncs=8):
    """Draw a program with at most ``max_scenarios`` scenarios and
    ``max_syncs`` sync points in total."""
    pool = [random_event(rng) for _ in range(rng.randint(2, 4))]
    n_scen = rng.randint(1, max_scenarios)
    budget = max_syncs
    scenarios = []
    for k in range(n_scen):
        n_sync = rng.randint(0, max(0, min(3, budget)))
        budget -= n_sync
        body = [("sync", random_sync(rng, pool)) for _ in range(n_sync)]
        if len(body) >= 1 and rng.random() < 0.3:
            lo = rng.randrange(len(body) + 1)
            hi = rng.randrange(lo, len(body) + 1)
            body = body[:lo] + [("before", random_pattern(rng, pool), body[lo:hi])] + body[hi:]
        trigger = random_pattern(rng, pool) if k > 0 and rng.random() < 0.35 else None
        scenarios.append({"trigger": trigger, "body": body})
    inject = [rng.choice(pool) for _ in range(rng.choice((0, 0, 1, 2)))]
    return {"scenarios": scenarios, "inject": inject}


def registry():
    reg = RoleRegistry()
    for name, ifaces in INTERFACES.items():
        reg.register(name, ifaces)
    return reg


def _pattern(p):
    s, r, m, params = p
    return EventPattern(
        ANY if s == "*" else s,
        ANY if r == "*" else r,
        Message(m, ARITY[m]),
        tuple(ANY if v == "*" else v for v in params),
    )


def _template(reg, ev, flexible):
    s, r, m, params = ev
    return EventTemplate(reg[s], reg[r], Message(m, ARITY[m]), params, flexible=flexible)


def _node(reg, node):
    if node[0] == "sync":
        s = node[1]
        return Sync(
            requests=[_template(reg, ev, flex) for ev, flex in s["req"]],
            waits=[_pattern(p) for p in s["wait"]],
            blocks=[_pattern(p) for p in s["block"]],
        )
    return Before(_pattern(node[1]), [_node(reg, n) for n in node[2]])


def to_program(program):
    reg = registry()
    defs = []
    for i, scen in enumerate(program["scenarios"]):
        trigger = _pattern(scen["trigger"]) if scen["trigger"] else None
        defs.append(ScenarioDefinition(f"s{i}", [_node(reg, n) for n in scen["body"]], trigger=trigger))
    return ScenarioProgram("inter", reg, defs)


def injections(program):
    reg = registry()
    return [_template(reg, ev, False).instantiate({}) for ev in program["inject"]]


def as_tuple(event):
    return (event.sender.name, event.receiver.name, event.message.name, tuple(event.params))


def seeded(seed):
    return random.Random(seed)
