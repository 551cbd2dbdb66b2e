"""Random features in the supported Gherkin subset."""

import random

from sosplay.gherkin import FeatureSpec, Step, StepKind, UsageScenario

WORDS = ("the", "user", "app", "sends", "route", "rps", "charging", "a", "set", "of", "is", "shown")
ODD = ("(x)", "1.5", "a+b", "[y]", "what?", "$5", "{z}", "^", "a|b", "x*")
TAGS = ("@RpsSystem", "@sos", "@wip", "@slow", "@t1")


def _text(rng):
    parts = []
    for _ in range(rng.randint(1, 6)):
        r = rng.random()
        if r < 0.15:
            parts.append(f'"{rng.choice(("Dortmund", "Paderborn", "", "two words"))}"')
        elif r < 0.25:
            parts.append(rng.choice(ODD))
        else:
            parts.append(rng.choice(WORDS))
    return " ".join(parts)


def random_feature(rng: random.Random) -> FeatureSpec:
    scenarios = []
    for _ in range(rng.randint(1, 3)):
        steps, last = [], None
        for _ in range(rng.randint(1, 5)):
            if last is not None and rng.random() < 0.3:
                keyword = "And"
                kind = last
            else:
                kind = rng.choice(list(StepKind))
                keyword = kind.value
            last = kind
            steps.append(Step(keyword, kind, _text(rng)))
        tags = frozenset(rng.sample(TAGS, rng.randint(0, 2)))
        scenarios.append(UsageScenario(_text(rng), tags, tuple(steps)))
    return FeatureSpec(_text(rng), tuple(scenarios), frozenset(rng.sample(TAGS, rng.randint(0, 1))))
