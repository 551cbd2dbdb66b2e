"""The e-mobility case study: programs, features and registered engines.

Importing this package registers the engines ``sos``, ``rps`` and
``composed`` plus the ``sos-empty`` and ``composed-empty`` variants that
reproduce the failing iterations.
"""

from pathlib import Path

from ..engine import Engine
from ..runner import register_engine
from .programs import build_composition, build_rps_program, build_sos_program
from .steps import steps

FEATURES_DIR = Path(__file__).parent / "features"
SOS_FEATURES = FEATURES_DIR / "sos"
RPS_FEATURES = FEATURES_DIR / "rps"


def sos_engine(max_steps=10_000, record=False, empty=False):
    return Engine(build_sos_program(empty=empty), max_steps=max_steps, record=record)


def rps_engine(max_steps=10_000, record=False, empty=False):
    return Engine(build_rps_program(empty=empty), max_steps=max_steps, record=record)


def composed_engine(max_steps=10_000, record=False, empty_rps=False):
    comp = build_composition(rps=build_rps_program(empty=empty_rps))
    return comp.engine(max_steps=max_steps, record=record)


def register():
    register_engine("sos", sos_engine, steps, "SoS scenario program")
    register_engine(
        "sos-empty", lambda **kw: sos_engine(empty=True, **kw), steps, "SoS roles, no scenarios yet"
    )
    register_engine("rps", rps_engine, steps, "RPS intra-system program, standalone")
    register_engine("composed", composed_engine, steps, "SoS program composed with RPS internals")
    register_engine(
        "composed-empty",
        lambda **kw: composed_engine(empty_rps=True, **kw),
        steps,
        "SoS program composed with an RPS program that has no scenarios",
    )


register()

__all__ = [
    "FEATURES_DIR",
    "RPS_FEATURES",
    "SOS_FEATURES",
    "build_composition",
    "build_rps_program",
    "build_sos_program",
    "composed_engine",
    "rps_engine",
    "sos_engine",
    "steps",
]
