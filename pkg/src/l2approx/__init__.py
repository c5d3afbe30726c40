"""Følner-exhaustion approximation of L2 invariants of Z^d covering spaces."""
from pathlib import Path

from .cellcomplex import PeriodicComplex, load, load_file, loads

FIXTURES = ("circle", "wedge", "torus")
_FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return _FIXTURE_DIR / f"{name}.json"


def load_fixture(name: str) -> PeriodicComplex:
    return load_file(fixture_path(name))


__all__ = ["FIXTURES", "PeriodicComplex", "fixture_path", "load", "load_file", "load_fixture", "loads"]
__version__ = "0.1.0"
