"""Three-bus scenario data, setting checks, and derived threshold quantities.

The system has a renewable-only bus 0 (negative ``l0`` is available renewable
power), a generator bus 1 carrying flexible demand, and a generator bus 2
hosting the remainder of a shiftable load block ``L``.  Everything downstream
(dispatch, closed forms, sweeps) consumes the immutable scenario value defined
here, and the regime analysis is only meaningful when :func:`validate` passes.
"""

from __future__ import annotations

import dataclasses
import math
from importlib import resources
from typing import NamedTuple

TOLERANCE = 1e-9

SCENARIO_KEYS = (
    "c1",
    "c2",
    "e1",
    "e2",
    "l0",
    "l1",
    "l2",
    "L",
    "F01",
    "F02",
    "F12",
    "alpha_dc",
    "alpha_sw",
)


class ScenarioError(ValueError):
    """Scenario numbers violate a structural requirement (negative capacity,
    weight outside [0, 1], non-finite value, ...)."""


class ScenarioParseError(ValueError):
    """Scenario text could not be parsed; carries the offending line number
    when one can be pointed at."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclasses.dataclass(frozen=True)
class ThreeBusScenario:
    """One complete parameterization of the three-bus system.

    ``c1``/``c2`` are generator offer prices ($/MWh), ``e1``/``e2`` their
    emission rates (tCO2/MWh).  ``l0`` is the bus-0 net load (negative means
    renewable supply), ``l1``/``l2`` the bus loads with ``l2`` counting the
    full shiftable block ``L``.  ``F01``, ``F02``, ``F12`` are line limits,
    and ``alpha_dc``/``alpha_sw`` weight price against emissions in the two
    agents' objectives (1 = pure cost, 0 = pure emissions).
    """

    c1: float
    c2: float
    e1: float
    e2: float
    l0: float
    l1: float
    l2: float
    L: float
    F01: float
    F02: float
    F12: float
    alpha_dc: float
    alpha_sw: float

    def __post_init__(self) -> None:
        problems = []
        for name in SCENARIO_KEYS:
            value = getattr(self, name)
            try:
                number = float(value)
            except (TypeError, ValueError):
                problems.append(f"{name} must be a number, got {value!r}")
                continue
            if not math.isfinite(number):
                problems.append(f"{name} must be finite, got {value!r}")
                continue
            object.__setattr__(self, name, number)  # normalize ints, np scalars
        if not problems:
            for name in ("c1", "c2", "e1", "e2"):
                if getattr(self, name) < 0.0:
                    problems.append(f"{name} must be nonnegative")
            if self.L < 0.0:
                problems.append("shiftable load L must be nonnegative")
            for name in ("F01", "F02", "F12"):
                if getattr(self, name) < 0.0:
                    problems.append(f"line limit {name} must be nonnegative")
            for name in ("alpha_dc", "alpha_sw"):
                weight = getattr(self, name)
                if not 0.0 <= weight <= 1.0:
                    problems.append(f"{name} must lie in [0, 1], got {weight}")
        if problems:
            raise ScenarioError("; ".join(problems))


@dataclasses.dataclass(frozen=True)
class ConditionCheck:
    """Outcome of one setting condition: pass/fail, the signed margin by which
    it holds (positive = satisfied), and a plain-language description."""

    name: str
    passed: bool
    margin: float
    borderline: bool
    detail: str


@dataclasses.dataclass(frozen=True)
class ValidityReport:
    checks: tuple[ConditionCheck, ...]
    valid: bool

    def failures(self) -> tuple[ConditionCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            mark = "ok" if c.passed else "FAIL"
            edge = " (borderline)" if c.borderline else ""
            lines.append(f"[{mark}]{edge} {c.name}: {c.detail} (margin {c.margin:.6g})")
        lines.append("scenario valid" if self.valid else "scenario INVALID")
        return "\n".join(lines)


def _check(name: str, margin: float, detail: str) -> ConditionCheck:
    # Strict inequality with tolerance: margins below TOLERANCE fail, and
    # anything within TOLERANCE of the knife edge is flagged as borderline.
    return ConditionCheck(
        name=name,
        passed=margin > TOLERANCE,
        margin=margin,
        borderline=abs(margin) <= TOLERANCE,
        detail=detail,
    )


def validate(s: ThreeBusScenario) -> ValidityReport:
    """Check the structural conditions under which the regime analysis holds.

    Four direct conditions (price order, positive system load, bus 1 fully
    servable from renewable, bus 2 never fully import-served) plus two derived
    ones on the shift threshold (positive, and not beyond the block size).
    Pure function; never raises on a structurally well-formed scenario.
    """
    t = tau(s).value
    checks = (
        _check(
            "bus-1 generation cheaper",
            s.c2 - s.c1,
            f"c1={s.c1:g} must undercut c2={s.c2:g}",
        ),
        _check(
            "positive system load",
            s.l0 + s.l1 + s.l2,
            "total net load l0+l1+l2 must be positive",
        ),
        _check(
            "bus-1 load renewable-servable",
            min(s.F01 + min(s.F02, s.F12) - s.l1, abs(s.l0) - s.l1),
            "l1 must stay below both F01+min(F02,F12) and |l0|",
        ),
        _check(
            "bus-2 load exceeds import capacity",
            (s.l2 - s.L) - (s.F02 + s.F12),
            "l2-L must exceed F02+F12 so bus 2 always runs local generation",
        ),
        _check(
            "shift threshold positive",
            t,
            f"threshold {t:.6g} must be positive",
        ),
        # Unlike the others this check is non-strict: threshold == L is fine.
        ConditionCheck(
            name="shift threshold within block",
            passed=s.L - t >= -TOLERANCE,
            margin=s.L - t,
            borderline=abs(s.L - t) <= TOLERANCE,
            detail=f"threshold {t:.6g} must not exceed the shiftable block L={s.L:g}",
        ),
    )
    return ValidityReport(checks=checks, valid=all(c.passed for c in checks))


class Threshold(NamedTuple):
    """Shift threshold and which capacity term produced it."""

    value: float
    binding: str  # "congestion" | "renewable" | "both"


def tau(s: ThreeBusScenario) -> Threshold:
    """Largest shift the cheap path to bus 1 can absorb at zero price.

    The bus-1 delivery corridor saturates either because line 0-1 congests
    (``F01 - F12``) or because the renewable supply runs out after serving
    bus 2's imports (``-l0 - F02 - F12``); the threshold is the smaller term
    minus the base load ``l1``.
    """
    congestion_term = s.F01 - s.F12
    renewable_term = -s.l0 - s.F02 - s.F12
    if abs(congestion_term - renewable_term) <= TOLERANCE:
        binding = "both"
        value = congestion_term
    elif congestion_term < renewable_term:
        binding = "congestion"
        value = congestion_term
    else:
        binding = "renewable"
        value = renewable_term
    return Threshold(value=value - s.l1, binding=binding)


def eta(s: ThreeBusScenario, bus: int, agent: str) -> float:
    """Blended price/emissions rate of the generator at ``bus`` as seen by
    ``agent`` ("dc" for the data center, "sw" for the system view)."""
    if bus == 1:
        cost, emis = s.c1, s.e1
    elif bus == 2:
        cost, emis = s.c2, s.e2
    else:
        raise ValueError(f"no generator at bus {bus!r}; expected 1 or 2")
    if agent == "dc":
        weight = s.alpha_dc
    elif agent == "sw":
        weight = s.alpha_sw
    else:
        raise ValueError(f"unknown agent {agent!r}; expected 'dc' or 'sw'")
    return weight * cost + (1.0 - weight) * emis


def parse_scenario(text: str) -> ThreeBusScenario:
    """Parse ``key = value`` scenario text.

    ``#`` starts a comment (full-line or trailing), blank lines are skipped,
    every key in :data:`SCENARIO_KEYS` must appear exactly once, and no other
    keys are allowed.  Values round-trip exactly through
    :func:`serialize_scenario` because both sides use ``repr`` floats.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(f"expected 'key = value', got {raw!r}", lineno)
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in SCENARIO_KEYS:
            raise ScenarioParseError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ScenarioParseError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = float(value_text)
        except ValueError:
            raise ScenarioParseError(
                f"could not parse value {value_text!r} for key {key!r}", lineno
            ) from None
    missing = [k for k in SCENARIO_KEYS if k not in values]
    if missing:
        raise ScenarioParseError(f"missing keys: {', '.join(missing)}")
    return ThreeBusScenario(**values)


def parse_scenario_file(path) -> ThreeBusScenario:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_scenario(handle.read())


def serialize_scenario(s: ThreeBusScenario) -> str:
    lines = [f"{key} = {getattr(s, key)!r}" for key in SCENARIO_KEYS]
    return "\n".join(lines) + "\n"


def write_scenario_file(s: ThreeBusScenario, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(serialize_scenario(s))


def bundled_scenario_names() -> tuple[str, ...]:
    """Names accepted by :func:`bundled_scenario_path`."""
    root = resources.files("gridshift").joinpath("scenarios")
    return tuple(
        sorted(entry.name[:-4] for entry in root.iterdir() if entry.name.endswith(".txt"))
    )


def bundled_scenario_path(name: str) -> str:
    """Filesystem path of a scenario file shipped with the package."""
    entry = resources.files("gridshift").joinpath("scenarios", f"{name}.txt")
    if not entry.is_file():
        known = ", ".join(bundled_scenario_names())
        raise ScenarioError(f"no bundled scenario named {name!r} (have: {known})")
    return str(entry)
