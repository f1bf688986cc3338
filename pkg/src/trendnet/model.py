"""Core domain types: elements, regulation hyperedges, models, and simulation state.

A model is a directed hypergraph.  Each element carries a discrete level
variable with L levels whose values are uniformly spread over [0, 1]
(level k has value k / (L - 1)).  A regulation hyperedge connects a set of
regulator tails to one regulated target; contributions within a hyperedge
multiply, hyperedges sum (see dynamics).  Elements without incoming
hyperedges are input nodes, driven only by value toggles.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


class Sign(Enum):
    POSITIVE = "pos"
    NEGATIVE = "neg"

    @property
    def factor(self) -> int:
        return 1 if self is Sign.POSITIVE else -1


class Mode(Enum):
    LEVEL = "level"
    TREND = "trend"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class Tail:
    """One regulator inside a hyperedge, with its level and trend weights."""

    regulator: str
    w_v: float = 1.0
    w_t: float = 0.0


@dataclass(frozen=True)
class Gate:
    """Level-equality condition: the edge is active only while ``element``
    sits exactly at level index ``level``."""

    element: str
    level: int


@dataclass(frozen=True)
class Hyperedge:
    target: str
    sign: Sign
    mode: Mode
    tails: tuple[Tail, ...]
    gate: Optional[Gate] = None


@dataclass(frozen=True)
class Element:
    name: str
    levels: int
    initial_level: int = 0
    # (step, level) pairs, steps strictly increasing
    toggles: tuple[tuple[int, int], ...] = ()

    def value_of(self, k: int) -> float:
        return k / (self.levels - 1)

    @property
    def initial_value(self) -> float:
        return self.value_of(self.initial_level)


@dataclass
class Model:
    """Validated-by-convention container; treat as immutable after validation.

    Derived lookups (element order, per-target edges, regulator lists,
    updateable pool) are computed once in ``__post_init__``.
    """

    name: str
    elements: tuple[Element, ...]
    hyperedges: tuple[Hyperedge, ...]

    elements_by_name: dict[str, Element] = field(init=False, repr=False)
    edges_of: dict[str, list[Hyperedge]] = field(init=False, repr=False)
    regulators_of: dict[str, list[str]] = field(init=False, repr=False)
    updateable: tuple[str, ...] = field(init=False, repr=False)

    def __post_init__(self):
        self.elements = tuple(self.elements)
        self.hyperedges = tuple(self.hyperedges)
        self.elements_by_name = {e.name: e for e in self.elements}
        self.edges_of = {}
        self.regulators_of = {}
        for edge in self.hyperedges:
            self.edges_of.setdefault(edge.target, []).append(edge)
            regs = self.regulators_of.setdefault(edge.target, [])
            for tail in edge.tails:
                if tail.regulator not in regs:
                    regs.append(tail.regulator)
        self.updateable = tuple(
            e.name for e in self.elements if e.name in self.edges_of
        )

    @property
    def element_order(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.elements)

    def is_input(self, name: str) -> bool:
        return name not in self.edges_of


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.location}: {self.message}"


class InvalidModelError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


def validate_model(model: Model) -> list[Diagnostic]:
    """Check every structural invariant; returns diagnostics (possibly empty).

    Dangling references, bad level indices and empty tail lists are errors;
    weights outside [0, 1] only produce warnings (allowed but discouraged
    for stability).
    """
    diags: list[Diagnostic] = []
    err = lambda loc, msg: diags.append(Diagnostic("error", loc, msg))
    warn = lambda loc, msg: diags.append(Diagnostic("warning", loc, msg))

    seen: set[str] = set()
    for el in model.elements:
        loc = f"element {el.name}"
        if not NAME_RE.match(el.name):
            err(loc, "invalid element name (allowed: [A-Za-z0-9_]+)")
        if el.name in seen:
            err(loc, "duplicate element name")
        seen.add(el.name)
        if el.levels < 2:
            err(loc, f"level count must be >= 2, got {el.levels}")
            continue
        if not 0 <= el.initial_level <= el.levels - 1:
            err(loc, f"initial level {el.initial_level} out of range 0..{el.levels - 1}")
        prev_step = -1
        for step, lvl in el.toggles:
            tloc = f"{loc} toggle at step {step}"
            if step < 0:
                err(tloc, "toggle step must be nonnegative")
            if step <= prev_step:
                err(tloc, "toggle steps must be strictly increasing")
            prev_step = step
            if not 0 <= lvl <= el.levels - 1:
                err(tloc, f"toggle level {lvl} out of range 0..{el.levels - 1}")

    for i, edge in enumerate(model.hyperedges):
        loc = f"hyperedge #{i} -> {edge.target}"
        if edge.target not in model.elements_by_name:
            err(loc, f"unknown element '{edge.target}'")
        if not edge.tails:
            err(loc, "empty tail list")
        for tail in edge.tails:
            if tail.regulator not in model.elements_by_name:
                err(loc, f"unknown element '{tail.regulator}'")
            if tail.w_v < 0 or tail.w_t < 0:
                err(loc, f"negative weight on tail {tail.regulator}")
            elif tail.w_v > 1 or tail.w_t > 1:
                warn(loc, f"weight > 1 on tail {tail.regulator} may destabilize the simulation")
        if edge.gate is not None:
            gate_el = model.elements_by_name.get(edge.gate.element)
            if gate_el is None:
                err(loc, f"unknown gate element '{edge.gate.element}'")
            elif not 0 <= edge.gate.level <= gate_el.levels - 1:
                err(loc, f"gate level {edge.gate.level} out of range for {gate_el.name}")
    return diags


def require_valid(model: Model) -> Model:
    """Raise InvalidModelError if the model has any error-severity diagnostic."""
    errors = [d for d in validate_model(model) if d.severity == "error"]
    if errors:
        raise InvalidModelError(errors)
    return model


@dataclass(frozen=True)
class SaturationEvent:
    element: str
    step: int
    boundary: str  # "lower" | "upper"


class SimState:
    """Mutable simulation state: one level index per element plus, for every
    regulated element, the value each of its regulators had when it was last
    updated (the trend snapshot).  Owned by exactly one run at a time.
    """

    __slots__ = ("model", "levels", "trend_memory", "step", "saturation")

    def __init__(
        self,
        model: Model,
        levels: dict[str, int],
        trend_memory: dict[str, dict[str, float]],
        step: int = 0,
        saturation: Optional[list[SaturationEvent]] = None,
    ):
        self.model = model
        self.levels = levels
        self.trend_memory = trend_memory
        self.step = step
        self.saturation = saturation if saturation is not None else []

    def value(self, name: str) -> float:
        el = self.model.elements_by_name[name]
        return self.levels[name] / (el.levels - 1)

    def set_level(self, name: str, k: int) -> None:
        el = self.model.elements_by_name[name]
        if not 0 <= k <= el.levels - 1:
            raise ValueError(f"level {k} out of range for {name} (0..{el.levels - 1})")
        self.levels[name] = k

    def copy(self) -> "SimState":
        return SimState(
            self.model,
            dict(self.levels),
            {t: dict(m) for t, m in self.trend_memory.items()},
            self.step,
            list(self.saturation),
        )


def initial_state(model: Model) -> SimState:
    """Build the step-0 state: every element at its initial level, every
    trend snapshot holding the regulator's initial value (so all observed
    trends start at 0)."""
    levels = {e.name: e.initial_level for e in model.elements}
    memory = {
        target: {r: model.elements_by_name[r].initial_value for r in regs}
        for target, regs in model.regulators_of.items()
    }
    return SimState(model, levels, memory, step=0)


def apply_toggle(state: SimState, element: str, level: int) -> SimState:
    """Overwrite one element's level.  Trend snapshots are left untouched, so
    regulated elements observe the jump as a trend at their next update."""
    state.set_level(element, level)
    return state
