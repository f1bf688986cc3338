"""Update schemes, the per-run simulation loop, and ensemble execution.

One "time step" is one scheduler invocation regardless of scheme: a single
element update for the sequential schemes, one full sweep for the
simultaneous scheme, one group for the group scheme.  Toggles scheduled at
step t fire at the start of step t, before any update, so they are visible
to every balancing computation of that step.

Randomness comes from numpy's PCG64 generator; run i of an ensemble uses
the stream seeded with base_seed + i, which makes every trace
byte-reproducible and independent of how many runs execute or in what
order they finish.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .dynamics import plan_update, refresh_trend_memory, update_element
from .model import (
    Model,
    SaturationEvent,
    SimState,
    apply_toggle,
    initial_state,
)

PRNG_NAME = "numpy-pcg64"


@dataclass(frozen=True)
class Simultaneous:
    kind = "simultaneous"


@dataclass(frozen=True)
class SequentialFixed:
    order: tuple[str, ...]
    kind = "seq-fixed"


@dataclass(frozen=True)
class RandomSequential:
    kind = "rsb"


@dataclass(frozen=True)
class GroupUpdate:
    groups: tuple[tuple[str, ...], ...]
    kind = "group"


Scheme = Union[Simultaneous, SequentialFixed, RandomSequential, GroupUpdate]


class SchemeError(ValueError):
    pass


def validate_scheme(model: Model, scheme: Scheme) -> None:
    """SequentialFixed order and GroupUpdate partition must cover the
    updateable pool exactly, with no duplicates."""
    pool = set(model.updateable)
    if isinstance(scheme, SequentialFixed):
        names = list(scheme.order)
    elif isinstance(scheme, GroupUpdate):
        if any(len(g) == 0 for g in scheme.groups):
            raise SchemeError("empty group")
        names = [n for g in scheme.groups for n in g]
    else:
        return
    if len(names) != len(set(names)):
        raise SchemeError("duplicate element in scheme")
    if set(names) != pool:
        missing = pool - set(names)
        extra = set(names) - pool
        raise SchemeError(
            f"scheme must cover the updateable pool exactly"
            f" (missing: {sorted(missing)}, extra: {sorted(extra)})"
        )


@dataclass(frozen=True)
class SimulationConfig:
    scheme: Scheme
    steps: int
    runs: int = 1
    base_seed: int = 0
    record_every: int = 1

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class RunTrace:
    seed: int
    recorded_steps: list[int]
    # element name -> one value per recorded step (index 0 = initial state)
    values: dict[str, list[float]]
    saturation: list[SaturationEvent] = field(default_factory=list)


@dataclass
class Ensemble:
    model: Model
    config: SimulationConfig
    traces: list[RunTrace]


def commit_group(state: SimState, members: Sequence[str]) -> None:
    """Simultaneous commit: every member balances against the shared
    pre-update snapshot, then all new levels land together and trend
    snapshots refresh from the committed state.  Order-independent."""
    planned = [(name, plan_update(name, state)) for name in members]
    for name, (new_level, boundary) in planned:
        state.levels[name] = new_level
        if boundary is not None:
            state.saturation.append(SaturationEvent(name, state.step, boundary))
    for name, _ in planned:
        refresh_trend_memory(name, state)


def _toggles_at(model: Model, t: int) -> list[tuple[str, int]]:
    out = []
    for el in model.elements:
        for step, level in el.toggles:
            if step == t:
                out.append((el.name, level))
    return out


def step(
    state: SimState,
    scheme: Scheme,
    rng: np.random.Generator,
    t: int,
) -> SimState:
    """Advance one time step: fire step-t toggles, then apply the scheme."""
    model = state.model
    state.step = t
    for name, level in _toggles_at(model, t):
        apply_toggle(state, name, level)
    pool = model.updateable
    if not pool:
        return state
    if isinstance(scheme, Simultaneous):
        commit_group(state, pool)
    elif isinstance(scheme, SequentialFixed):
        update_element(scheme.order[(t - 1) % len(scheme.order)], state)
    elif isinstance(scheme, RandomSequential):
        update_element(pool[int(rng.integers(len(pool)))], state)
    elif isinstance(scheme, GroupUpdate):
        commit_group(state, scheme.groups[int(rng.integers(len(scheme.groups)))])
    else:
        raise SchemeError(f"unknown scheme {scheme!r}")
    return state


def run_once(model: Model, config: SimulationConfig, seed: int) -> RunTrace:
    """Execute one trajectory of ``config.steps`` steps; deterministic for a
    given (model, config, seed)."""
    validate_scheme(model, config.scheme)
    rng = np.random.Generator(np.random.PCG64(seed))
    state = initial_state(model)
    for name, level in _toggles_at(model, 0):
        apply_toggle(state, name, level)

    order = model.element_order
    recorded_steps = [0]
    values: dict[str, list[float]] = {n: [state.value(n)] for n in order}

    def record(t: int) -> None:
        recorded_steps.append(t)
        for n in order:
            values[n].append(state.value(n))

    for t in range(1, config.steps + 1):
        step(state, config.scheme, rng, t)
        if t % config.record_every == 0 or t == config.steps:
            record(t)
    return RunTrace(seed, recorded_steps, values, state.saturation)


def _run_indexed(args: tuple[Model, SimulationConfig, int]) -> RunTrace:
    model, config, seed = args
    return run_once(model, config, seed)


def simulate(model: Model, config: SimulationConfig, jobs: int = 1) -> Ensemble:
    """Run the full ensemble.  Run i uses seed base_seed + i; runs are
    independent, so the result is identical for any ``jobs`` value and
    traces are always ordered by run index."""
    seeds = [config.base_seed + i for i in range(config.runs)]
    if jobs > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(_run_indexed, [(model, config, s) for s in seeds]))
    else:
        traces = [run_once(model, config, s) for s in seeds]
    return Ensemble(model, config, traces)
