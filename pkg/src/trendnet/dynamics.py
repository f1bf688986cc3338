"""Balancing-function evaluation and the single-element update rule.

A regulated element X with level count L moves on the grid {0, 1/(L-1), ..., 1}.
Each update computes the balancing function B (signed sum over X's
hyperedges, products within a hyperedge), quantizes |B| up to the nearest
grid multiple with the sign preserved, adds the delta to X, and clamps the
result to [0, 1] (overflow is discarded and recorded as a saturation
event).  Afterwards X's trend snapshots are refreshed, so every trend X
would observe immediately after its own update is 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .model import Hyperedge, Mode, SaturationEvent, SimState, Tail

# Guard against float noise pushing a product that is "exactly" a grid
# multiple (e.g. 0.1 + 0.2) up one extra level.
_QUANT_EPS = 1e-9


@dataclass(frozen=True)
class BalanceResult:
    B: float
    # one signed term per hyperedge of the target, in declaration order
    contributing_terms: tuple[float, ...]


def set_term_level(tails: Iterable[Tail], state: SimState) -> float:
    """Product over tails of (level weight x regulator value); unsigned."""
    term = 1.0
    for tail in tails:
        term *= tail.w_v * state.value(tail.regulator)
    return term


def set_term_trend(tails: Iterable[Tail], state: SimState, target: str) -> float:
    """Product over tails of (trend weight x regulator trend), where the
    trend is the regulator's current value minus its value at the target's
    last update.  May be negative."""
    memory = state.trend_memory[target]
    term = 1.0
    for tail in tails:
        term *= tail.w_t * (state.value(tail.regulator) - memory[tail.regulator])
    return term


def _edge_term(edge: Hyperedge, state: SimState) -> float:
    if edge.gate is not None and state.levels[edge.gate.element] != edge.gate.level:
        return 0.0
    term = 0.0
    if edge.mode is not Mode.TREND:
        term += set_term_level(edge.tails, state)
    if edge.mode is not Mode.LEVEL:
        term += set_term_trend(edge.tails, state, edge.target)
    return edge.sign.factor * term


def balancing(target: str, state: SimState) -> BalanceResult:
    """Signed sum of hyperedge contributions feeding ``target``'s update."""
    terms = tuple(_edge_term(e, state) for e in state.model.edges_of[target])
    return BalanceResult(B=math.fsum(terms), contributing_terms=terms)


def quantize_steps(B: float, L: int) -> int:
    """Number of grid levels |B| spans, rounded up, with B's sign."""
    if B == 0.0:
        return 0
    n = math.ceil(abs(B) * (L - 1) - _QUANT_EPS)
    return n if B > 0 else -n


def quantize(B: float, L: int) -> float:
    """Quantized update delta: sign(B) * ceil(|B| / q) * q with q = 1/(L-1)."""
    return quantize_steps(B, L) / (L - 1)


def plan_update(target: str, state: SimState) -> tuple[int, Optional[str]]:
    """Pure half of an update: the target's new level index and the clamp
    boundary hit ("lower"/"upper"), or None when no overflow was discarded."""
    el = state.model.elements_by_name[target]
    raw = state.levels[target] + quantize_steps(balancing(target, state).B, el.levels)
    if raw < 0:
        return 0, "lower"
    if raw > el.levels - 1:
        return el.levels - 1, "upper"
    return raw, None


def refresh_trend_memory(target: str, state: SimState) -> None:
    """Store the current value of each of the target's regulators; all
    trends the target would observe become 0."""
    memory = state.trend_memory[target]
    for reg in state.model.regulators_of[target]:
        memory[reg] = state.value(reg)


def update_element(target: str, state: SimState) -> SimState:
    """Update one regulated element in place: balance, quantize, clamp,
    refresh the trend snapshot.  A self-edge reads the pre-update value."""
    new_level, boundary = plan_update(target, state)
    state.levels[target] = new_level
    if boundary is not None:
        state.saturation.append(SaturationEvent(target, state.step, boundary))
    refresh_trend_memory(target, state)
    return state
