"""Ensemble averaging, saturation diagnostics, and level-grid refinement."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import Element, Hyperedge, Model
from .scheduler import Ensemble, RunTrace


@dataclass
class AveragedTrajectory:
    recorded_steps: list[int]
    # element name -> per-step mean across runs
    means: dict[str, list[float]]
    runs: int


def average(ensemble: Ensemble) -> AveragedTrajectory:
    """Arithmetic mean per element per recorded step across all runs."""
    traces = ensemble.traces
    steps = traces[0].recorded_steps
    for tr in traces:
        if tr.recorded_steps != steps or tr.values.keys() != traces[0].values.keys():
            raise ValueError("traces have mismatched shapes")
    means = {
        name: np.mean([tr.values[name] for tr in traces], axis=0).tolist()
        for name in traces[0].values
    }
    return AveragedTrajectory(list(steps), means, len(traces))


def combine_averages(parts: list[AveragedTrajectory]) -> AveragedTrajectory:
    """Merge partial means weighted by run counts (parallel reduction)."""
    if not parts:
        raise ValueError("no partial averages to combine")
    steps = parts[0].recorded_steps
    total = sum(p.runs for p in parts)
    means = {}
    for name in parts[0].means:
        acc = np.zeros(len(steps))
        for p in parts:
            acc += np.asarray(p.means[name]) * p.runs
        means[name] = (acc / total).tolist()
    return AveragedTrajectory(list(steps), means, total)


@dataclass(frozen=True)
class SaturationEntry:
    element: str
    first_step: int
    boundary: str  # "lower" | "upper"
    dwell_fraction: float


@dataclass
class SaturationReport:
    entries: dict[str, SaturationEntry]

    def __bool__(self) -> bool:
        return bool(self.entries)


def _dwell(trace: RunTrace, element: str, boundary: float) -> float:
    vals = trace.values[element][1:]  # steps 1..T
    if not vals:
        return 0.0
    return sum(1 for v in vals if v == boundary) / len(vals)


def saturation_report(ensemble: Ensemble | RunTrace) -> SaturationReport:
    """Summarize where clamps discarded overflow.  The report is advisory:
    a saturated element is a hint to re-run with more discrete levels for
    it (see ``rescale_levels``); the engine never rescales on its own."""
    traces = ensemble.traces if isinstance(ensemble, Ensemble) else [ensemble]
    first: dict[str, tuple[int, str]] = {}
    for tr in traces:
        for ev in tr.saturation:
            cur = first.get(ev.element)
            if cur is None or ev.step < cur[0]:
                first[ev.element] = (ev.step, ev.boundary)
    entries = {}
    for element, (step_, boundary) in sorted(first.items()):
        bval = 1.0 if boundary == "upper" else 0.0
        dwell = float(np.mean([_dwell(tr, element, bval) for tr in traces]))
        entries[element] = SaturationEntry(element, step_, boundary, dwell)
    return SaturationReport(entries)


def render_saturation_report(report: SaturationReport) -> str:
    if not report:
        return "no saturation events\n"
    lines = ["element,boundary,first_step,dwell_fraction"]
    for e in report.entries.values():
        lines.append(f"{e.element},{e.boundary},{e.first_step},{e.dwell_fraction:.6f}")
    return "\n".join(lines) + "\n"


def rescale_levels(model: Model, element: str) -> Model:
    """Refine one element's level grid (L -> 2L - 1, every old grid point
    preserved) and halve the weights of every tail where it acts as a
    regulator, keeping the overall regulation strength consistent.  Level
    indices referring to the element (initial level, toggles, gates) are
    doubled so their values are unchanged.  Returns a new model."""
    if element not in model.elements_by_name:
        raise KeyError(f"unknown element '{element}'")

    def fix_element(el: Element) -> Element:
        if el.name != element:
            return el
        return replace(
            el,
            levels=2 * el.levels - 1,
            initial_level=2 * el.initial_level,
            toggles=tuple((t, 2 * lvl) for t, lvl in el.toggles),
        )

    def fix_edge(edge: Hyperedge) -> Hyperedge:
        tails = tuple(
            replace(t, w_v=t.w_v / 2, w_t=t.w_t / 2) if t.regulator == element else t
            for t in edge.tails
        )
        gate = edge.gate
        if gate is not None and gate.element == element:
            gate = replace(gate, level=2 * gate.level)
        return replace(edge, tails=tails, gate=gate)

    return Model(
        model.name,
        tuple(fix_element(e) for e in model.elements),
        tuple(fix_edge(e) for e in model.hyperedges),
    )
