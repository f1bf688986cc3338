"""Bit-exact text formats: model grammar, toggle CSV, trace CSV, metadata.

Model grammar (line-oriented, `#` starts a comment, blank lines ignored):

    model <name>
    element <id> levels=<L> init=<k>
    hyperedge target=<id> sign=<pos|neg> mode=<level|trend|hybrid> \
        [when=<id>:<k>] tails=<id>:<wv>:<wt>[,<id>:<wv>:<wt>]*

All writers are deterministic: identical inputs produce byte-identical
output.  Trace CSVs print values with exactly 6 decimal places and keep
elements in model declaration order.
"""
from __future__ import annotations

import csv
import hashlib
import json
from typing import Mapping, Sequence

from . import __version__
from .model import (
    Diagnostic,
    Element,
    Gate,
    Hyperedge,
    Mode,
    Model,
    Sign,
    Tail,
)
from .scheduler import (
    PRNG_NAME,
    GroupUpdate,
    RandomSequential,
    Scheme,
    SequentialFixed,
    SimulationConfig,
    Simultaneous,
)


class FormatError(ValueError):
    """Syntax error in an input file; carries positioned diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


def _fail(lineno: int, message: str):
    raise FormatError([Diagnostic("error", f"line {lineno}", message)])


def _parse_int(lineno: int, text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        _fail(lineno, f"invalid {what} '{text}'")


def _parse_float(lineno: int, text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        _fail(lineno, f"invalid {what} '{text}'")


def _keyvals(lineno: int, parts: list[str], required: list[str], optional: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep or key not in required + optional:
            _fail(lineno, f"unexpected token '{part}'")
        if key in out:
            _fail(lineno, f"duplicate key '{key}'")
        out[key] = value
    for key in required:
        if key not in out:
            _fail(lineno, f"missing '{key}='")
    return out


def parse_model(text: str) -> Model:
    """Parse a model document; raises FormatError with line positions.
    Semantic checks beyond syntax belong to ``validate_model``."""
    name = None
    elements: list[Element] = []
    hyperedges: list[Hyperedge] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        directive = parts[0]
        if directive == "model":
            if len(parts) != 2:
                _fail(lineno, "expected: model <name>")
            if name is not None:
                _fail(lineno, "duplicate 'model' directive")
            name = parts[1]
        elif directive == "element":
            if len(parts) < 2:
                _fail(lineno, "expected: element <id> levels=<L> init=<k>")
            kv = _keyvals(lineno, parts[2:], ["levels"], ["init"])
            elements.append(
                Element(
                    name=parts[1],
                    levels=_parse_int(lineno, kv["levels"], "level count"),
                    initial_level=_parse_int(lineno, kv.get("init", "0"), "initial level"),
                )
            )
        elif directive == "hyperedge":
            kv = _keyvals(lineno, parts[1:], ["target", "sign", "mode", "tails"], ["when"])
            try:
                sign = Sign(kv["sign"])
            except ValueError:
                _fail(lineno, f"invalid sign '{kv['sign']}' (expected pos|neg)")
            try:
                mode = Mode(kv["mode"])
            except ValueError:
                _fail(lineno, f"invalid mode '{kv['mode']}' (expected level|trend|hybrid)")
            tails = []
            for spec in kv["tails"].split(","):
                fields = spec.split(":")
                if len(fields) != 3:
                    _fail(lineno, f"invalid tail '{spec}' (expected id:wv:wt)")
                tails.append(
                    Tail(
                        regulator=fields[0],
                        w_v=_parse_float(lineno, fields[1], "level weight"),
                        w_t=_parse_float(lineno, fields[2], "trend weight"),
                    )
                )
            gate = None
            if "when" in kv:
                gfields = kv["when"].split(":")
                if len(gfields) != 2:
                    _fail(lineno, f"invalid gate '{kv['when']}' (expected id:level)")
                gate = Gate(gfields[0], _parse_int(lineno, gfields[1], "gate level"))
            hyperedges.append(Hyperedge(kv["target"], sign, mode, tuple(tails), gate))
        else:
            _fail(lineno, f"unknown directive '{directive}'")
    if name is None:
        _fail(0, "missing 'model' directive")
    return Model(name, tuple(elements), tuple(hyperedges))


def _format_weight(w: float) -> str:
    return repr(w)


def serialize_model(model: Model) -> str:
    """Inverse of parse_model on validated models (round-trip exact)."""
    lines = [f"model {model.name}"]
    for el in model.elements:
        lines.append(f"element {el.name} levels={el.levels} init={el.initial_level}")
    for edge in model.hyperedges:
        tails = ",".join(
            f"{t.regulator}:{_format_weight(t.w_v)}:{_format_weight(t.w_t)}"
            for t in edge.tails
        )
        gate = f" when={edge.gate.element}:{edge.gate.level}" if edge.gate else ""
        lines.append(
            f"hyperedge target={edge.target} sign={edge.sign.value}"
            f" mode={edge.mode.value}{gate} tails={tails}"
        )
    return "\n".join(lines) + "\n"


def model_digest(model: Model) -> str:
    return hashlib.sha256(serialize_model(model).encode()).hexdigest()


TOGGLE_HEADER = ["element", "step", "level"]


def parse_toggles(text: str) -> dict[str, list[tuple[int, int]]]:
    """Parse a toggle CSV (header exactly ``element,step,level``) into
    per-element toggle sequences sorted by step.  Duplicate
    (element, step) pairs are errors; unknown element names are checked
    later when binding to a model."""
    rows = list(csv.reader(text.splitlines()))
    if not rows or rows[0] != TOGGLE_HEADER:
        raise FormatError([Diagnostic("error", "line 1", "expected header 'element,step,level'")])
    toggles: dict[str, list[tuple[int, int]]] = {}
    seen: set[tuple[str, int]] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            _fail(lineno, f"expected 3 columns, got {len(row)}")
        element = row[0].strip()
        step = _parse_int(lineno, row[1], "step")
        level = _parse_int(lineno, row[2], "level")
        if (element, step) in seen:
            _fail(lineno, f"duplicate toggle for ({element}, {step})")
        seen.add((element, step))
        toggles.setdefault(element, []).append((step, level))
    for seq in toggles.values():
        seq.sort()
    return toggles


def write_toggles_csv(toggles: Mapping[str, Sequence[tuple[int, int]]]) -> str:
    lines = [",".join(TOGGLE_HEADER)]
    for element in toggles:
        for step, level in toggles[element]:
            lines.append(f"{element},{step},{level}")
    return "\n".join(lines) + "\n"


def bind_toggles(model: Model, toggles: Mapping[str, Sequence[tuple[int, int]]]) -> Model:
    """Return a new model with the toggle sequences attached to elements."""
    unknown = sorted(set(toggles) - set(model.element_order))
    if unknown:
        raise FormatError(
            [Diagnostic("error", "toggles", f"unknown element '{n}'") for n in unknown]
        )
    elements = tuple(
        Element(el.name, el.levels, el.initial_level, tuple(toggles.get(el.name, el.toggles)))
        for el in model.elements
    )
    return Model(model.name, elements, model.hyperedges)


def write_trace_csv(
    recorded_steps: Sequence[int],
    series: Mapping[str, Sequence[float]],
    order: Sequence[str],
) -> str:
    """Header ``step,<elem1>,...`` in declaration order; values with exactly
    6 decimal places; one row per recorded step including step 0."""
    lines = ["step," + ",".join(order)]
    for i, t in enumerate(recorded_steps):
        lines.append(f"{t}," + ",".join(f"{series[n][i]:.6f}" for n in order))
    return "\n".join(lines) + "\n"


def read_trace_csv(text: str) -> tuple[list[int], dict[str, list[float]]]:
    """Inverse of write_trace_csv; malformed numerics are rejected."""
    rows = list(csv.reader(text.splitlines()))
    if not rows or not rows[0] or rows[0][0] != "step":
        raise FormatError([Diagnostic("error", "line 1", "expected header 'step,<elements...>'")])
    order = rows[0][1:]
    steps: list[int] = []
    series: dict[str, list[float]] = {n: [] for n in order}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(order) + 1:
            _fail(lineno, f"expected {len(order) + 1} columns, got {len(row)}")
        steps.append(_parse_int(lineno, row[0], "step"))
        for name, cell in zip(order, row[1:]):
            series[name].append(_parse_float(lineno, cell, "value"))
    return steps, series


def _scheme_json(scheme: Scheme) -> dict:
    if isinstance(scheme, Simultaneous):
        return {"kind": "simultaneous"}
    if isinstance(scheme, SequentialFixed):
        return {"kind": "seq-fixed", "order": list(scheme.order)}
    if isinstance(scheme, RandomSequential):
        return {"kind": "rsb"}
    if isinstance(scheme, GroupUpdate):
        return {"kind": "group", "groups": [list(g) for g in scheme.groups]}
    raise ValueError(f"unknown scheme {scheme!r}")


def write_metadata(config: SimulationConfig, digest: str) -> str:
    """JSON record sufficient to reproduce a run bit-exactly."""
    doc = {
        "tool": "trendnet",
        "version": __version__,
        "scheme": _scheme_json(config.scheme),
        "steps": config.steps,
        "runs": config.runs,
        "base_seed": config.base_seed,
        "record_every": config.record_every,
        "prng": PRNG_NAME,
        "model_digest": digest,
    }
    return json.dumps(doc, indent=2) + "\n"
