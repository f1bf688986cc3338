"""Shared model builders and engine-driving helpers for the test suite."""
from __future__ import annotations

from itertools import product

from trendnet.model import (
    Element,
    Gate,
    Hyperedge,
    Mode,
    Model,
    Sign,
    Tail,
    apply_toggle,
    initial_state,
    require_valid,
)
from trendnet.dynamics import update_element
from trendnet.scheduler import RunTrace, _toggles_at

# regulation-mode weight conventions used by the 4-element toy scenarios
TOY_WEIGHTS = {
    "level": dict(w_v=1.0, w_t=0.0),
    "trend": dict(w_v=0.0, w_t=0.5),
    "hybrid": dict(w_v=1.0, w_t=0.5),
}

TOY_TOGGLES = {"cause": ((5, 6), (15, 7), (20, 0)), "intervention": ((18, 8),)}


def toy_model(scenario: str, mode: str, with_toggles: bool = True) -> Model:
    """4-element intervention scenario: cause and intervention drive problem
    (level-based); problem (and sometimes cause) regulates outcome in the
    requested mode."""
    w = TOY_WEIGHTS[mode]
    m = Mode(mode)
    toggles = TOY_TOGGLES if with_toggles else {}
    elements = (
        Element("cause", 11, 0, toggles.get("cause", ())),
        Element("intervention", 11, 0, toggles.get("intervention", ())),
        Element("problem", 11, 0),
        Element("outcome", 11, 10),
    )
    edges = [
        Hyperedge("problem", Sign.POSITIVE, Mode.LEVEL, (Tail("cause", 1.0, 0.0),)),
        Hyperedge("problem", Sign.NEGATIVE, Mode.LEVEL, (Tail("intervention", 1.0, 0.0),)),
    ]
    neg = Sign.NEGATIVE
    if scenario == "regular":
        edges.append(Hyperedge("outcome", neg, m, (Tail("problem", **w),)))
    elif scenario == "or":
        edges.append(Hyperedge("outcome", neg, m, (Tail("problem", **w),)))
        edges.append(Hyperedge("outcome", neg, Mode.LEVEL, (Tail("cause", 1.0, 0.0),)))
    elif scenario == "and":
        edges.append(Hyperedge("outcome", neg, m, (Tail("problem", **w), Tail("cause", **w))))
    elif scenario == "not":
        edges.append(Hyperedge("outcome", Sign.POSITIVE, m, (Tail("problem", **w),)))
    elif scenario == "target":
        edges.append(
            Hyperedge("outcome", neg, m, (Tail("problem", **w), Tail("cause", **w)), Gate("cause", 7))
        )
    else:
        raise ValueError(scenario)
    return require_valid(Model(f"toy_{scenario}_{mode}", elements, tuple(edges)))


def chain_model(toggle_step: int = 2, toggle_level: int = 4) -> Model:
    """3-element chain: input A, B trend-regulated by A (w_t = 0.5),
    C level-regulated by A (w_v = 1)."""
    return require_valid(
        Model(
            "three_node_chain",
            (
                Element("A", 11, 0, ((toggle_step, toggle_level),)),
                Element("B", 11, 0),
                Element("C", 11, 0),
            ),
            (
                Hyperedge("B", Sign.POSITIVE, Mode.TREND, (Tail("A", 0.0, 0.5),)),
                Hyperedge("C", Sign.POSITIVE, Mode.LEVEL, (Tail("A", 1.0, 0.0),)),
            ),
        )
    )


def forced_run(model: Model, sequence: list[str]) -> RunTrace:
    """Deterministic trajectory for an explicit per-step update sequence
    (one regulated element per step), with toggles firing at step start
    exactly like the stochastic scheduler."""
    state = initial_state(model)
    for name, level in _toggles_at(model, 0):
        apply_toggle(state, name, level)
    order = model.element_order
    values = {n: [state.value(n)] for n in order}
    steps = [0]
    for t, target in enumerate(sequence, start=1):
        state.step = t
        for name, level in _toggles_at(model, t):
            apply_toggle(state, name, level)
        update_element(target, state)
        steps.append(t)
        for n in order:
            values[n].append(state.value(n))
    return RunTrace(-1, steps, values, state.saturation)


def random_model(rng, max_elements: int = 10) -> Model:
    """Seeded random model generator mirroring the hypothesis strategy."""
    n = int(rng.integers(2, max_elements + 1))
    names = [f"n{i}" for i in range(n)]
    elements = []
    for name in names:
        levels = int(rng.integers(2, 13))
        elements.append(Element(name, levels, int(rng.integers(levels))))
    by_name = {e.name: e for e in elements}
    edges = []
    for _ in range(int(rng.integers(1, 2 * n + 1))):
        target = names[int(rng.integers(n))]
        k = int(rng.integers(1, min(3, n) + 1))
        regs = list(rng.choice(names, size=k, replace=False))
        tails = tuple(
            Tail(reg, float(rng.uniform(0, 1.2)), float(rng.uniform(0, 1.2)))
            for reg in regs
        )
        gate = None
        if rng.integers(5) == 0:
            g = names[int(rng.integers(n))]
            gate = Gate(g, int(rng.integers(by_name[g].levels)))
        sign = Sign.POSITIVE if rng.integers(2) == 0 else Sign.NEGATIVE
        mode = (Mode.LEVEL, Mode.TREND, Mode.HYBRID)[int(rng.integers(3))]
        edges.append(Hyperedge(target, sign, mode, tails, gate))
    return require_valid(Model("rand", tuple(elements), tuple(edges)))


def assert_on_grid(state) -> None:
    """Clamp bounds plus grid invariant for every element."""
    for el in state.model.elements:
        k = state.levels[el.name]
        assert 0 <= k <= el.levels - 1
        assert state.value(el.name) == k / (el.levels - 1)


def check_run_invariants(model: Model, rng, steps: int = 12) -> None:
    """Drive random updates/toggles and assert the core state invariants:
    grid and clamp bounds, toggle non-interference, memory-refresh
    exactness, and trend telescoping (self-edges excluded: an element's
    own update jump is snapshotted, never observed as its own trend)."""
    import math

    state = initial_state(model)
    assert_on_grid(state)
    pool = model.updateable
    observed = {t: {r: 0.0 for r in regs} for t, regs in model.regulators_of.items()}
    initial_mem = {t: dict(m) for t, m in state.trend_memory.items()}

    for t in range(1, steps + 1):
        state.step = t
        if rng.integers(3) == 0:
            name = model.element_order[int(rng.integers(len(model.element_order)))]
            level = int(rng.integers(model.elements_by_name[name].levels))
            before_levels = dict(state.levels)
            before_memory = {x: dict(m) for x, m in state.trend_memory.items()}
            apply_toggle(state, name, level)
            assert state.trend_memory == before_memory
            assert all(
                state.levels[n] == before_levels[n] for n in before_levels if n != name
            )
        if pool:
            target = pool[int(rng.integers(len(pool)))]
            for reg in model.regulators_of[target]:
                observed[target][reg] += state.value(reg) - state.trend_memory[target][reg]
            update_element(target, state)
            assert_on_grid(state)
            for reg in model.regulators_of[target]:
                assert state.value(reg) - state.trend_memory[target][reg] == 0.0

    for target, regs in observed.items():
        for reg, total in regs.items():
            if reg == target:
                continue
            net = state.trend_memory[target][reg] - initial_mem[target][reg]
            assert math.isclose(total, net, abs_tol=1e-9)


def with_mode(model: Model, mode: Mode, zero_unused: bool = False) -> Model:
    """Clone with every regulation edge forced to ``mode``.  With
    ``zero_unused`` the weights that ``mode`` does not consume are zeroed."""
    edges = []
    for e in model.hyperedges:
        tails = e.tails
        if zero_unused and mode is not Mode.TREND:
            tails = tuple(Tail(t.regulator, t.w_v, 0.0) for t in tails)
        elif zero_unused and mode is Mode.TREND:
            tails = tuple(Tail(t.regulator, 0.0, t.w_t) for t in tails)
        edges.append(Hyperedge(e.target, e.sign, mode, tails, e.gate))
    return require_valid(Model(model.name, model.elements, tuple(edges)))


def randomized_state(model: Model, rng):
    """Leave the initial state via a few random toggles and updates."""
    state = initial_state(model)
    names = model.element_order
    for t in range(1, 6):
        state.step = t
        name = names[int(rng.integers(len(names)))]
        el = model.elements_by_name[name]
        apply_toggle(state, name, int(rng.integers(el.levels)))
        if model.updateable:
            update_element(model.updateable[int(rng.integers(len(model.updateable)))], state)
    return state


def check_hybrid_decomposition(model: Model, rng) -> None:
    """B_hybrid = B_level + B_trend (1e-12); zeroing the unused weight
    family makes hybrid bit-identical to the single-mode edge."""
    import math

    from trendnet.dynamics import balancing

    hybrid = with_mode(model, Mode.HYBRID)
    level = with_mode(model, Mode.LEVEL)
    trend = with_mode(model, Mode.TREND)
    state = randomized_state(hybrid, rng)

    def balances(m):
        state.model = m
        try:
            return [balancing(t, state).B for t in hybrid.updateable]
        finally:
            state.model = hybrid

    b_h, b_l, b_t = balances(hybrid), balances(level), balances(trend)
    for h, l, t in zip(b_h, b_l, b_t):
        assert math.isclose(h, l + t, abs_tol=1e-12)

    assert balances(with_mode(with_mode(model, Mode.LEVEL, zero_unused=True), Mode.HYBRID)) == \
        balances(with_mode(model, Mode.LEVEL, zero_unused=True))
    assert balances(with_mode(with_mode(model, Mode.TREND, zero_unused=True), Mode.HYBRID)) == \
        balances(with_mode(model, Mode.TREND, zero_unused=True))


def check_simultaneous_permutation(model: Model, rng) -> None:
    """Simultaneous commit outcome is independent of member enumeration order."""
    from trendnet.scheduler import commit_group

    if not model.updateable:
        return
    base = randomized_state(model, rng)
    forward, backward = base.copy(), base.copy()
    commit_group(forward, list(model.updateable))
    commit_group(backward, list(model.updateable)[::-1])
    assert forward.levels == backward.levels
    assert forward.trend_memory == backward.trend_memory


def enumerate_sequences_average(model: Model, pool: list[str], steps: int):
    """Brute-force expected trajectory: average over every equiprobable
    update sequence of length ``steps`` drawn from ``pool``."""
    sequences = list(product(pool, repeat=steps))
    sums = {n: [0.0] * (steps + 1) for n in model.element_order}
    for seq in sequences:
        trace = forced_run(model, list(seq))
        for n, vals in trace.values.items():
            for i, v in enumerate(vals):
                sums[n][i] += v
    return {n: [s / len(sequences) for s in acc] for n, acc in sums.items()}
