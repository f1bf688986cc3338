import pytest

from trendnet.analytics import AveragedTrajectory
from trendnet.plotting import render_plot


def traj(values_by_name):
    n = len(next(iter(values_by_name.values())))
    return AveragedTrajectory(list(range(n)), values_by_name, runs=1)


def test_single_constant_series_renders_svg():
    svg = render_plot([("avg", traj({"x": [1.0] * 5}))], ["x"])
    assert svg.lstrip().startswith("<?xml")
    assert "</svg>" in svg


def test_empty_element_subset_is_error():
    with pytest.raises(ValueError):
        render_plot([("avg", traj({"x": [0.0]}))], [])


def test_unknown_element_is_error():
    with pytest.raises(KeyError):
        render_plot([("avg", traj({"x": [0.0]}))], ["ghost"])


def test_overlay_three_files_distinguishable_styles():
    t = traj({"outcome": [1.0, 0.8, 0.6]})
    svg = render_plot([("level", t), ("trend", t), ("hybrid", t)], ["outcome"])
    for label in ("level", "trend", "hybrid"):
        assert f"outcome ({label})" in svg


def test_render_deterministic():
    t = traj({"a": [0.0, 0.5, 1.0], "b": [1.0, 0.5, 0.0]})
    assert render_plot([("x", t)], ["a", "b"]) == render_plot([("x", t)], ["a", "b"])
