"""Render averaged trajectories as SVG line plots via matplotlib.

Multiple trajectory files (e.g. level-, trend-, and hybrid-mode averages of
the same model) can be overlaid; each file gets its own line style and each
element its own color, so regulation modes stay distinguishable per element.
"""
from __future__ import annotations

import io
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .analytics import AveragedTrajectory  # noqa: E402

# dashed / dot-dash / solid / dotted, cycling for additional overlays
_LINESTYLES = ["--", "-.", "-", ":"]
_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def render_plot(
    trajectories: Sequence[tuple[str, AveragedTrajectory]],
    elements: Sequence[str],
    title: str | None = None,
) -> str:
    """Return SVG text with one polyline per (trajectory, element) pair.

    ``trajectories`` is a list of (label, averaged trajectory).  Output is
    deterministic for identical inputs.
    """
    if not elements:
        raise ValueError("empty element subset")
    for label, traj in trajectories:
        for name in elements:
            if name not in traj.means:
                raise KeyError(f"unknown element '{name}' in trajectory '{label}'")

    with plt.rc_context({"svg.hashsalt": "trendnet"}):
        fig, ax = plt.subplots(figsize=(8, 5))
        for ti, (label, traj) in enumerate(trajectories):
            style = _LINESTYLES[ti % len(_LINESTYLES)]
            for ei, name in enumerate(elements):
                legend = name if len(trajectories) == 1 else f"{name} ({label})"
                ax.plot(
                    traj.recorded_steps,
                    traj.means[name],
                    linestyle=style,
                    color=_COLORS[ei % len(_COLORS)],
                    label=legend,
                )
        ax.set_xlabel("step")
        ax.set_ylabel("value")
        ax.set_ylim(-0.05, 1.05)
        if title:
            ax.set_title(title)
        ax.legend()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()
