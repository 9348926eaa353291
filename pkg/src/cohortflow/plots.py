"""Figure rendering for projections and backtest reports.

Charts are written to files next to the delimited/JSON outputs; nothing here
opens a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import EvaluationReport
from .forecast import Projection


def plot_projection(
    baseline: Projection, path: str | Path, scenario: Projection | None = None
) -> Path:
    """Per-state and total headcount lines over the horizon; scenario dashed."""
    path = Path(path)
    space = baseline.space
    steps = [p.step for p in baseline.points]

    fig, ax = plt.subplots(figsize=(9, 5.5))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, state in enumerate(space.enrolled):
        color = colors[i % len(colors)]
        ax.plot(steps, [p.vector.counts[i] for p in baseline.points], color=color, label=state)
        if scenario is not None:
            ax.plot(
                steps,
                [p.vector.counts[i] for p in scenario.points],
                color=color,
                linestyle="--",
                alpha=0.8,
            )
    ax.plot(steps, [p.vector.total for p in baseline.points], color="black", linewidth=2, label="Total")
    if scenario is not None:
        ax.plot(
            steps,
            [p.vector.total for p in scenario.points],
            color="black",
            linewidth=2,
            linestyle="--",
            label="Total (scenario)",
        )
    ax.set_xlabel("Projection step (terms ahead)")
    ax.set_ylabel("Expected headcount")
    ax.set_title("Projected headcounts" + (" — baseline vs scenario" if scenario else ""))
    ax.grid(alpha=0.3)
    ax.legend(fontsize=9, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_backtest(report: EvaluationReport, path: str | Path) -> Path:
    """Projected vs actual totals per held-out period, with the difference labeled."""
    path = Path(path)
    periods = [row.period for row in report.rows]
    x = range(len(periods))

    fig, ax = plt.subplots(figsize=(9, 5.5))
    ax.plot(x, [row.projected for row in report.rows], marker="o", label="Projected")
    ax.plot(x, [row.actual for row in report.rows], marker="s", label="Actual")
    for i, row in enumerate(report.rows):
        ax.annotate(
            f"{row.difference_pct:.2f}%",
            (i, row.actual),
            textcoords="offset points",
            xytext=(0, -14),
            ha="center",
            fontsize=8,
        )
    ax.set_xticks(list(x))
    ax.set_xticklabels(periods)
    ax.set_xlabel("Held-out period")
    ax.set_ylabel("Enrolled headcount")
    ax.set_title(
        f"Backtest — bias {report.bias_pct:.2f}%, "
        f"mean |difference| {report.mean_abs_difference_pct:.2f}%"
    )
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
