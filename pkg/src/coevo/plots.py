"""Per-kind overview figures rendered alongside the delimited reports.

Each experiment kind gets one PNG that answers the first question a reader
would ask of the batch: how long were the walks, how many optima, how fast
was mutual stability reached, how did welfare and the entrant's share move,
how did the evolved operator rates drift. Figures are rendered headlessly
(Agg backend) and never open a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .engine import RunLog  # noqa: E402

_DPI = 150


def _new_axes(nrows: int = 1, height: float = 3.4):
    fig, axes = plt.subplots(
        nrows, 1, figsize=(7.0, height * nrows), dpi=_DPI, squeeze=False
    )
    return fig, axes[:, 0]


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _plot_walks(logs: list[RunLog], out: Path) -> list[Path]:
    steps = [row["steps"] for log in logs for row in log.timeseries]
    finals = [row["final_fitness"] for log in logs for row in log.timeseries]
    fig, (ax0, ax1) = _new_axes(2)
    ax0.hist(steps, bins=range(0, max(steps) + 2), color="#4878a8", edgecolor="white")
    ax0.set_xlabel("steps to local optimum")
    ax0.set_ylabel("walks")
    ax0.set_title(f"adaptive walk lengths ({len(steps)} walks)")
    ax1.hist(finals, bins=30, color="#a85948", edgecolor="white")
    ax1.set_xlabel("final fitness")
    ax1.set_ylabel("walks")
    for ax in (ax0, ax1):
        ax.grid(alpha=0.3)
    return [_save(fig, out / "walk_lengths.png")]


def _plot_optima(logs: list[RunLog], out: Path) -> list[Path]:
    counts = [log.summary["optima_count"] for log in logs]
    fitness = [row["fitness"] for log in logs for row in log.timeseries]
    fig, (ax0, ax1) = _new_axes(2)
    ax0.bar(range(len(counts)), counts, color="#4878a8")
    ax0.set_xlabel("replicate")
    ax0.set_ylabel("local optima")
    ax0.set_title(f"optima per landscape (mean {np.mean(counts):.1f})")
    ax1.hist(fitness, bins=30, color="#a85948", edgecolor="white")
    ax1.set_xlabel("optimum fitness")
    ax1.set_ylabel("optima")
    for ax in (ax0, ax1):
        ax.grid(alpha=0.3)
    return [_save(fig, out / "optima_counts.png")]


def _plot_coevolve(logs: list[RunLog], out: Path) -> list[Path]:
    steps = [log.summary["steps"] for log in logs if log.summary["converged"]]
    capped = sum(1 for log in logs if not log.summary["converged"])
    fig, (ax,) = _new_axes(1)
    if steps:
        ax.hist(steps, bins=min(30, max(5, len(steps) // 2)), color="#4878a8",
                edgecolor="white")
    ax.set_xlabel("moves until mutual stability")
    ax.set_ylabel("runs")
    ax.set_title(
        f"time to mutual stability ({len(steps)}/{len(logs)} converged, "
        f"{capped} hit the step cap)"
    )
    ax.grid(alpha=0.3)
    return [_save(fig, out / "steps_to_stability.png")]


def _plot_market(logs: list[RunLog], out: Path) -> list[Path]:
    fig, (ax0, ax1) = _new_axes(2)
    for log in logs:
        periods = [row["period"] for row in log.timeseries]
        welfare = [row["aggregate_welfare"] for row in log.timeseries]
        share = [row["new_tech_sales_share"] for row in log.timeseries]
        ax0.plot(periods, welfare, color="#4878a8", alpha=0.35, lw=1.0)
        ax1.plot(periods, share, color="#a85948", alpha=0.35, lw=1.0)
    shock_rows = [
        row["period"] for row in logs[0].timeseries if row["shock_fired"]
    ]
    for ax in (ax0, ax1):
        for t in shock_rows:
            ax.axvline(t, color="gray", ls="--", lw=1.0)
        ax.grid(alpha=0.3)
        ax.set_xlabel("period")
    ax0.set_ylabel("aggregate welfare")
    ax0.set_title(f"market trajectories ({len(logs)} replicates)")
    ax1.set_ylabel("new-technology sales share")
    ax1.set_ylim(-0.02, 1.02)
    return [_save(fig, out / "market_trajectories.png")]


def _plot_metaga(logs: list[RunLog], out: Path) -> list[Path]:
    fig, (ax0, ax1) = _new_axes(2)
    gens = np.array([row["generation"] for row in logs[0].timeseries])
    best = np.mean(
        [[row["best_fitness"] for row in log.timeseries] for log in logs], axis=0
    )
    mean = np.mean(
        [[row["mean_fitness"] for row in log.timeseries] for log in logs], axis=0
    )
    mu = np.mean(
        [[row["mean_mutation_rate"] for row in log.timeseries] for log in logs], axis=0
    )
    ax0.plot(gens, best, color="#4878a8", label="best")
    ax0.plot(gens, mean, color="#a85948", label="population mean")
    ax0.set_ylabel("fitness")
    ax0.set_title(f"search progress (mean over {len(logs)} replicates)")
    ax0.legend()
    ax1.plot(gens, mu, color="#54814e")
    ax1.set_yscale("log")
    ax1.set_ylabel("mean mutation rate")
    for ax in (ax0, ax1):
        ax.grid(alpha=0.3)
        ax.set_xlabel("generation")
    return [_save(fig, out / "ga_trajectories.png")]


_PLOTTERS = {
    "nk-walk": _plot_walks,
    "nk-optima": _plot_optima,
    "nkc-coevolve": _plot_coevolve,
    "wb-run": _plot_market,
    "metaga-run": _plot_metaga,
}


def make_figures(kind: str, logs: list[RunLog], out_dir: Path) -> list[Path]:
    """Render the overview figure(s) for a batch; returns the paths."""
    plotter = _PLOTTERS.get(kind)
    if plotter is None or not logs:
        return []
    return plotter(logs, Path(out_dir))
