"""Line-chart rendering for the experiment CSV datasets.

Input files follow the harness format: an optional ``# config`` comment,
a header row, then numeric rows.  Multiple rows sharing one x value (seed
repeats) are averaged into a single line point.  Output is a vector image;
embedded timestamps are suppressed so re-renders are byte-stable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "semcom-plots"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


class PlotError(Exception):
    """Base class for rendering errors."""


class MissingColumn(PlotError):
    """The CSV lacks a column the figure needs."""


class EmptyDataset(PlotError):
    """The CSV holds no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    """One chart: which CSV, which columns, how to label the axes."""

    figure_id: str
    csv_path: str
    x_column: str
    series: tuple[str, ...]
    x_label: str
    y_label: str
    out_path: str
    log_y: bool = False


#: Axis labels follow the experiment captions verbatim.
FIGURES: Mapping[str, dict] = {
    "fig5": dict(x_column="attrs",
                 series=("eff_traditional", "eff_semantic", "eff_parity"),
                 x_label="Number of attributes",
                 y_label="Coding efficiency"),
    "fig6": dict(x_column="snr_db",
                 series=("ser_traditional", "ser_semantic", "ser_parity"),
                 x_label="Different SNR",
                 y_label="Sut error rate",
                 log_y=True),
    "fig7": dict(x_column="snr_db",
                 series=("semeff_traditional", "semeff_semantic",
                         "semeff_parity"),
                 x_label="Different SNR",
                 y_label="Semantic efficiency"),
    "fig8": dict(x_column="attrs",
                 series=("len_semantic_kb", "len_traditional",
                         "len_semantic"),
                 x_label="Number of symbols each category",
                 y_label="Average length of coding"),
    "fig9": dict(x_column="attrs",
                 series=("len_traditional_low", "len_semantic_low",
                         "len_traditional_high", "len_semantic_high"),
                 x_label="Number of entities each dimension",
                 y_label="Length of coding"),
    "fig10": dict(x_column="zipf_a",
                  series=("skb_k2", "skb_k3", "skb_k4"),
                  x_label="Zipf exponent a",
                  y_label="Semantic KB gain"),
}


def default_spec(figure_id: str, csv_path: str, out_path: str,
                 **overrides) -> FigureSpec:
    if figure_id not in FIGURES:
        raise PlotError(f"unknown figure id {figure_id!r}")
    params = {**FIGURES[figure_id], **overrides}
    params["series"] = tuple(params["series"])
    return FigureSpec(figure_id=figure_id, csv_path=csv_path,
                      out_path=out_path, **params)


def read_dataset(path: str) -> tuple[list[str], list[dict[str, float]]]:
    """Header and numeric rows of a harness CSV (comments skipped)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise EmptyDataset(f"{path}: no header row")
    header = rows[0]
    data = [dict(zip(header, map(float, r))) for r in rows[1:]]
    return header, data


def render(spec: FigureSpec) -> str:
    """Draw one figure and write it to ``spec.out_path``."""
    header, data = read_dataset(spec.csv_path)
    wanted = (spec.x_column, *spec.series)
    missing = [c for c in wanted if c not in header]
    if missing:
        raise MissingColumn(
            f"{spec.csv_path}: missing column(s) {', '.join(missing)}")
    if not data:
        raise EmptyDataset(f"{spec.csv_path}: no data rows")

    xs = sorted({row[spec.x_column] for row in data})
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        for column in spec.series:
            ys = []
            for x in xs:
                cell = [row[column] for row in data
                        if row[spec.x_column] == x]
                ys.append(sum(cell) / len(cell))
            ax.plot(xs, ys, marker="o", label=column)
        if spec.log_y:
            ax.set_yscale("log")
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label)
        ax.set_title(f"{spec.y_label} vs. {spec.x_label}")
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        Path(spec.out_path).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.out_path, metadata={"Date": None})
    finally:
        plt.close(fig)
    return spec.out_path


def render_all(results_dir: str, out_dir: str,
               figure_ids: Sequence[str] | None = None) -> list[str]:
    """Render every figure from ``<results_dir>/<figN>.csv``."""
    written = []
    for figure_id in figure_ids or FIGURES:
        csv_path = Path(results_dir) / f"{figure_id}.csv"
        if not csv_path.exists():
            raise PlotError(f"missing results file {csv_path}")
        spec = default_spec(figure_id, str(csv_path),
                            str(Path(out_dir) / f"{figure_id}.svg"))
        written.append(render(spec))
    return written
