"""Render control-experiment CSVs to figures.

Pure consumer of the CSV artifacts the control library writes; nothing
control-theoretic is ever recomputed here. Three figure kinds:

    trajectory  overlaid planar position paths, one per policy, start and
                kick instants marked
    sweep       first-action gap against horizon, one series per pending
                kick count
    bounds      empirical cost gaps scattered against their closed-form
                bounds, with the y = x reference

Policy styling is fixed so figures stay comparable across runs: blind is
solid blue, disturbance_aware dashed orange, offline dotted green.
Output format follows the file extension (.svg default, .png/.pdf work);
rendering is deterministic for fixed inputs: fixed figure size, salted SVG
ids, no embedded timestamps.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

matplotlib.rcParams["svg.hashsalt"] = "lqrplots"

KINDS = ("trajectory", "sweep", "bounds")

REQUIRED_COLUMNS = {
    "trajectory": ("t", "policy", "x0", "x2", "disturbed"),
    "sweep": ("T", "k", "norm_diff"),
    "bounds": (
        "trial",
        "emp_blind_vs_offline", "emp_blind_vs_nominal", "emp_nominal_vs_offline",
        "thm3", "thm4", "thm5",
    ),
}

POLICY_STYLE = {
    "blind": {"color": "#1f77b4", "linestyle": "-"},
    "disturbance_aware": {"color": "#ff7f0e", "linestyle": "--"},
    "offline": {"color": "#2ca02c", "linestyle": ":"},
}
FALLBACK_STYLE = {"color": "#7f7f7f", "linestyle": "-"}

# (empirical column, bound column, legend label, marker)
GAP_PAIRS = (
    ("emp_blind_vs_nominal", "thm4", "kick gap vs bound", "o"),
    ("emp_nominal_vs_offline", "thm5", "nominal-offline gap vs bound", "s"),
    ("emp_blind_vs_offline", "thm3", "regret vs bound", "^"),
)

FIGSIZE = (6.4, 4.8)


class SchemaError(ValueError):
    """Input CSV does not match the declared figure kind."""


@dataclass
class FigureSpec:
    """One figure: input CSV, kind, output path, and styling knobs."""

    kind: str
    csv_path: Path
    out_path: Path
    title: str | None = None
    logx: bool = False
    logy: bool = False
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(
                f"unknown figure kind {self.kind!r}; expected one of {KINDS}"
            )
        self.csv_path = Path(self.csv_path)
        self.out_path = Path(self.out_path)


def read_table(path: Path, kind: str) -> list[dict]:
    """Load rows and enforce the kind's column contract.

    Raises:
        SchemaError: missing file or missing required column (named).
    """
    if not path.exists():
        raise SchemaError(f"input CSV {path} does not exist")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        rows = list(reader)
    missing = [c for c in REQUIRED_COLUMNS[kind] if c not in header]
    if missing:
        raise SchemaError(
            f"{path.name} does not match the {kind} schema: "
            f"missing column(s) {', '.join(repr(c) for c in missing)}"
        )
    return rows


def _annotate_empty(ax, message: str) -> None:
    ax.text(
        0.5, 0.5, f"warning: {message}",
        transform=ax.transAxes, ha="center", va="center",
        fontsize=11, color="#b00020",
        bbox={"boxstyle": "round", "facecolor": "#fff3f3", "edgecolor": "#b00020"},
    )


def _draw_trajectory(ax, rows: list[dict]) -> None:
    by_policy: dict[str, dict[str, list[float]]] = {}
    for row in rows:
        series = by_policy.setdefault(
            row["policy"], {"y": [], "z": [], "kick_y": [], "kick_z": []}
        )
        y, z = float(row["x0"]), float(row["x2"])
        series["y"].append(y)
        series["z"].append(z)
        if row["disturbed"] == "true":
            series["kick_y"].append(y)
            series["kick_z"].append(z)
    for policy in sorted(by_policy):
        series = by_policy[policy]
        style = POLICY_STYLE.get(policy, FALLBACK_STYLE)
        ax.plot(series["y"], series["z"], label=policy, linewidth=1.4, **style)
        if series["kick_y"]:
            ax.plot(
                series["kick_y"], series["kick_z"], linestyle="none",
                marker="x", markersize=8, color=style["color"],
            )
        ax.plot(
            series["y"][:1], series["z"][:1], linestyle="none",
            marker="o", markersize=5, color=style["color"],
        )
    ax.set_xlabel("first position coordinate")
    ax.set_ylabel("second position coordinate")
    ax.legend(loc="best")


def _draw_sweep(ax, rows: list[dict], logy: bool) -> None:
    by_k: dict[int, list[tuple[int, float]]] = {}
    for row in rows:
        by_k.setdefault(int(row["k"]), []).append(
            (int(row["T"]), float(row["norm_diff"]))
        )
    for k in sorted(by_k):
        pts = sorted(by_k[k])
        # a log axis cannot show the all-zero k = 0 series
        if logy and all(v <= 0.0 for _, v in pts):
            continue
        ax.plot(
            [t for t, _ in pts], [v for _, v in pts],
            marker="o", markersize=3.5, linewidth=1.2, label=f"{k} pending",
        )
    ax.set_xlabel("horizon T")
    ax.set_ylabel("first-action gap")
    ax.legend(loc="best")


def _draw_bounds(ax, rows: list[dict], logx: bool, logy: bool) -> None:
    data = [row for row in rows if row["trial"] != "summary"]
    finite: list[float] = []
    drew = False
    for emp_col, bound_col, label, marker in GAP_PAIRS:
        xs, ys = [], []
        for row in data:
            bound, emp = float(row[bound_col]), float(row[emp_col])
            if math.isnan(bound) or math.isnan(emp):
                continue
            xs.append(bound)
            ys.append(emp)
        if xs:
            ax.scatter(xs, ys, s=18, marker=marker, alpha=0.7, label=label)
            finite.extend(xs + ys)
            drew = True
    if drew:
        positive = [v for v in finite if v > 0]
        lo = min(positive) if (logx or logy) and positive else 0.0
        hi = max(finite) if finite else 1.0
        ax.plot([lo, hi], [lo, hi], color="#555555", linestyle="--",
                linewidth=1.0, label="y = x")
        ax.legend(loc="best")
    else:
        _annotate_empty(ax, "no finite (gap, bound) pairs to plot")
    ax.set_xlabel("closed-form bound")
    ax.set_ylabel("empirical cost gap")


def render(spec: FigureSpec) -> Path:
    """Render one figure and return its output path.

    Raises:
        SchemaError: missing/unreadable CSV or missing required columns.
    """
    rows = read_table(spec.csv_path, spec.kind)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    try:
        if not rows:
            _annotate_empty(ax, f"{spec.csv_path.name} has a header but no data rows")
        elif spec.kind == "trajectory":
            _draw_trajectory(ax, rows)
        elif spec.kind == "sweep":
            _draw_sweep(ax, rows, spec.logy)
        else:
            _draw_bounds(ax, rows, spec.logx, spec.logy)
        if rows and spec.logx:
            ax.set_xscale("log")
        if rows and spec.logy:
            ax.set_yscale("log")
        ax.set_title(spec.title if spec.title is not None else spec.kind)
        spec.out_path.parent.mkdir(parents=True, exist_ok=True)
        if spec.out_path.suffix.lower() == ".svg":
            # Date: None keeps reruns byte-identical
            fig.savefig(spec.out_path, format="svg", metadata={"Date": None})
        else:
            fig.savefig(spec.out_path, dpi=spec.dpi)
    finally:
        plt.close(fig)
    return spec.out_path
