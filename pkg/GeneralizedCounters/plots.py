from pathlib import Path
from typing import Sequence
import logging
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

from GeneralizedCounters.exceptions import SchemaError

PLOT_KINDS = ("curves", "fig6", "histogram", "maps")
REQUIRED_COLUMNS = {
    "curves": ["episode", "agent", "mean_metric"],
    "fig6": ["pair", "episode", "c", "gc", "rel_err"],
    "histogram": ["state_bin", "coefficient"],
    "maps": ["map", "position_bin", "velocity_bin", "visits", "ce"],
    }

# glyphs as paths and a fixed id salt keep the SVG self-contained and reproducible
matplotlib.rcParams["svg.fonttype"] = "path"
matplotlib.rcParams["svg.hashsalt"] = "generalized-counters"


def read_table(path: str, kind: str) -> pd.DataFrame:

    try:
        df = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise SchemaError(f"{path} is empty")

    missing = [column for column in REQUIRED_COLUMNS[kind] if column not in df.columns]
    if missing:
        raise SchemaError(f"{path} is missing column '{missing[0]}' required by '{kind}' plots")
    if df.empty:
        raise SchemaError(f"{path} has a header but no rows")

    return df


def _plot_curves(ax, df: pd.DataFrame, log_abscissa: bool):

    for agent, curve in df.groupby("agent", sort=False):
        curve = curve.sort_values("episode")
        ax.plot(curve["episode"], curve["mean_metric"], label=agent, linewidth=1.2)

    if log_abscissa:
        ax.set_xscale("log")
    ax.set_xlabel("episode")
    ax.set_ylabel("mean metric")
    ax.legend(fontsize=8)


def _plot_fig6(axes, df: pd.DataFrame):

    for ax, column, label in zip(axes, ("c", "gc"), ("visit counter", "generalized counter")):
        for pair, points in df.groupby("pair", sort=False):
            ax.scatter(points[column], points["rel_err"], s=4, alpha=0.6, label=pair)
        ax.set_xlabel(label)
        ax.set_ylabel("|Q - Q*| / |Q*|")
    axes[0].legend(fontsize=6, markerscale=2, ncol=2)


def _plot_histogram(ax, df: pd.DataFrame):

    coefficients = df["coefficient"].dropna()
    ax.hist(coefficients, bins=20, range=(-1, 1), edgecolor="black", linewidth=0.5)
    ax.set_xlabel("correlation coefficient")
    ax.set_ylabel("number of states")


def _plot_maps(axes, df: pd.DataFrame):

    for row, (name, view) in zip(axes, df.groupby("map", sort=False)):
        for ax, column, label in zip(row, ("visits", "ce"), ("visits", "C_E")):
            grid = view.pivot_table(index="velocity_bin", columns="position_bin", values=column, aggfunc="mean")
            image = ax.imshow(grid.to_numpy(), origin="lower", aspect="auto", cmap="viridis")
            ax.figure.colorbar(image, ax=ax)
            ax.set_title(f"{name}: {label}", fontsize=9)
            ax.set_xlabel("position bin")
            ax.set_ylabel("velocity bin")


def plot(paths: Sequence[str], kind: str, out: str, log_abscissa: bool = False) -> Path:
    '''renders one SVG from one or more CSV tables of the same schema'''

    if kind not in PLOT_KINDS:
        raise ValueError(f"Unknown plot kind '{kind}', valid kinds: {', '.join(PLOT_KINDS)}")
    if not paths:
        raise ValueError("plot needs at least one CSV file")

    df = pd.concat([read_table(path, kind) for path in paths], ignore_index=True)

    if kind == "fig6":
        fig, axes = plt.subplots(1, 2, figsize=(11.0, 4.5), sharey=True)
        _plot_fig6(axes, df)
    elif kind == "maps":
        views = df["map"].nunique()
        fig, axes = plt.subplots(views, 2, figsize=(10.0, 3.8 * views), squeeze=False)
        _plot_maps(axes, df)
    else:
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        if kind == "curves":
            _plot_curves(ax, df, log_abscissa)
        else:
            _plot_histogram(ax, df)

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)

    logging.info(f"Saved {kind} plot to {out}")
    return out
