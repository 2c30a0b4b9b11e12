"""Figure rendering for the benchmark CLI.

Each experiment subcommand that writes a table also renders a companion
figure next to it (same stem, .png) unless plotting is switched off.
Figures are presentation artifacts: the reproducibility guarantees apply to
the CSV/JSON outputs, not to the image bytes.

matplotlib is imported lazily with the Agg backend so data-only runs never
touch it.
"""

from __future__ import annotations

from pathlib import Path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def figure_path(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def render_scan(rows, path) -> Path:
    """Mean restricted-isometry constant vs row count, with the scaling proxy."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ms = [row.m for row in rows]
    means = [row.mean_value for row in rows]
    stds = [row.std_value for row in rows]
    ax.errorbar(ms, means, yerr=stds, marker="o", label="mean estimate")
    proxies = [row.bound_proxy for row in rows]
    if all(p > 0 for p in proxies):
        ax.plot(ms, proxies, linestyle="--", marker="s", label="scaling proxy")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("rows m")
    ax.set_ylabel("restricted norm of I - AᵀA")
    ax.set_title(f"s = {rows[0].s}, n = {rows[0].n}, b = {rows[0].b}")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    out = figure_path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_tail(points, delta, path) -> Path:
    """Exceedance probability vs row count; points = [(m, probability)]."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot([m for m, _ in points], [p for _, p in points], marker="o")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("rows m")
    ax.set_ylabel(f"P(restricted norm ≥ {delta})")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = figure_path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_phase(rows, path) -> Path:
    """Exact-recovery rate vs sparsity."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot([row.s for row in rows], [row.rate for row in rows], marker="o")
    ax.set_xlabel("sparsity s")
    ax.set_ylabel("exact recovery rate")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(f"solver = {rows[0].solver}, {rows[0].trials} trials per point")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = figure_path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_distortion(report, distortions, path) -> Path:
    """Histogram of per-pair distortions with the summary report in the title."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.hist(distortions, bins=20, color="tab:blue", alpha=0.8)
    ax.set_xlabel("pairwise squared-distance distortion")
    ax.set_ylabel("pairs")
    ax.set_title(
        f"max = {report.max_distortion:.3g}, "
        f"{report.violating_pairs}/{report.pairs_evaluated} pairs above eps"
    )
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = figure_path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_confusion(confusion, accuracy, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.5, 4.0))
    im = ax.imshow(confusion, cmap="Blues")
    ax.set_xlabel("predicted class")
    ax.set_ylabel("true class")
    ax.set_title(f"accuracy = {accuracy:.3f}")
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    out = figure_path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
