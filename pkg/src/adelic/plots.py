"""Optional figure rendering next to the CSV reports."""

from __future__ import annotations

import os
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _figure_path(csv_path: str, suffix: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return f"{root}_{suffix}.png"


def _cells(rows: list[str]) -> list[dict[str, str]]:
    header = rows[0].split(",")
    return [dict(zip(header, r.split(","))) for r in rows[1:]]


def plot_convergence(config, rows) -> str:
    data = _cells(list(rows))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for fam in config.families:
        pts = [(int(d["n"]), float(Fraction(d["nu_zero"]))) for d in data if d["family"] == fam.label]
        if pts:
            ax1.plot(*zip(*pts), marker="o", label=fam.label)
    ax1.set_xlabel("n")
    ax1.set_ylabel("mass at the zero ideal")
    ax1.legend()
    base = config.families[0].label
    for fam in config.families[1:]:
        pts = [
            (int(d["n"]), float(Fraction(d[f"tv_to_{base}"])))
            for d in data
            if d["family"] == fam.label and d.get(f"tv_to_{base}", "-") != "-"
        ]
        if pts:
            ax2.plot(*zip(*pts), marker="o", label=f"{fam.label} vs {base}")
    ax2.set_xlabel("n")
    ax2.set_ylabel("total variation distance")
    if ax2.lines:
        ax2.legend()
    fig.tight_layout()
    path = _figure_path(config.output, "convergence")
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_spectral(config, rows) -> str:
    data = _cells(list(rows))
    L = config.moments
    fig, ax = plt.subplots(figsize=(6, 4))
    for d in data:
        moments = [float(Fraction(d[f"m{l}"])) for l in range(L + 1)]
        ax.plot(range(L + 1), moments, marker="o", label=f"{d['family']} n={d['n']}")
    ax.plot(
        range(L + 1),
        [float(Fraction(data[0][f"g{l}"])) for l in range(L + 1)],
        "k--",
        label="group moments",
    )
    ax.set_xlabel("moment order")
    ax.set_ylabel("normalized trace")
    ax.legend(fontsize="small")
    fig.tight_layout()
    path = _figure_path(config.output, "moments")
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_quasitile(config, ts) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    stages = [rec.stage for rec in ts.stages]
    cov = [float(rec.cumulative_coverage) for rec in ts.stages]
    ax.step(stages, cov, where="post", marker="o")
    ax.axhline(1 - float(ts.epsilon), color="red", linestyle="--", label="target")
    ax.set_xlabel("stage")
    ax.set_ylabel("cumulative coverage")
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    path = _figure_path(config.output, "coverage")
    fig.savefig(path)
    plt.close(fig)
    return path
