"""The three figure styles: spacetime heatmaps, final profiles, overlays.

All plots are deterministic for fixed inputs: color scales come from the
data min/max, no timestamps or randomness enter the figures, and records
are never modified.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .align import aligned_profile_difference, shift_profile
from .records import Record, read_record


@dataclass
class FigureSpec:
    """One panel: which records, which style, which species, where to."""

    record_paths: list
    panel: str                  # heatmap | profile | overlay
    species: int
    output_path: str

    def __post_init__(self):
        if self.panel not in ("heatmap", "profile", "overlay"):
            raise ValueError(f"unknown panel type {self.panel!r}")
        want = 2 if self.panel == "overlay" else 1
        if len(self.record_paths) != want:
            raise ValueError(f"{self.panel} panels take {want} record(s), "
                             f"got {len(self.record_paths)}")


def render(spec: FigureSpec):
    """Load the referenced records and draw the requested panel."""
    records = [read_record(p) for p in spec.record_paths]
    if spec.panel == "heatmap":
        return plot_heatmap(records[0], spec.species, spec.output_path)
    if spec.panel == "profile":
        return plot_profile(records[0], spec.species, spec.output_path)
    return plot_overlay(records[0], records[1], spec.species, spec.output_path)


def plot_heatmap(record: Record, species: int, output_path) -> Path:
    """Spacetime evolution of one species: x horizontal, t vertical,
    color = density. Falls back to a profile plot with a warning when the
    record holds a single frame."""
    if len(record.times) < 2:
        warnings.warn("record has a single frame; drawing a profile instead")
        return plot_profile(record, species, output_path)
    data = record.frames[:, species, :]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    mesh = ax.imshow(
        data,
        origin="lower",
        aspect="auto",
        extent=(0.0, record.L, record.times[0], record.times[-1]),
        cmap="viridis",
        vmin=float(data.min()),
        vmax=float(data.max()),
        interpolation="nearest",
    )
    ax.set_xlabel("x (space)")
    ax.set_ylabel("t (time)")
    ax.set_title(f"species {species}: spacetime density")
    fig.colorbar(mesh, ax=ax, label="density (individuals / length)")
    out = Path(output_path)
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out


def plot_profile(record: Record, species: int, output_path) -> Path:
    """Spatial profile of one species at the final recorded time."""
    profile = record.final_profile(species)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(record.x, profile, lw=1.6)
    ax.set_xlabel("x (space)")
    ax.set_ylabel("density (individuals / length)")
    ax.set_title(f"species {species}: final profile at t = {record.times[-1]:g}")
    ax.set_xlim(0, record.L)
    out = Path(output_path)
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out


def plot_overlay(record_a: Record, record_b: Record, species: int,
                 output_path) -> float:
    """Final profiles of the same species from two records on one axes,
    aligned by circular cross-correlation; the legend reports their
    relative L2 difference. Returns that difference."""
    if (record_a.M, record_a.L) != (record_b.M, record_b.L):
        raise ValueError(
            f"records live on different grids: (M={record_a.M}, L={record_a.L}) "
            f"vs (M={record_b.M}, L={record_b.L})")
    a = record_a.final_profile(species)
    b = record_b.final_profile(species)
    rel, shift = aligned_profile_difference(a, b, record_a.L)
    a_aligned = shift_profile(a, shift, record_a.L)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(record_a.x, a_aligned, lw=1.6,
            label=f"record A (aligned, shift {shift:.4g})")
    ax.plot(record_b.x, b, lw=1.6, ls="--", label="record B")
    ax.set_xlabel("x (space)")
    ax.set_ylabel("density (individuals / length)")
    ax.set_title(f"species {species}: final profiles, relative L2 diff {rel:.3e}")
    ax.legend(title=f"relative L2 difference: {rel:.6f}")
    ax.set_xlim(0, record_a.L)
    fig.savefig(Path(output_path), dpi=130)
    plt.close(fig)
    return rel
