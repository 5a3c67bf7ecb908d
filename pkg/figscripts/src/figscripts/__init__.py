"""Figure regeneration from solver CSV records: spacetime heatmaps, final
spatial profiles, and kernel-comparison overlays."""

from .align import (
    aligned_profile_difference,
    profile_difference,
    profile_shift,
    shift_profile,
)
from .plots import FigureSpec, plot_heatmap, plot_overlay, plot_profile, render
from .records import Record, RecordError, read_record

__version__ = "0.1.0"
__all__ = [
    "FigureSpec",
    "Record",
    "RecordError",
    "aligned_profile_difference",
    "plot_heatmap",
    "plot_overlay",
    "plot_profile",
    "profile_difference",
    "profile_shift",
    "read_record",
    "render",
    "shift_profile",
]
