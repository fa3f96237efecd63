"""Archive heatmaps as a CSV grid and a binary PPM image.

Both outputs put the origin (sparsity 0, diversity 0) at the bottom left:
columns are sparsity, rows run from the highest diversity down to 0.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

EMPTY_RGB = (40, 40, 40)
# viridis anchors, dark (low objective) to light (high objective)
_ANCHORS = np.array(
    [[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]], dtype=float
)


def objective_grid(rows: Iterable[Mapping], shape: tuple[int, int]) -> np.ndarray:
    """``(sparsity, diversity)`` array of elite objectives, NaN where empty."""
    grid = np.full(shape, np.nan)
    for row in rows:
        grid[int(row["sparsity"]), int(row["diversity"])] = float(row["objective"])
    return grid


def _colour(t: np.ndarray) -> np.ndarray:
    pos = np.clip(t, 0.0, 1.0) * (len(_ANCHORS) - 1)
    lo = np.floor(pos).astype(int).clip(0, len(_ANCHORS) - 2)
    frac = (pos - lo)[..., None]
    return (_ANCHORS[lo] * (1 - frac) + _ANCHORS[lo + 1] * frac).round().astype(np.uint8)


def render_ppm(grid: np.ndarray, cell_px: int = 8) -> bytes:
    """Binary P6 image of an objective grid; empty cells are dark grey."""
    image_grid = grid.T[::-1]  # rows: diversity high -> low, cols: sparsity
    filled = ~np.isnan(image_grid)
    rgb = np.empty(image_grid.shape + (3,), dtype=np.uint8)
    rgb[:] = EMPTY_RGB
    if filled.any():
        lo, hi = np.nanmin(image_grid), np.nanmax(image_grid)
        span = hi - lo if hi > lo else 1.0
        rgb[filled] = _colour((image_grid[filled] - lo) / span)
    pixels = np.repeat(np.repeat(rgb, cell_px, axis=0), cell_px, axis=1)
    h, w = pixels.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + pixels.tobytes()


def grid_csv_lines(grid: np.ndarray) -> list[list[str]]:
    """Header row plus one row per diversity value, highest first; empty cells are blank."""
    n_sparsity, n_diversity = grid.shape
    lines = [["diversity\\sparsity"] + [str(s) for s in range(n_sparsity)]]
    for d in range(n_diversity - 1, -1, -1):
        cells = ["" if np.isnan(x) else repr(float(x)) for x in grid[:, d]]
        lines.append([str(d)] + cells)
    return lines


def export_heatmap(
    rows: Iterable[Mapping],
    shape: tuple[int, int],
    csv_path: str | Path,
    ppm_path: str | Path | None = None,
    header: Iterable[str] = (),
    cell_px: int = 8,
) -> np.ndarray:
    """Write the heatmap grid (and optionally the image); returns the grid."""
    grid = objective_grid(rows, shape)
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        csv.writer(fh, lineterminator="\n").writerows(grid_csv_lines(grid))
    if ppm_path is not None:
        Path(ppm_path).write_bytes(render_ppm(grid, cell_px))
    return grid
