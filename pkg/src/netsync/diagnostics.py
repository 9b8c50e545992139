"""Synchronization metrics and parameter sweeps: per-step pairwise sync
error, window averages, 1-D alpha sweeps and 2-D (alpha, xi) perturbation
grids, with CSV and PGM heatmap output.

Sweep cells are independent; they can run on a thread pool and are always
assembled in index order, so a sweep is reproducible cell-for-cell no
matter how it was scheduled.
"""

from __future__ import annotations

import dataclasses
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatchError,
    DivergedError,
    InvalidParamsError,
    WindowOutOfRangeError,
)
from .netsim import (
    DEFAULT_DT,
    NetworkSystem,
    Perturbation,
    Trajectory,
    rk4_integrate,
)

THREADS_ENV_VAR = "NETSYNC_THREADS"

DEFAULT_WINDOW = (1000.0, 2000.0)


def sync_error_series(traj: Trajectory) -> np.ndarray:
    """Per saved step, the maximum Euclidean distance between any two
    vertex states (for two vertices this is just their distance)."""
    if traj.n_vertices < 2:
        raise DimensionMismatchError("sync error needs at least two vertices")
    blocks = traj.blocks()
    out = np.zeros(blocks.shape[0])
    for i in range(traj.n_vertices - 1):
        for j in range(i + 1, traj.n_vertices):
            d = blocks[:, i, :] - blocks[:, j, :]
            np.maximum(out, np.sqrt((d * d).sum(axis=1)), out=out)
    return out


def final_sync_error(traj: Trajectory) -> float:
    return float(sync_error_series(traj)[-1])


def time_avg_sync_error(traj: Trajectory, window: tuple[float, float]) -> float:
    """Mean of the sync-error series over saved steps with t in [lo, hi]."""
    lo, hi = window
    if lo > hi:
        raise WindowOutOfRangeError(f"empty window [{lo}, {hi}]")
    times = traj.times()
    slack = 1e-9 * max(traj.dt, 1.0)
    if lo < times[0] - slack or hi > times[-1] + slack:
        raise WindowOutOfRangeError(
            f"window [{lo}, {hi}] outside trajectory span [{times[0]}, {times[-1]}]"
        )
    mask = (times >= lo - slack) & (times <= hi + slack)
    if not mask.any():
        raise WindowOutOfRangeError(f"no saved steps inside window [{lo}, {hi}]")
    return float(sync_error_series(traj)[mask].mean())


@dataclass(frozen=True)
class SimConfig:
    """Integration settings for sweep cells."""

    dt: float = DEFAULT_DT
    t_end: float = DEFAULT_WINDOW[1]
    window: tuple[float, float] = DEFAULT_WINDOW
    save_stride: int = 10

    def steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class SweepResult:
    axis1_label: str
    axis1: np.ndarray
    cells: np.ndarray
    diverged: np.ndarray
    meta: dict
    axis2_label: str | None = None
    axis2: np.ndarray | None = None

    def __post_init__(self):
        expected = (self.axis1.size,) if self.axis2 is None else (self.axis1.size, self.axis2.size)
        if self.cells.shape != expected or self.diverged.shape != expected:
            raise InvalidParamsError(
                f"cells shape {self.cells.shape} does not match axes {expected}"
            )
        if not np.isfinite(self.cells[~self.diverged]).all():
            raise InvalidParamsError("non-finite cell without a diverged flag")
        self.axis1.setflags(write=False)
        self.cells.setflags(write=False)
        self.diverged.setflags(write=False)
        if self.axis2 is not None:
            self.axis2.setflags(write=False)


def _workers(explicit: int | None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _run_cells(tasks, workers: int):
    """Evaluate cell closures, preserving index order in the output."""
    if workers <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [f.result() for f in futures]


def _measure_cell(sys: NetworkSystem, ic: np.ndarray, config: SimConfig) -> tuple[float, bool]:
    try:
        traj = rk4_integrate(sys, ic, config.dt, config.steps(),
                             save_stride=config.save_stride)
        return time_avg_sync_error(traj, config.window), False
    except DivergedError:
        return float("nan"), True


def _meta(config: SimConfig, seed: int | None, **extra) -> dict:
    meta = {
        "dt": config.dt,
        "t_end": config.t_end,
        "window": list(config.window),
        "save_stride": config.save_stride,
        "seed": seed,
    }
    meta.update(extra)
    return meta


def alpha_sweep(base: NetworkSystem, alphas, ic, config: SimConfig,
                *, workers: int | None = None, seed: int | None = None) -> SweepResult:
    """Time-averaged sync error for each coupling strength, same initial
    condition per cell."""
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size == 0:
        raise InvalidParamsError("alpha grid must be nonempty")
    ic = np.asarray(ic, dtype=float).reshape(-1)

    def make_task(a: float):
        sys_a = dataclasses.replace(base, alpha=float(a))
        return lambda: _measure_cell(sys_a, ic, config)

    results = _run_cells([make_task(a) for a in alphas], _workers(workers))
    cells = np.array([r[0] for r in results])
    flags = np.array([r[1] for r in results])
    return SweepResult(
        axis1_label="alpha",
        axis1=alphas.copy(),
        cells=cells,
        diverged=flags,
        meta=_meta(config, seed),
    )


def colormap_sweep(base: NetworkSystem, alphas, xis, ic, shape, config: SimConfig,
                   *, omega: float | None = None, edge: tuple[int, int] = (0, 1),
                   workers: int | None = None, seed: int | None = None) -> SweepResult:
    """2-D grid over (alpha, xi): each cell integrates the network with a
    single edge perturbation xi * shape (cosine-modulated when omega is
    given) and records the time-averaged sync error."""
    alphas = np.asarray(alphas, dtype=float)
    xis = np.asarray(xis, dtype=float)
    if alphas.size == 0 or xis.size == 0:
        raise InvalidParamsError("sweep grids must be nonempty")
    shape = np.asarray(shape, dtype=float)
    if shape.shape != (base.field.dim, base.field.dim):
        raise DimensionMismatchError(
            f"perturbation shape {shape.shape} does not match field dim {base.field.dim}"
        )
    ic = np.asarray(ic, dtype=float).reshape(-1)
    i, j = edge

    def make_task(a: float, xi: float):
        pert = Perturbation(i=i, j=j, base=xi * shape, omega=omega)
        sys_cell = dataclasses.replace(base, alpha=float(a), perturbations=(pert,))
        return lambda: _measure_cell(sys_cell, ic, config)

    tasks = [make_task(a, xi) for a in alphas for xi in xis]
    results = _run_cells(tasks, _workers(workers))
    cells = np.array([r[0] for r in results]).reshape(alphas.size, xis.size)
    flags = np.array([r[1] for r in results]).reshape(alphas.size, xis.size)
    return SweepResult(
        axis1_label="alpha",
        axis1=alphas.copy(),
        cells=cells,
        diverged=flags,
        meta=_meta(config, seed, omega=omega, edge=list(edge)),
        axis2_label="xi",
        axis2=xis.copy(),
    )


def write_sweep_csv(result: SweepResult, path) -> None:
    """Grid CSV: header row carries the axis2 values, first column the
    axis1 values.  1-D sweeps get a two-column value table."""
    lines = []
    if result.axis2 is None:
        lines.append(f"{result.axis1_label},value")
        for a, c in zip(result.axis1, result.cells):
            lines.append(f"{a:.10g},{_cell_str(c)}")
    else:
        head = [f"{result.axis1_label}\\{result.axis2_label}"]
        head += [f"{x:.10g}" for x in result.axis2]
        lines.append(",".join(head))
        for a, row in zip(result.axis1, result.cells):
            lines.append(",".join([f"{a:.10g}"] + [_cell_str(c) for c in row]))
    Path(path).write_text("\n".join(lines) + "\n")


def _cell_str(c: float) -> str:
    return "diverged" if not np.isfinite(c) else f"{c:.17g}"


def write_sweep_pgm(result: SweepResult, path) -> None:
    """8-bit P2 heatmap, linearly scaled from 0 (black) to the grid max
    (white); diverged cells render white.  A JSON sidecar with scale and
    run metadata is written next to it."""
    grid = result.cells if result.axis2 is not None else result.cells[:, None]
    flags = result.diverged if result.axis2 is not None else result.diverged[:, None]
    finite = grid[~flags]
    scale = float(finite.max()) if finite.size else 0.0
    if scale <= 0.0:
        scaled = np.zeros_like(grid)
    else:
        scaled = np.clip(grid / scale, 0.0, 1.0)
    pixels = np.rint(scaled * 255.0).astype(int)
    pixels[flags] = 255
    rows, cols = pixels.shape
    lines = ["P2", f"{cols} {rows}", "255"]
    lines += [" ".join(str(v) for v in row) for row in pixels]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    sidecar = {
        "scale_max": scale,
        "axis1": {"label": result.axis1_label, "values": [float(v) for v in result.axis1]},
        "axis2": None if result.axis2 is None else
                 {"label": result.axis2_label, "values": [float(v) for v in result.axis2]},
        "diverged_cells": int(flags.sum()),
        "meta": result.meta,
    }
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n")
