"""Derivative targets, z-score normalization and training matrices.

Targets are finite-difference state derivatives (x(k+1) - x(k)) / h; features
are the concatenated normalized state, control and disturbance at step k.
Statistics are pooled over all scenarios and steps with Bessel-corrected
standard deviations floored at STD_FLOOR.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .datagen import Scenario
from .errors import InsufficientData

STD_FLOOR = 1e-8

FEATURE_WIDTH = 11  # x(4) + u(3) + d(4)


@dataclass(frozen=True)
class NormStats:
    """Per-channel means and standard deviations for x, u, d and the derivative."""

    mean_x: np.ndarray
    std_x: np.ndarray
    mean_u: np.ndarray
    std_u: np.ndarray
    mean_d: np.ndarray
    std_d: np.ndarray
    mean_dx: np.ndarray
    std_dx: np.ndarray

    def to_dict(self) -> dict:
        return {
            name: [float(v) for v in getattr(self, name)]
            for name in (
                "mean_x", "std_x", "mean_u", "std_u",
                "mean_d", "std_d", "mean_dx", "std_dx",
            )
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        return cls(**{k: np.array(v, dtype=float) for k, v in d.items()})


@dataclass(frozen=True)
class Dataset:
    """Normalized feature/target matrices with provenance per row."""

    features: np.ndarray   # (rows, 11), column order x(4), u(3), d(4)
    targets: np.ndarray    # (rows, 4)
    stats: NormStats
    row_index: list        # (scenario index, step k) per row


def fd_target(x_k, x_k1, h: float) -> np.ndarray:
    """Finite-difference derivative (x(k+1) - x(k)) / h, componentwise."""
    if h <= 0:
        raise ValueError("h must be positive")
    a = x_k.as_array() if hasattr(x_k, "as_array") else np.asarray(x_k, dtype=float)
    b = x_k1.as_array() if hasattr(x_k1, "as_array") else np.asarray(x_k1, dtype=float)
    return (b - a) / h


def _pool(scenarios: list[Scenario], h: float):
    xs, us, ds, dxs = [], [], [], []
    for s in scenarios:
        xs.append(s.states[:-1])
        us.append(s.controls)
        ds.append(s.disturbances)
        dxs.append((s.states[1:] - s.states[:-1]) / h)
    return (np.vstack(xs), np.vstack(us), np.vstack(ds), np.vstack(dxs))


def _mean_std(arr: np.ndarray):
    mean = arr.mean(axis=0)
    std = np.maximum(arr.std(axis=0, ddof=1), STD_FLOOR)
    return mean, std


def compute_stats(scenarios: list[Scenario], h: float) -> NormStats:
    """Pooled sample means and Bessel-corrected standard deviations."""
    if not scenarios or sum(s.n_steps for s in scenarios) < 2:
        raise InsufficientData("need at least 2 usable steps to compute statistics")
    x, u, d, dx = _pool(scenarios, h)
    mx, sx = _mean_std(x)
    mu, su = _mean_std(u)
    md, sd = _mean_std(d)
    mdx, sdx = _mean_std(dx)
    return NormStats(mx, sx, mu, su, md, sd, mdx, sdx)


def normalize(v, mean, std) -> np.ndarray:
    return (np.asarray(v, dtype=float) - mean) / std


def denormalize(v, mean, std) -> np.ndarray:
    return np.asarray(v, dtype=float) * std + mean


def build_matrices(scenarios: list[Scenario], stats: NormStats, h: float) -> Dataset:
    """Assemble the (rows, 11) feature and (rows, 4) target matrices.

    Row (j, k) uses the scenario sample at step k for k = 0..N-1; the target
    at k = N would need x(N+1), which does not exist.
    """
    if not scenarios:
        raise InsufficientData("no scenarios")
    x, u, d, dx = _pool(scenarios, h)
    features = np.hstack(
        [
            normalize(x, stats.mean_x, stats.std_x),
            normalize(u, stats.mean_u, stats.std_u),
            normalize(d, stats.mean_d, stats.std_d),
        ]
    )
    targets = normalize(dx, stats.mean_dx, stats.std_dx)
    row_index = [(s.index, k) for s in scenarios for k in range(s.n_steps)]
    return Dataset(features, targets, stats, row_index)


def export_dataset(out_dir, ds: Dataset) -> None:
    """Write features.csv, targets.csv and stats.json (17 significant digits)."""
    for name, arr in (("features", ds.features), ("targets", ds.targets)):
        with open(f"{out_dir}/{name}.csv", "w") as fh:
            for row in arr:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    with open(f"{out_dir}/stats.json", "w") as fh:
        json.dump(ds.stats.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
