"""Half-bridge switching-energy map E_sw(v, i) with bilinear lookup.

Negative turn-on current means the body diode conducts at turn-on (ZVS), so
that half of the map holds turn-off energy only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

# Placeholder coefficients for pipeline testing; NOT device data.
K_ON = 1.0e-6   # J / (V*A)
K_OFF = 0.4e-6  # J / (V*A)
PLACEHOLDER_LABEL = "placeholder loss map (not device data)"


@dataclass(frozen=True)
class LossMap:
    v_axis: np.ndarray
    i_axis: np.ndarray
    energy: np.ndarray  # shape (len(v_axis), len(i_axis)), joules
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.v_axis, dtype=float)
        i = np.asarray(self.i_axis, dtype=float)
        e = np.asarray(self.energy, dtype=float)
        if v.ndim != 1 or i.ndim != 1 or len(v) < 2 or len(i) < 2:
            raise ValueError("loss map axes need at least two points each")
        if np.any(np.diff(v) <= 0) or np.any(np.diff(i) <= 0):
            raise ValueError("loss map axes must be strictly increasing")
        if e.shape != (len(v), len(i)):
            raise ValueError(f"energy grid shape {e.shape} does not match axes ({len(v)}, {len(i)})")
        if np.any(~np.isfinite(e)) or np.any(e < 0):
            raise ValueError("switching energy must be finite and non-negative")
        for name, arr in (("v_axis", v), ("i_axis", i), ("energy", e)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "_interp", RegularGridInterpolator((v, i), e))

    def lookup(self, v, i):
        """Bilinear energy at (v, i), clamped to the map edges.

        Returns ``(energy, n_clamped)``.
        """
        v = np.asarray(v, dtype=float)
        i = np.asarray(i, dtype=float)
        v, i = np.broadcast_arrays(v, i)
        vc = np.clip(v, self.v_axis[0], self.v_axis[-1])
        ic = np.clip(i, self.i_axis[0], self.i_axis[-1])
        n_clamped = int(np.count_nonzero((vc != v) | (ic != i)))
        e = self._interp(np.stack([vc.ravel(), ic.ravel()], axis=-1)).reshape(v.shape)
        return (e if e.ndim else float(e)), n_clamped

    def __call__(self, v, i):
        return self.lookup(v, i)[0]


def placeholder_energy(v, i):
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    return np.where(i < 0, K_OFF, K_ON + K_OFF) * v * np.abs(i)


def default_loss_map() -> LossMap:
    """Synthetic map E = (k_on + k_off) v |i| for i >= 0 and k_off v |i| for i < 0.

    Bilinear interpolation reproduces it exactly inside the grid because the
    current axis has a node at zero.
    """
    v_axis = np.linspace(0.0, 1200.0, 13)
    i_axis = np.linspace(-100.0, 100.0, 41)
    vv, ii = np.meshgrid(v_axis, i_axis, indexing="ij")
    return LossMap(v_axis, i_axis, placeholder_energy(vv, ii), PLACEHOLDER_LABEL)


def load_loss_map(path: str | Path) -> LossMap:
    """Read a CSV with header ``v,i,e`` describing a full rectangular grid."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(row for row in fh if not row.lstrip().startswith("#"))
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["v", "i", "e"]:
            raise ValueError(f"{path}: header must be 'v,i,e'")
        for row in reader:
            rows.append((float(row["v"]), float(row["i"]), float(row["e"])))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.array(rows)
    v_axis = np.unique(data[:, 0])
    i_axis = np.unique(data[:, 1])
    if len(data) != len(v_axis) * len(i_axis):
        raise ValueError(f"{path}: points do not form a rectangular grid")
    energy = np.full((len(v_axis), len(i_axis)), np.nan)
    energy[np.searchsorted(v_axis, data[:, 0]), np.searchsorted(i_axis, data[:, 1])] = data[:, 2]
    if np.any(np.isnan(energy)):
        raise ValueError(f"{path}: duplicate or missing grid points")
    return LossMap(v_axis, i_axis, energy, label=str(path))


def save_loss_map(loss_map: LossMap, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["v", "i", "e"])
        for a, v in enumerate(loss_map.v_axis):
            for b, i in enumerate(loss_map.i_axis):
                w.writerow([repr(float(v)), repr(float(i)), repr(float(loss_map.energy[a, b]))])
