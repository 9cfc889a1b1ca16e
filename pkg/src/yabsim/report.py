"""Parameter sweeps and figure data, written as reproducible CSV."""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .lossmap import LossMap, default_loss_map
from .metrics import (PARTIAL_ZVS, FULL_ZVS, GridCycleResult, aggregate_losses, grid_cycle)
from .params import ConfigError, ConverterParams, Topology, check, describe
from .waveforms import ac_switch_voltage

METRICS = ("power", "thd", "stress", "zvs", "loss", "flux")
METRIC_COLUMNS = {
    "power": ["P_avg_W"],
    "thd": ["thd"],
    "stress": ["I_t_rms_A"],
    "zvs": ["zvs_frac_a", "zvs_frac_x1"],
    "loss": ["P_sw_W", "P_cond_W"],
    "flux": ["B_max_T", "B_bar_max_T_per_W"],
}
DEFAULT_PHI_GRID = tuple(k / 100 for k in range(26))
FULL_PHI_GRID = tuple(k / 100 for k in range(51))
FIGURES = ("phase-power", "power-vs-phi", "thd", "stress", "flux", "zvs", "loss-cycle", "loss-vs-phi")


class InvariantViolation(RuntimeError):
    pass


def fmt(value) -> str:
    """Shortest round-trip text for numbers; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "nan" if math.isnan(value) else repr(value)
    if isinstance(value, Topology):
        return value.value
    return str(value)


def to_csv(columns: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> str:
    out = io.StringIO()
    for line in comments:
        out.write(f"# {line}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


@dataclass(frozen=True)
class SweepSpec:
    phi_grid: tuple[float, ...] = DEFAULT_PHI_GRID
    v_dc_list: tuple[float, ...] = (200.0, 250.0, 300.0)
    topologies: tuple[Topology, ...] = (Topology.YAB, Topology.ACDC_DAB)
    metrics: tuple[str, ...] = ("power", "thd", "stress")

    def __post_init__(self):
        if not self.phi_grid or not self.v_dc_list or not self.topologies or not self.metrics:
            raise ValueError("sweep lists must be non-empty")
        if any(not 0.0 <= phi <= 0.5 for phi in self.phi_grid):
            raise ValueError("phi values must lie in [0, 0.5] (fractions of T_sw)")
        unknown = set(self.metrics) - set(METRICS)
        if unknown:
            raise ValueError(f"unknown metrics: {sorted(unknown)}")
        object.__setattr__(self, "topologies", tuple(Topology(t) for t in self.topologies))

    @property
    def columns(self) -> list[str]:
        cols = ["topology", "v_dc", "phi"]
        for m in METRICS:
            if m in self.metrics:
                cols += METRIC_COLUMNS[m]
        return cols + ["error"]


def invariant_violations(res: GridCycleResult, rel_tol: float = 1e-6) -> list[str]:
    """Cheap run-time checks on a grid-cycle result."""
    out = []
    scale = max(1.0, float(np.max(np.abs(res.p_a))))
    if not np.all(np.isfinite(res.p_a)) or not np.all(np.isfinite(res.i_t)):
        out.append("non-finite power or current")
    peak = float(np.max(np.abs(res.i_t))) or 1.0
    if np.max(np.abs(res.i_t.mean(axis=-1))) > 1e-9 * peak:
        out.append("link current has a DC component")
    n = len(res.theta_grid)
    if n % 3 == 0:
        lag = np.roll(res.p_a, n // 3)  # p_a(theta - 120)
        if np.max(np.abs(res.p_b - lag)) > rel_tol * scale:
            out.append("phase symmetry p_b(theta) = p_a(theta - 120) violated")
    return out


def zvs_fraction(classes, active: np.ndarray | None = None) -> float:
    cls = np.asarray(classes)
    if active is not None:
        cls = cls[active]
    return float(np.mean(np.isin(cls, (FULL_ZVS, PARTIAL_ZVS)))) if cls.size else math.nan


def metric_values(res: GridCycleResult, metrics: Sequence[str]) -> list:
    vals: list = []
    if "power" in metrics:
        vals.append(res.P_avg)
    if "thd" in metrics:
        vals.append(res.thd)
    if "stress" in metrics:
        vals.append(res.I_t_rms)
    if "zvs" in metrics:
        if res.zvs_a is None:
            vals += [None, None]
        else:
            vals += [zvs_fraction(res.zvs_a, res.v_sw_a != 0), zvs_fraction(res.zvs_x1)]
    if "loss" in metrics:
        vals += list(aggregate_losses(res)) if res.p_sw is not None and res.p_cond is not None \
            else [None, None]
    if "flux" in metrics:
        vals += [res.B_max, res.B_bar_max]
    return vals


def _sweep_point(args) -> tuple[list, list[str]]:
    params, topology, phi_frac, metrics, loss_map = args
    res = grid_cycle(params, phi_frac * params.T_sw, topology=topology, loss_map=loss_map)
    return metric_values(res, metrics), invariant_violations(res)


def sweep(spec: SweepSpec, params: ConverterParams, loss_map: LossMap | None = None,
          jobs: int = 1) -> tuple[list[list], list[str]]:
    """Evaluate every (topology, v_dc, phi) point in a fixed order.

    Returns ``(rows, violations)``; rows follow ``spec.columns``.  A v_dc that
    over-modulates yields one error row for that series.
    """
    if "loss" in spec.metrics and loss_map is None:
        loss_map = default_loss_map()
    tasks, slots = [], []
    rows: list[list] = []
    n_metric_cols = len(spec.columns) - 4
    for topology in spec.topologies:
        for v_dc in spec.v_dc_list:
            p = params.replace(v_dc=float(v_dc))
            try:
                check(p)
            except ConfigError as exc:
                rows.append([topology, v_dc, None] + [None] * n_metric_cols + [str(exc)])
                continue
            for phi in spec.phi_grid:
                slots.append(len(rows))
                rows.append([topology, v_dc, phi])
                tasks.append((p, topology, phi, tuple(spec.metrics), loss_map))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_sweep_point(t) for t in tasks]

    violations = []
    for slot, task, (vals, bad) in zip(slots, tasks, results):
        rows[slot] += vals + [""]
        violations += [f"{task[1].value} v_dc={task[0].v_dc:g} phi={task[2]:g}: {b}" for b in bad]
    return rows, violations


def sweep_csv(spec: SweepSpec, params: ConverterParams, loss_map: LossMap | None = None,
              jobs: int = 1) -> tuple[str, list[str]]:
    rows, violations = sweep(spec, params, loss_map, jobs)
    comments = [f"params: {describe(params)}"]
    if "loss" in spec.metrics:
        comments.append(f"loss map: {(loss_map or default_loss_map()).label}")
    return to_csv(spec.columns, rows, comments), violations


# ---------------------------------------------------------------- figures

@dataclass
class Figure:
    fig_id: str
    title: str
    columns: list[str]
    rows: list[list]
    comments: list[str] = field(default_factory=list)
    xlabel: str = ""
    ylabel: str = ""

    def csv(self) -> str:
        return to_csv(self.columns, self.rows, self.comments)

    def plot_script(self) -> str:
        """gnuplot commands plotting every column against the first."""
        lines = [
            "set datafile separator ','",
            "set datafile commentschars '#'",
            "set key autotitle columnhead",
            f"set title '{self.title}'",
            f"set xlabel '{self.xlabel or self.columns[0]}'",
            f"set ylabel '{self.ylabel}'",
            "set grid",
        ]
        curves = [f"'{self.fig_id}.csv' using 1:{k} with lines"
                  for k in range(2, len(self.columns) + 1)]
        lines.append("plot " + ", \\\n     ".join(curves))
        return "\n".join(lines) + "\n"


def _figure_params(params: ConverterParams, **conditions) -> ConverterParams:
    return check(params.replace(**conditions))


def _wide(phi_grid, series: dict[str, list[float]]) -> list[list]:
    return [[phi] + [series[k][j] for k in series] for j, phi in enumerate(phi_grid)]


def _need_device(params: ConverterParams, fig_id: str) -> None:
    missing = [k for k in ("R_ds_on", "C_oss") if getattr(params, k) is None]
    if missing:
        raise ConfigError(f"figure {fig_id} needs device inputs {', '.join(missing)} "
                          f"(set them with --set key=value)", missing[0])


def reproduce_figure(fig_id: str, params: ConverterParams, loss_map: LossMap | None = None) -> Figure:
    """Compute the data behind one model figure under its stated operating conditions."""
    if fig_id not in FIGURES:
        raise ValueError(f"unknown figure id {fig_id!r}; choose from {', '.join(FIGURES)}")
    T = params.T_sw
    base = [f"params: {describe(params)}", "v_dc of each column overrides the v_dc above"]

    def resolved(p: ConverterParams) -> list[str]:
        return [f"params: {describe(p)}"]
    yab, dab = Topology.YAB, Topology.ACDC_DAB

    if fig_id == "phase-power":
        p = _figure_params(params, v_g_rms=277.0, v_dc=200.0)
        phi = 0.2
        ry, rd = (grid_cycle(p, phi * T, topology=t) for t in (yab, dab))
        ref = 2.0 * ry.P_avg / 3.0 * np.cos(np.radians(ry.theta_grid)) ** 2
        rows = [list(r) for r in zip(ry.theta_grid, ry.p_a, rd.p_a, ref, ry.p_total, rd.p_total)]
        return Figure(fig_id, "Phase and total power, v_dc = 200 V, phi = 0.2 T_sw",
                      ["theta_deg", "p_a_YAB_W", "p_a_DAB_W", "p_a_PFC_ref_W", "p_YAB_W", "p_DAB_W"],
                      rows, resolved(p) + [f"v_dc = 200 V, phi = {phi} T_sw"], "grid angle (deg)", "power (W)")

    if fig_id == "power-vs-phi":
        series = {}
        for v_dc in (200.0, 250.0, 300.0):
            p = _figure_params(params, v_dc=v_dc)
            series[f"P_vdc{v_dc:g}_W"] = [grid_cycle(p, f * T).P_avg for f in FULL_PHI_GRID]
        return Figure(fig_id, "Total power versus phase shift", ["phi_Tsw"] + list(series),
                      _wide(FULL_PHI_GRID, series), base, "phi (T_sw)", "P (W)")

    if fig_id in ("thd", "stress"):
        attr, unit = ("thd", "") if fig_id == "thd" else ("I_t_rms", "_A")
        series = {}
        for v_dc in (200.0, 250.0, 300.0):
            p = _figure_params(params, v_dc=v_dc)
            for t in (yab, dab):
                series[f"{attr}_{t.value}_vdc{v_dc:g}{unit}"] = [
                    getattr(grid_cycle(p, f * T, topology=t), attr) for f in DEFAULT_PHI_GRID]
        title = "Grid current THD" if fig_id == "thd" else "Current stress (RMS winding current)"
        return Figure(fig_id, title, ["phi_Tsw"] + list(series), _wide(DEFAULT_PHI_GRID, series),
                      base, "phi (T_sw)", attr)

    if fig_id == "flux":
        p = _figure_params(params, v_g_rms=277.0, v_dc=300.0)
        grid = tuple(k / 100 for k in range(5, 26))
        series = {f"B_bar_{t.value}_T_per_W": [grid_cycle(p, f * T, topology=t).B_bar_max for f in grid]
                  for t in (yab, dab)}
        return Figure(fig_id, "Normalised inductor peak flux density, v_dc = 300 V",
                      ["phi_Tsw"] + list(series), _wide(grid, series),
                      resolved(p) + ["DAB curve uses plain Sin-PS modulation (no DC-side compensation)"],
                      "phi (T_sw)", "B_max / p_a_peak (T/W)")

    if fig_id == "zvs":
        p = _figure_params(params, v_g_rms=277.0, v_dc=200.0)
        phis = (0.05, 0.1, 0.15, 0.2, 0.25)
        results = [grid_cycle(p, f * T) for f in phis]
        theta = results[0].theta_grid
        cols = ["theta_deg", "v_sw_a_norm"] + [f"i_sw_a_phi{f:g}_A" for f in phis] \
            + [f"i_sw_x1_phi{f:g}_A" for f in phis]
        v_sw = ac_switch_voltage(theta, p.v_g_rms, p.v_dc, mode="normalized")
        rows = [[theta[k], v_sw[k]] + [r.i_sw_a[k] for r in results] + [r.i_sw_x1[k] for r in results]
                for k in range(len(theta))]
        return Figure(fig_id, "Turn-on currents of S_a+ and S_x1+, v_dc = 200 V", cols, rows,
                      resolved(p), "grid angle (deg)", "current (A)")

    _need_device(params, fig_id)
    loss_map = loss_map or default_loss_map()
    p = _figure_params(params, v_g_rms=277.0, v_dc=200.0)
    notes = resolved(p) + [f"loss map: {loss_map.label}"]
    if fig_id == "loss-cycle":
        r = grid_cycle(p, 0.2 * T, loss_map=loss_map)
        rows = [list(x) for x in zip(r.theta_grid, r.p_sw["a"], r.p_cond["a"],
                                     r.p_sw["x1"], r.p_cond["x1"])]
        notes.append(f"phi = 0.2 T_sw, v_dc = 200 V, P_avg = {fmt(r.P_avg)} W")
        return Figure(fig_id, "Half-bridge losses over a grid period",
                      ["theta_deg", "p_sw_a_W", "p_cond_a_W", "p_sw_x1_W", "p_cond_x1_W"],
                      rows, notes, "grid angle (deg)", "loss (W)")

    # loss-vs-phi
    rows = []
    for f in FULL_PHI_GRID:
        r = grid_cycle(p, f * T, loss_map=loss_map)
        rows.append([f, *aggregate_losses(r), r.P_avg])
    return Figure(fig_id, "Total MOSFET losses versus phase shift, v_dc = 200 V",
                  ["phi_Tsw", "P_sw_W", "P_cond_W", "P_avg_W"], rows, notes, "phi (T_sw)", "W")


def write_figure(fig: Figure, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    return (write_text(out_dir / f"{fig.fig_id}.csv", fig.csv()),
            write_text(out_dir / f"{fig.fig_id}.plot", fig.plot_script()))
