"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 a model invariant
was violated during the run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import report
from .harmonic import LinkImpedanceSpec, steady_state_current
from .lossmap import default_loss_map, load_loss_map
from .metrics import phase_power
from .modulation import OverModulationError
from .oracle import OracleError, check as oracle_check
from .params import (ConfigError, ConverterParams, Topology, apply_overrides, blocking_cap_bounds,
                     check, describe, errors, parse_config_text, validate)
from .waveforms import synthesize

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2
ORACLE_RMS_TOL = 5e-3
ORACLE_MAX_TOL = 2e-2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _key_value(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--config", default=argparse.SUPPRESS, help="key = value parameter file")
    g.add_argument("--set", dest="overrides", action="append", type=_key_value,
                   default=argparse.SUPPRESS, metavar="KEY=VALUE", help="override one parameter")
    g.add_argument("--out-dir", default=argparse.SUPPRESS,
                   help="write CSV files here instead of standard output")
    g.add_argument("--topology", choices=[t.value for t in Topology], default=argparse.SUPPRESS)
    g.add_argument("--nsw", type=int, default=argparse.SUPPRESS, help="samples per switching period")
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes for sweeps")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="yabsim", parents=[common],
                     description="Steady-state YAB / AC-DC DAB converter model.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("sweep", parents=[common], help="sweep phi and v_dc",
                        description="Columns: topology, v_dc, phi (T_sw), then per metric "
                                    "power: P_avg_W; thd: thd; stress: I_t_rms_A; "
                                    "zvs: zvs_frac_a, zvs_frac_x1; loss: P_sw_W, P_cond_W; "
                                    "flux: B_max_T, B_bar_max_T_per_W; finally error.")
    sp.add_argument("--phi", type=_float_list, help="phase shifts as fractions of T_sw "
                    "(default 0,0.01,...,0.25)")
    sp.add_argument("--full-range", action="store_true", help="phi grid 0,0.01,...,0.5")
    sp.add_argument("--vdc", type=_float_list, default=(200.0, 250.0, 300.0))
    sp.add_argument("--metrics", default="power,thd,stress",
                    help=f"comma-separated subset of {','.join(report.METRICS)}")
    sp.add_argument("--loss-map", help="v,i,e CSV switching-energy grid (default: placeholder)")

    fp = sub.add_parser("figure", parents=[common], help="write <id>.csv and <id>.plot",
                        description="Figure ids: " + ", ".join(report.FIGURES) + ". Columns are "
                        "named in the CSV header; the first column is the x axis.")
    fp.add_argument("fig_id", metavar="id", choices=report.FIGURES)
    fp.add_argument("--loss-map")

    cp = sub.add_parser("capbounds", parents=[common], help="blocking-capacitor bounds",
                        description="Columns: c_min_F, c_max_F, epsilon, lambda, C_B_F.")
    cp.add_argument("--epsilon", type=float, default=0.01)
    cp.add_argument("--lam", type=float, default=0.2)

    dp = sub.add_parser("dump-cycle", parents=[common], help="one switching period of phase a",
                        description="Columns: theta, n, v_AN, v_Xx, v_XN, v_L, i_t.")
    dp.add_argument("--theta", type=float, required=True, help="grid angle, degrees")
    dp.add_argument("--phi", type=float, required=True, help="phase shift, fraction of T_sw")

    op = sub.add_parser("oracle-check", parents=[common], help="FFT solver vs exact integration",
                        description="Columns: theta, phi, v_dc, rel_rms_err, max_err. "
                                    "N_sw defaults to 2048 here.")
    op.add_argument("--count", type=int, default=100)
    op.add_argument("--seed", type=int, default=0)
    op.add_argument("--align", choices=("center", "boundary"), default="center")

    sub.add_parser("validate", parents=[common], help="check the parameter set")
    return parser


def resolve_params(args, strict: bool = True) -> ConverterParams:
    entries: dict[str, str] = {}
    config = getattr(args, "config", None)
    if config:
        path = Path(config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        entries.update(parse_config_text(path.read_text(encoding="utf-8")))
    entries.update(dict(getattr(args, "overrides", None) or []))
    if getattr(args, "topology", None):
        entries["topology"] = args.topology
    if getattr(args, "nsw", None) is not None:
        entries["N_sw"] = str(args.nsw)
    params = apply_overrides(ConverterParams(), entries)
    return check(params) if strict else params


def _emit(args, name: str, text: str) -> None:
    out_dir = getattr(args, "out_dir", None)
    if out_dir:
        path = report.write_text(Path(out_dir) / name, text)
        print(path)
    else:
        sys.stdout.write(text)


def cmd_sweep(args, params) -> int:
    phis = args.phi or (report.FULL_PHI_GRID if args.full_range else report.DEFAULT_PHI_GRID)
    topologies = (Topology(args.topology),) if getattr(args, "topology", None) \
        else (Topology.YAB, Topology.ACDC_DAB)
    try:
        spec = report.SweepSpec(phi_grid=tuple(phis), v_dc_list=tuple(args.vdc),
                                topologies=topologies,
                                metrics=tuple(m.strip() for m in args.metrics.split(",") if m.strip()))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    loss_map = load_loss_map(args.loss_map) if args.loss_map else None
    text, violations = report.sweep_csv(spec, params, loss_map, jobs=getattr(args, "jobs", 1) or 1)
    _emit(args, "sweep.csv", text)
    for v in violations:
        print(f"invariant violation: {v}", file=sys.stderr)
    return EXIT_INVARIANT if violations else EXIT_OK


def cmd_figure(args, params) -> int:
    loss_map = load_loss_map(args.loss_map) if args.loss_map else None
    fig = report.reproduce_figure(args.fig_id, params, loss_map)
    for path in report.write_figure(fig, getattr(args, "out_dir", None) or "."):
        print(path)
    return EXIT_OK


def cmd_capbounds(args, params) -> int:
    b = blocking_cap_bounds(params.L_t, params.f_g, params.f_sw, args.epsilon, args.lam)
    _emit(args, "capbounds.csv", report.to_csv(
        ["c_min_F", "c_max_F", "epsilon", "lambda", "C_B_F"],
        [[b.c_min, b.c_max, b.epsilon, b.lam, params.C_B]], [f"params: {describe(params)}"]))
    return EXIT_OK


def dump_cycle_rows(params: ConverterParams, theta: float, phi_frac: float) -> list[list]:
    w = synthesize(params, [theta], phi_frac * params.T_sw)
    spec = LinkImpedanceSpec(params.L_t, params.R_series, params.f_sw, params.N_sw)
    i_t = steady_state_current(w.v_L[0, 0], spec)
    return [[theta, n, w.v_AN[0, 0, n], w.v_bridge[0, 0, n], w.v_dm[0, 0, n], w.v_L[0, 0, n], i_t[n]]
            for n in range(params.N_sw)]


def cmd_dump_cycle(args, params) -> int:
    rows = dump_cycle_rows(params, args.theta, args.phi)
    _emit(args, "cycle.csv", report.to_csv(["theta", "n", "v_AN", "v_Xx", "v_XN", "v_L", "i_t"], rows,
                                           [f"params: {describe(params)}", f"phi = {args.phi} T_sw"]))
    return EXIT_OK


def oracle_rows(params: ConverterParams, count: int = 100, seed: int = 0,
                align: str = "center") -> list[list]:
    """Random operating points compared against exact integration.

    Each row is (theta, phi, v_dc, rel_rms_err, max_err, P_fft, P_oracle).
    """
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 360.0, count)
    phi = rng.uniform(0.0, 0.25, count)
    v_dc = rng.uniform(200.0, 300.0, count)
    spec = LinkImpedanceSpec(params.L_t, params.R_series, params.f_sw, params.N_sw)
    rows = []
    for th, ph, vd in zip(theta, phi, v_dc):
        p = params.replace(v_dc=float(vd))
        w = synthesize(p, [th], ph * p.T_sw)
        v_L, v_AN = w.v_L[0, 0], w.v_AN[0, 0]
        i_fft = steady_state_current(v_L, spec)
        res = oracle_check(i_fft, v_L, p.L_t, p.R_series, p.T_sw, align=align)
        rows.append([float(th), float(ph), float(vd), res.rel_rms_err, res.max_abs_err_over_peak,
                     float(phase_power(v_AN, i_fft)), float(phase_power(v_AN, res.i))])
    return rows


def cmd_oracle_check(args, params) -> int:
    if getattr(args, "nsw", None) is None:
        params = check(params.replace(N_sw=2048))
    rows = oracle_rows(params, args.count, args.seed, args.align)
    text = report.to_csv(["theta", "phi", "v_dc", "rel_rms_err", "max_err"], [r[:5] for r in rows],
                         [f"params: {describe(params)}",
                          f"seed = {args.seed}, align = {args.align}"])
    _emit(args, "oracle_check.csv", text)
    worst_rms = max(r[3] for r in rows)
    worst_max = max(r[4] for r in rows)
    print(f"worst rel_rms_err = {worst_rms:.3e}, worst max_err = {worst_max:.3e}", file=sys.stderr)
    return EXIT_OK if worst_rms < ORACLE_RMS_TOL and worst_max < ORACLE_MAX_TOL else EXIT_INVARIANT


def cmd_validate(args, params) -> int:
    found = validate(params)
    for v in found:
        print(f"{v.severity}: {v.key}: {v.message}")
    if not found:
        print("ok")
    return EXIT_USAGE if errors(found) else EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep, "figure": cmd_figure, "capbounds": cmd_capbounds,
    "dump-cycle": cmd_dump_cycle, "oracle-check": cmd_oracle_check, "validate": cmd_validate,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help (0) or usage error (1)
        return int(exc.code or 0)
    try:
        params = resolve_params(args, strict=args.command != "validate")
        return COMMANDS[args.command](args, params)
    except (ConfigError, OverModulationError, OracleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
