"""Command-line front end.

Every subcommand writes its data (CSV or ``key: value`` text) to ``--out``
or stdout and prints a one-line summary ``<command> <potential> -> <result>``
(to stderr when the data goes to stdout).

Exit codes: 0 success, 2 invalid configuration or input, 3 numerical
failure, 4 invalid circuit.
"""

from __future__ import annotations

import argparse
import math
import sys
from collections import Counter

import numpy as np

from . import io as sio
from .actions import action_values
from .dynamics import branches, period_T, trajectory_oracle
from .emmap import critical_curves, em_grid
from .errors import (
    BranchLost,
    ConfigError,
    CriticalValue,
    IntegrationFailure,
    InvalidCircuit,
    NoOrbit,
    NonConvergent,
    PoleSingularity,
    SectionNotFound,
    ToleranceNotMet,
    TrackingLost,
)
from .monodromy import J_FLOOR, J_START, Circuit, chi_scan, delta_at, monodromy_test
from .potential import Potential

__all__ = ["main", "run", "build_parser"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CIRCUIT = 0, 2, 3, 4
_CONFIG_ERRORS = (ConfigError, CriticalValue, NoOrbit, PoleSingularity, OSError)
_NUMERIC_ERRORS = (NonConvergent, ToleranceNotMet, IntegrationFailure, SectionNotFound,
                   TrackingLost, BranchLost)
_POTENTIAL_KEYS = ("coeffs", "omega", "eta", "lambda")

# per-command defaults; a config file value wins over these, a flag over both
DEFAULTS = {
    "tol": 1e-10,
    "h_min": -2.0, "h_max": 2.0, "j_min": -2.0, "j_max": 2.0, "nh": 101, "nj": 101,
    "n": None,
    "j_from": 0.5, "j_to": 1e-4,
    "side": "+",
    "j_amplitude": 0.5,
    "j0": J_START, "j_floor": J_FLOOR,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("potential and output")
    g.add_argument("--config", help="flat key = value file; flags override its values")
    g.add_argument("--coeffs", type=float, nargs="+", help="c_1 ... c_N of V = sum c_k cos^k")
    g.add_argument("--omega", type=float)
    g.add_argument("--eta", type=float)
    g.add_argument("--lambda", dest="lambda_", type=float)
    g.add_argument("--out", help="output file (default: stdout)")
    g.add_argument("--tol", type=float, help="relative quadrature/integrator tolerance")

    p = _Parser(prog="spheremono", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("em-grid", parents=[common], help="classify a grid of (h, j)")
    for name in ("--h-min", "--h-max", "--j-min", "--j-max"):
        s.add_argument(name, type=float)
    s.add_argument("--nh", type=int)
    s.add_argument("--nj", type=int)

    s = sub.add_parser("curves", parents=[common], help="trace critical curves over j >= 0")
    s.add_argument("--j-max", type=float)
    s.add_argument("--n", type=int, help="number of j samples (default 201)")

    for name, text in (("branches", "turning points of every orbit at (h, j)"),
                       ("orbit", "integrate one radial period of the equations of motion"),
                       ("actions", "I1, I2, beta, chi and T on one orbit")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--h", type=float)
        s.add_argument("--j", type=float)
        if name != "branches":
            s.add_argument("--seed", type=float, help="angle inside the wanted orbit")

    s = sub.add_parser("chi-scan", parents=[common], help="chi(h, j) along decreasing j")
    s.add_argument("--h", type=float)
    s.add_argument("--j-from", type=float)
    s.add_argument("--j-to", type=float)
    s.add_argument("--n", type=int, help="geometric samples (default: halving steps)")
    s.add_argument("--seed", type=float)

    s = sub.add_parser("delta", parents=[common], help="limit of 2 chi at (a, 0+-)")
    s.add_argument("--a", type=float)
    s.add_argument("--side", choices=("+", "-"))
    s.add_argument("--seed", type=float)
    s.add_argument("--j0", type=float)
    s.add_argument("--j-floor", type=float)
    s.add_argument("--samples-csv", help="also write the (j, 2 chi) samples here")

    s = sub.add_parser("monodromy", parents=[common], help="monodromy test on a circuit")
    s.add_argument("--a", type=float)
    s.add_argument("--b", type=float)
    s.add_argument("--j-amplitude", type=float)
    s.add_argument("--seed-a", type=float)
    s.add_argument("--seed-b", type=float)
    s.add_argument("--both-sides", action="store_true", default=None)
    s.add_argument("--samples-csv", help="also write the (j, 2 chi) samples here")
    return p


def _settings(args) -> dict:
    """Merge defaults, config file and flags (in increasing precedence)."""
    cfg = dict(DEFAULTS)
    file_cfg = sio.load_config(args.config) if args.config else {}
    flags = {("lambda" if k == "lambda_" else k): v for k, v in vars(args).items()
             if v is not None and k not in ("config", "command")}
    if any(k in flags for k in _POTENTIAL_KEYS):
        file_cfg = {k: v for k, v in file_cfg.items() if k not in _POTENTIAL_KEYS}
    cfg.update(file_cfg)
    cfg.update(flags)
    tol = cfg["tol"]
    if not (isinstance(tol, (int, float)) and 0 < tol <= 1e-2):
        raise ConfigError(f"tol must lie in (0, 1e-2], got {tol!r}")
    return cfg


def _need(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ConfigError("missing parameter(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))
    out = []
    for k in keys:
        try:
            v = float(cfg[k])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{k} must be a number, got {cfg[k]!r}") from exc
        if not math.isfinite(v):
            raise ConfigError(f"{k} must be finite")
        out.append(v)
    return out if len(out) > 1 else out[0]


def _opt_float(cfg, key):
    return None if cfg.get(key) is None else _need(cfg, key)


def _select(brs, seed):
    if seed is None:
        if len(brs) > 1:
            raise ConfigError(f"{len(brs)} orbits exist; pass --seed to choose one")
        return brs[0]
    for br in brs:
        if br.contains(seed):
            return br
    raise ConfigError(f"no orbit contains theta={seed!r}")


def _cmd_em_grid(pot, cfg):
    h_min, h_max, j_min, j_max = _need(cfg, "h_min", "h_max", "j_min", "j_max")
    grid = em_grid(pot, (h_min, h_max), (j_min, j_max), int(cfg["nh"]), int(cfg["nj"]))
    counts = Counter(c.status.value for row in grid.cells for c in row)
    summary = ", ".join(f"{k}={counts[k]}" for k in ("regular", "critical", "out_of_range"))
    return sio.EM_GRID_COLUMNS, sio.em_grid_rows(grid), summary


def _cmd_curves(pot, cfg):
    n = 201 if cfg.get("n") is None else int(cfg["n"])
    curves = critical_curves(pot, _need(cfg, "j_max"), n)
    nb = sum(cv.kind == "boundary" for cv in curves)
    return sio.CURVE_COLUMNS, list(sio.curve_rows(curves)), f"{len(curves)} curves ({nb} boundary)"


def _cmd_branches(pot, cfg):
    h, j = _need(cfg, "h", "j")
    brs = branches(pot, h, j)
    return sio.BRANCH_COLUMNS, list(sio.branch_rows(brs)), f"r={len(brs)}"


def _cmd_orbit(pot, cfg):
    h, j = _need(cfg, "h", "j")
    br = _select(branches(pot, h, j), _opt_float(cfg, "seed"))
    rec = trajectory_oracle(pot, h, j, br, tol=cfg["tol"])
    summary = f"T={rec.period:.12g} delta_phi={rec.delta_phi:.12g} energy_drift={rec.energy_drift:.3g}"
    return sio.TRAJECTORY_COLUMNS, list(sio.trajectory_rows(rec)), summary


def _cmd_actions(pot, cfg):
    h, j = _need(cfg, "h", "j")
    br = _select(branches(pot, h, j), _opt_float(cfg, "seed"))
    av = action_values(pot, h, j, br, tol=cfg["tol"])
    items = [("potential", pot.label()), ("h", av.h), ("j", av.j), ("branch_index", av.branch_index),
             ("alpha_minus", float(br.alpha_minus)), ("alpha_plus", float(br.alpha_plus)),
             ("I1", av.I1), ("I2", av.I2), ("beta", av.beta), ("chi", av.chi),
             ("T", period_T(pot, h, j, br, tol=cfg["tol"]))]
    lines = [f"{k}: {sio.fmt(v)}" for k, v in items]
    return None, lines, f"I1={av.I1:.12g} beta={av.beta:.12g} chi={av.chi:.12g}"


def _cmd_chi_scan(pot, cfg):
    h, j_from, j_to = _need(cfg, "h", "j_from", "j_to")
    if not (j_from > 0 and j_to > 0 and j_from != j_to):
        raise ConfigError("need distinct positive --j-from and --j-to")
    if cfg.get("n") is None:
        step = 0.5 if j_to < j_from else 2.0
        js = [j_from]
        while (js[-1] * step >= j_to) if step < 1 else (js[-1] * step <= j_to):
            js.append(js[-1] * step)
    else:
        js = [float(v) for v in np.geomspace(j_from, j_to, int(cfg["n"]))]
    samples, _ = chi_scan(pot, h, js, _opt_float(cfg, "seed"), tol=cfg["tol"])
    jl, cl = samples[-1]
    return sio.CHI_SCAN_COLUMNS, samples, f"{len(samples)} samples, chi(j={jl:.3g})={cl:.10g}"


def _side(cfg):
    side = cfg["side"]
    if side in ("+", 1, "1", "+1"):
        return 1
    if side in ("-", -1, "-1"):
        return -1
    raise ConfigError(f"side must be + or -, got {side!r}")


def _cmd_delta(pot, cfg):
    a, j0, j_floor = _need(cfg, "a", "j0", "j_floor")
    side = _side(cfg)
    d = delta_at(pot, a, side, _opt_float(cfg, "seed"), j0=j0, j_floor=j_floor, tol=cfg["tol"])
    items = [("potential", pot.label()), ("a", a), ("side", "+" if side > 0 else "-"),
             ("seed_theta", d.seed_theta), ("value_real", d.value_real), ("value_int", d.value_int),
             ("residual", d.residual), ("uncertainty", d.estimate.uncertainty),
             ("samples_used", d.estimate.samples_used)]
    lines = [f"{k}: {sio.fmt(v)}" for k, v in items]
    extra = [("a", "+" if side > 0 else "-", j, v) for j, v in d.samples]
    return None, lines, f"Delta={d.value_int} (value {d.value_real:.10g}, residual {d.residual:.2g})", extra


def _cmd_monodromy(pot, cfg):
    a, b, amp = _need(cfg, "a", "b", "j_amplitude")
    try:
        circuit = Circuit(a, b, amp)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rep = monodromy_test(pot, circuit, _opt_float(cfg, "seed_a"), _opt_float(cfg, "seed_b"),
                         both_sides=bool(cfg.get("both_sides")), tol=cfg["tol"])
    summary = (f"index={rep.index} has_monodromy={'true' if rep.has_monodromy else 'false'} "
               f"(Delta_a={rep.delta_a.value_int}, Delta_b={rep.delta_b.value_int})")
    return None, sio.report_lines(rep, pot.label()), summary, list(sio.delta_sample_rows(rep))


COMMANDS = {
    "em-grid": _cmd_em_grid,
    "curves": _cmd_curves,
    "branches": _cmd_branches,
    "orbit": _cmd_orbit,
    "actions": _cmd_actions,
    "chi-scan": _cmd_chi_scan,
    "delta": _cmd_delta,
    "monodromy": _cmd_monodromy,
}


def _emit(columns, payload, stream):
    if columns is None:
        stream.write("".join(line + "\n" for line in payload))
    else:
        sio.write_csv(stream, columns, payload)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        cfg = _settings(args)
        pot = Potential.from_mapping(cfg)
        result = COMMANDS[args.command](pot, cfg)
        columns, payload, summary = result[:3]
        extra = result[3] if len(result) > 3 else None
        if cfg.get("out"):
            with open(cfg["out"], "w", newline="") as fh:
                _emit(columns, payload, fh)
            summary_stream = stdout
        else:
            _emit(columns, payload, stdout)
            summary_stream = stderr
        if extra is not None and cfg.get("samples_csv"):
            with open(cfg["samples_csv"], "w", newline="") as fh:
                sio.write_csv(fh, sio.SAMPLE_COLUMNS, extra)
        summary_stream.write(f"{args.command} {pot.label()} -> {summary}\n")
        return EXIT_OK
    except InvalidCircuit as exc:
        stderr.write(f"error: {exc}\n")
        for v in exc.violations[:10]:
            stderr.write(f"  h={v.point.h:.12g} j={v.point.j:.12g} {v.classification.status.value} "
                         f"nearest_critical_h={sio.fmt(v.nearest_critical_h)}\n")
        return EXIT_CIRCUIT
    except _CONFIG_ERRORS as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
