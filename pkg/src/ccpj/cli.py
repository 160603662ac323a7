"""Command line front end: simulate, sweep, route-dump and metrics.

Configs are JSON. Every dimensioned key carries its unit as a suffix
(``_mm``, ``_deg``, ``_N``, ...); values are converted to SI on load.
Keys not present in the shipped defaults are rejected.
"""
from __future__ import annotations

import argparse
import copy
import csv
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .chain import straight_chain
from .geometry import BeadSpec
from .metrics import (
    InsufficientData,
    OutOfBound,
    apparent_axial_modulus,
    apparent_bending_modulus,
    fit_stiffness,
    hysteresis_energies,
    loss_factor,
    tunability_loss,
    tunability_modulus,
)
from .solver import (
    Indenter,
    LoadCurve,
    NonConvergence,
    SolverConfig,
    axial_protocol,
    bending_protocol,
    equilibrate,
    pretension,
)
from .string_model import LinearSpring, LookupTable, OgdenUniaxial, route_string

log = logging.getLogger("ccpj")

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2

CURVE_HEADER = ["branch", "displacement_mm", "force_N"]
SWEEP_HEADER = [
    "cone_angle_deg",
    "tension_N",
    "bead_length_mm",
    "friction",
    "K_Npm",
    "E_apparent_MPa",
    "W_D_J",
    "W_E_J",
    "eta",
    "converged",
]
ROUTE_HEADER = ["node", "x_mm", "y_mm", "contact", "bead"]

# key -> (SolverConfig field, factor to SI)
_SOLVER_KEYS = {
    "rotation_gain_radpNm": ("rotation_gain", 1.0),
    "disp_gain_mpN": ("disp_gain", 1.0),
    "coarse_steps": ("coarse_steps", None),
    "fine_scale": ("fine_scale", 1.0),
    "force_tol_N": ("force_tol", 1.0),
    "moment_tol_Nm": ("moment_tol", 1.0),
    "depth_tol_mm": ("depth_tol", 1e-3),
    "max_iters": ("max_iters", None),
    "force_increment_N": ("force_increment", 1.0),
    "disp_increment_mm": ("disp_increment", 1e-3),
    "max_rotation_step_rad": ("max_rotation_step", 1.0),
    "max_disp_step_mm": ("max_disp_step", 1e-3),
    "jump_fraction": ("jump_fraction", 1.0),
    "max_refine": ("max_refine", None),
}


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """Fixed number format for every CSV cell: 9 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".9g")


# -- configuration ------------------------------------------------------------


def load_defaults() -> dict:
    text = resources.files("ccpj").joinpath("data/defaults.json").read_text()
    return json.loads(text)


def _merge(base: dict, user: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in user.items():
        name = f"{where}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {name!r}")
        ref = base[key]
        if isinstance(ref, dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{name!r} must be an object")
            out[key] = _merge(ref, val, name + ".")
        elif isinstance(ref, list):
            if not isinstance(val, list):
                raise ConfigError(f"{name!r} must be a list")
            out[key] = val
        elif isinstance(ref, (int, float)) and not isinstance(ref, bool):
            if key == "pretension_N" and isinstance(val, list):
                out[key] = val
            elif not isinstance(val, (int, float)) or isinstance(val, bool):
                raise ConfigError(f"{name!r} must be a number, got {val!r}")
            else:
                out[key] = val
        else:
            out[key] = val
    return out


def load_config(path=None) -> dict:
    cfg = load_defaults()
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        cfg = _merge(cfg, user)
        cfg["_base_dir"] = str(Path(path).resolve().parent)
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    """Build every object once so that bad values fail before any output is written."""
    try:
        bead_spec(cfg)
        tension_model(cfg)
        solver_config(cfg)
    except ConfigError:
        raise
    except (ValueError, TypeError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    if not isinstance(cfg["n_beads"], int) or cfg["n_beads"] < 0:
        raise ConfigError("n_beads must be a non-negative integer")
    if cfg["protocol"] not in ("bending", "tension", "compression"):
        raise ConfigError(f"unknown protocol {cfg['protocol']!r}")
    if cfg["drive"] not in ("displacement", "force"):
        raise ConfigError(f"unknown drive {cfg['drive']!r}")
    if cfg["depth_max_mm"] < 0:
        raise ConfigError("depth_max_mm must be non-negative")
    if cfg["modulus_length"] not in ("as_fabricated", "free"):
        raise ConfigError("modulus_length must be 'as_fabricated' or 'free'")
    w = cfg["fit_window_mm"]
    if len(w) != 2 or not all(isinstance(v, (int, float)) for v in w) or w[0] >= w[1]:
        raise ConfigError("fit_window_mm must be [low, high] with low < high")
    for t in tensions(cfg):
        if not isinstance(t, (int, float)) or t < 0:
            raise ConfigError(f"pretension_N values must be non-negative numbers, got {t!r}")
    for key, vals in cfg["sweep"].items():
        if key == "total_length_mm":
            if not vals > 0:
                raise ConfigError("sweep.total_length_mm must be positive")
            continue
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            raise ConfigError(f"sweep.{key} must be a list of numbers")


def tensions(cfg) -> list:
    t = cfg["pretension_N"]
    return list(t) if isinstance(t, list) else [t]


def bead_spec(cfg) -> BeadSpec:
    b = cfg["bead"]
    return BeadSpec(
        outer_radius=b["outer_radius_mm"] * 1e-3,
        inner_radius=b["inner_radius_mm"] * 1e-3,
        length=b["length_mm"] * 1e-3,
        cone_angle=math.radians(b["cone_angle_deg"]),
        friction=b["friction"],
        density=b["density_kgpm3"],
        edge_radius=b["edge_radius_mm"] * 1e-3,
    )


def tension_model(cfg):
    s = cfg["string"]
    kind = s["model"]
    if kind == "ogden":
        return OgdenUniaxial(diameter=s["diameter_mm"] * 1e-3)
    if kind == "linear":
        k = s["stiffness_Npm"]
        if not isinstance(k, (int, float)) or not k > 0:
            raise ConfigError("string.stiffness_Npm must be positive for the linear model")
        return LinearSpring(float(k))
    if kind == "table":
        p = s["table_csv"]
        if not p:
            raise ConfigError("string.table_csv is required for the table model")
        p = Path(cfg.get("_base_dir", ".")) / p
        return LookupTable.from_csv(p)
    raise ConfigError(f"unknown string model {kind!r}")


def solver_config(cfg) -> SolverConfig:
    kw = {}
    for key, val in cfg["solver"].items():
        name, factor = _SOLVER_KEYS[key]
        kw[name] = int(val) if factor is None else val * factor
    return SolverConfig(**kw)


# -- running ------------------------------------------------------------------


@dataclass
class RunResult:
    curve: LoadCurve
    metrics: dict
    converged: bool
    error: str | None = None


def beam_length(cfg, spec: BeadSpec, n_free: int) -> float:
    n = n_free + 1 if cfg["modulus_length"] == "as_fabricated" else n_free
    return n * spec.length


def analyse(curve: LoadCurve, L: float, D_O: float, window, modulus) -> dict:
    """Metrics of one curve; failures are reported under ``flags`` instead of raising."""
    out = {"K_Npm": None, "E_apparent_MPa": None, "W_D_J": None, "W_E_J": None, "eta": None, "flags": {}}
    try:
        K = fit_stiffness(curve, window)
        out["K_Npm"] = K
        out["E_apparent_MPa"] = modulus(K, L, D_O) * 1e-6
    except InsufficientData as exc:
        out["flags"]["K"] = f"InsufficientData: {exc}"
    try:
        W_D, W_E = hysteresis_energies(curve)
        out["W_D_J"], out["W_E_J"] = W_D, W_E
        out["eta"] = loss_factor(W_D, W_E)
    except InsufficientData as exc:
        out["flags"]["eta"] = f"InsufficientData: {exc}"
    except OutOfBound as exc:
        out["flags"]["eta"] = f"OutOfBound: {exc}"
    except ValueError as exc:
        out["flags"]["W"] = str(exc)
    return out


def run_point(cfg, tension: float, drive: str | None = None) -> RunResult:
    spec = bead_spec(cfg)
    n = cfg["n_beads"]
    model = tension_model(cfg)
    scfg = solver_config(cfg)
    depth = cfg["depth_max_mm"] * 1e-3
    window = tuple(v * 1e-3 for v in cfg["fit_window_mm"])
    chain = straight_chain(spec, n, gravity=cfg["gravity_mps2"])
    rest = cfg["string"]["rest_length_mm"] * 1e-3
    protocol = cfg["protocol"]
    error = None
    try:
        chain, _, tendon = pretension(chain, model, tension, scfg, rest_length=rest)
        if protocol == "bending":
            curve = bending_protocol(chain, tendon, depth_max=depth, config=scfg, drive=drive or cfg["drive"])
        else:
            curve = axial_protocol(chain, tendon, protocol, depth, scfg, cfg["column_stiffness_Npm"])
    except NonConvergence as exc:
        curve = exc.state if isinstance(exc.state, LoadCurve) else LoadCurve(converged=False)
        curve.converged = False
        error = str(exc)
    modulus = apparent_bending_modulus if protocol == "bending" else apparent_axial_modulus
    if depth == 0.0:
        # no load was applied: report empty branches rather than the lone origin
        curve.loading, curve.unloading = [], []
    m = analyse(curve, beam_length(cfg, spec, n), 2 * spec.outer_radius, window, modulus)
    m.update(
        tension_N=tension,
        protocol=protocol,
        drive=drive or cfg["drive"],
        converged=curve.converged,
        fit_window_mm=list(cfg["fit_window_mm"]),
        beam_length_mm=beam_length(cfg, spec, n) * 1e3,
    )
    if error:
        m["error"] = error
    return RunResult(curve, m, curve.converged, error)


def write_curve(path, curve: LoadCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for name, pts in curve.branches():
            for d, f in pts:
                w.writerow([name, fmt(d * 1e3), fmt(f)])


def read_curve(path) -> LoadCurve:
    curve = LoadCurve()
    with open(path, newline="") as fh:
        rows = csv.DictReader(fh)
        if rows.fieldnames != CURVE_HEADER:
            raise ConfigError(f"{path}: expected columns {','.join(CURVE_HEADER)}")
        for row in rows:
            pt = (float(row["displacement_mm"]) * 1e-3, float(row["force_N"]))
            if row["branch"] == "loading":
                curve.loading.append(pt)
            elif row["branch"] == "unloading":
                curve.unloading.append(pt)
            else:
                raise ConfigError(f"{path}: unknown branch {row['branch']!r}")
    return curve


def write_json(path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_events(path, curve: LoadCurve) -> None:
    with open(path, "w") as fh:
        for ev in curve.events:
            fh.write(ev.line() + "\n")


def _out(args, cfg, key) -> Path:
    return Path(args.out) / cfg["outputs"][key]


# -- subcommands --------------------------------------------------------------


def cmd_simulate(args, cfg) -> int:
    ts = tensions(cfg)
    if len(ts) != 1:
        raise ConfigError("simulate takes a single pretension_N value; use sweep for several")
    res = run_point(cfg, ts[0], args.drive)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    write_curve(_out(args, cfg, "curve_csv"), res.curve)
    write_json(_out(args, cfg, "metrics_json"), res.metrics)
    write_events(_out(args, cfg, "events_log"), res.curve)
    if not res.converged:
        log.error("%s", res.error or "no equilibrium")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def sweep_grid(cfg) -> list[dict]:
    sw = cfg["sweep"]
    b = cfg["bead"]
    axes = [
        sw["cone_angle_deg"] or [b["cone_angle_deg"]],
        sw["tension_N"] or tensions(cfg),
        sw["bead_length_mm"] or [None],
        sw["friction"] or [b["friction"]],
    ]
    return [
        {"cone_angle_deg": a, "tension_N": t, "bead_length_mm": w, "friction": mu}
        for a, t, w, mu in itertools.product(*axes)
    ]


def point_config(cfg, point) -> dict:
    c = copy.deepcopy(cfg)
    c["bead"]["cone_angle_deg"] = point["cone_angle_deg"]
    c["bead"]["friction"] = point["friction"]
    if point["bead_length_mm"] is not None:
        w = point["bead_length_mm"]
        c["bead"]["length_mm"] = w
        # free beads that fill the fixed total length
        c["n_beads"] = max(1, int(round(cfg["sweep"]["total_length_mm"] / w)))
    return c


def _sweep_row(args):
    cfg, point, drive = args
    c = point_config(cfg, point)
    row = dict(point)
    if row["bead_length_mm"] is None:
        row["bead_length_mm"] = c["bead"]["length_mm"]
    try:
        res = run_point(c, point["tension_N"], drive)
        m = res.metrics
        row.update(
            K_Npm=m["K_Npm"],
            E_apparent_MPa=m["E_apparent_MPa"],
            W_D_J=m["W_D_J"],
            W_E_J=m["W_E_J"],
            eta=m["eta"],
            converged=res.converged,
        )
    except Exception as exc:  # one bad point must not stop the sweep
        log.error("sweep point %s failed: %s", point, exc)
        row.update(K_Npm=None, E_apparent_MPa=None, W_D_J=None, W_E_J=None, eta=None, converged=False)
    return row


def run_sweep(cfg, jobs: int = 1, drive=None) -> list[dict]:
    tasks = [(cfg, p, drive) for p in sweep_grid(cfg)]
    if jobs <= 1:
        return [_sweep_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map keeps grid order whatever order the jobs finish in
        return list(pool.map(_sweep_row, tasks))


def sweep_summary(rows) -> list[dict]:
    """Tunabilities per (angle, bead length, friction) group across the tension axis."""
    groups = {}
    for r in rows:
        key = (r["cone_angle_deg"], r["bead_length_mm"], r["friction"])
        groups.setdefault(key, {})[r["tension_N"]] = r
    out = []
    for (a, w, mu), by_t in groups.items():
        ts = sorted(by_t)
        entry = {"cone_angle_deg": a, "bead_length_mm": w, "friction": mu, "delta_E": None, "delta_E_0N": None, "delta_eta": None}
        hi = ts[-1]
        lo_E = 10.0 if 10.0 in by_t else next((t for t in ts if t > 0), None)
        lo_eta = ts[0]
        entry.update(tension_high_N=hi, tension_ref_E_N=lo_E, tension_ref_eta_N=lo_eta)

        def ratio(f, x, y):
            try:
                return f(x, y)
            except (TypeError, ValueError):
                return None

        if lo_E is not None and lo_E != hi:
            entry["delta_E"] = ratio(tunability_modulus, by_t[hi]["E_apparent_MPa"], by_t[lo_E]["E_apparent_MPa"])
        if 0.0 in by_t and hi != 0.0:
            entry["delta_E_0N"] = ratio(tunability_modulus, by_t[hi]["E_apparent_MPa"], by_t[0.0]["E_apparent_MPa"])
        if lo_eta != hi:
            entry["delta_eta"] = ratio(tunability_loss, by_t[lo_eta]["eta"], by_t[hi]["eta"])
        out.append(entry)
    return out


def write_sweep(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in rows:
            w.writerow([fmt(r[k]) for k in SWEEP_HEADER])


def cmd_sweep(args, cfg) -> int:
    rows = run_sweep(cfg, args.jobs, args.drive)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    write_sweep(_out(args, cfg, "sweep_csv"), rows)
    write_json(_out(args, cfg, "summary_json"), sweep_summary(rows))
    return EXIT_OK


def route_rows(cfg, depth_mm: float = 0.0) -> list[list]:
    n = cfg["n_beads"]
    if n == 0:
        return []
    spec = bead_spec(cfg)
    chain = straight_chain(spec, n, gravity=cfg["gravity_mps2"])
    rest = cfg["string"]["rest_length_mm"] * 1e-3
    T = tensions(cfg)[0]
    if depth_mm > 0.0:
        chain, _, tendon = pretension(chain, tension_model(cfg), T, solver_config(cfg), rest_length=rest)
        ind = Indenter()
        y0 = ind.location(chain)[1]
        eq = equilibrate(chain, tendon, solver_config(cfg), target_y=y0 - depth_mm * 1e-3, indenter=ind)
        path = eq.path
    else:
        path = route_string(chain, T, rest_length=rest)
    return [
        [i, fmt(p[0] * 1e3), fmt(p[1] * 1e3), c.value, path.owner[i]] for i, (p, c) in enumerate(zip(path.nodes, path.contact))
    ]


def cmd_route_dump(args, cfg) -> int:
    rows = route_rows(cfg, args.depth_mm)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    with open(_out(args, cfg, "route_csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ROUTE_HEADER)
        w.writerows(rows)
    return EXIT_OK


def cmd_metrics(args, cfg) -> int:
    curve = read_curve(args.curve)
    spec = bead_spec(cfg)
    window = tuple(v * 1e-3 for v in cfg["fit_window_mm"])
    modulus = apparent_bending_modulus if cfg["protocol"] == "bending" else apparent_axial_modulus
    m = analyse(curve, beam_length(cfg, spec, cfg["n_beads"]), 2 * spec.outer_radius, window, modulus)
    m["fit_window_mm"] = list(cfg["fit_window_mm"])
    Path(args.out).mkdir(parents=True, exist_ok=True)
    write_json(_out(args, cfg, "metrics_json"), m)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccpj", description="Tendon-driven conical bead chain simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config (defaults are used for missing keys)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--drive", choices=("force", "displacement"), help="override the bending drive")

    sp = sub.add_parser("simulate", help="run one load cycle")
    common(sp)
    sp.set_defaults(func=cmd_simulate)
    sp = sub.add_parser("sweep", help="run a parameter grid")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_sweep)
    sp = sub.add_parser("route-dump", help="write string nodes and contact labels")
    common(sp)
    sp.add_argument("--depth-mm", type=float, default=0.0, help="bend the chain with the indenter first")
    sp.set_defaults(func=cmd_route_dump)
    sp = sub.add_parser("metrics", help="metrics of an existing curve CSV")
    common(sp)
    sp.add_argument("curve", help="curve CSV with columns branch,displacement_mm,force_N")
    sp.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("CCPJ_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
