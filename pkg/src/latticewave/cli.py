"""Command-line front end.

Subcommands::

    latticewave simulate   --config F --out D
    latticewave sommerfeld --sigma S
    latticewave tw-fields  --config F
    latticewave ptwave     --config F
    latticewave causality  --cph C --meanv V
    latticewave riemann    --config F --out D

Config files are JSON documents ``{"command": <name>, <name>: {...}}`` checked
against a schema before anything runs.  Reports go to stdout (and to
``D/report.json`` when ``--out`` is given).  Exit status is 1 for invalid input
and 2 for numerical faults.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from latticewave.chain_core import BiQuadratic, ChainState, Forcing, Harmonic, discrete_energy
from latticewave.integrator import IntegrationError, SimConfig, simulate
from latticewave.ptwave import causality_wave, close_family, evaluate_criteria
from latticewave.riemann import NotApplicable, RiemannConfig, compare_to_causality, decompose, run_riemann
from latticewave.spectral import solve_kappa_tw, sommerfeld_fields, sommerfeld_solution
from latticewave.thermo import ScalingConfig, average_trajectory
from latticewave.twave import Mode, TravellingWaveSpec, tw_mean_fields

log = logging.getLogger("latticewave")

COMMANDS = ("simulate", "sommerfeld", "tw-fields", "ptwave", "causality", "riemann")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_SCALING = _obj({"w": {"type": "integer", "minimum": 10}, "cell_sites": {"type": "integer", "minimum": 1}})

_RIEMANN_RUN = _obj(
    {
        "r_minus": _NUM, "r_plus": _NUM, "v_minus": _NUM, "v_plus": _NUM,
        "N": {"type": "integer", "minimum": 500},
        "t_fin_bar": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
        "dt": _POS,
        "n_slices": {"type": "integer", "minimum": 8},
        "scaling": _SCALING,
        "tolerance": _POS,
    },
    required=("r_minus", "r_plus", "v_minus", "v_plus"),
)

PARAM_SCHEMAS = {
    "simulate": _obj(
        {
            "potential": _obj(
                {
                    "kind": {"enum": ["harmonic", "biquadratic"]},
                    "c0": _POS, "d1": _NUM, "d0": _NUM,
                },
                required=("kind",),
            ),
            "N": {"type": "integer", "minimum": 20},
            "initial": {
                "oneOf": [
                    _obj({"kind": {"const": "uniform"}, "r0": _NUM, "v0": _NUM}, required=("kind",)),
                    _obj(
                        {"kind": {"const": "riemann"}, "r_minus": _NUM, "r_plus": _NUM,
                         "v_minus": _NUM, "v_plus": _NUM},
                        required=("kind", "r_minus", "r_plus", "v_minus", "v_plus"),
                    ),
                ]
            },
            "forcing": {
                "oneOf": [
                    {"type": "null"},
                    _obj({"amplitude": _NUM, "sigma": _POS, "phase": _NUM}, required=("sigma",)),
                ]
            },
            "dt": _POS,
            "t_end": {"type": "number", "minimum": 0},
            "snapshot_stride": {"type": "integer", "minimum": 1},
            "scaling": _SCALING,
        },
        required=("potential", "N", "initial", "t_end"),
    ),
    "sommerfeld": _obj({"sigma": _POS}, required=("sigma",)),
    "tw-fields": _obj(
        {
            "c_ph": _NUM,
            "modes": {
                "type": "array",
                "items": {
                    "oneOf": [
                        _obj({"kappa": _POS, "A": {"type": "number", "minimum": 0}, "eta": _NUM},
                             required=("kappa", "A")),
                        _obj({"root": {"type": "integer", "minimum": 0},
                              "A": {"type": "number", "minimum": 0}, "eta": _NUM},
                             required=("root", "A")),
                    ]
                },
            },
            "R": _NUM, "V": _NUM, "c0": _POS, "d1": _NUM, "d0": _NUM,
        },
        required=("c_ph", "modes"),
    ),
    "ptwave": _obj(
        {"c_ph": _NUM, "A_minus": {"type": "number", "minimum": 0},
         "A_plus": {"type": "number", "minimum": 0}, "mean_V": _NUM},
        required=("c_ph", "A_minus", "A_plus"),
    ),
    "causality": _obj({"c_ph": _NUM, "mean_V": _NUM}, required=("c_ph",)),
    "riemann": {
        "oneOf": [
            _RIEMANN_RUN,
            _obj({"runs": {"type": "array", "items": _RIEMANN_RUN, "minItems": 1}}, required=("runs",)),
        ]
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {"command": {"enum": list(COMMANDS)}, **{c: PARAM_SCHEMAS[c] for c in COMMANDS}},
    "required": ["command"],
    "additionalProperties": False,
}

# --- report schemas -----------------------------------------------------------

_NUMS = lambda *names: {n: _NUM for n in names}
_STATE = _obj(
    {
        **_NUMS("c_ph", "kappa", "c_gr", "R_minus", "R_plus", "V_minus", "V_plus", "A_minus", "A_plus",
                "jump_R", "jump_V", "mean_R", "mean_V", "E_osc_minus", "E_osc_plus", "jump_E_osc",
                "Q_minus", "Q_plus", "Xi", "Upsilon"),
        "direction": {"enum": ["left", "right"]},
        "sign_ok": {"type": "boolean"},
    },
    required=("c_ph", "kappa", "c_gr", "R_minus", "R_plus", "V_minus", "V_plus", "A_minus", "A_plus", "Xi"),
)
_CRITERIA = _obj(
    {
        "som1": {"type": "boolean"}, "som2": {"type": "boolean"}, "entropy": {"type": "boolean"},
        "causality_consistent": {"type": "boolean"}, "wave_type": {"enum": ["I", "II"]},
        "relative_flux_away": {"type": "boolean"},
    },
    required=("som1", "som2", "entropy", "causality_consistent", "wave_type", "relative_flux_away"),
)
_BRANCH = _obj({**_NUMS("kappa", "A", "E_osc", "Q_minus_inf", "Q_plus_inf", "theta"),
                "som1": {"type": "boolean"}, "som2": {"type": "boolean"}},
               required=("kappa", "A", "E_osc", "Q_minus_inf", "Q_plus_inf", "theta"))
_FIELDS = _obj(_NUMS("R", "V", "P", "E", "F", "U", "Q", "E_osc", "E_non", "Xi"),
               required=("R", "V", "P", "E", "F", "U", "Q", "E_osc", "E_non"))
_DECOMP = _obj(
    {
        "tau": _NUM, "degenerate": {"type": "boolean"},
        "states": {"type": "array", "items": _obj(_NUMS("xi_lo", "xi_hi", "R", "V", "E_osc", "Q"))},
        "waves": {"type": "array", "items": _obj({
            "kind": {"enum": ["contact", "oscillation-front", "phase-transition", "mixed"]},
            **_NUMS("xi", "speed"), "left": {"type": "integer"}, "right": {"type": "integer"}})},
    },
    required=("tau", "states", "waves"),
)
_COMPARISON = _obj(
    {
        **_NUMS("c_ph", "c_gr", "kappa", "Xi_measured", "Q_oscillatory_plateau", "tolerance", "jump_tolerance"),
        "wave_type": {"enum": ["I", "II"]},
        "measured": _STATE, "predicted": _STATE,
        "deviations": {"type": "object", "additionalProperties": _NUM},
        "jump_deviations": {"type": "object", "additionalProperties": _NUM},
        "Q_sign_matches_c_gr": {"type": "boolean"},
        "ahead_quiet": {"type": "boolean"},
        "criteria": _CRITERIA,
        "causality_pass": {"type": "boolean"},
        "jumps_pass": {"type": "boolean"},
    },
    required=("c_ph", "wave_type", "deviations", "jump_deviations", "criteria", "causality_pass", "jumps_pass"),
)
_RIEMANN_REPORT = _obj(
    {
        "config": {"type": "object"},
        "fields_csv": {"type": "string"},
        "decomposition": _DECOMP,
        "c_ph": {"type": ["number", "null"]},
        "wave_type": {"enum": ["I", "II", None]},
        "criteria": {"oneOf": [_CRITERIA, {"type": "null"}]},
        "comparison": {"oneOf": [_COMPARISON, {"type": "null"}]},
        "note": {"type": "string"},
    },
    required=("config", "decomposition", "c_ph", "comparison"),
)

REPORT_SCHEMAS = {
    "simulate": _obj(
        {
            "N": {"type": "integer"}, "steps": {"type": "integer"}, "snapshots": {"type": "integer"},
            **_NUMS("t_end", "dt", "energy_initial", "energy_final"),
            "trajectory_csv": {"type": "string"}, "fields_csv": {"type": "string"},
        },
        required=("N", "steps", "snapshots", "t_end", "dt", "trajectory_csv", "fields_csv"),
    ),
    "sommerfeld": _obj({"sigma": _NUM, "source": _BRANCH, "sink": _BRANCH}, required=("sigma", "source", "sink")),
    "tw-fields": _obj({"c_ph": _NUM, "modes": {"type": "array"}, "fields": _FIELDS}, required=("c_ph", "fields")),
    "ptwave": _obj({"state": _STATE, "criteria": _CRITERIA}, required=("state", "criteria")),
    "causality": _obj({"state": _STATE, "criteria": _CRITERIA}, required=("state", "criteria")),
    "riemann": {
        "oneOf": [
            _RIEMANN_REPORT,
            _obj({"runs": {"type": "array", "items": _RIEMANN_REPORT}}, required=("runs",)),
        ]
    },
}


class ConfigError(ValueError):
    pass


def round_floats(obj, digits: int = 9):
    """Recursively round floats to ``digits`` significant digits."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ArithmeticError(f"non-finite value {x} in report")
        return float(f"{x:.{digits}g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj


def load_config(path, command: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    if doc["command"] != command:
        raise ConfigError(f"config is for {doc['command']!r}, not {command!r}")
    if command not in doc:
        raise ConfigError(f"config lacks the {command!r} parameter object")
    return doc[command]


def validate_report(command: str, report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMAS[command])


# --- commands -----------------------------------------------------------------


def _scaling(N: int, params: dict | None):
    params = params or {}
    return ScalingConfig.for_chain(N, params.get("w"), params.get("cell_sites"))


def cmd_simulate(params: dict, out: Path) -> dict:
    pot = params["potential"]
    if pot["kind"] == "harmonic":
        p = Harmonic(pot.get("c0", 1.0), pot.get("d1", 0.0), pot.get("d0", 0.0))
    else:
        if set(pot) - {"kind"}:
            raise ConfigError("the bi-quadratic potential takes no parameters")
        p = BiQuadratic()
    N = params["N"]
    if N % 2:
        raise ConfigError("N must be even")
    half = N // 2
    ini = params["initial"]
    if ini["kind"] == "uniform":
        state = ChainState.uniform(-half, half, ini.get("r0", 0.0), ini.get("v0", 0.0))
    else:
        state = _riemann_state(half, ini)
    f = params.get("forcing")
    forcing = None if f is None else Forcing.cosine(f.get("amplitude", 1.0), f["sigma"], f.get("phase", 0.0))
    cfg = SimConfig(p, state, forcing, params.get("dt", 0.05), params["t_end"], params.get("snapshot_stride", 1))
    traj = simulate(cfg)
    fields = average_trajectory(traj, p, _scaling(N, params.get("scaling")))

    out.mkdir(parents=True, exist_ok=True)
    traj_csv, fields_csv = out / "trajectory.csv", out / "fields.csv"
    with open(traj_csv, "w") as fh:
        # r_j belongs to the bond (j, j+1); the last site has none
        fh.write("t,j,r,v\n")
        for s in traj.snapshots:
            r = np.append(s.r, np.nan)
            for j, rj, vj in zip(s.sites, r, s.v):
                fh.write(f"{s.t:.9g},{j},{rj:.9g},{vj:.9g}\n")
    fields.to_csv(fields_csv)
    return {
        "N": N, "steps": cfg.n_steps, "snapshots": len(traj), "t_end": cfg.t_end, "dt": cfg.dt,
        "energy_initial": discrete_energy(traj[0], p), "energy_final": discrete_energy(traj[-1], p),
        "trajectory_csv": str(traj_csv), "fields_csv": str(fields_csv),
    }


def _riemann_state(half, ini):
    j = np.arange(-half, half + 1)
    v = np.where(j < 0, ini["v_minus"], ini["v_plus"])
    r = np.where(j[:-1] < 0, ini["r_minus"], ini["r_plus"])
    return ChainState(0.0, -half, r, v)


def cmd_sommerfeld(params: dict) -> dict:
    rep = {"sigma": params["sigma"]}
    for branch in ("source", "sink"):
        sol = sommerfeld_solution(params["sigma"], branch)
        flds = sommerfeld_fields(sol)
        rep[branch] = {
            "kappa": sol.kappa, "A": sol.A, "E_osc": flds.E_osc,
            "Q_minus_inf": flds.Q_minus_inf, "Q_plus_inf": flds.Q_plus_inf, "theta": flds.theta,
            "som1": flds.som1, "som2": flds.som2,
        }
    return rep


def cmd_tw_fields(params: dict) -> dict:
    c = params["c_ph"]
    p = Harmonic(params.get("c0", 1.0), params.get("d1", 0.0), params.get("d0", 0.0))
    roots = None
    modes = []
    for m in params["modes"]:
        if "root" in m:
            roots = roots if roots is not None else solve_kappa_tw(c, p.c0)
            if m["root"] >= len(roots):
                raise ConfigError(f"c_ph={c} has only {len(roots)} wave numbers")
            kappa = roots[m["root"]].kappa
        else:
            kappa = m["kappa"]
        modes.append(Mode(kappa, m["A"], m.get("eta", 0.0)))
    spec = TravellingWaveSpec(c, tuple(modes), params.get("R", 0.0), params.get("V", 0.0), p)
    return {
        "c_ph": c,
        "modes": [{"kappa": m.kappa, "A": m.A, "eta": m.eta} for m in spec.modes],
        "fields": tw_mean_fields(spec).as_dict(),
    }


def _state_report(state) -> dict:
    return {"state": state.to_dict(), "criteria": evaluate_criteria(state).to_dict()}


def cmd_ptwave(params: dict) -> dict:
    return _state_report(close_family(params["c_ph"], params["A_minus"], params["A_plus"], params.get("mean_V", 0.0)))


def cmd_causality(params: dict) -> dict:
    return _state_report(causality_wave(params["c_ph"], params.get("mean_V", 0.0)))


def _riemann_one(run: dict, csv_path: str | None) -> dict:
    N = run.get("N", 4000)
    cfg = RiemannConfig(
        run["r_minus"], run["r_plus"], run["v_minus"], run["v_plus"], N=N,
        t_fin_bar=run.get("t_fin_bar", 0.4), dt=run.get("dt", 0.05), n_slices=run.get("n_slices", 10),
        scaling=_scaling(N, run.get("scaling")),
    )
    _, fields = run_riemann(cfg)
    dec = decompose(fields)
    rep = {"config": run, "decomposition": dec.to_dict(), "c_ph": None, "wave_type": None,
           "criteria": None, "comparison": None}
    if csv_path:
        fields.to_csv(csv_path)
        rep["fields_csv"] = csv_path
    try:
        cmp = compare_to_causality(dec, fields, tol=run.get("tolerance", 0.10))
    except NotApplicable as exc:
        rep["note"] = str(exc)
        return rep
    rep.update(c_ph=cmp["c_ph"], wave_type=cmp["wave_type"], criteria=cmp["criteria"], comparison=cmp)
    return rep


def _threads() -> int:
    raw = os.environ.get("LATTICEWAVE_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"LATTICEWAVE_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise ConfigError("LATTICEWAVE_THREADS must be a positive integer")
    return n


def cmd_riemann(params: dict, out: Path | None) -> dict:
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    if "runs" not in params:
        return _riemann_one(params, str(out / "fields.csv") if out else None)
    runs = params["runs"]
    paths = [str(out / f"fields_{i:03d}.csv") if out else None for i in range(len(runs))]
    workers = min(_threads(), len(runs))
    if workers == 1:
        reports = [_riemann_one(r, pth) for r, pth in zip(runs, paths)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(_riemann_one, runs, paths))
    return {"runs": reports}


# --- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="latticewave", description="Lattice wave thermodynamics toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", help="integrate a chain and write trajectory and fields CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s = sub.add_parser("sommerfeld", help="closed-form forced-chain fields for both branches")
    s.add_argument("--sigma", type=float, required=True)
    s = sub.add_parser("tw-fields", help="closed-form travelling-wave mean fields")
    s.add_argument("--config", required=True)
    s = sub.add_parser("ptwave", help="phase-transition wave from (c_ph, A_minus, A_plus)")
    s.add_argument("--config", required=True)
    s = sub.add_parser("causality", help="causality wave at a given speed")
    s.add_argument("--cph", type=float, required=True)
    s.add_argument("--meanv", type=float, default=0.0)
    s = sub.add_parser("riemann", help="Riemann problem run, decomposition and causality comparison")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None)
    return ap


def run_command(args: argparse.Namespace) -> dict:
    cmd = args.command
    if cmd == "simulate":
        rep = cmd_simulate(load_config(args.config, cmd), Path(args.out))
    elif cmd == "sommerfeld":
        params = {"sigma": args.sigma}
        jsonschema.validate(params, PARAM_SCHEMAS[cmd])
        rep = cmd_sommerfeld(params)
    elif cmd == "tw-fields":
        rep = cmd_tw_fields(load_config(args.config, cmd))
    elif cmd == "ptwave":
        rep = cmd_ptwave(load_config(args.config, cmd))
    elif cmd == "causality":
        params = {"c_ph": args.cph, "mean_V": args.meanv}
        jsonschema.validate(params, PARAM_SCHEMAS[cmd])
        rep = cmd_causality(params)
    else:
        rep = cmd_riemann(load_config(args.config, cmd), Path(args.out) if args.out else None)
    rep = round_floats(rep)
    validate_report(cmd, rep)
    out = getattr(args, "out", None)
    if out:
        with open(Path(out) / "report.json", "w") as fh:
            json.dump(rep, fh, indent=2)
    return rep


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        rep = run_command(args)
    except ZeroDivisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, jsonschema.ValidationError, OSError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return 1
    json.dump(rep, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
