"""Command-line front end: spectral fits, correlation sweeps, TPA pipelines.

Every run resolves its parameters from built-in defaults, an optional JSON
config file (keys mirror the flag names) and explicit flags, in that order,
and echoes the fully resolved configuration plus input digests into the
output header.  Identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .correlations import CorrelationTrace, g2_mode_sweep, g2_tau, g2_zero
from .interferogram import Interferogram, extract_g2, synthesize_tpa
from .mixing import MixedState, ScaledGaussianParams, g2_zero_mixed, gaussian_case_g2
from .oracle import OracleConfig, estimate_g2
from .spectrum import (
    central_frequency,
    fit_gaussian_mixture,
    load_spectrum,
    mode_comb_state,
    thz_to_rad_s,
    width_sussmann,
    width_two_sigma,
)
from .state import PragState, power_summary


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    config_data = {}
    config_path = getattr(args, "config", None)
    if config_path:
        config_data = json.loads(Path(config_path).read_text())
        unknown = set(config_data) - set(defaults)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for key, default in defaults.items():
        value = getattr(args, key, None)
        if value is None:
            value = config_data.get(key, default)
        resolved[key] = value
    return resolved

def _header(cfg: dict, inputs: dict[str, str]) -> list[str]:
    lines = [f"praglight {__version__}", "config: " + json.dumps(cfg, sort_keys=True)]
    for name, path in inputs.items():
        lines.append(f"input {name} sha256: {_sha256(path)}")
    return lines


def _write_csv(path, header_lines, columns, rows) -> None:
    out = sys.stdout if path is None else open(path, "w", newline="")
    try:
        for line in header_lines:
            out.write(f"# {line}\n")
        out.write(",".join(columns) + "\n")
        for row in rows:
            out.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")
    finally:
        if path is not None:
            out.close()


def _write_json(path, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _meta(cfg: dict, inputs: dict[str, str]) -> dict:
    return {
        "tool": f"praglight {__version__}",
        "config": cfg,
        "inputs": {name: _sha256(path) for name, path in inputs.items()},
    }


def _load_state(path: str) -> PragState:
    return PragState.from_dict(json.loads(Path(path).read_text()))


def _parse_list(text: str, kind=float) -> list:
    return [kind(part) for part in text.replace(";", ",").split(",") if part.strip()]


def _state_tau_scale(state: PragState) -> float:
    """A delay scale resolving the state's spectral structure."""
    p = state.p_s + state.p_t
    om = state.omegas
    mean = float((om * p).sum() / p.sum())
    var = float(((om - mean) ** 2 * p).sum() / p.sum())
    if var > 0:
        return 1.0 / math.sqrt(var)
    return 2.0 * math.pi / mean * 50.0


def cmd_fit(args) -> int:
    defaults = {"spectrum": None, "units": "thz", "n_components": 3, "out": None}
    cfg = _resolve(args, defaults)
    if not cfg["spectrum"]:
        raise ValueError("fit needs --spectrum")
    spec = load_spectrum(cfg["spectrum"], cfg["units"])
    result = fit_gaussian_mixture(spec, int(cfg["n_components"]))
    mix = result.mixture
    payload = {
        "meta": _meta(cfg, {"spectrum": cfg["spectrum"]}),
        **mix.to_dict(),
        "residual_rms": result.residual_rms,
        "converged": result.converged,
        "clamped": result.clamped,
        "central_rad_s": central_frequency(mix),
        "width_two_sigma_rad_s": width_two_sigma(mix),
        "width_sussmann_rad_s": width_sussmann(mix),
    }
    _write_json(cfg["out"], payload)
    return 0 if result.converged else 2


def cmd_widths(args) -> int:
    defaults = {"spectrum": None, "units": "thz", "out": None}
    cfg = _resolve(args, defaults)
    if not cfg["spectrum"]:
        raise ValueError("widths needs --spectrum")
    spec = load_spectrum(cfg["spectrum"], cfg["units"])
    payload = {
        "meta": _meta(cfg, {"spectrum": cfg["spectrum"]}),
        "central_rad_s": central_frequency(spec),
        "width_two_sigma_rad_s": width_two_sigma(spec),
        "width_sussmann_rad_s": width_sussmann(spec),
    }
    _write_json(cfg["out"], payload)
    return 0


def cmd_g2(args) -> int:
    defaults = {
        "spectrum": None,
        "units": "thz",
        "state": None,
        "fsr_thz": None,
        "cutoff_db": 13.0,
        "temperature_k": 0.0,
        "tau_max_fs": 300.0,
        "tau_points": 301,
        "out": None,
    }
    cfg = _resolve(args, defaults)
    inputs = {}
    if cfg["state"]:
        state = _load_state(cfg["state"])
        inputs["state"] = cfg["state"]
    elif cfg["spectrum"]:
        if cfg["fsr_thz"] is None:
            raise ValueError("g2 from a spectrum needs --fsr-thz")
        spec = load_spectrum(cfg["spectrum"], cfg["units"])
        state = mode_comb_state(
            spec,
            float(thz_to_rad_s(cfg["fsr_thz"])),
            float(cfg["cutoff_db"]),
            float(cfg["temperature_k"]),
        )
        inputs["spectrum"] = cfg["spectrum"]
    else:
        raise ValueError("g2 needs --spectrum or --state")
    tau = np.linspace(0.0, float(cfg["tau_max_fs"]) * 1e-15, int(cfg["tau_points"]))
    values = g2_tau(state, tau)
    stats = power_summary(state)
    header = _header(cfg, inputs) + [
        f"N: {state.n_modes}",
        f"relative_width: {stats.relative_width:.17g}",
        f"g2_zero: {g2_tau(state, 0.0):.17g}",
    ]
    _write_csv(cfg["out"], header, ["tau_s", "value"], list(zip(tau.tolist(), values.tolist())))
    return 0


def cmd_feedback_sweep(args) -> int:
    defaults = {"relative_width": None, "n_list": "1,2,3,5,10,30,100,1000", "out": None}
    cfg = _resolve(args, defaults)
    if cfg["relative_width"] is None:
        raise ValueError("feedback-sweep needs --relative-width")
    n_values = _parse_list(str(cfg["n_list"]), int)
    sweep = g2_mode_sweep(float(cfg["relative_width"]), n_values)
    _write_csv(cfg["out"], _header(cfg, {}), ["N", "g2_theory"], [(n, g) for n, g in sweep])
    return 0


def cmd_mix_sweep(args) -> int:
    defaults = {
        "state": None,
        "omega_k_thz": None,
        "zeta_list": "0,0.2,0.4,0.6,0.8,1",
        "oracle": False,
        "realizations": 100000,
        "seed": 0,
        "out": None,
    }
    cfg = _resolve(args, defaults)
    if not cfg["state"] or cfg["omega_k_thz"] is None:
        raise ValueError("mix-sweep needs --state and --omega-k-thz")
    base = _load_state(cfg["state"])
    omega_k = float(thz_to_rad_s(cfg["omega_k_thz"]))
    p_total = base.total_power
    rows = []
    columns = ["zeta", "g2_theory"] + (["g2_oracle", "stderr"] if cfg["oracle"] else [])
    for z in _parse_list(str(cfg["zeta_list"])):
        if not 0 <= z <= 1:
            raise ValueError("zeta values must lie in [0, 1]")
        # hold the combined power fixed while tuning the split, like attenuators
        if z < 1:
            scaled = base.scaled(1.0 - z)
        else:
            scaled = PragState(base.grid, np.zeros(base.n_modes), np.zeros(base.n_modes))
        mixed = MixedState(scaled, omega_k, z * p_total)
        row = [z, g2_zero_mixed(mixed)]
        if cfg["oracle"]:
            oc = OracleConfig(int(cfg["realizations"]), int(cfg["seed"]), np.array([0.0]))
            trace = estimate_g2(mixed, oc)
            row += [float(trace.value[0]), float(trace.stderr[0])]
        rows.append(tuple(row))
    _write_csv(cfg["out"], _header(cfg, {"state": cfg["state"]}), columns, rows)
    return 0


def cmd_gaussian_demo(args) -> int:
    defaults = {
        "epsilon": 1.5,
        "delta_omega_tilde": 1e-3,
        "omega_bar_tilde": 100.0,
        "delta_k_tilde": 4.0,
        "tau_max": 8.0,
        "points": 401,
        "out": None,
    }
    cfg = _resolve(args, defaults)
    params = ScaledGaussianParams(
        float(cfg["epsilon"]),
        float(cfg["delta_omega_tilde"]),
        float(cfg["omega_bar_tilde"]),
        float(cfg["delta_k_tilde"]),
    )
    tau = np.linspace(-float(cfg["tau_max"]), float(cfg["tau_max"]), int(cfg["points"]))
    values = gaussian_case_g2(params, tau)
    _write_csv(cfg["out"], _header(cfg, {}), ["tau_tilde", "value"], list(zip(tau.tolist(), values.tolist())))
    return 0


def cmd_oracle_check(args) -> int:
    defaults = {
        "state": None,
        "realizations": 100000,
        "seed": 0,
        "tau_points": 50,
        "laser_power": 0.0,
        "omega_k_thz": None,
        "out": None,
    }
    cfg = _resolve(args, defaults)
    if not cfg["state"]:
        raise ValueError("oracle-check needs --state")
    base = _load_state(cfg["state"])
    tau_max = 6.0 * _state_tau_scale(base)
    tau = np.linspace(0.0, tau_max, int(cfg["tau_points"]))
    laser_power = float(cfg["laser_power"])
    if laser_power > 0:
        if cfg["omega_k_thz"] is None:
            raise ValueError("a laser line needs --omega-k-thz")
        state = MixedState(base, float(thz_to_rad_s(cfg["omega_k_thz"])), laser_power)
        from .mixing import g2_tau_mixed

        analytic = g2_tau_mixed(state, tau)
    else:
        state = base
        analytic = g2_tau(base, tau)
    oc = OracleConfig(int(cfg["realizations"]), int(cfg["seed"]), tau)
    trace = estimate_g2(state, oc)
    deviation = np.abs(trace.value - analytic)
    ratio = deviation / np.maximum(trace.stderr, 1e-300)
    worst = int(np.argmax(ratio))
    payload = {
        "meta": _meta(cfg, {"state": cfg["state"]}),
        "max_deviation_over_stderr": float(ratio[worst]),
        "worst_tau_s": float(tau[worst]),
        "within_3_stderr": bool(ratio[worst] <= 3.0),
        "n_realizations": int(cfg["realizations"]),
        "seed": int(cfg["seed"]),
    }
    _write_json(cfg["out"], payload)
    return 0


def cmd_tpa_synthesize(args) -> int:
    defaults = {
        "state": None,
        "laser_power": 0.0,
        "omega_k_thz": None,
        "tau_max_fs": 300.0,
        "dt_fs": 0.5,
        "realizations": 20000,
        "seed": 0,
        "out": None,
    }
    cfg = _resolve(args, defaults)
    if not cfg["state"]:
        raise ValueError("tpa synthesize needs --state")
    base = _load_state(cfg["state"])
    state = base
    if float(cfg["laser_power"]) > 0:
        if cfg["omega_k_thz"] is None:
            raise ValueError("a laser line needs --omega-k-thz")
        state = MixedState(base, float(thz_to_rad_s(cfg["omega_k_thz"])), float(cfg["laser_power"]))
    half = float(cfg["tau_max_fs"]) * 1e-15
    dt = float(cfg["dt_fs"]) * 1e-15
    n_half = int(round(half / dt))
    tau = dt * np.arange(-n_half, n_half + 1)
    oc = OracleConfig(int(cfg["realizations"]), int(cfg["seed"]))
    igram = synthesize_tpa(state, tau, oc)
    out = cfg["out"]
    header = _header(cfg, {"state": cfg["state"]})
    if out is None:
        igram.to_csv(sys.stdout, header)
    else:
        igram.to_csv(out, header)
    return 0


def cmd_tpa_extract(args) -> int:
    defaults = {"igram": None, "omega_bar_thz": None, "out": None}
    cfg = _resolve(args, defaults)
    if not cfg["igram"] or cfg["omega_bar_thz"] is None:
        raise ValueError("tpa extract needs --igram and --omega-bar-thz")
    igram = Interferogram.from_csv(cfg["igram"])
    trace = extract_g2(igram, float(thz_to_rad_s(cfg["omega_bar_thz"])))
    header = _header(cfg, {"igram": cfg["igram"]})
    out = cfg["out"]
    if out is None:
        trace.to_csv(sys.stdout, header)
    else:
        trace.to_csv(out, header)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with defaults for this subcommand")
    parser.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="praglight",
        description="Photon statistics of broadband multi-mode light",
    )
    parser.add_argument("--version", action="version", version=f"praglight {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="Gaussian-mixture fit of a spectrum, with widths")
    p.add_argument("--spectrum")
    p.add_argument("--units", choices=["nm", "THz", "thz", "rad_s"])
    p.add_argument("--n-components", type=int, dest="n_components")
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("widths", help="central frequency and widths of a sampled spectrum")
    p.add_argument("--spectrum")
    p.add_argument("--units", choices=["nm", "THz", "thz", "rad_s"])
    _add_common(p)
    p.set_defaults(func=cmd_widths)

    p = sub.add_parser("g2", help="intensity correlation trace of a mode-comb state")
    p.add_argument("--spectrum")
    p.add_argument("--units", choices=["nm", "THz", "thz", "rad_s"])
    p.add_argument("--state")
    p.add_argument("--fsr-thz", type=float, dest="fsr_thz")
    p.add_argument("--cutoff-db", type=float, dest="cutoff_db")
    p.add_argument("--temperature-k", type=float, dest="temperature_k")
    p.add_argument("--tau-max-fs", type=float, dest="tau_max_fs")
    p.add_argument("--tau-points", type=int, dest="tau_points")
    _add_common(p)
    p.set_defaults(func=cmd_g2)

    p = sub.add_parser("feedback-sweep", help="g2(0) versus mode number at fixed relative width")
    p.add_argument("--relative-width", type=float, dest="relative_width")
    p.add_argument("--n-list", dest="n_list")
    _add_common(p)
    p.set_defaults(func=cmd_feedback_sweep)

    p = sub.add_parser("mix-sweep", help="g2(0) versus laser power fraction zeta")
    p.add_argument("--state")
    p.add_argument("--omega-k-thz", type=float, dest="omega_k_thz")
    p.add_argument("--zeta-list", dest="zeta_list")
    p.add_argument("--oracle", action="store_true", default=None)
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_mix_sweep)

    p = sub.add_parser("gaussian-demo", help="analytic scaled g2 for a Gaussian comb plus laser")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta-omega-tilde", type=float, dest="delta_omega_tilde")
    p.add_argument("--omega-bar-tilde", type=float, dest="omega_bar_tilde")
    p.add_argument("--delta-k-tilde", type=float, dest="delta_k_tilde")
    p.add_argument("--tau-max", type=float, dest="tau_max")
    p.add_argument("--points", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_gaussian_demo)

    p = sub.add_parser("oracle-check", help="Monte-Carlo versus analytic g2 report")
    p.add_argument("--state")
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tau-points", type=int, dest="tau_points")
    p.add_argument("--laser-power", type=float, dest="laser_power")
    p.add_argument("--omega-k-thz", type=float, dest="omega_k_thz")
    _add_common(p)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("tpa", help="TPA interferogram pipelines")
    tpa_sub = p.add_subparsers(dest="tpa_command", required=True)

    q = tpa_sub.add_parser("synthesize", help="ensemble-averaged TPA interferogram of a state")
    q.add_argument("--state")
    q.add_argument("--laser-power", type=float, dest="laser_power")
    q.add_argument("--omega-k-thz", type=float, dest="omega_k_thz")
    q.add_argument("--tau-max-fs", type=float, dest="tau_max_fs")
    q.add_argument("--dt-fs", type=float, dest="dt_fs")
    q.add_argument("--realizations", type=int)
    q.add_argument("--seed", type=int)
    _add_common(q)
    q.set_defaults(func=cmd_tpa_synthesize)

    q = tpa_sub.add_parser("extract", help="recover g2 from a TPA interferogram")
    q.add_argument("--igram")
    q.add_argument("--omega-bar-thz", type=float, dest="omega_bar_thz")
    _add_common(q)
    q.set_defaults(func=cmd_tpa_extract)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
