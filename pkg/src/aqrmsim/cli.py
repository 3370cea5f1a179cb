"""Command-line front end: single-point queries, crossing searches, sweeps,
and self-check oracles.

All numeric flags are dimensionless ratios to the cavity frequency.
Precedence: explicit flags > config-file values > built-in defaults.
Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .dme import BathParams, build_generator, steady_state, transition_rates
from .errors import AqrmError
from .model import ModelParams
from .spectrum import SolverSettings, converge_truncation, find_crossings
from .sweep import (
    COLUMNS,
    Axis,
    SweepConfig,
    crossings_sidecar,
    emit,
    emit_crossings,
    evaluate_point,
    fig1_preset,
    fig2_preset,
    run_sweep,
    _format_value,
)

DEFAULTS = {
    "delta": 1.0,
    "g": 0.5,
    "r": 0.0,
    "alpha_q": 1e-4,
    "alpha_c": 1e-4,
    "omega_c": 10.0,
    "temp_q": 0.07,
    "temp_c": 0.07,
    "levels": 20,
    "tol_e": 1e-10,
    "nmax_cap": 400,
    "out": None,
    "format": "csv",
    "preset": None,
    "workers": None,
}

_FLOAT_KEYS = {"delta", "g", "r", "alpha_q", "alpha_c", "omega_c", "temp_q", "temp_c", "tol_e"}
_INT_KEYS = {"levels", "nmax_cap", "workers"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common_flags(sp):
    sp.add_argument("--delta", type=float, help="qubit splitting / w0")
    sp.add_argument("--g", help="coupling / w0 (crossings: range lo..hi)")
    sp.add_argument("--r", type=float, help="anisotropy")
    sp.add_argument("--alpha-q", dest="alpha_q", type=float, help="qubit bath coupling")
    sp.add_argument("--alpha-c", dest="alpha_c", type=float, help="cavity bath coupling")
    sp.add_argument("--omega-c", dest="omega_c", type=float, help="Ohmic cutoff / w0")
    sp.add_argument("--temp-q", dest="temp_q", type=float, help="qubit bath kT / w0")
    sp.add_argument("--temp-c", dest="temp_c", type=float, help="cavity bath kT / w0")
    sp.add_argument("--levels", type=int, help="retained dressed levels K")
    sp.add_argument("--tol-e", dest="tol_e", type=float, help="truncation energy tolerance")
    sp.add_argument("--nmax-cap", dest="nmax_cap", type=int, help="Fock truncation cap")
    sp.add_argument("--out", help="output file path")
    sp.add_argument("--format", choices=["csv", "jsonl"], help="table format")
    sp.add_argument("--preset", choices=["fig1", "fig2"], help="sweep preset")
    sp.add_argument("--workers", type=int, help="sweep worker threads")
    sp.add_argument("--config", help="key=value config file merged under flags")


def build_parser() -> _Parser:
    parser = _Parser(prog="aqrmsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("spectrum", "print the K lowest dressed energies and parities"),
        ("rates", "print the nonzero dressed transition rates"),
        ("g2", "print the photon statistics row at one point"),
        ("crossings", "locate ground-state level crossings over a g range"),
        ("sweep", "run a grid sweep and write the table"),
        ("selfcheck", "run the Gibbs, JCM, and selection-rule oracles"),
    ]:
        sp = sub.add_parser(name, help=doc)
        _add_common_flags(sp)
        if name == "sweep":
            sp.add_argument("--g-axis", help="lo:hi:count")
            sp.add_argument("--r-axis", help="lo:hi:count")
            sp.add_argument("--t-axis", help="lo:hi:count")
            sp.add_argument("--crossings-sidecar", action="store_true",
                            help="also write the g_c(r) overlay table")
    return parser


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, raw = line.partition("=")
                key = key.strip().replace("-", "_")
                raw = raw.strip()
                if key not in DEFAULTS:
                    raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
                if key in _FLOAT_KEYS:
                    values[key] = float(raw)
                elif key in _INT_KEYS:
                    values[key] = int(raw)
                else:
                    values[key] = raw
        return values
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc


def _merge(args) -> dict:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(_read_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _model(cfg, g=None) -> ModelParams:
    g_val = cfg["g"] if g is None else g
    try:
        g_val = float(g_val)
    except (TypeError, ValueError):
        raise UsageError(f"--g expects a number, got {cfg['g']!r}")
    return ModelParams(delta=cfg["delta"], g=g_val, r=cfg["r"])


def _bath(cfg) -> BathParams:
    return BathParams(
        alpha_q=cfg["alpha_q"], alpha_c=cfg["alpha_c"], omega_cutoff=cfg["omega_c"],
        T_q=cfg["temp_q"], T_c=cfg["temp_c"],
    )


def _settings(cfg) -> SolverSettings:
    return SolverSettings(k_levels=cfg["levels"], tol_e=cfg["tol_e"], n_max_cap=cfg["nmax_cap"])


def _resolve_out(cfg, default_name: str) -> str:
    out = cfg["out"]
    if out is None:
        out = os.path.join(os.environ.get("AQRMSIM_OUT_DIR", "."), default_name)
    return out


def _parse_axis(spec: str, name: str) -> Axis:
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"--{name.lower()}-axis expects lo:hi:count, got {spec!r}")
    try:
        return Axis(name, float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad --{name.lower()}-axis {spec!r}: {exc}") from exc


def _cmd_spectrum(cfg, args) -> int:
    eig = converge_truncation(_model(cfg), cfg["levels"], cfg["tol_e"], _settings(cfg))
    print(f"# n_max_used={eig.n_max_used}")
    print("level,energy,parity")
    for i in range(eig.k_levels):
        print(f"{i},{eig.energies[i]:.17g},{int(eig.parities[i]):+d}")
    return 0


def _cmd_rates(cfg, args) -> int:
    model = _model(cfg)
    eig = converge_truncation(model, cfg["levels"], cfg["tol_e"], _settings(cfg))
    rates = transition_rates(eig, model, _bath(cfg))
    print("j,k,gap,gamma_q,gamma_c")
    k = eig.k_levels
    for j in range(k):
        for m in range(j + 1, k):
            if rates.gamma_q[j, m] == 0.0 and rates.gamma_c[j, m] == 0.0:
                continue
            print(
                f"{j},{m},{rates.gaps[j, m]:.17g},"
                f"{rates.gamma_q[j, m]:.17g},{rates.gamma_c[j, m]:.17g}"
            )
    return 0


def _cmd_g2(cfg, args) -> int:
    row = evaluate_point(_model(cfg), _bath(cfg), _settings(cfg))
    print(",".join(COLUMNS))
    print(",".join(_format_value(getattr(row, c)) for c in COLUMNS))
    return 0


def _cmd_crossings(cfg, args) -> int:
    raw = cfg["g"]
    if not isinstance(raw, str) or ".." not in raw:
        raise UsageError("crossings needs --g LO..HI (e.g. --g 0..3)")
    lo_s, _, hi_s = raw.partition("..")
    try:
        g_lo, g_hi = float(lo_s), float(hi_s)
    except ValueError:
        raise UsageError(f"bad --g range {raw!r}")
    base = ModelParams(delta=cfg["delta"], g=max(g_lo, 0.0), r=cfg["r"])
    found = find_crossings(base, (g_lo, g_hi), settings=_settings(cfg))
    print("n,g_c,parity_before,parity_after")
    for c in found:
        print(f"{c.index},{c.g_c:.17g},{c.parity_before:+d},{c.parity_after:+d}")
    return 0


def _cmd_sweep(cfg, args) -> int:
    axes = []
    for flag, name in (("g_axis", "g"), ("r_axis", "r"), ("t_axis", "T")):
        spec = getattr(args, flag, None)
        if spec:
            axes.append(_parse_axis(spec, name))
    if cfg["preset"] == "fig1":
        config = fig1_preset(bath=_bath(cfg), delta=cfg["delta"], settings=_settings(cfg))
    elif cfg["preset"] == "fig2":
        config = fig2_preset(bath=_bath(cfg), delta=cfg["delta"], settings=_settings(cfg))
    elif axes:
        config = SweepConfig(
            delta=cfg["delta"], g=float(cfg["g"]), r=cfg["r"], bath=_bath(cfg),
            axes=tuple(axes), settings=_settings(cfg),
        )
    else:
        raise UsageError("sweep needs --preset or at least one --*-axis flag")
    if axes and cfg["preset"]:
        config = replace(config, axes=tuple(axes))
    out = _resolve_out(cfg, config.out_path)
    config = replace(config, out_path=out, fmt=cfg["format"], workers=cfg["workers"])
    rows = run_sweep(config)
    emit(rows, config.out_path, config.fmt)
    print(f"wrote {len(rows)} rows to {config.out_path}")
    if getattr(args, "crossings_sidecar", False):
        side = os.path.splitext(config.out_path)[0] + "_crossings.csv"
        emit_crossings(crossings_sidecar(config), side)
        print(f"wrote crossing overlay to {side}")
    return 0


def _cmd_selfcheck(cfg, args) -> int:
    failures = 0

    def report(name, ok, detail=""):
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}" + (f" ({detail})" if detail else ""))
        if not ok:
            failures += 1

    # Gibbs: equal-temperature baths must thermalize the dressed levels.
    model = ModelParams(delta=1.0, g=0.9, r=0.4)
    bath = BathParams(T_q=0.1, T_c=0.1)
    settings = SolverSettings()
    eig = converge_truncation(model, settings.k_levels, settings.tol_e, settings)
    pops = steady_state(build_generator(transition_rates(eig, model, bath), bath, model))
    boltz = np.exp(-(eig.energies - eig.energies[0]) / bath.T_q)
    boltz /= boltz.sum()
    err = float(np.max(np.abs(pops - boltz)))
    report("gibbs_steady_state", err < 1e-10, f"max abs err {err:.2e}")

    # JCM: r = 0 dressed energies against the closed form at resonance.
    jcm = ModelParams(delta=1.0, g=0.3, r=0.0)
    eig_jcm = converge_truncation(jcm, 9, 1e-10, settings)
    exact = [-0.5]
    for n in range(6):
        root = jcm.g * np.sqrt(n + 1.0)
        exact += [n + 0.5 - root, n + 0.5 + root]
    exact = np.sort(exact)[:9]
    err = float(np.max(np.abs(eig_jcm.energies - exact)))
    report("jcm_spectrum", err < 1e-10, f"max abs err {err:.2e}")

    # Selection rule: no rate between like-parity levels.
    rates = transition_rates(eig, model, bath)
    same = eig.parities[:, None] == eig.parities[None, :]
    worst = float(max(np.abs(rates.gamma_q[same]).max(), np.abs(rates.gamma_c[same]).max()))
    report("parity_selection_rule", worst == 0.0, f"worst {worst:.2e}")

    return 0 if failures == 0 else 2


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "rates": _cmd_rates,
    "g2": _cmd_g2,
    "crossings": _cmd_crossings,
    "sweep": _cmd_sweep,
    "selfcheck": _cmd_selfcheck,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _merge(args)
        return _COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AqrmError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
