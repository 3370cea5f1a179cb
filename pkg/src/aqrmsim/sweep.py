"""Grid sweeps over (g, r, T) with CSV / JSON-lines output.

Grid points are independent; diagonalizations dominate the cost, so the
converged eigensystems are computed once per unique (g, r) pair and reused
across the temperature axis.  Rows are always assembled in row-major grid
order regardless of the evaluation order, so output files are byte-identical
across worker counts.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .correlations import G2Result, photon_statistics
from .dme import BathParams, build_generator, steady_state, transition_rates
from .errors import AqrmError, LeakageError, ReducibleGeneratorError, TruncationError
from .model import ModelParams, Truncation
from .spectrum import EigenSystem, SolverSettings, converge_truncation, find_crossings

AXIS_NAMES = ("g", "r", "T")
# Steady-state weight allowed on the highest retained level before K is doubled.
LEAKAGE_FLOOR = 1e-8


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.count < 2:
            raise ValueError("axis count must be >= 2")
        if not (self.lo < self.hi):
            raise ValueError(f"axis needs lo < hi, got [{self.lo}, {self.hi}]")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepConfig:
    """Base point plus one or two swept axes (T locks T_q = T_c)."""

    delta: float = 1.0
    g: float = 0.0
    r: float = 0.0
    bath: BathParams = field(default_factory=BathParams)
    axes: tuple[Axis, ...] = ()
    settings: SolverSettings = field(default_factory=SolverSettings)
    out_path: str = "sweep.csv"
    fmt: str = "csv"
    workers: int | None = None
    crossings_sidecar: bool = False

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep needs one or two axes")
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate sweep axis")
        if self.fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown format {self.fmt!r}")


def fig1_preset(**overrides) -> SweepConfig:
    """(g, r) map at resonance with the default low-temperature baths."""
    base = dict(
        delta=1.0,
        bath=BathParams(),
        axes=(Axis("r", 0.0, 1.0, 81), Axis("g", 0.0, 2.0, 81)),
        out_path="fig1_sweep.csv",
    )
    base.update(overrides)
    return SweepConfig(**base)


def fig2_preset(**overrides) -> SweepConfig:
    """(g, T) map at r = 0.2."""
    base = dict(
        delta=1.0,
        r=0.2,
        bath=BathParams(),
        axes=(Axis("T", 0.02, 0.2, 10), Axis("g", 0.0, 4.0, 121)),
        out_path="fig2_sweep.csv",
    )
    base.update(overrides)
    return SweepConfig(**base)


@dataclass(frozen=True)
class SweepRow:
    r: float
    g: float
    T_q: float
    T_c: float
    n_max_used: int | None
    K: int | None
    E0: float | None
    E1: float | None
    gap10: float | None
    ground_parity: int | None
    g2_dressed: float | None
    g2_standard: float | None
    g2_approx4: float | None
    g2_crossing: float | None
    one_photon: float | None
    leakage: float | None
    degenerate_flag: int | None
    bunching_label: str
    error: str = ""


COLUMNS = tuple(f.name for f in fields(SweepRow))


def evaluate_point(
    p: ModelParams,
    bath: BathParams,
    settings: SolverSettings | None = None,
    eig: EigenSystem | None = None,
) -> SweepRow:
    """Full pipeline at one parameter point.

    If the steady state leaks onto the highest retained level, the level
    count is doubled once before giving up.
    """
    s = settings or SolverSettings()
    if eig is None:
        eig = converge_truncation(p, s.k_levels, s.tol_e, s)

    def solve(eig_k: EigenSystem) -> np.ndarray:
        rates = transition_rates(eig_k, p, bath)
        gen = build_generator(rates, bath, p)
        return steady_state(gen)

    populations = solve(eig)
    if populations[-1] >= LEAKAGE_FLOOR:
        k2 = 2 * eig.k_levels
        eig = converge_truncation(p, k2, s.tol_e, replace(s, k_levels=k2))
        populations = solve(eig)
        if populations[-1] >= LEAKAGE_FLOOR:
            raise LeakageError(eig.k_levels, float(populations[-1]))

    stats = photon_statistics(eig, populations, p)
    return SweepRow(
        r=p.r,
        g=p.g,
        T_q=bath.T_q,
        T_c=bath.T_c,
        n_max_used=eig.n_max_used,
        K=eig.k_levels,
        E0=float(eig.energies[0]),
        E1=float(eig.energies[1]),
        gap10=stats.gap10,
        ground_parity=int(eig.parities[0]),
        g2_dressed=stats.g2_dressed,
        g2_standard=stats.g2_standard,
        g2_approx4=stats.g2_approx4,
        g2_crossing=stats.g2_crossing,
        one_photon=stats.one_photon,
        leakage=float(populations[-1]),
        degenerate_flag=int(stats.degenerate_flag),
        bunching_label=stats.bunching_label,
    )


_ERROR_CODES = {
    TruncationError: "no_convergence",
    ReducibleGeneratorError: "reducible_generator",
    LeakageError: "leakage",
}


def _error_row(p: ModelParams, bath: BathParams, exc: AqrmError) -> SweepRow:
    code = _ERROR_CODES.get(type(exc), "numerical_error")
    return SweepRow(
        r=p.r, g=p.g, T_q=bath.T_q, T_c=bath.T_c,
        n_max_used=None, K=None, E0=None, E1=None, gap10=None,
        ground_parity=None, g2_dressed=None, g2_standard=None,
        g2_approx4=None, g2_crossing=None, one_photon=None, leakage=None,
        degenerate_flag=None, bunching_label="", error=code,
    )


def _grid_points(cfg: SweepConfig) -> list[tuple[ModelParams, BathParams]]:
    axis_values = [ax.values() for ax in cfg.axes]
    names = [ax.name for ax in cfg.axes]
    points = []
    for combo in itertools.product(*axis_values):
        over = dict(zip(names, combo))
        g = over.get("g", cfg.g)
        r = over.get("r", cfg.r)
        p = ModelParams(delta=cfg.delta, g=float(g), r=float(r))
        if "T" in over:
            bath = replace(cfg.bath, T_q=float(over["T"]), T_c=float(over["T"]))
        else:
            bath = cfg.bath
        points.append((p, bath))
    return points


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """Evaluate the full pipeline over the configured grid, row-major order.

    Per-point failures become rows carrying an error code; they never abort
    the sweep.
    """
    points = _grid_points(cfg)
    workers = cfg.workers or os.cpu_count() or 1

    # Converge each distinct (g, r) once; temperature only enters the rates.
    keys = []
    seen = set()
    for p, _ in points:
        key = (p.g, p.r)
        if key not in seen:
            seen.add(key)
            keys.append((key, p))

    def converge(item):
        _, p = item
        try:
            return converge_truncation(p, cfg.settings.k_levels, cfg.settings.tol_e, cfg.settings)
        except AqrmError as exc:
            return exc

    with ThreadPoolExecutor(max_workers=workers) as pool:
        eigs = dict(zip((k for k, _ in keys), pool.map(converge, keys)))

        def solve_point(point):
            p, bath = point
            cached = eigs[(p.g, p.r)]
            if isinstance(cached, AqrmError):
                return _error_row(p, bath, cached)
            try:
                return evaluate_point(p, bath, cfg.settings, eig=cached)
            except AqrmError as exc:
                return _error_row(p, bath, exc)

        rows = list(pool.map(solve_point, points))
    return rows


def crossings_sidecar(cfg: SweepConfig) -> list[tuple[float, int, float]]:
    """(r, n, g_c^(n)) table for overlaying crossing lines on sweep plots."""
    g_axes = [ax for ax in cfg.axes if ax.name == "g"]
    if not g_axes:
        raise ValueError("crossings sidecar needs a g axis")
    g_lo, g_hi = g_axes[0].lo, g_axes[0].hi
    if g_lo == g_hi:
        raise ValueError("degenerate g axis")
    r_axes = [ax for ax in cfg.axes if ax.name == "r"]
    r_values = r_axes[0].values() if r_axes else [cfg.r]
    out = []
    for r in r_values:
        p = ModelParams(delta=cfg.delta, g=g_lo if g_lo > 0 else 0.0, r=float(r))
        found = find_crossings(p, (max(g_lo, 1e-6), g_hi), settings=cfg.settings)
        for c in found:
            out.append((float(r), c.index, c.g_c))
    return out


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        if np.isnan(value):
            return ""
        return f"{value:.17g}"
    return str(value)


def emit(rows: list[SweepRow], path: str, fmt: str = "csv") -> None:
    """Write the sweep table; floats at 17 significant digits, missing
    values as empty cells (CSV) or null (JSON lines)."""
    if not rows:
        raise ValueError("refusing to emit an empty table")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if fmt == "csv":
                fh.write(",".join(COLUMNS) + "\n")
                for row in rows:
                    fh.write(",".join(_format_value(getattr(row, c)) for c in COLUMNS) + "\n")
            elif fmt == "jsonl":
                for row in rows:
                    record = {}
                    for c in COLUMNS:
                        v = getattr(row, c)
                        if isinstance(v, float) and np.isnan(v):
                            v = None
                        if isinstance(v, (np.integer, np.floating)):
                            v = v.item()
                        record[c] = v
                    fh.write(json.dumps(record) + "\n")
            else:
                raise ValueError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {path!r}: {exc}") from exc


def emit_crossings(table: list[tuple[float, int, float]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("r,n,g_c\n")
        for r, n, g_c in table:
            fh.write(f"{r:.17g},{n},{g_c:.17g}\n")
