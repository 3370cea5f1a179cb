"""Per-parity-block diagonalization, truncation convergence, and the search
for ground-state level crossings g_c^(n)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import EigensolverError, TruncationError
from .model import ModelParams, Truncation, build_hamiltonian, build_operators, parity_operator

# Two states closer than this are treated as an exact degeneracy.
DEGENERACY_FLOOR = 1e-9
# Equal-energy tie in the merged sort: even parity listed first.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for the spectral layer, shared by the sweep and CLI."""

    k_levels: int = 20
    tol_e: float = 1e-10
    n_max_start: int | None = None  # default: max(4K, 50)
    n_max_growth: int = 25
    n_max_cap: int = 400
    scan_step: float = 0.01
    bisect_tol: float = 1e-6


@dataclass(frozen=True)
class EigenSystem:
    """Lowest K dressed levels merged across the two parity blocks."""

    energies: np.ndarray   # ascending, length K
    states: np.ndarray     # dim x K, columns in the composite basis
    parities: np.ndarray   # +1 / -1 per level
    n_max_used: int

    @property
    def k_levels(self) -> int:
        return self.energies.size

    @property
    def dim(self) -> int:
        return self.states.shape[0]


@dataclass(frozen=True)
class Crossing:
    index: int          # 1-based: g_c^(n)
    g_c: float
    parity_before: int
    parity_after: int


@dataclass(frozen=True)
class CrossingList:
    entries: tuple[Crossing, ...] = field(default=())

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _merge_order(energies: np.ndarray, parities: np.ndarray) -> np.ndarray:
    """Ascending order; on ties (within TIE_TOL) even parity comes first."""
    order = np.argsort(energies, kind="stable")
    order = list(order)
    # Bubble pass within near-degenerate groups keeps the sort stable.
    changed = True
    while changed:
        changed = False
        for i in range(len(order) - 1):
            a, b = order[i], order[i + 1]
            if (
                abs(energies[b] - energies[a]) < TIE_TOL
                and parities[a] == -1
                and parities[b] == +1
            ):
                order[i], order[i + 1] = b, a
                changed = True
    return np.asarray(order)


def _block_indices(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    _, labels = parity_operator(build_operators(Truncation(n_max)))
    return np.where(labels == +1)[0], np.where(labels == -1)[0]


def lowest_energies(p: ModelParams, n_max: int, k: int) -> np.ndarray:
    """Lowest k merged eigenvalues only (no eigenvectors); convergence probe."""
    trunc = Truncation(n_max)
    ops = build_operators(trunc)
    h = build_hamiltonian(p, ops)
    idx_even, idx_odd = _block_indices(n_max)
    k_block = min(k, n_max + 1)
    vals = []
    for idx in (idx_even, idx_odd):
        block = h[np.ix_(idx, idx)]
        try:
            w = scipy.linalg.eigh(
                block, eigvals_only=True, subset_by_index=(0, k_block - 1)
            )
        except scipy.linalg.LinAlgError as exc:
            raise EigensolverError(str(exc)) from exc
        vals.append(w)
    merged = np.sort(np.concatenate(vals))
    return merged[:k]


def diagonalize(p: ModelParams, trunc: Truncation, k: int) -> EigenSystem:
    """Lowest k dressed states across both parity blocks, parity-labelled."""
    if k < 1 or k > trunc.dim:
        raise ValueError(f"k={k} must be in 1..{trunc.dim}")
    ops = build_operators(trunc)
    h = build_hamiltonian(p, ops)
    idx_even, idx_odd = _block_indices(trunc.n_max)

    energies, parities, columns = [], [], []
    for sign, idx in ((+1, idx_even), (-1, idx_odd)):
        block = h[np.ix_(idx, idx)]
        k_block = min(k, idx.size)
        try:
            w, v = scipy.linalg.eigh(block, subset_by_index=(0, k_block - 1))
        except scipy.linalg.LinAlgError as exc:
            raise EigensolverError(str(exc)) from exc
        for m in range(k_block):
            full = np.zeros(trunc.dim)
            full[idx] = v[:, m]
            energies.append(w[m])
            parities.append(sign)
            columns.append(full)

    energies = np.asarray(energies)
    parities = np.asarray(parities, dtype=int)
    states = np.column_stack(columns)
    order = _merge_order(energies, parities)[:k]
    return EigenSystem(
        energies=energies[order],
        states=states[:, order],
        parities=parities[order],
        n_max_used=trunc.n_max,
    )


def converge_truncation(
    p: ModelParams,
    k: int,
    tol_e: float,
    settings: SolverSettings | None = None,
) -> EigenSystem:
    """Grow n_max until the lowest k energies are stable to tol_e.

    Returns the EigenSystem at the smallest tested n_max whose energies
    change by less than tol_e when n_max grows by one step.
    """
    if tol_e <= 0:
        raise ValueError("tol_e must be positive")
    s = settings or SolverSettings()
    n = s.n_max_start if s.n_max_start is not None else max(4 * k, 50)
    n = max(n, (k + 1) // 2)  # need dim >= k
    e_here = lowest_energies(p, n, k)
    deltas = None
    while n + s.n_max_growth <= s.n_max_cap:
        n_next = n + s.n_max_growth
        e_next = lowest_energies(p, n_next, k)
        deltas = e_next - e_here
        if np.max(np.abs(deltas)) < tol_e:
            return diagonalize(p, Truncation(n), k)
        n, e_here = n_next, e_next
    raise TruncationError(s.n_max_cap, list(deltas if deltas is not None else [np.inf]))


def ground_parity(
    p: ModelParams, settings: SolverSettings | None = None
) -> tuple[int, bool]:
    """Parity of the ground level; flagged degenerate at a crossing."""
    s = settings or SolverSettings()
    eig = converge_truncation(p, 2, s.tol_e, s)
    degenerate = abs(eig.energies[1] - eig.energies[0]) < DEGENERACY_FLOOR * p.omega0
    return int(eig.parities[0]), degenerate


def find_crossings(
    p_base: ModelParams,
    g_range: tuple[float, float],
    scan_step: float | None = None,
    bisect_tol: float | None = None,
    settings: SolverSettings | None = None,
) -> CrossingList:
    """Scan ground parity over g and bisect each sign flip.

    Parity flips (not gap minima) identify the crossings; avoided crossings
    at r = 1 therefore do not register.
    """
    s = settings or SolverSettings()
    step = scan_step if scan_step is not None else s.scan_step
    tol = bisect_tol if bisect_tol is not None else s.bisect_tol
    g_lo, g_hi = g_range
    if not (g_lo < g_hi):
        raise ValueError(f"need g_lo < g_hi, got {g_range}")
    if step <= 0 or tol <= 0:
        raise ValueError("scan_step and bisect_tol must be positive")

    def parity_at(g):
        return ground_parity(
            ModelParams(delta=p_base.delta, g=g, r=p_base.r, omega0=p_base.omega0), s
        )[0]

    n_grid = int(np.floor((g_hi - g_lo) / step)) + 1
    grid = [g_lo + i * step for i in range(n_grid)]
    if grid[-1] < g_hi:
        grid.append(g_hi)
    parities = [parity_at(g) for g in grid]

    entries = []
    for i in range(len(grid) - 1):
        if parities[i] == parities[i + 1]:
            continue
        lo, hi = grid[i], grid[i + 1]
        p_lo = parities[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if parity_at(mid) == p_lo:
                lo = mid
            else:
                hi = mid
        entries.append(
            Crossing(
                index=len(entries) + 1,
                g_c=0.5 * (lo + hi),
                parity_before=parities[i],
                parity_after=parities[i + 1],
            )
        )
    return CrossingList(entries=tuple(entries))
