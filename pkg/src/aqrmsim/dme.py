"""Dressed-basis transition rates, the population rate matrix, and its
steady state.

In the dressed basis the Hamiltonian is diagonal and every jump operator is
a dyad between eigenstates, so populations decouple from coherences and the
steady state is found from a K x K rate matrix instead of the full
Liouvillian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ReducibleGeneratorError
from .model import ModelParams, Truncation, build_operators
from .spectrum import EigenSystem

# Rates this far below the channel maximum are pruned to exact zero so the
# connectivity analysis is meaningful against round-off.
RATE_PRUNE_REL = 1e-20


@dataclass(frozen=True)
class BathParams:
    """Ohmic baths for the qubit and cavity channels (k_B = 1, units of w0)."""

    alpha_q: float = 1e-4
    alpha_c: float = 1e-4
    omega_cutoff: float = 10.0
    T_q: float = 0.07
    T_c: float = 0.07

    def __post_init__(self):
        if self.alpha_q < 0 or self.alpha_c < 0:
            raise ValueError("bath couplings must be nonnegative")
        if self.omega_cutoff <= 0:
            raise ValueError("omega_cutoff must be positive")
        if self.T_q < 0 or self.T_c < 0:
            raise ValueError("temperatures must be nonnegative")


@dataclass(frozen=True)
class RateSet:
    """Per-pair gaps, bare rates, and the operator matrix elements.

    All arrays are K x K with only the upper triangle (j < k) populated.
    """

    gaps: np.ndarray      # gaps[j, k] = E_k - E_j
    gamma_q: np.ndarray
    gamma_c: np.ndarray
    s_elem: np.ndarray    # <phi_j| sigma_x |phi_k>
    x_elem: np.ndarray    # <phi_j| (a + a') |phi_k>
    parities: np.ndarray


@dataclass(frozen=True)
class Generator:
    """Population rate matrix: columns sum to zero, off-diagonals >= 0."""

    w: np.ndarray


def bose_occupation(gap: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(e^{gap/T} - 1); identically 0 at T = 0."""
    if temperature == 0.0:
        return 0.0
    x = gap / temperature
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def gap_times_occupation(gap: float, temperature: float) -> float:
    """gap * n(gap), finite as gap -> 0 (limit k_B T).

    For gap/T < 1e-6 the series T - gap/2 + gap^2/(12 T) avoids the 0/0.
    """
    if temperature == 0.0:
        return 0.0
    x = gap / temperature
    if x < 1e-6:
        return temperature - 0.5 * gap + gap * gap / (12.0 * temperature)
    if x > 700.0:
        return 0.0
    return gap / math.expm1(x)


def transition_rates(eig: EigenSystem, p: ModelParams, bath: BathParams) -> RateSet:
    """Ohmic downward rates between all dressed pairs j < k.

    gamma_q = alpha_q (gap/Delta) e^{-gap/wc} |<j|sx|k>|^2,
    gamma_c = alpha_c (gap/w0)   e^{-gap/wc} |<j|(a+a')|k>|^2.
    Parity-odd operators connect only opposite-parity levels; same-parity
    elements are zeroed exactly.
    """
    if eig.k_levels < 2:
        raise ValueError("need at least two dressed levels")
    ops = build_operators(Truncation(eig.n_max_used))
    v = eig.states
    s_elem = v.T @ ops.sigma_x @ v
    x_elem = v.T @ (ops.a + ops.a_dag) @ v

    same_parity = eig.parities[:, None] == eig.parities[None, :]
    s_elem = np.where(same_parity, 0.0, s_elem)
    x_elem = np.where(same_parity, 0.0, x_elem)

    k = eig.k_levels
    gaps = eig.energies[None, :] - eig.energies[:, None]
    upper = np.triu(np.ones((k, k), dtype=bool), k=1)
    gaps = np.where(upper, gaps, 0.0)
    cutoff = np.where(upper, np.exp(-gaps / bath.omega_cutoff), 0.0)
    gamma_q = bath.alpha_q * (gaps / p.delta) * cutoff * s_elem**2
    gamma_c = bath.alpha_c * (gaps / p.omega0) * cutoff * x_elem**2
    return RateSet(
        gaps=gaps,
        gamma_q=gamma_q,
        gamma_c=gamma_c,
        s_elem=np.where(upper, s_elem, 0.0),
        x_elem=np.where(upper, x_elem, 0.0),
        parities=eig.parities.copy(),
    )


def build_generator(rates: RateSet, bath: BathParams, p: ModelParams) -> Generator:
    """Assemble the K x K population rate matrix from both baths.

    Downward flow k -> j at Gamma (1 + n), upward j -> k at Gamma n.  Near a
    degeneracy the product gap * n(gap) is evaluated by its finite limit, so
    the upward cavity rate tends to alpha_c (T_c/w0) |x|^2 instead of
    overflowing.
    """
    k = rates.gaps.shape[0]
    w = np.zeros((k, k))
    # Bare-rate prefactors with the gap factored out: gamma = c * gap.
    for j in range(k):
        for m in range(j + 1, k):
            gap = rates.gaps[j, m]
            cut = math.exp(-gap / bath.omega_cutoff)
            c_q = bath.alpha_q * cut * rates.s_elem[j, m] ** 2 / p.delta
            c_c = bath.alpha_c * cut * rates.x_elem[j, m] ** 2 / p.omega0
            up = c_q * gap_times_occupation(gap, bath.T_q)
            up += c_c * gap_times_occupation(gap, bath.T_c)
            down = up + (c_q + c_c) * gap
            w[j, m] = down  # population flow m -> j
            w[m, j] = up    # population flow j -> m
    peak = w.max(initial=0.0)
    if peak > 0.0:
        w[w < RATE_PRUNE_REL * peak] = 0.0
    np.fill_diagonal(w, 0.0)
    np.fill_diagonal(w, -w.sum(axis=0))
    return Generator(w=w)


def steady_state(gen: Generator) -> np.ndarray:
    """Kernel of the generator, normalized: W P = 0, sum P = 1, P >= 0.

    Solved as a bordered system (one balance row replaced by normalization),
    with one step of iterative refinement.  A disconnected transition graph
    means the kernel is degenerate and raises ReducibleGeneratorError.
    """
    w = gen.w
    k = w.shape[0]
    off = w.copy()
    np.fill_diagonal(off, 0.0)
    adjacency = csr_matrix((off + off.T) > 0)
    n_comp, comp_labels = connected_components(adjacency, directed=False)
    if n_comp > 1:
        components = [np.where(comp_labels == c)[0].tolist() for c in range(n_comp)]
        raise ReducibleGeneratorError(components)

    a = w.copy()
    a[0, :] = 1.0
    b = np.zeros(k)
    b[0] = 1.0
    p = np.linalg.solve(a, b)
    p += np.linalg.solve(a, b - a @ p)
    p = np.clip(p, 0.0, None)
    return p / p.sum()
