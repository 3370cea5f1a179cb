"""Dressed detection operators and steady-state one-/two-photon statistics.

The steady state is population-diagonal, so every expectation value reduces
to sums over dressed-level pairs.  Only |X_{j,k}|^2 enters any formula, so
the eigenvector sign gauge is irrelevant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, Truncation, build_operators
from .spectrum import EigenSystem

# Fluxes below this are reported as undefined rather than divided.
FLUX_FLOOR = 1e-300
# A gap this small marks the point as effectively at a crossing.
GAP_DEGENERATE = 1e-6


@dataclass(frozen=True)
class XOperator:
    """Detection operator X+ in the dressed basis.

    X+ = -i sum_{j<k} gap_{k,j} x_{j,k} |j><k|.  Only the real amplitude
    matrix amp[j, k] = gap_{k,j} * x_{j,k} (strictly upper triangular) is
    stored; the -i phase cancels in every observable.
    """

    amp: np.ndarray
    parities: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return -1j * self.amp


@dataclass(frozen=True)
class G2Result:
    """Steady-state photon statistics at one parameter point."""

    g2_dressed: float | None
    g2_standard: float | None
    g2_approx4: float | None
    g2_crossing: float | None
    one_photon: float
    two_photon: float
    gap10: float
    degenerate_flag: bool
    approx_leakage: float  # P_4 + P_5, honesty check on the four-level form

    @property
    def bunching_label(self) -> str:
        if self.g2_dressed is None:
            return ""
        return "bunching" if self.g2_dressed > 1.0 else "antibunching"


def x_plus(eig: EigenSystem) -> XOperator:
    """Build X+ from the converged eigensystem."""
    ops = build_operators(Truncation(eig.n_max_used))
    x_elem = eig.states.T @ (ops.a + ops.a_dag) @ eig.states
    same_parity = eig.parities[:, None] == eig.parities[None, :]
    x_elem = np.where(same_parity, 0.0, x_elem)
    gaps = eig.energies[None, :] - eig.energies[:, None]
    amp = np.triu(gaps * x_elem, k=1)
    return XOperator(amp=amp, parities=eig.parities.copy())


def one_two_photon_moments(x: XOperator, populations: np.ndarray) -> tuple[float, float]:
    """<X- X+>_ss and <X- X- X+ X+>_ss over the population-diagonal state."""
    a = x.amp
    one = float(populations @ (a**2).sum(axis=0))
    b = a @ a
    two = float(populations @ (b**2).sum(axis=0))
    return one, two


def g2_zero(x: XOperator, populations: np.ndarray) -> tuple[float | None, float, float]:
    """Dressed-basis G2(0) = <X-X-X+X+> / <X-X+>^2; None when the flux underflows."""
    one, two = one_two_photon_moments(x, populations)
    if one < FLUX_FLOOR:
        return None, one, two
    return two / one**2, one, two


def g2_approx_four_level(x: XOperator, populations: np.ndarray) -> float | None:
    """Low-temperature four-level approximation to G2(0).

    Two-photon flux from the four cooperative cascades 0->1->2, 0->1->3,
    0->2->3, 1->2->3; one-photon flux from the main 0->1 transition.
    """
    if x.amp.shape[0] < 4:
        raise ValueError("need at least four dressed levels")
    a2 = x.amp**2
    p = populations
    denom = a2[0, 1] ** 2 * p[1] ** 2
    if denom < FLUX_FLOOR:
        return None
    num = a2[0, 1] * a2[1, 2] * p[2]
    num += ((a2[0, 2] + a2[1, 2]) * a2[2, 3] + a2[0, 1] * a2[1, 3]) * p[3]
    return float(num / denom)


def g2_near_crossing(x: XOperator, populations: np.ndarray) -> float | None:
    """Crossing asymptotics of the four-level form (P_1 -> 1/2).

    Diverges as gap10^-4; undefined at exact degeneracy.
    """
    if x.amp.shape[0] < 4:
        raise ValueError("need at least four dressed levels")
    a2 = x.amp**2
    denom = a2[0, 1] ** 2
    if denom < FLUX_FLOOR:
        return None
    return float(4.0 * (a2[0, 2] + a2[1, 2]) * a2[2, 3] * populations[3] / denom)


def g2_standard(eig: EigenSystem, populations: np.ndarray) -> float | None:
    """Legacy <a'a'aa>/<a'a>^2 with bare operators projected onto the
    retained dressed levels; breaks down at ultrastrong coupling."""
    ops = build_operators(Truncation(eig.n_max_used))
    a_d = eig.states.T @ ops.a @ eig.states
    one = float(populations @ (a_d**2).sum(axis=0))
    if one < FLUX_FLOOR:
        return None
    m = a_d @ a_d
    two = float(populations @ (m**2).sum(axis=0))
    return two / one**2


def photon_statistics(
    eig: EigenSystem, populations: np.ndarray, p: ModelParams
) -> G2Result:
    """Evaluate every correlation figure at one steady state."""
    x = x_plus(eig)
    g2, one, two = g2_zero(x, populations)
    gap10 = float(eig.energies[1] - eig.energies[0])
    leak45 = float(populations[4:6].sum()) if populations.size > 4 else 0.0
    return G2Result(
        g2_dressed=g2,
        g2_standard=g2_standard(eig, populations),
        g2_approx4=g2_approx_four_level(x, populations) if eig.k_levels >= 4 else None,
        g2_crossing=g2_near_crossing(x, populations) if eig.k_levels >= 4 else None,
        one_photon=one,
        two_photon=two,
        gap10=gap10,
        degenerate_flag=gap10 < GAP_DEGENERATE * p.omega0,
        approx_leakage=leak45,
    )
