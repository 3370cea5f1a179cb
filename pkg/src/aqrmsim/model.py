"""Truncated Fock x qubit operator algebra, the anisotropic Rabi Hamiltonian,
and the Z2 parity operator.

Composite basis ordering: index i = 2n + s, with photon number n = 0..n_max
and qubit index s = 0 (ground) or s = 1 (excited).  The sigma_z convention is
sigma_z|1> = +|1>, sigma_z|0> = -|0>, so the qubit term Delta/2 * sigma_z
puts the excited state at +Delta/2.  All matrices are real: the Hamiltonian
has only real coefficients in this basis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Hamiltonian parameters in units of the cavity frequency omega0."""

    delta: float
    g: float
    r: float
    omega0: float = 1.0

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.g < 0:
            raise ValueError(f"g must be nonnegative, got {self.g}")
        if self.r < 0:
            raise ValueError(f"r must be nonnegative, got {self.r}")
        if self.r > 1:
            warnings.warn(
                f"anisotropy r={self.r} > 1 is outside the studied range",
                stacklevel=2,
            )


@dataclass(frozen=True)
class Truncation:
    """Fock-space cutoff: photon numbers 0..n_max are retained."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)


@dataclass(frozen=True)
class OperatorSet:
    """All operators lifted to the dim x dim composite basis (real matrices)."""

    trunc: Truncation
    a: np.ndarray
    a_dag: np.ndarray
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    sigma_x: np.ndarray
    sigma_z: np.ndarray
    identity: np.ndarray


# Qubit matrices in the (s=0 ground, s=1 excited) ordering.
_SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]])
_SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])   # |1><0|
_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1|


def build_operators(trunc: Truncation) -> OperatorSet:
    """Construct the ladder and Pauli operators on the composite basis."""
    n_states = trunc.n_max + 1
    a_ph = np.diag(np.sqrt(np.arange(1.0, n_states)), k=1)
    eye_ph = np.eye(n_states)
    eye_q = np.eye(2)

    # i = 2n + s: photon index is the outer (slow) factor.
    a = np.kron(a_ph, eye_q)
    sigma_plus = np.kron(eye_ph, _SIGMA_PLUS)
    sigma_minus = np.kron(eye_ph, _SIGMA_MINUS)
    return OperatorSet(
        trunc=trunc,
        a=a,
        a_dag=a.T,
        sigma_plus=sigma_plus,
        sigma_minus=sigma_minus,
        sigma_x=sigma_plus + sigma_minus,
        sigma_z=np.kron(eye_ph, _SIGMA_Z),
        identity=np.eye(trunc.dim),
    )


def build_hamiltonian(p: ModelParams, ops: OperatorSet) -> np.ndarray:
    """H = w0 a'a + (D/2) sz + g[(a s+ + a' s-) + r(a s- + a' s+)].

    Exactly symmetric: each interaction term enters as M + M.T.
    """
    rotating = ops.a @ ops.sigma_plus
    counter = ops.a @ ops.sigma_minus
    h = p.omega0 * (ops.a_dag @ ops.a)
    h += 0.5 * p.delta * ops.sigma_z
    h += p.g * (rotating + rotating.T)
    h += p.g * p.r * (counter + counter.T)
    return h


def parity_operator(ops: OperatorSet) -> tuple[np.ndarray, np.ndarray]:
    """Z2 parity -sigma_z * exp(i pi a'a), diagonal in the composite basis.

    Returns the dim x dim operator and the per-basis-state parity labels
    (+1 or -1).  The basis splits into two blocks of size n_max + 1 each.
    """
    n_max = ops.trunc.n_max
    labels = np.empty(ops.trunc.dim, dtype=int)
    for n in range(n_max + 1):
        phase = 1 if n % 2 == 0 else -1
        labels[2 * n] = phase        # s=0: -(-1) * (-1)^n
        labels[2 * n + 1] = -phase   # s=1: -(+1) * (-1)^n
    return np.diag(labels.astype(float)), labels


def excitation_number(ops: OperatorSet) -> np.ndarray:
    """Total excitation a'a + (sigma_z + 1)/2, conserved at r = 0."""
    return ops.a_dag @ ops.a + 0.5 * (ops.sigma_z + ops.identity)
