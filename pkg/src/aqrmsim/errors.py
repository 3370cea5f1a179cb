"""Exception types surfaced by the numerical layers."""

from __future__ import annotations


class AqrmError(Exception):
    """Base class for all simulator errors."""


class EigensolverError(AqrmError):
    """Dense symmetric eigensolver failed to converge."""


class TruncationError(AqrmError):
    """Fock-space truncation did not converge below the n_max cap."""

    def __init__(self, n_max_cap: int, last_deltas):
        self.n_max_cap = n_max_cap
        self.last_deltas = last_deltas
        worst = max(abs(d) for d in last_deltas)
        super().__init__(
            f"energies not converged at n_max cap {n_max_cap}; "
            f"worst level shift {worst:.3e}"
        )


class ReducibleGeneratorError(AqrmError):
    """The transition graph is disconnected: the steady state is not unique."""

    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        super().__init__(
            f"rate matrix has {len(self.components)} disconnected components: "
            f"{self.components}"
        )


class LeakageError(AqrmError):
    """Steady-state weight leaks out of the retained dressed levels."""

    def __init__(self, k_levels: int, top_population: float):
        self.k_levels = k_levels
        self.top_population = top_population
        super().__init__(
            f"population {top_population:.3e} on the highest of {k_levels} "
            f"retained levels exceeds the leakage floor"
        )
