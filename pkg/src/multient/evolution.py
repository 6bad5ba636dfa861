"""
Reference construction of the same states by integrating the quadratic
momentum directly.

A coupling (j, k, g) stands for the generator term g a_j^+ a_k^+ - h.c.
(for j == k, (g/2) a_j^+ a_j^+ - h.c., a single-mode squeezer of rate g).
Collecting the terms as 1/2 sum G_jk a_j^+ a_k^+ - h.c. with G = A + iB
symmetric, the Heisenberg flow of the quadratures is dQ/dz = M Q with
M = [[A, B], [B, -A]], and a vacuum input evolves to V(z) = E E^T with
E = expm(M z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .gaussian import Covariance, max_abs_deviation, passive_symplectic, symplectic_form
from .states import (
    FourModeLinearParams,
    FourModeSquareParams,
    TripartiteParams,
    build_state,
)

MAX_EXPONENT_NORM = 50.0


@dataclass(frozen=True)
class QuadraticMomentum:
    n_modes: int
    couplings: tuple[tuple[int, int, complex], ...]

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("need at least one mode")
        terms = tuple((int(j), int(k), complex(g)) for j, k, g in self.couplings)
        if not terms:
            raise ValueError("coupling list is empty")
        for j, k, _ in terms:
            if not (1 <= j <= self.n_modes and 1 <= k <= self.n_modes):
                raise ValueError(f"coupling ({j}, {k}) refers to a mode outside 1..{self.n_modes}")
        object.__setattr__(self, "couplings", terms)

    def coupling_matrix(self) -> np.ndarray:
        g = np.zeros((self.n_modes, self.n_modes), dtype=complex)
        for j, k, val in self.couplings:
            if j == k:
                g[j - 1, j - 1] += val
            else:
                g[j - 1, k - 1] += val
                g[k - 1, j - 1] += val
        return g


@dataclass(frozen=True)
class DriftMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 2

    def hamiltonian_defect(self) -> float:
        """max |Omega M - (Omega M)^T|; zero for a generator of symplectic maps."""
        om = symplectic_form(self.n_modes) @ self.entries
        return float(np.max(np.abs(om - om.T)))


def drift_matrix(p: QuadraticMomentum) -> DriftMatrix:
    g = p.coupling_matrix()
    a, b = g.real, g.imag
    return DriftMatrix(np.block([[a, b], [b, -a]]))


def propagator(m: DriftMatrix, z: float) -> np.ndarray:
    """Symplectic map expm(M z)."""
    if z < 0:
        raise ValueError(f"propagation length must be >= 0, got {z}")
    mz = m.entries * z
    norm = float(np.linalg.norm(mz, 2))
    if norm > MAX_EXPONENT_NORM:
        raise ValueError(f"||M z|| = {norm:.3g} exceeds {MAX_EXPONENT_NORM}: unphysically large gain")
    return expm(mz)


def evolve(m: DriftMatrix, z: float, initial=None) -> Covariance:
    """Evolve a covariance (vacuum by default) over length z."""
    e = propagator(m, z)
    if initial is None:
        return Covariance.from_factor(e)
    if isinstance(initial, Covariance) and initial.factor is not None:
        return Covariance.from_factor(e @ initial.factor)
    v = e @ np.asarray(initial, dtype=float) @ e.T
    return Covariance(0.5 * (v + v.T))


def evolve_vacuum(m: DriftMatrix, z: float) -> Covariance:
    return evolve(m, z)


def tripartite_momentum(p: TripartiteParams) -> tuple[QuadraticMomentum, np.ndarray]:
    """Momentum in storage labels plus the local phases that make it real."""
    mom = QuadraticMomentum(3, ((1, 2, p.g1), (1, 3, p.g2)))
    phases = np.array([0.0, np.angle(p.g1), np.angle(p.g2)])
    return mom, phases


def linear_momentum(p: FourModeLinearParams) -> tuple[QuadraticMomentum, np.ndarray]:
    mom = QuadraticMomentum(4, ((1, 2, p.g1), (2, 3, p.g2), (4, 1, p.g2)))
    half = 0.5 * np.angle(p.g1)
    outer = np.angle(p.g2) - half
    return mom, np.array([half, half, outer, outer])


def square_momentum(p: FourModeSquareParams, common_phase: float = 0.0) -> tuple[QuadraticMomentum, np.ndarray]:
    """
    Square chain with g1 = g e^{i(psi + phi)}, g2 = g e^{i(psi - phi)}.

    After rotating modes 1, 2 by arg(g1)/2 and modes 3, 4 by arg(g2)/2 the
    central links become 2 g cos(phi), real and nonnegative on [0, pi/2].
    """
    ph1 = common_phase + p.phi_minus
    ph2 = common_phase - p.phi_minus
    g1 = p.g_mag * complex(math.cos(ph1), math.sin(ph1))
    g2 = p.g_mag * complex(math.cos(ph2), math.sin(ph2))
    mom = QuadraticMomentum(4, ((1, 2, g1), (3, 4, g2), (2, 3, g1 + g2), (4, 1, g1 + g2)))
    return mom, np.array([ph1 / 2, ph1 / 2, ph2 / 2, ph2 / 2])


def family_momentum(params, common_phase: float = 0.0):
    if isinstance(params, TripartiteParams):
        return tripartite_momentum(params)
    if isinstance(params, FourModeLinearParams):
        return linear_momentum(params)
    if isinstance(params, FourModeSquareParams):
        return square_momentum(params, common_phase)
    raise TypeError(f"unknown parameter type {type(params).__name__}")


def remove_local_phases(v: Covariance, phases: np.ndarray) -> Covariance:
    """Apply a'_j = exp(-i phase_j) a_j to every mode."""
    s = passive_symplectic(np.diag(np.exp(-1j * np.asarray(phases))))
    if v.factor is not None:
        return Covariance.from_factor(s @ v.factor)
    m = s @ v.matrix @ s.T
    return Covariance(0.5 * (m + m.T))


def oracle_state(params, common_phase: float = 0.0) -> Covariance:
    """Covariance of a family state by direct evolution, in the factory's phase frame."""
    mom, phases = family_momentum(params, common_phase)
    v = evolve_vacuum(drift_matrix(mom), params.z)
    return remove_local_phases(v, phases)


def crosscheck(params, common_phase: float = 0.0) -> float:
    """Largest elementwise |V_oracle - V_factory|."""
    v_fac, _ = build_state(params)
    return max_abs_deviation(oracle_state(params, common_phase).matrix, v_fac.matrix)
