"""Measured quantities: populations, quadratures, phonon number, energy, and an
emulation of the quadrature-measurement protocol.

Internal level ``a`` is the excited (sigma_z = +1) state throughout; sigma-
lowers ``a`` to ``b``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, SpaceMismatch
from .evolve import SpectralPropagator
from .fockspace import (
    Level, Operator, StateVector, VibronicSpace, annihilation, embed, expect, level_index, mode_op, projector,
)
from .hamiltonian import red_sideband
from .states import plus_phi

UNDEFINED_PROBABILITY = 1e-14


@dataclass(frozen=True)
class QuadratureSpec:
    """Y_phi = (a e^{-i phi} - a_dag e^{i phi}) / 2i on ``mode``.

    phi = -pi/2 gives x / (2 delta); phi = 0 gives delta p / hbar.
    """

    phi: float
    mode: int = 0

    def __post_init__(self):
        if not np.isfinite(self.phi):
            raise InvalidParameter("quadrature phase must be finite")


def population(psi: StateVector, level: Level) -> float:
    k = level_index(level, psi.space.internal_dim)
    return float(np.sum(np.abs(psi.tensor()[k]) ** 2))


def quadrature_matrix(n_max: int, phi: float) -> np.ndarray:
    a = annihilation(n_max).matrix
    return (a * np.exp(-1j * phi) - a.T * np.exp(1j * phi)) / 2j


def quadrature_op(space, spec: QuadratureSpec) -> Operator:
    n_max = space.mode_truncations[space.check_mode(spec.mode)]
    single = Operator(annihilation(n_max).space, quadrature_matrix(n_max, spec.phi), hermitian=True)
    return embed(space, single, spec.mode)


def quadrature(psi: StateVector, spec: QuadratureSpec) -> float:
    return expect(quadrature_op(psi.space, spec), psi).real


def phonon_number(psi: StateVector, mode: int = 0) -> float:
    return expect(mode_op(psi.space, "n", mode), psi).real


def mean_energy(h: Operator, psi: StateVector) -> float:
    return expect(h, psi).real


def position(psi: StateVector, mode: int = 0, delta: float = 1.0) -> float:
    return expect(mode_op(psi.space, "x", mode, delta), psi).real


def momentum(psi: StateVector, mode: int = 0, delta: float = 1.0, hbar: float = 1.0) -> float:
    return expect(mode_op(psi.space, "p", mode, delta, hbar), psi).real


@dataclass(frozen=True)
class ProjectedValue:
    """Outcome of one branch of the two-part measurement.

    ``value`` is None when the branch has (numerically) zero probability.
    """

    probability: float
    value: float | None

    @property
    def defined(self) -> bool:
        return self.value is not None


def _conditional_motion(psi: StateVector, phi_int: float, sign: int) -> np.ndarray:
    if psi.space.internal_dim != 2:
        raise SpaceMismatch("projected quadratures need two internal levels")
    ket = plus_phi(psi.space, phi_int, sign)
    return np.tensordot(ket.conj(), psi.tensor(), axes=(0, 0))


def projected_quadrature(psi: StateVector, phi_int: float, sign: int, spec: QuadratureSpec) -> ProjectedValue:
    """Project the internal factor on |sign phi_int> and measure Y_phi on what remains."""
    motion = _conditional_motion(psi, phi_int, sign).reshape(-1)
    prob = float(np.vdot(motion, motion).real)
    if prob < UNDEFINED_PROBABILITY:
        return ProjectedValue(prob, None)
    motional_space = VibronicSpace(1, psi.space.mode_truncations)
    y = quadrature_op(motional_space, spec)
    value = np.vdot(motion, y.apply(motion)).real / prob
    return ProjectedValue(prob, float(value))


def protocol_derivative(psi: StateVector, phi: float, probe_coupling: float = 1.0, tau_max: float = 1e-3,
                        n_steps: int = 10, mode: int = 0) -> float:
    """Estimate <Y_phi> from the initial slope of the excited-state population.

    The probe is a resonant red-sideband (JC) drive on ``mode`` with laser
    phase -2 phi, for which dP_a/dtau at tau = 0 equals probe_coupling *
    <Y_phi> when the internal state is |+phi>. The slope is a least-squares
    line through P_a on [0, tau_max], so the bias is first order in tau_max.
    """
    if probe_coupling <= 0:
        raise InvalidParameter("probe coupling must be positive")
    if tau_max <= 0 or n_steps < 1:
        raise InvalidParameter("need tau_max > 0 and n_steps >= 1")
    wrong = np.sum(np.abs(_conditional_motion(psi, phi, -1)) ** 2)
    if wrong > 1e-9:
        raise InvalidParameter(f"internal state is not |+phi> (|-phi> weight {wrong:.2e})")
    probe = red_sideband(psi.space, ("a", "b"), mode, probe_coupling, -2 * phi)
    prop = SpectralPropagator(probe)
    taus = np.linspace(0.0, tau_max, n_steps + 1)
    pa = projector(psi.space, "a")
    pops = np.array([expect(pa, prop.evolve(psi, tau)).real for tau in taus])
    slope = np.polyfit(taus, pops, 1)[0]
    return float(slope / probe_coupling)
