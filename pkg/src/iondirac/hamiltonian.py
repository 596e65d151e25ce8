"""Ion-trap interaction Hamiltonians and the Dirac Hamiltonians built from them.

Parameter dictionary between the ion and the Dirac particle:

    c    = 2 eta delta omega_sb      (speed of light)
    mc^2 = hbar omega                (rest energy)

Working units set hbar = delta = omega_sb = 1, so c = 2 eta and mc^2 = omega.
All builders keep the general factors so other unit systems work too.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, SpaceMismatch
from .fockspace import (
    Level,
    Operator,
    VibronicSpace,
    annihilation,
    creation,
    embed,
    identity,
    internal_op,
    mode_op,
    pauli,
    position_op,
    transition_matrix,
)

AXES = "xyz"


@dataclass(frozen=True)
class ModelParams:
    """Physical dials of the simulation.

    ``omega`` is the carrier strength (rest energy hbar*omega; 0 is massless),
    ``omega_sb`` the sideband strength. ``mass_axis`` selects the 1+1 mass
    term: "z" (rotated form hbar*omega*sigma_z) or "y" (the laser-phase form
    before the rotation about x).
    """

    eta: float = 0.05
    omega: float = 0.5
    omega_sb: float = 1.0
    delta: float = 1.0
    hbar: float = 1.0
    n_max: tuple[int, ...] = (40,)
    potential: float = 0.0
    field: float = 0.0
    mass_axis: str = "z"

    def __post_init__(self):
        n_max = self.n_max
        if isinstance(n_max, (int, np.integer)):
            n_max = (int(n_max),)
        object.__setattr__(self, "n_max", tuple(int(n) for n in n_max))
        # eta = 0 is allowed: it switches the momentum coupling off (rest-frame checks).
        if self.eta < 0:
            raise InvalidParameter("eta must be >= 0")
        if self.omega_sb <= 0 or self.delta <= 0 or self.hbar <= 0:
            raise InvalidParameter("omega_sb, delta and hbar must be positive")
        if self.omega < 0:
            raise InvalidParameter("omega must be >= 0")
        if any(n < 1 for n in self.n_max) or not self.n_max:
            raise InvalidParameter("all Fock truncations must be >= 1")
        if self.mass_axis not in ("y", "z"):
            raise InvalidParameter("mass_axis must be 'y' or 'z'")

    @property
    def c(self) -> float:
        return 2 * self.eta * self.delta * self.omega_sb

    @property
    def rest_energy(self) -> float:
        return self.hbar * self.omega

    @property
    def mass(self) -> float:
        """m = mc^2 / c^2; infinite when eta = 0."""
        return self.rest_energy / self.c**2 if self.c > 0 else np.inf

    def truncations(self, n_modes: int) -> tuple[int, ...]:
        if len(self.n_max) == 1:
            return self.n_max * n_modes
        if len(self.n_max) != n_modes:
            raise InvalidParameter(f"need 1 or {n_modes} truncations, got {len(self.n_max)}")
        return self.n_max

    def space(self, internal_dim: int = 2, n_modes: int = 1) -> VibronicSpace:
        return VibronicSpace(internal_dim, self.truncations(n_modes))

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PotentialProfile:
    """uniform: V on both levels; linear: qE*x; smooth_step: V*logistic((x-x0)/w)."""

    kind: str = "uniform"
    magnitude: float = 0.0
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "linear", "smooth_step"):
            raise InvalidParameter(f"unknown potential profile {self.kind!r}")
        if self.kind == "smooth_step" and self.width <= 0:
            raise InvalidParameter("smooth_step width must be positive")


# -- elementary interactions -------------------------------------------------

def carrier(space: VibronicSpace, pair: Sequence[Level], omega: float, phase: float = 0.0,
            hbar: float = 1.0) -> Operator:
    """hbar*omega*(sigma+ e^{i phase} + sigma- e^{-i phase}) on ``pair``."""
    m = (np.exp(1j * phase) * transition_matrix(space, pair, "plus")
         + np.exp(-1j * phase) * transition_matrix(space, pair, "minus"))
    return internal_op(space, hbar * omega * m, hermitian=True)


def _sideband(space, pair, mode, coupling, phase, hbar, blue):
    n_max = space.mode_truncations[space.check_mode(mode)]
    a, a_dag = annihilation(n_max), creation(n_max)
    up = np.exp(1j * phase) * transition_matrix(space, pair, "plus")
    down = np.exp(-1j * phase) * transition_matrix(space, pair, "minus")
    first = embed(space, a_dag if blue else a, mode, internal=up)
    second = embed(space, a if blue else a_dag, mode, internal=down)
    h = (first + second) * (hbar * coupling)
    return Operator(space, h.matrix, hermitian=True)


def red_sideband(space: VibronicSpace, pair: Sequence[Level], mode: int, coupling: float,
                 phase: float = 0.0, hbar: float = 1.0) -> Operator:
    """Jaynes-Cummings term hbar*g*(sigma+ a e^{i phase} + sigma- a_dag e^{-i phase}), g = eta*omega_sb."""
    return _sideband(space, pair, mode, coupling, phase, hbar, blue=False)


def blue_sideband(space: VibronicSpace, pair: Sequence[Level], mode: int, coupling: float,
                  phase: float = 0.0, hbar: float = 1.0) -> Operator:
    """Anti-Jaynes-Cummings term hbar*g*(sigma+ a_dag e^{i phase} + sigma- a e^{-i phase})."""
    return _sideband(space, pair, mode, coupling, phase, hbar, blue=True)


# (red phase, blue phase) making red + blue = i*hbar*g*sigma_axis*(a_dag - a)
SIGMA_P_PHASES = {"x": (-np.pi / 2, np.pi / 2), "y": (np.pi, 0.0)}


def sigma_p_coupling(space: VibronicSpace, pair: Sequence[Level], mode: int, axis: str,
                     eta: float, omega_sb: float = 1.0, delta: float = 1.0, hbar: float = 1.0) -> Operator:
    """Simultaneous red + blue sideband drive, equal to 2*eta*delta*omega_sb * sigma_axis * p."""
    if axis not in SIGMA_P_PHASES:
        raise InvalidParameter(f"sigma.p coupling axis must be x or y, got {axis!r}")
    phi_r, phi_b = SIGMA_P_PHASES[axis]
    g = eta * omega_sb
    h = (red_sideband(space, pair, mode, g, phi_r, hbar)
         + blue_sideband(space, pair, mode, g, phi_b, hbar))
    return Operator(space, h.matrix, hermitian=True)


# -- Dirac Hamiltonians --------------------------------------------------------

def _mass_term(space: VibronicSpace, params: ModelParams) -> Operator:
    if params.mass_axis == "z":
        return pauli(space, ("a", "b"), "z") * params.rest_energy
    # carrier at phase -pi/2 is +sigma_y
    return carrier(space, ("a", "b"), params.omega, -np.pi / 2, params.hbar)


def dirac_1p1(params: ModelParams) -> Operator:
    """H = 2 eta delta omega_sb sigma_x p_x + hbar omega sigma_z (sigma_y if mass_axis='y')."""
    space = params.space(2, 1)
    h = sigma_p_coupling(space, ("a", "b"), 0, "x", params.eta, params.omega_sb, params.delta, params.hbar)
    return h + _mass_term(space, params)


def dirac_2p1(params: ModelParams, couple_y: bool = True) -> Operator:
    """H = c (sigma_x p_x + sigma_y p_y) + mc^2 sigma_z on two modes."""
    space = params.space(2, 2)
    h = sigma_p_coupling(space, ("a", "b"), 0, "x", params.eta, params.omega_sb, params.delta, params.hbar)
    if couple_y:
        h = h + sigma_p_coupling(space, ("a", "b"), 1, "y", params.eta, params.omega_sb,
                                 params.delta, params.hbar)
    return h + _mass_term(space, params)


# Each axis couples a sum/difference of two pair Paulis; the mass uses sigma_y on (a,c),(b,d).
_ALPHA_TERMS = {
    "x": ((("a", "d"), "x", +1), (("b", "c"), "x", +1)),
    "y": ((("a", "d"), "y", +1), (("b", "c"), "y", -1)),
    "z": ((("a", "c"), "x", +1), (("b", "d"), "x", -1)),
}


def alpha_matrix(space: VibronicSpace, axis: str) -> np.ndarray:
    """Internal 4x4 velocity matrix alpha_axis in the (a, b, c, d) encoding."""
    return sum(sign * transition_matrix(space, pair, kind) for pair, kind, sign in _ALPHA_TERMS[axis])


def beta_matrix(space: VibronicSpace) -> np.ndarray:
    return transition_matrix(space, ("a", "c"), "y") + transition_matrix(space, ("b", "d"), "y")


def dirac_3p1(params: ModelParams, axes: str = AXES) -> Operator:
    """Sum of sideband drives on four levels and three modes; ``axes`` selects coupled modes.

    Built term by term from red/blue sideband pairs and carriers, e.g. the x
    coupling is sigma^{ad}_x + sigma^{bc}_x acting with p_x.
    """
    space = params.space(4, 3)
    h = None
    for mode, axis in enumerate(AXES):
        if axis not in axes:
            continue
        for pair, kind, sign in _ALPHA_TERMS[axis]:
            term = sigma_p_coupling(space, pair, mode, kind, params.eta, params.omega_sb,
                                    params.delta, params.hbar) * sign
            h = term if h is None else h + term
    # carrier at phase -pi/2 is +sigma_y on each pair
    mass = (carrier(space, ("a", "c"), params.omega, -np.pi / 2, params.hbar)
            + carrier(space, ("b", "d"), params.omega, -np.pi / 2, params.hbar))
    h = mass if h is None else h + mass
    return Operator(space, h.matrix, hermitian=True)


def dirac_3p1_block(params: ModelParams, axes: str = AXES) -> Operator:
    """Same Hamiltonian assembled from the 2x2 block form [[0, c s.p - i mc^2], [c s.p + i mc^2, 0]]."""
    space = params.space(4, 3)
    sig = {
        "x": np.array([[0, 1], [1, 0]], dtype=complex),
        "y": np.array([[0, -1j], [1j, 0]]),
    }
    sig["z"] = np.diag([1.0 + 0j, -1.0])
    upper = np.array([[0, 1], [0, 0]])
    lower = upper.T
    h = None
    for mode, axis in enumerate(AXES):
        if axis not in axes:
            continue
        internal = np.kron(upper + lower, sig[axis])
        p = mode_op(space, "p", mode, params.delta, params.hbar)
        term = Operator(space, (internal_op(space, internal) @ p).matrix) * params.c
        h = term if h is None else h + term
    mass_internal = np.kron(-1j * upper + 1j * lower, np.eye(2))
    mass = internal_op(space, params.rest_energy * mass_internal)
    h = mass if h is None else h + mass
    return Operator(space, h.matrix, hermitian=True)


# -- potentials and limits ---------------------------------------------------

def logistic(u):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(u)))


def klein_hamiltonian(base: Operator, profile: PotentialProfile, params: ModelParams) -> Operator:
    """Add a potential to a two-level Dirac Hamiltonian (acts on motional mode 0)."""
    space = base.space
    if space.internal_dim != 2:
        raise SpaceMismatch("Klein potentials apply to two-level Dirac Hamiltonians")
    if profile.kind == "uniform":
        extra = identity(space) * profile.magnitude
    elif profile.kind == "linear":
        extra = mode_op(space, "x", 0, params.delta) * profile.magnitude
    else:
        x = position_op(space.mode_truncations[0], params.delta)
        evals, evecs = np.linalg.eigh(x.dense())
        s = (evecs * logistic((evals - profile.center) / profile.width)) @ evecs.conj().T
        step = Operator(x.space, 0.5 * (s + s.conj().T), hermitian=True)
        extra = embed(space, step, 0) * profile.magnitude
    if base.is_sparse != extra.is_sparse:
        extra = extra.as_backend(base.is_sparse)
    return Operator(space, (base + extra).matrix, hermitian=True)


def effective_squeeze(params: ModelParams) -> Operator:
    """Dispersive-limit Hamiltonian (2 eta^2 delta^2 omega_sb^2 / hbar omega) sigma_z p^2 = sigma_z p^2 / 2m."""
    if params.omega == 0:
        raise ZeroDivisionError("the nonrelativistic limit is undefined for a massless particle")
    space = params.space(2, 1)
    coeff = squeeze_coefficient(params)
    p = mode_op(space, "p", 0, params.delta, params.hbar)
    h = Operator(space, (pauli(space, ("a", "b"), "z") @ p @ p).matrix) * coeff
    return Operator(space, h.matrix, hermitian=True)


def squeeze_coefficient(params: ModelParams) -> float:
    return 2 * params.eta**2 * params.delta**2 * params.omega_sb**2 / (params.hbar * params.omega)
