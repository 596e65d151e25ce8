"""Initial-state constructors: internal basis states, |+-phi>, Fock, coherent,
squeezed and momentum-peaked wavepackets, and energy-sign decomposition."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, InvalidTruncation, NotHermitian, SpaceMismatch
from .fockspace import Level, Operator, StateVector, VibronicSpace, level_index, product_state

LEAKAGE_TOL = 1e-6
# unnormalized two-level sigma eigenspinors, named by sign and axis
SIGMA_EIGENSTATES = {"+x": (1, 1), "-x": (1, -1), "+y": (1, 1j), "-y": (1, -1j)}


@dataclass(frozen=True)
class WavepacketSpec:
    """Gaussian momentum wavepacket; ``sigma_p`` None means the ground-state spread hbar/(2 delta)."""

    p0: float = 0.0
    sigma_p: float | None = None
    internal: object = "a"

    def __post_init__(self):
        if self.sigma_p is not None and self.sigma_p <= 0:
            raise InvalidParameter("sigma_p must be positive")


def _vacuum(d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[0] = 1
    return v


def internal_spinor(space: VibronicSpace, internal) -> np.ndarray:
    """Level name/index, a sigma eigenstate name like "+x", or an explicit spinor."""
    if isinstance(internal, str) and internal in SIGMA_EIGENSTATES:
        if space.internal_dim != 2:
            raise SpaceMismatch(f"{internal!r} names a two-level spinor")
        return np.array(SIGMA_EIGENSTATES[internal], dtype=complex) / np.sqrt(2)
    if isinstance(internal, (str, int, np.integer)):
        v = np.zeros(space.internal_dim, dtype=complex)
        v[level_index(internal, space.internal_dim)] = 1
        return v
    v = np.asarray(internal, dtype=complex)
    if v.shape != (space.internal_dim,):
        raise SpaceMismatch(f"internal spinor shape {v.shape} for internal_dim={space.internal_dim}")
    return v / np.linalg.norm(v)


def _with_mode(space: VibronicSpace, internal, mode: int, amps: np.ndarray) -> StateVector:
    space.check_mode(mode)
    factors = [amps if k == mode else _vacuum(d) for k, d in enumerate(space.mode_dims)]
    return product_state(space, internal_spinor(space, internal), *factors)


def fock(space: VibronicSpace, n: int, mode: int = 0, internal: Level = "a") -> StateVector:
    """|internal> (x) |n> on ``mode``, other modes in vacuum."""
    n_max = space.mode_truncations[space.check_mode(mode)]
    if not 0 <= n <= n_max:
        raise InvalidTruncation(f"Fock state {n} outside 0..{n_max}")
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[n] = 1
    return _with_mode(space, internal, mode, amps)


def internal_basis(space: VibronicSpace, level: Level) -> StateVector:
    """|level> (x) motional vacuum."""
    return _with_mode(space, level, 0, _vacuum(space.mode_dims[0]))


def plus_phi(space: VibronicSpace, phi: float, sign: int = +1) -> np.ndarray:
    """Internal factor (|a> + sign e^{i phi} |b>)/sqrt(2)."""
    if space.internal_dim != 2:
        raise SpaceMismatch("|+-phi> states are defined on two internal levels")
    if sign not in (+1, -1):
        raise InvalidParameter("sign must be +1 or -1")
    return np.array([1, sign * np.exp(1j * phi)]) / np.sqrt(2)


def squeezed_coherent_amplitudes(n_max: int, alpha: complex, r: float = 0.0) -> tuple[np.ndarray, float]:
    """Fock amplitudes of D(alpha) S(r) |0>, truncated and renormalized.

    Squeeze convention: r > 0 squeezes momentum, Var(p) -> e^{-2r} Var_0(p).
    Displacement is applied last, so <a> = alpha exactly. Returns the
    amplitudes and the population that fell outside the truncation.

    The amplitudes solve (a cosh r - a_dag sinh r - gamma) psi = 0 with
    gamma = alpha cosh r - conj(alpha) sinh r, giving a three-term recurrence.
    """
    alpha = complex(alpha)
    ch, sh = np.cosh(r), np.sinh(r)
    gamma = alpha * ch - np.conj(alpha) * sh
    c = np.zeros(n_max + 1, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2 + 0.5 * np.conj(alpha) ** 2 * np.tanh(r)) / np.sqrt(ch)
    if n_max >= 1:
        c[1] = gamma * c[0] / ch
    for n in range(1, n_max):
        c[n + 1] = (gamma * c[n] + sh * np.sqrt(n) * c[n - 1]) / (ch * np.sqrt(n + 1))
    kept = float(np.sum(np.abs(c) ** 2))
    leak = max(0.0, 1.0 - kept)
    return c / np.sqrt(kept), leak


def _checked_amplitudes(n_max, alpha, r):
    amps, leak = squeezed_coherent_amplitudes(n_max, alpha, r)
    if leak > LEAKAGE_TOL:
        raise InvalidTruncation(f"state leaks {leak:.2e} of its population beyond n_max={n_max}")
    mean_n = abs(alpha) ** 2 + np.sinh(r) ** 2
    if mean_n > n_max / 4:
        warnings.warn(f"<n> = {mean_n:.2f} exceeds n_max/4 = {n_max / 4:.2f}", stacklevel=3)
    return amps


def coherent(space: VibronicSpace, mode: int, alpha: complex, internal=None) -> StateVector:
    return squeezed_coherent(space, mode, alpha, 0.0, internal)


def squeezed_coherent(space: VibronicSpace, mode: int, alpha: complex, r: float,
                      internal=None) -> StateVector:
    n_max = space.mode_truncations[space.check_mode(mode)]
    amps = _checked_amplitudes(n_max, alpha, r)
    return _with_mode(space, "a" if internal is None else internal, mode, amps)


def wavepacket_parameters(spec: WavepacketSpec, delta: float = 1.0, hbar: float = 1.0) -> tuple[complex, float]:
    """(alpha, r) realizing <p> = p0 and sqrt(Var p) = sigma_p."""
    ground = hbar / (2 * delta)
    sigma_p = ground if spec.sigma_p is None else spec.sigma_p
    return 1j * spec.p0 * delta / hbar, float(np.log(ground / sigma_p))


def momentum_wavepacket(space: VibronicSpace, spec: WavepacketSpec, mode: int = 0,
                        delta: float = 1.0, hbar: float = 1.0) -> StateVector:
    """Squeezed vacuum displaced in momentum: <x> = 0, <p> = p0, sqrt(Var p) = sigma_p."""
    alpha, r = wavepacket_parameters(spec, delta, hbar)
    return squeezed_coherent(space, mode, alpha, r, internal=spec.internal)


@dataclass(frozen=True)
class EnergyDecomposition:
    positive: StateVector
    negative: StateVector

    @property
    def weights(self) -> tuple[float, float]:
        return self.positive.norm() ** 2, self.negative.norm() ** 2


def energy_decompose(h: Operator, psi: StateVector, eig=None) -> EnergyDecomposition:
    """Split ``psi`` into its projections on the E >= 0 and E < 0 eigenspaces of ``h``.

    ``eig`` may pass a precomputed (evals, evecs) pair.
    """
    if h.space != psi.space:
        raise SpaceMismatch(f"{h.space} vs {psi.space}")
    if not (h.hermitian or h.is_hermitian()):
        raise NotHermitian("energy decomposition needs a hermitian Hamiltonian")
    evals, evecs = eig if eig is not None else np.linalg.eigh(h.dense())
    # eigenvalues within rounding of zero count as nonnegative
    scale = max(1.0, float(np.max(np.abs(evals))))
    neg = evals < -1e-12 * scale
    coeffs = evecs.conj().T @ psi.amplitudes
    minus = evecs[:, neg] @ coeffs[neg]
    plus = psi.amplitudes - minus
    return EnergyDecomposition(StateVector(psi.space, plus), StateVector(psi.space, minus))

