"""Truncated vibronic Hilbert space: internal levels tensored with Fock modes.

Index convention: the internal level is the slowest index, then the motional
modes in declared order (the last mode varies fastest). Every operator and
state in the package uses this layout.

The Fock cutoff is hard: ``a^dagger |n_max> = 0``. This keeps every
Hamiltonian exactly hermitian on the truncated space, at the price of
violating ``[a, a^dagger] = 1`` on the top level.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import InvalidPair, InvalidParameter, InvalidTruncation, NotHermitian, SpaceMismatch

LEVELS = "abcd"
HERMITIAN_TOL = 1e-12
SPARSE_DIM_THRESHOLD = 600

Level = Union[int, str]


def level_index(level: Level, internal_dim: int) -> int:
    if isinstance(level, str):
        if len(level) != 1 or level not in LEVELS:
            raise InvalidPair(f"unknown internal level {level!r}")
        idx = LEVELS.index(level)
    else:
        idx = int(level)
    if not 0 <= idx < internal_dim:
        raise InvalidPair(f"level {level!r} does not exist for internal_dim={internal_dim}")
    return idx


@dataclass(frozen=True)
class VibronicSpace:
    """Internal levels x motional Fock modes.

    ``internal_dim`` is 2 (1+1 and 2+1 spinors) or 4 (3+1 bispinor); 1 denotes
    a bare oscillator, used for single-mode operators before embedding.
    """

    internal_dim: int
    mode_truncations: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mode_truncations", tuple(int(n) for n in self.mode_truncations))
        if self.internal_dim not in (1, 2, 4):
            raise InvalidParameter(f"internal_dim must be 1, 2 or 4, got {self.internal_dim}")
        if not 1 <= len(self.mode_truncations) <= 3:
            raise InvalidParameter("between one and three motional modes are supported")
        for n in self.mode_truncations:
            if n < 1:
                raise InvalidTruncation(f"n_max must be >= 1, got {n}")

    @classmethod
    def oscillator(cls, n_max: int) -> "VibronicSpace":
        return cls(1, (n_max,))

    @property
    def n_modes(self) -> int:
        return len(self.mode_truncations)

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.mode_truncations)

    @property
    def motional_dim(self) -> int:
        return int(np.prod(self.mode_dims))

    @property
    def dim(self) -> int:
        return self.internal_dim * self.motional_dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.internal_dim, *self.mode_dims)

    @property
    def prefers_sparse(self) -> bool:
        return self.dim > SPARSE_DIM_THRESHOLD

    def index(self, level: Level, *ns: int) -> int:
        if len(ns) != self.n_modes:
            raise InvalidTruncation(f"expected {self.n_modes} Fock indices, got {len(ns)}")
        for n, n_max in zip(ns, self.mode_truncations):
            if not 0 <= n <= n_max:
                raise InvalidTruncation(f"Fock index {n} outside 0..{n_max}")
        return int(np.ravel_multi_index((level_index(level, self.internal_dim), *ns), self.shape))

    def check_mode(self, mode: int) -> int:
        if not 0 <= mode < self.n_modes:
            raise InvalidParameter(f"mode {mode} out of range for {self.n_modes} mode(s)")
        return mode


def _matrix_close(a, b, atol: float) -> bool:
    diff = a - b
    if sp.issparse(diff):
        return diff.nnz == 0 or float(abs(diff).max()) <= atol
    return float(np.max(np.abs(diff), initial=0.0)) <= atol


@dataclass(frozen=True, eq=False)
class Operator:
    """Square matrix on a :class:`VibronicSpace`.

    ``hermitian`` is True, False, or None (unchecked). Claiming True is
    verified at construction against ``HERMITIAN_TOL``.
    """

    space: VibronicSpace
    matrix: Union[np.ndarray, sp.spmatrix]
    hermitian: bool | None = None

    def __post_init__(self):
        m = self.matrix
        if sp.issparse(m):
            m = sp.csr_matrix(m, dtype=complex)
        else:
            m = np.asarray(m, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatch(f"matrix shape {m.shape} does not match space dimension {self.space.dim}")
        object.__setattr__(self, "matrix", m)
        if self.hermitian and not _matrix_close(m, m.conj().T, HERMITIAN_TOL):
            raise NotHermitian("operator flagged hermitian fails max|M - M^dagger| <= 1e-12")

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else self.matrix

    def sparse(self) -> sp.csr_matrix:
        return self.matrix if self.is_sparse else sp.csr_matrix(self.matrix)

    def as_backend(self, sparse: bool) -> "Operator":
        if sparse == self.is_sparse:
            return self
        return Operator(self.space, self.sparse() if sparse else self.dense(), self.hermitian)

    def is_hermitian(self, atol: float = HERMITIAN_TOL) -> bool:
        return _matrix_close(self.matrix, self.matrix.conj().T, atol)

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T, self.hermitian)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def _check(self, other: "Operator"):
        if other.space != self.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")

    def _combine(self, other: "Operator", sign: int) -> "Operator":
        self._check(other)
        a, b = self.matrix, other.matrix
        if sp.issparse(a) != sp.issparse(b):
            a, b = (sp.csr_matrix(a), sp.csr_matrix(b)) if self.space.prefers_sparse else (
                _todense(a), _todense(b))
        herm = True if (self.hermitian and other.hermitian) else None
        return Operator(self.space, a + sign * b, herm)

    def __add__(self, other: "Operator") -> "Operator":
        return self._combine(other, +1)

    def __sub__(self, other: "Operator") -> "Operator":
        return self._combine(other, -1)

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix, self.hermitian)

    def __mul__(self, scalar) -> "Operator":
        scalar = complex(scalar)
        herm = self.hermitian if scalar.imag == 0 else None
        return Operator(self.space, scalar * self.matrix, herm)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            a, b = self.matrix, other.matrix
            return Operator(self.space, a @ b, None)
        if isinstance(other, StateVector):
            return StateVector(self.space, self.apply(other.amplitudes))
        return self.matrix @ other

    def commutator(self, other: "Operator") -> "Operator":
        return self @ other - other @ self

    def anticommutator(self, other: "Operator") -> "Operator":
        return self @ other + other @ self


def _todense(m):
    return m.toarray() if sp.issparse(m) else m


@dataclass(frozen=True, eq=False)
class StateVector:
    space: VibronicSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (self.space.dim,):
            raise SpaceMismatch(f"amplitude length {amps.size} does not match dimension {self.space.dim}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to (internal, n_0, n_1, ...)."""
        return self.amplitudes.reshape(self.space.shape)

    def __add__(self, other: "StateVector") -> "StateVector":
        _same_space(self, other)
        return StateVector(self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _same_space(self, other)
        return StateVector(self.space, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "StateVector":
        return StateVector(self.space, complex(scalar) * self.amplitudes)

    __rmul__ = __mul__


def _same_space(x, y):
    if x.space != y.space:
        raise SpaceMismatch(f"{x.space} vs {y.space}")


# -- single-mode operators ---------------------------------------------------

def annihilation(n_max: int) -> Operator:
    if n_max < 1:
        raise InvalidTruncation(f"n_max must be >= 1, got {n_max}")
    return Operator(VibronicSpace.oscillator(n_max), np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1), False)


def creation(n_max: int) -> Operator:
    return annihilation(n_max).dag()


def number_op(n_max: int) -> Operator:
    space = VibronicSpace.oscillator(n_max)
    return Operator(space, np.diag(np.arange(n_max + 1, dtype=float)), True)


def position_op(n_max: int, delta: float = 1.0) -> Operator:
    """x = delta (a + a^dagger)."""
    if delta <= 0:
        raise InvalidParameter("zero-point spread must be positive")
    a = annihilation(n_max).matrix
    return Operator(VibronicSpace.oscillator(n_max), delta * (a + a.T), True)


def momentum_op(n_max: int, delta: float = 1.0, hbar: float = 1.0) -> Operator:
    """p = i hbar (a^dagger - a) / (2 delta)."""
    if delta <= 0 or hbar <= 0:
        raise InvalidParameter("zero-point spread and hbar must be positive")
    a = annihilation(n_max).matrix
    return Operator(VibronicSpace.oscillator(n_max), 1j * hbar * (a.T - a) / (2 * delta), True)


# -- embedding into the full space -------------------------------------------

def _kron_all(factors, sparse: bool):
    if sparse:
        return reduce(lambda x, y: sp.kron(x, y, format="csr"), factors)
    return reduce(np.kron, factors)


def embed(space: VibronicSpace, op: Operator, mode: int, internal=None) -> Operator:
    """Tensor a single-mode operator into ``space`` at position ``mode``.

    ``internal`` optionally supplies the internal-level factor (identity by
    default), so ``embed(space, a, 0, sigma)`` builds ``sigma (x) a``.
    """
    space.check_mode(mode)
    if op.space.internal_dim != 1 or op.space.dim != space.mode_dims[mode]:
        raise SpaceMismatch(f"single-mode operator of dimension {op.space.dim} does not fit mode {mode} "
                            f"(dimension {space.mode_dims[mode]})")
    sparse = space.prefers_sparse
    eye = sp.identity if sparse else np.eye
    internal_factor = eye(space.internal_dim) if internal is None else internal
    if sparse:
        internal_factor = sp.csr_matrix(internal_factor)
    factors = [internal_factor]
    for k, d in enumerate(space.mode_dims):
        factors.append((op.sparse() if sparse else op.dense()) if k == mode else eye(d))
    herm = op.hermitian if internal is None else None
    return Operator(space, _kron_all(factors, sparse), herm)


def identity(space: VibronicSpace) -> Operator:
    m = sp.identity(space.dim, dtype=complex, format="csr") if space.prefers_sparse else np.eye(space.dim)
    return Operator(space, m, True)


def internal_op(space: VibronicSpace, matrix: np.ndarray, hermitian: bool | None = None) -> Operator:
    """An internal-level matrix tensored with the motional identity."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (space.internal_dim, space.internal_dim):
        raise SpaceMismatch(f"internal matrix shape {matrix.shape} for internal_dim={space.internal_dim}")
    if space.prefers_sparse:
        m = sp.kron(sp.csr_matrix(matrix), sp.identity(space.motional_dim), format="csr")
    else:
        m = np.kron(matrix, np.eye(space.motional_dim))
    return Operator(space, m, hermitian)


def mode_op(space: VibronicSpace, kind: str, mode: int = 0, delta: float = 1.0, hbar: float = 1.0) -> Operator:
    """Shorthand for embedded a, a_dag, n, x or p on one mode."""
    n_max = space.mode_truncations[space.check_mode(mode)]
    builders = {
        "a": lambda: annihilation(n_max),
        "a_dag": lambda: creation(n_max),
        "n": lambda: number_op(n_max),
        "x": lambda: position_op(n_max, delta),
        "p": lambda: momentum_op(n_max, delta, hbar),
    }
    if kind not in builders:
        raise InvalidParameter(f"unknown mode operator {kind!r}")
    return embed(space, builders[kind](), mode)


def _pair(space: VibronicSpace, pair: Sequence[Level]) -> tuple[int, int]:
    if len(pair) != 2:
        raise InvalidPair("a level pair needs exactly two levels")
    i, j = (level_index(p, space.internal_dim) for p in pair)
    if i == j:
        raise InvalidPair("pair levels must differ")
    return i, j


def transition_matrix(space: VibronicSpace, pair: Sequence[Level], kind: str) -> np.ndarray:
    """Internal-level matrix for a two-level operator on ``pair`` = (upper, lower).

    kind is one of x, y, z, plus (|upper><lower|), minus, or proj (projector
    onto the pair).
    """
    i, j = _pair(space, pair)
    m = np.zeros((space.internal_dim, space.internal_dim), dtype=complex)
    if kind == "x":
        m[i, j] = m[j, i] = 1
    elif kind == "y":
        m[i, j], m[j, i] = -1j, 1j
    elif kind == "z":
        m[i, i], m[j, j] = 1, -1
    elif kind == "plus":
        m[i, j] = 1
    elif kind == "minus":
        m[j, i] = 1
    elif kind == "proj":
        m[i, i] = m[j, j] = 1
    else:
        raise InvalidParameter(f"unknown two-level operator {kind!r}")
    return m


def pauli(space: VibronicSpace, pair: Sequence[Level], axis: str) -> Operator:
    """Pauli matrix on one level pair, zero on the other levels, identity on motion.

    The first level of ``pair`` is the upper (+1 of sigma_z) state.
    """
    if axis not in ("x", "y", "z"):
        raise InvalidParameter(f"axis must be x, y or z, got {axis!r}")
    return internal_op(space, transition_matrix(space, pair, axis), hermitian=True)


def projector(space: VibronicSpace, level: Level) -> Operator:
    k = level_index(level, space.internal_dim)
    m = np.zeros((space.internal_dim, space.internal_dim))
    m[k, k] = 1
    return internal_op(space, m, hermitian=True)


# -- state algebra -----------------------------------------------------------

def inner(psi: StateVector, chi: StateVector) -> complex:
    """<psi|chi>, conjugate-linear in the first argument."""
    _same_space(psi, chi)
    return complex(np.vdot(psi.amplitudes, chi.amplitudes))


def expect(op: Operator, psi: StateVector) -> complex:
    if op.space != psi.space:
        raise SpaceMismatch(f"{op.space} vs {psi.space}")
    value = complex(np.vdot(psi.amplitudes, op.apply(psi.amplitudes)))
    if op.hermitian and abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise NotHermitian(f"expectation of a hermitian operator has imaginary part {value.imag:.3e}")
    return value


def normalize(psi: StateVector) -> StateVector:
    nrm = psi.norm()
    if nrm == 0:
        raise InvalidParameter("cannot normalize the zero vector")
    return StateVector(psi.space, psi.amplitudes / nrm)


def product_state(space: VibronicSpace, internal: np.ndarray, *mode_states: np.ndarray) -> StateVector:
    """Tensor an internal spinor with one amplitude vector per mode."""
    internal = np.asarray(internal, dtype=complex)
    if internal.shape != (space.internal_dim,):
        raise SpaceMismatch(f"internal factor has shape {internal.shape}")
    if len(mode_states) != space.n_modes:
        raise SpaceMismatch(f"need {space.n_modes} mode factor(s), got {len(mode_states)}")
    factors = [internal]
    for vec, d in zip(mode_states, space.mode_dims):
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (d,):
            raise SpaceMismatch(f"mode factor of length {vec.size} for mode dimension {d}")
        factors.append(vec)
    return StateVector(space, reduce(np.kron, factors))


def top_level_population(psi: StateVector, levels: int = 2) -> np.ndarray:
    """Population in the top ``levels`` Fock states of each mode (one entry per mode)."""
    probs = np.abs(psi.tensor()) ** 2
    out = []
    for k, d in enumerate(psi.space.mode_dims):
        axes = tuple(ax for ax in range(probs.ndim) if ax != k + 1)
        marginal = probs.sum(axis=axes)
        out.append(float(marginal[max(0, d - levels):].sum()))
    return np.array(out)
