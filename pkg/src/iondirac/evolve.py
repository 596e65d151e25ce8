"""Exact propagation under piecewise-constant Hamiltonians.

Two backends: a dense spectral propagator (one eigendecomposition per
Hamiltonian, reused for every time) and a matrix-free Lanczos propagator for
the large sparse 3+1 spaces. Samples are always taken on exactly propagated
states; nothing is interpolated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, InvalidParameter, NotHermitian, SpaceMismatch
from .fockspace import Operator, StateVector, expect, top_level_population

DEFAULT_KRYLOV_DIM = 30
LEAKAGE_TOL = 1e-6

Observable = Union[Operator, Callable[[StateVector], complex]]


@dataclass(frozen=True)
class Schedule:
    """Ordered (Hamiltonian, duration) segments sharing one space."""

    segments: tuple[tuple[Operator, float], ...]

    def __post_init__(self):
        segs = tuple((h, float(d)) for h, d in self.segments)
        if not segs:
            raise InvalidParameter("a schedule needs at least one segment")
        space = segs[0][0].space
        for h, d in segs:
            if d <= 0:
                raise InvalidParameter("segment durations must be positive")
            if h.space != space:
                raise SpaceMismatch("all schedule segments must share one space")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def single(cls, h: Operator, duration: float) -> "Schedule":
        return cls(((h, duration),))

    @property
    def space(self):
        return self.segments[0][0].space

    @property
    def total_duration(self) -> float:
        return float(sum(d for _, d in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([d for _, d in self.segments])])


@dataclass
class TimeSeries:
    times: np.ndarray
    samples: dict[str, np.ndarray]
    leakage: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.leakage = np.asarray(self.leakage, dtype=float)
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise InvalidParameter("sample times must be strictly increasing")
        for name, values in self.samples.items():
            if len(values) != self.times.size:
                raise InvalidParameter(f"series {name!r} has {len(values)} values for {self.times.size} times")

    def __getitem__(self, key: str) -> np.ndarray:
        return self.samples[key]

    @property
    def max_leakage(self) -> float:
        return float(self.leakage.max(initial=0.0))

    def trusted(self, tol: float = LEAKAGE_TOL) -> bool:
        return self.max_leakage <= tol


# -- propagators -----------------------------------------------------------------

def _require_hermitian(h: Operator):
    if not (h.hermitian or h.is_hermitian()):
        raise NotHermitian("propagation requires a hermitian Hamiltonian")


class SpectralPropagator:
    """exp(-i H t / hbar) from a single hermitian eigendecomposition."""

    def __init__(self, h: Operator, hbar: float = 1.0):
        _require_hermitian(h)
        self.space = h.space
        self.hbar = hbar
        self.evals, self.evecs = np.linalg.eigh(h.dense())

    def matrix(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.evals * t / self.hbar)
        return (self.evecs * phases) @ self.evecs.conj().T

    def evolve(self, psi: StateVector, t: float) -> StateVector:
        coeffs = self.evecs.conj().T @ psi.amplitudes
        return StateVector(self.space, self.evecs @ (np.exp(-1j * self.evals * t / self.hbar) * coeffs))


def spectral_propagator(h: Operator, t: float, hbar: float = 1.0) -> Operator:
    u = SpectralPropagator(h, hbar).matrix(t)
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > 1e-10:
        raise ConvergenceError(f"propagator fails unitarity by {err:.2e}")
    return Operator(h.space, u, hermitian=None)


def _lanczos(matvec, v0: np.ndarray, m: int):
    """m-step Lanczos with full reorthogonalization. Returns (V, alpha, beta, beta_next)."""
    n = v0.size
    m = min(m, n)
    basis = np.zeros((m, n), dtype=complex)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    basis[0] = v0
    for j in range(m):
        w = matvec(basis[j])
        alpha[j] = np.vdot(basis[j], w).real
        w = w - alpha[j] * basis[j]
        if j > 0:
            w = w - beta[j - 1] * basis[j - 1]
        w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
        b = np.linalg.norm(w)
        if j + 1 == m:
            return basis, alpha, beta[: m - 1], b
        if b < 1e-13:
            # invariant subspace: the projection is exact
            return basis[: j + 1], alpha[: j + 1], beta[:j], 0.0
        beta[j] = b
        basis[j + 1] = w / b
    raise AssertionError("unreachable")


def krylov_evolve(h: Operator, psi: StateVector, t: float, tol: float = 1e-10,
                  krylov_dim: int = DEFAULT_KRYLOV_DIM, max_substeps: int = 100_000,
                  hbar: float = 1.0) -> StateVector:
    """Lanczos propagation with adaptive time substeps.

    Each substep builds a ``krylov_dim`` subspace, and shrinks the step until
    the standard residual estimate beta_m |e_m^T exp(-i T dt) e_1| is below
    the error budget tol * |dt| / |t|.
    """
    _require_hermitian(h)
    if h.space != psi.space:
        raise SpaceMismatch(f"{h.space} vs {psi.space}")
    v = psi.amplitudes.copy()
    if t == 0:
        return StateVector(psi.space, v)
    matvec = h.apply
    direction = np.sign(t)
    remaining = abs(t)
    step = remaining
    for _ in range(max_substeps):
        if remaining <= 0:
            return StateVector(psi.space, v)
        norm = np.linalg.norm(v)
        if norm == 0:
            return StateVector(psi.space, v)
        basis, alpha, beta, beta_next = _lanczos(matvec, v / norm, krylov_dim)
        if alpha.size == 1:
            theta, vecs = alpha, np.ones((1, 1))
        else:
            theta, vecs = eigh_tridiagonal(alpha, beta)
        step = min(step, remaining)
        while True:
            small = vecs @ (np.exp(-1j * direction * theta * step / hbar) * vecs[0].conj())
            err = beta_next * abs(small[-1]) * norm
            if err <= tol * step / abs(t) or step < 1e-14 * abs(t):
                break
            step *= 0.5
        if err > tol * step / abs(t):
            raise ConvergenceError(f"Krylov step could not reach tolerance {tol:g}")
        v = norm * (basis.T @ small)
        remaining -= step
        if remaining < 1e-15 * abs(t):
            remaining = 0.0
        step *= 2
    raise ConvergenceError(f"Krylov propagation exceeded {max_substeps} substeps")


def evolve_state(h: Operator, psi: StateVector, t: float, backend: str = "auto", hbar: float = 1.0,
                 **kw) -> StateVector:
    if _resolve_backend(backend, h) == "krylov":
        return krylov_evolve(h, psi, t, hbar=hbar, **kw)
    return SpectralPropagator(h, hbar).evolve(psi, t)


def _resolve_backend(backend: str, h: Operator) -> str:
    if backend not in ("dense", "krylov", "auto"):
        raise InvalidParameter(f"unknown backend {backend!r}")
    if backend == "auto":
        return "krylov" if h.space.prefers_sparse else "dense"
    return backend


# -- schedule runner -----------------------------------------------------------

def _measure(observables: Mapping[str, Observable], psi: StateVector) -> dict[str, complex]:
    out = {}
    for name, obs in observables.items():
        out[name] = expect(obs, psi) if isinstance(obs, Operator) else complex(obs(psi))
    return out


def norm_observable(psi: StateVector) -> float:
    return psi.norm()


def run(schedule: Schedule, psi0: StateVector, sample_times: Sequence[float],
        observables: Mapping[str, Observable] | None = None, backend: str = "auto",
        leakage_tol: float = LEAKAGE_TOL, krylov_tol: float = 1e-10, metadata: dict | None = None,
        keep_states: bool = False, hbar: float = 1.0) -> TimeSeries:
    """Sample named expectation values along a piecewise-constant schedule.

    A sample exactly at a segment boundary sees the state at the switch. With
    ``keep_states`` the propagated states are stored in ``metadata['states']``.
    """
    observables = dict(observables or {})
    if psi0.space != schedule.space:
        raise SpaceMismatch("initial state and schedule live on different spaces")
    times = np.asarray(sample_times, dtype=float)
    total = schedule.total_duration
    if times.size and (times[0] < 0 or times[-1] > total * (1 + 1e-12)):
        raise InvalidParameter(f"sample times must lie in [0, {total}]")
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise InvalidParameter("sample times must be strictly increasing")

    bounds = schedule.boundaries
    raw = {name: [] for name in observables}
    leakage, states = [], []
    start_state, k = psi0, 0
    for seg_index, (h, duration) in enumerate(schedule.segments):
        t_start, t_end = bounds[seg_index], bounds[seg_index + 1]
        last = seg_index == len(schedule.segments) - 1
        mode = _resolve_backend(backend, h)
        prop = SpectralPropagator(h, hbar) if mode == "dense" else None
        seg_start = start_state

        def advance(state, t_from, t_to):
            # dense: always from the segment start, so sampling never accumulates error
            if prop is not None:
                return prop.evolve(seg_start, t_to - t_start)
            return krylov_evolve(h, state, t_to - t_from, tol=krylov_tol, hbar=hbar)

        current, t_current = seg_start, t_start
        while k < times.size and (times[k] <= t_end or last):
            current = advance(current, t_current, times[k])
            t_current = times[k]
            for name, value in _measure(observables, current).items():
                raw[name].append(value)
            leakage.append(float(top_level_population(current).max()))
            if keep_states:
                states.append(current)
            k += 1
        start_state = advance(current, t_current, t_end)

    samples = {}
    for name, values in raw.items():
        arr = np.array(values, dtype=complex)
        samples[name] = arr.real.copy() if np.all(np.abs(arr.imag) <= 1e-10) else arr
    meta = dict(metadata or {})
    meta.setdefault("backend", backend)
    if keep_states:
        meta["states"] = states
    series = TimeSeries(times, samples, np.array(leakage), meta)
    series.metadata["trusted"] = series.trusted(leakage_tol)
    return series
