"""
Perturbed cat maps: classical dynamics and quantum propagators.

A single degree of freedom evolves as (q, p) -> M (q, p + eps(q)) mod 1 with
eps(q) = -(K / 2 pi) sin(2 pi q). Two copies are coupled through a kick
depending on q1 + q2; quantum mechanically the coupling is a diagonal phase
in the joint position basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError, NotHyperbolicError, UnsupportedMapError
from .torus import BipartiteSpace, PureState, TorusSpace, _frozen

HYPERBOLIC = ((2, 1), (3, 2))
ELLIPTIC = ((0, 1), (-1, 0))

DEFAULT_K = 0.25
DEFAULT_KC = 0.5


@dataclass(frozen=True)
class CatMapSpec:
    M: tuple[tuple[int, int], tuple[int, int]]
    K: float = DEFAULT_K

    def __post_init__(self):
        M = tuple(tuple(int(x) for x in row) for row in self.M)
        if len(M) != 2 or any(len(row) != 2 for row in M):
            raise ValueError("cat map matrix must be 2x2")
        if M[0][0] * M[1][1] - M[0][1] * M[1][0] != 1:
            raise ValueError(f"cat map matrix {M} is not symplectic (det != 1)")
        object.__setattr__(self, "M", M)

    @property
    def trace(self) -> int:
        return self.M[0][0] + self.M[1][1]

    @property
    def is_hyperbolic(self) -> bool:
        return abs(self.trace) > 2

    @property
    def kind(self) -> str:
        if self.is_hyperbolic:
            return "hyperbolic"
        return "elliptic" if abs(self.trace) < 2 else "parabolic"


def hyperbolic(K: float = DEFAULT_K) -> CatMapSpec:
    return CatMapSpec(HYPERBOLIC, K)


def elliptic(K: float = DEFAULT_K) -> CatMapSpec:
    return CatMapSpec(ELLIPTIC, K)


@dataclass(frozen=True)
class CoupledMapSpec:
    map1: CatMapSpec
    map2: CatMapSpec
    Kc: float = DEFAULT_KC


@dataclass(frozen=True)
class ClassicalState:
    """Phase-space point; q and p hold one entry per degree of freedom."""

    q: tuple[float, ...]
    p: tuple[float, ...]

    def __post_init__(self):
        q = tuple(float(x) % 1.0 for x in np.atleast_1d(self.q))
        p = tuple(float(x) % 1.0 for x in np.atleast_1d(self.p))
        if len(q) != len(p):
            raise DimensionMismatchError("q and p must have the same length")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


def kick(K: float, q):
    return -(K / (2 * np.pi)) * np.sin(2 * np.pi * np.asarray(q))


def coupling_kick(Kc: float, q1, q2):
    return -(Kc / (2 * np.pi)) * np.sin(2 * np.pi * (np.asarray(q1) + np.asarray(q2)))


def _linear(M, q, p):
    return (M[0][0] * q + M[0][1] * p) % 1.0, (M[1][0] * q + M[1][1] * p) % 1.0


def classical_step(spec: CatMapSpec, s: ClassicalState) -> ClassicalState:
    q, p = np.array(s.q), np.array(s.p)
    return ClassicalState(*_linear(spec.M, q, p + kick(spec.K, q)))


def classical_coupled_step(spec: CoupledMapSpec, s: ClassicalState) -> ClassicalState:
    if len(s.q) != 2:
        raise DimensionMismatchError("coupled step needs a two-degree-of-freedom state")
    (q1, q2), (p1, p2) = s.q, s.p
    c = coupling_kick(spec.Kc, q1, q2)
    q1n, p1n = _linear(spec.map1.M, q1, p1 + kick(spec.map1.K, q1) + c)
    q2n, p2n = _linear(spec.map2.M, q2, p2 + kick(spec.map2.K, q2) + c)
    return ClassicalState((q1n, q2n), (p1n, p2n))


def classical_trajectory(spec, s: ClassicalState, steps: int) -> list[ClassicalState]:
    step = classical_coupled_step if isinstance(spec, CoupledMapSpec) else classical_step
    out = [s]
    for _ in range(steps):
        out.append(step(spec, out[-1]))
    return out


@dataclass(frozen=True)
class Propagator1D:
    space: TorusSpace
    U: np.ndarray = field(repr=False)


def quantum_propagator_1d(spec: CatMapSpec, space: TorusSpace) -> Propagator1D:
    (m11, m12), (_, m22) = spec.M
    if m12 == 0:
        raise UnsupportedMapError("propagator formula needs M12 != 0")
    N = space.N
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    A = np.sqrt(1.0 / (1j * N * m12))
    quad = np.pi / (N * m12) * (m11 * j * j - 2 * j * k + m22 * k * k)
    F = spec.K * N / (2 * np.pi) * np.cos(2 * np.pi * j / N)
    return Propagator1D(space, _frozen(A * np.exp(1j * (quad + F))))


def coupling_matrix(spec: CoupledMapSpec, space: BipartiteSpace) -> np.ndarray:
    """Diagonal coupling phases C[j1, j2] in the joint position basis."""
    N1, N2 = space.shape
    if N1 != N2:
        raise DimensionMismatchError("coupling needs equal subsystem dimensions")
    s = np.add.outer(np.arange(N1), np.arange(N2))
    return _frozen(np.exp(1j * N1 * spec.Kc / (2 * np.pi) * np.cos(2 * np.pi * s / N1)))


@dataclass(frozen=True)
class Propagator2D:
    """One step of the coupled map, kept in factored form.

    The dense (N1 N2) x (N1 N2) matrix is only built on access to ``U``; states
    are advanced as C * (U1 @ psi @ U2.T) on the (N1, N2) amplitude matrix.
    """

    space: BipartiteSpace
    U1: np.ndarray = field(repr=False)
    U2: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)

    @cached_property
    def U(self) -> np.ndarray:
        U = self.C.reshape(-1, 1) * np.kron(self.U1, self.U2)
        return _frozen(U)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Advance an (N1, N2) amplitude matrix by one step."""
        return self.C * (self.U1 @ psi @ self.U2.T)

    def apply_adjoint(self, psi: np.ndarray) -> np.ndarray:
        return self.U1.conj().T @ (self.C.conj() * psi) @ self.U2.conj()

    def step(self, state: PureState) -> PureState:
        if state.space != self.space:
            raise DimensionMismatchError("state and propagator live on different spaces")
        return PureState(self.space, self.apply(state.as_matrix()).ravel())


def quantum_propagator_2d(spec: CoupledMapSpec, space: BipartiteSpace) -> Propagator2D:
    N1, N2 = space.shape
    if N1 != N2:
        raise DimensionMismatchError(f"subsystem dimensions differ: {N1} != {N2}")
    U1 = quantum_propagator_1d(spec.map1, space.subsystem_1).U
    U2 = quantum_propagator_1d(spec.map2, space.subsystem_2).U
    return Propagator2D(space, U1, U2, coupling_matrix(spec, space))


def unstable_direction(M) -> np.ndarray:
    """Unit eigenvector of the expanding eigenvalue, in (q, p) order."""
    M = np.asarray(M, dtype=float)
    if abs(np.trace(M)) <= 2:
        raise NotHyperbolicError(f"matrix {M.tolist()} has |trace| <= 2")
    w, v = np.linalg.eig(M)
    vec = np.real(v[:, np.argmax(np.abs(w))])
    vec /= np.linalg.norm(vec)
    return vec if vec[0] > 0 or (vec[0] == 0 and vec[1] > 0) else -vec
