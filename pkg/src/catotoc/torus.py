"""
Kinematics of the quantized torus.

One degree of freedom lives on an N-dimensional space with hbar = 1/(2 pi N)
and zero Floquet angles. Position eigenstates |q_n> sit at q = n/N; the
momentum eigenstates are the columns of the unitary DFT kernel. Two tori are
composed with the flat index j = j1 * N2 + j2 (subsystem 1 is the slow index).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionMismatchError, InvalidDimensionError, NumericalConsistencyError

NORM_TOL = 1e-12

# Periodized Gaussian images kept on each side; the weight of |k| = 4 is ~exp(-16 pi N).
_COHERENT_IMAGES = 3


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TorusSpace:
    N: int
    chi_q: float = 0.0
    chi_p: float = 0.0

    @property
    def hbar(self) -> float:
        return 1.0 / (2.0 * np.pi * self.N)

    @property
    def dim(self) -> int:
        return self.N


@dataclass(frozen=True)
class BipartiteSpace:
    subsystem_1: TorusSpace
    subsystem_2: TorusSpace

    @property
    def dimension(self) -> int:
        return self.subsystem_1.N * self.subsystem_2.N

    dim = dimension

    @property
    def shape(self) -> tuple[int, int]:
        return self.subsystem_1.N, self.subsystem_2.N

    def subsystem(self, tag: str) -> TorusSpace:
        return self.subsystem_1 if _tag(tag) == "A" else self.subsystem_2


Space = Union[TorusSpace, BipartiteSpace]


def _tag(tag: str) -> str:
    t = str(tag).upper()
    if t in ("A", "1"):
        return "A"
    if t in ("B", "2"):
        return "B"
    raise ValueError(f"unknown subsystem tag {tag!r}; expected 'A' or 'B'")


@dataclass(frozen=True)
class PureState:
    """Normalized state vector in the position representation."""

    space: Space
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if psi.size != self.space.dim:
            raise DimensionMismatchError(
                f"state has {psi.size} amplitudes, space dimension is {self.space.dim}"
            )
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > NORM_TOL:
            raise NumericalConsistencyError(f"state norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", _frozen(psi))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (N1, N2) for a bipartite state."""
        if not isinstance(self.space, BipartiteSpace):
            raise DimensionMismatchError("as_matrix needs a bipartite state")
        return self.amplitudes.reshape(self.space.shape)


@dataclass(frozen=True)
class ReducedDensity:
    space: TorusSpace
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=np.complex128)
        N = self.space.N
        if rho.shape != (N, N):
            raise DimensionMismatchError(f"density has shape {rho.shape}, expected {(N, N)}")
        object.__setattr__(self, "entries", _frozen(rho))

    def purity(self) -> float:
        return purity_and_entropies(self)[0]


def make_space(N: int) -> TorusSpace:
    if int(N) != N or N < 2:
        raise InvalidDimensionError(f"torus dimension must be an integer >= 2, got {N!r}")
    return TorusSpace(int(N))


def make_bipartite(N1: int, N2: int | None = None) -> BipartiteSpace:
    return BipartiteSpace(make_space(N1), make_space(N1 if N2 is None else N2))


def periodic_delta(i: int, j: int, N: int) -> int:
    """N-periodic Kronecker delta."""
    return int((i - j) % N == 0)


def fourier_kernel(space: TorusSpace) -> np.ndarray:
    """Unitary DFT kernel, entry (m, n) = exp(2 pi i m n / N) / sqrt(N).

    Column m is the momentum eigenstate |p_m> in the position basis.
    """
    N = space.N
    mn = np.outer(np.arange(N), np.arange(N)) % N
    return np.exp(2j * np.pi * mn / N) / np.sqrt(N)


def position_state(space: TorusSpace, n: int) -> PureState:
    psi = np.zeros(space.N, dtype=np.complex128)
    psi[n % space.N] = 1.0
    return PureState(space, psi)


def momentum_state(space: TorusSpace, m: int) -> PureState:
    return PureState(space, fourier_kernel(space)[:, m % space.N])


def coherent_state(space: TorusSpace, q0: float, p0: float) -> PureState:
    """Periodized Gaussian centred at (q0, p0), width sqrt(hbar/2) in position."""
    N = space.N
    images = np.arange(-_COHERENT_IMAGES, _COHERENT_IMAGES + 1)
    x = np.arange(N)[:, None] / N - q0 - images[None, :]
    psi = np.exp(-np.pi * N * x**2 + 2j * np.pi * N * p0 * x).sum(axis=1)
    return PureState(space, psi / np.linalg.norm(psi))


def product_state(a: PureState, b: PureState) -> PureState:
    if not (isinstance(a.space, TorusSpace) and isinstance(b.space, TorusSpace)):
        raise DimensionMismatchError("product_state expects single-torus factors")
    psi = np.kron(a.amplitudes, b.amplitudes)
    return PureState(BipartiteSpace(a.space, b.space), psi / np.linalg.norm(psi))


def reduce(state: PureState, keep: str = "B") -> ReducedDensity:
    """Partial trace of a bipartite pure state, keeping subsystem ``keep``."""
    if not isinstance(state.space, BipartiteSpace):
        raise DimensionMismatchError("reduce expects a bipartite state")
    return ReducedDensity(state.space.subsystem(keep), reduced_matrix(state.as_matrix(), keep))


def reduced_matrix(psi: np.ndarray, keep: str = "B") -> np.ndarray:
    """Reduced density of the (N1, N2) amplitude matrix ``psi``."""
    if _tag(keep) == "A":
        rho = psi @ psi.conj().T
    else:
        rho = psi.T @ psi.conj()
    # exact Hermitian symmetrization; the products above agree to rounding only
    return 0.5 * (rho + rho.conj().T)


def purity_and_entropies(rho: ReducedDensity | np.ndarray) -> tuple[float, float, float]:
    """Return (Tr rho^2, linear entropy, second Renyi entropy)."""
    m = rho.entries if isinstance(rho, ReducedDensity) else np.asarray(rho)
    p = np.vdot(m.conj().T, m)  # Tr[m @ m] without forming the product
    if abs(p.imag) > 1e-12 or not (0.0 < p.real <= 1.0 + 1e-10):
        raise NumericalConsistencyError(f"purity {p!r} outside (0, 1]")
    purity = float(p.real)
    return purity, 1.0 - purity, float(-np.log(purity))
