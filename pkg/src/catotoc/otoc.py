"""
OTOC time series for coupled cat maps.

For a basis element M acting on the observed subsystem,

    C_M(t) = Tr[M(t) rho0 M(t)^dag rho0],   M(t) = U^-t (1 x M) U^t.

Summed over a complete orthonormal basis this gives Tr[rho_other(t)^2], so
1 - sum_M C_M(t) is the linear entropy of the unobserved subsystem. For a pure
initial state the trace factorizes, C_M(t) = |Tr[rho_obs(t) M]|^2, which is
what ``otoc_re_series`` evaluates. ``otoc_direct`` keeps the definition with
explicit Heisenberg evolution as an independent small-N check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import maps
from .bases import BasisElement, OperatorBasis, translation_operator
from .errors import DimensionMismatchError, NumericalConsistencyError
from .torus import (
    BipartiteSpace,
    PureState,
    ReducedDensity,
    _frozen,
    _tag,
    coherent_state,
    fourier_kernel,
    make_bipartite,
    product_state,
    reduced_matrix,
)

THEOREM_TOL = 1e-9
THEOREM_HARD_FAIL = 1e-6
IMAG_TOL = 1e-8

DEFAULT_N = 64
_OFF_CENTER = math.pi / 4 % 1.0


@dataclass(frozen=True)
class Scenario:
    name: str
    coupled: maps.CoupledMapSpec
    space: BipartiteSpace
    initial: tuple[tuple[float, float], tuple[float, float]]
    observed: str = "B"
    basis_kind: str = "translation"
    t_max: int = 40

    def __post_init__(self):
        object.__setattr__(self, "observed", _tag(self.observed))
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")

    @property
    def N(self) -> int:
        return self.space.subsystem_1.N

    @property
    def observed_space(self):
        return self.space.subsystem(self.observed)

    @property
    def observed_map(self) -> maps.CatMapSpec:
        return self.coupled.map1 if self.observed == "A" else self.coupled.map2

    def propagator(self) -> maps.Propagator2D:
        return maps.quantum_propagator_2d(self.coupled, self.space)

    def initial_state(self) -> PureState:
        (q1, p1), (q2, p2) = self.initial
        return product_state(
            coherent_state(self.space.subsystem_1, q1, p1),
            coherent_state(self.space.subsystem_2, q2, p2),
        )


# name -> (map on subsystem 1, map on subsystem 2, coherent-state centre)
# The basis always acts on subsystem 2: HE observes the elliptic factor,
# EH the hyperbolic one.
PRESETS = {
    "HH": ("hyperbolic", "hyperbolic", (0.5, 0.5)),
    "HE": ("hyperbolic", "elliptic", (0.5, 0.5)),
    "EH": ("elliptic", "hyperbolic", (0.5, 0.5)),
    "EE-fixed": ("elliptic", "elliptic", (0.5, 0.5)),
    "EE-offcenter": ("elliptic", "elliptic", (_OFF_CENTER, _OFF_CENTER)),
}

_MAP_FACTORY = {"hyperbolic": maps.hyperbolic, "elliptic": maps.elliptic}


def make_scenario(
    name: str,
    N: int = DEFAULT_N,
    basis_kind: str = "translation",
    t_max: int = 40,
    K: float = maps.DEFAULT_K,
    Kc: float = maps.DEFAULT_KC,
) -> Scenario:
    try:
        m1, m2, centre = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    coupled = maps.CoupledMapSpec(_MAP_FACTORY[m1](K), _MAP_FACTORY[m2](K), Kc)
    return Scenario(name, coupled, make_bipartite(N), (centre, centre), "B", basis_kind, t_max)


@dataclass(frozen=True)
class OtocSeries:
    labels: tuple
    values: np.ndarray = field(repr=False)  # (n_elements, t_max + 1)

    @property
    def t_max(self) -> int:
        return self.values.shape[1] - 1

    def totals(self) -> np.ndarray:
        return self.values.sum(axis=0)


@dataclass(frozen=True)
class EntropySeries:
    S_L: np.ndarray
    S2: np.ndarray
    purity: np.ndarray

    @property
    def t_max(self) -> int:
        return len(self.S_L) - 1


@dataclass(frozen=True)
class PhaseSpaceRep:
    hbar: float
    chord: np.ndarray | None = field(default=None, repr=False)
    chord_minus: np.ndarray | None = field(default=None, repr=False)
    wigner: np.ndarray | None = field(default=None, repr=False)


def evolve_state(U: maps.Propagator2D, psi0: PureState, t: int) -> PureState:
    if psi0.space != U.space:
        raise DimensionMismatchError("state and propagator live on different spaces")
    if t < 0:
        raise ValueError("t must be >= 0")
    psi = psi0.as_matrix()
    for _ in range(t):
        psi = U.apply(psi)
    return PureState(U.space, psi.ravel())


def trajectory(U: maps.Propagator2D, psi0: PureState, t_max: int) -> Iterator[np.ndarray]:
    """Yield the (N1, N2) amplitude matrices for t = 0..t_max."""
    psi = psi0.as_matrix()
    yield psi
    for _ in range(t_max):
        psi = U.apply(psi)
        yield psi


def embed(M: np.ndarray, space: BipartiteSpace, observed: str = "B") -> np.ndarray:
    N1, N2 = space.shape
    if _tag(observed) == "A":
        return np.kron(M, np.eye(N2))
    return np.kron(np.eye(N1), M)


def heisenberg(U: maps.Propagator2D, op: np.ndarray, t: int) -> np.ndarray:
    """(U^dag)^t op U^t by explicit dense products."""
    Ud = U.U
    out = op
    for _ in range(t):
        out = Ud.conj().T @ out @ Ud
    return out


def otoc_direct(M, U: maps.Propagator2D, rho0, t: int, observed: str = "B") -> float:
    """C_M(t) from the definition; ``rho0`` is a PureState or a density matrix."""
    mat = M.matrix if isinstance(M, BasisElement) else np.asarray(M)
    if isinstance(rho0, PureState):
        rho0 = np.outer(rho0.amplitudes, rho0.amplitudes.conj())
    rho0 = np.asarray(rho0)
    D = U.space.dimension
    if rho0.shape != (D, D):
        raise DimensionMismatchError(f"rho0 has shape {rho0.shape}, expected {(D, D)}")
    Mt = heisenberg(U, embed(mat, U.space, observed), t)
    val = np.trace(Mt @ rho0 @ Mt.conj().T @ rho0)
    if abs(val.imag) > IMAG_TOL:
        raise NumericalConsistencyError(f"OTOC has imaginary part {val.imag:.3e}")
    return float(val.real)


def otoc_fast_pure(M, rhoB_t) -> float:
    """|Tr[rho M]|**2, valid when the global state is pure."""
    mat = M.matrix if isinstance(M, BasisElement) else np.asarray(M)
    rho = rhoB_t.entries if isinstance(rhoB_t, ReducedDensity) else np.asarray(rhoB_t)
    return float(abs(np.vdot(mat.conj().T, rho)) ** 2)


def otoc_re_series(
    scenario: Scenario,
    basis: OperatorBasis,
    propagator: maps.Propagator2D | None = None,
) -> tuple[OtocSeries, EntropySeries]:
    if basis.space != scenario.observed_space:
        raise DimensionMismatchError("basis does not act on the observed subsystem")
    U = propagator or scenario.propagator()
    obs = scenario.observed
    other = "A" if obs == "B" else "B"
    T = scenario.t_max + 1
    values = np.empty((len(basis), T))
    purity = np.empty(T)
    for t, psi in enumerate(trajectory(U, scenario.initial_state(), scenario.t_max)):
        rho_obs = reduced_matrix(psi, obs)
        rho_other = reduced_matrix(psi, other)
        values[:, t] = np.abs(basis.expectations(rho_obs)) ** 2
        purity[t] = np.vdot(rho_other.conj().T, rho_other).real

    residual = np.abs((1.0 - values.sum(axis=0)) - (1.0 - purity))
    if residual.max() > THEOREM_HARD_FAIL:
        raise NumericalConsistencyError(
            f"OTOC sum misses the linear entropy by {residual.max():.3e}; basis not normalized?"
        )
    entropy = EntropySeries(_frozen(1.0 - purity), _frozen(-np.log(purity)), _frozen(purity))
    return OtocSeries(basis.labels, _frozen(values)), entropy


def theorem_residuals(series: OtocSeries, entropy: EntropySeries) -> np.ndarray:
    """|(1 - sum_M C_M(t)) - S_L(t)| for each t."""
    return np.abs((1.0 - series.totals()) - entropy.S_L)


def chord_representation(rhoB, basis: OperatorBasis) -> PhaseSpaceRep:
    """rho_xi = Tr[T_xi rho] for unnormalized translations, xi = (r, s).

    ``chord_minus[r, s]`` holds rho at the unreduced chord (-r, -s). Reducing
    -xi modulo N flips the sign of wrapped translations, so the two are kept
    apart rather than read off one array.
    """
    if basis.kind != "translation":
        raise ValueError("chord representation needs the translation basis")
    rho = rhoB.entries if isinstance(rhoB, ReducedDensity) else np.asarray(rhoB)
    space = basis.space
    N = space.N
    chord = (basis.expectations(rho) * basis.raw_norm).reshape(N, N)
    minus = np.empty((N, N), dtype=np.complex128)
    for r in range(N):
        for s in range(N):
            minus[r, s] = np.vdot(translation_operator(space, -r, -s).conj().T, rho)
    return PhaseSpaceRep(space.hbar, chord=chord, chord_minus=minus)


def wigner_function(rhoB, basis: OperatorBasis) -> PhaseSpaceRep:
    """W_x = 2 pi hbar Tr[R_x rho] over the centres (a2, b2) = (2a, 2b)."""
    if basis.kind != "reflection":
        raise ValueError("Wigner function needs the reflection basis")
    rho = rhoB.entries if isinstance(rhoB, ReducedDensity) else np.asarray(rhoB)
    space = basis.space
    N = space.N
    W = 2 * np.pi * space.hbar * basis.expectations(rho) * basis.raw_norm
    if np.abs(W.imag).max() > 1e-10:
        raise NumericalConsistencyError(f"Wigner function has imaginary part {np.abs(W.imag).max():.3e}")
    return PhaseSpaceRep(space.hbar, wigner=W.real.reshape(N, N))


def kirkwood_distribution(rhoB, space) -> np.ndarray:
    """Entry (i, j) = <p_j| rho |q_i> = Tr[rho K_(i,j)]."""
    rho = rhoB.entries if isinstance(rhoB, ReducedDensity) else np.asarray(rhoB)
    F = fourier_kernel(space)
    return (F.conj().T @ rho).T


__all__ = [
    "PRESETS",
    "Scenario",
    "OtocSeries",
    "EntropySeries",
    "PhaseSpaceRep",
    "make_scenario",
    "evolve_state",
    "trajectory",
    "embed",
    "heisenberg",
    "otoc_direct",
    "otoc_fast_pure",
    "otoc_re_series",
    "theorem_residuals",
    "chord_representation",
    "wigner_function",
    "kirkwood_distribution",
]
