"""
Complete operator bases on one torus.

Four families are provided: Pauli strings (N = 2**k), Weyl translations
labelled by chords (r, s), reflections labelled by centres (a, b) on the
half-integer grid, and the Kirkwood operators |q_i><p_j|. Every family is
scaled to be Hilbert-Schmidt orthonormal, which is exactly the completeness
condition sum_M M_ij conj(M_ml) = delta_im delta_lj.

Each element has exactly N nonzero entries, so a basis is stored as three
(N**2, N) arrays of row indices, column indices and values. Dense matrices
are materialized on demand from the same arrays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np
from scipy import sparse

from .errors import BasisUnavailableError
from .torus import ReducedDensity, TorusSpace, _frozen, fourier_kernel

KINDS = ("pauli", "translation", "reflection", "kirkwood")

_PAULI_LETTERS = "IXYZ"


@dataclass(frozen=True, order=True)
class PauliString:
    digits: tuple[int, ...]

    def __str__(self):
        return "".join(_PAULI_LETTERS[d] for d in self.digits)


@dataclass(frozen=True, order=True)
class Chord:
    """Translation by (xi_p, xi_q) = (r/N, s/N)."""

    r: int
    s: int

    def __str__(self):
        return f"T_{self.r}_{self.s}"


@dataclass(frozen=True, order=True)
class Center:
    """Reflection centre stored as twice its half-integer indices."""

    a2: int
    b2: int

    @property
    def a(self) -> float:
        return self.a2 / 2

    @property
    def b(self) -> float:
        return self.b2 / 2

    def __str__(self):
        return f"R_{self.a2}_{self.b2}"


@dataclass(frozen=True, order=True)
class KirkwoodIdx:
    i: int
    j: int

    def __str__(self):
        return f"K_{self.i}_{self.j}"


BasisLabel = Union[PauliString, Chord, Center, KirkwoodIdx]


@dataclass(frozen=True)
class BasisElement:
    label: BasisLabel
    matrix: np.ndarray = field(repr=False)
    raw_norm: float


@dataclass(frozen=True)
class OperatorBasis:
    kind: str
    space: TorusSpace
    labels: tuple
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)
    vals: np.ndarray = field(repr=False)
    raw_norm: float = 1.0

    def __len__(self):
        return len(self.labels)

    def __iter__(self) -> Iterator[BasisElement]:
        return (self.element(i) for i in range(len(self)))

    @property
    def elements(self) -> list[BasisElement]:
        return list(self)

    def matrix(self, idx: int) -> np.ndarray:
        N = self.space.N
        m = np.zeros((N, N), dtype=np.complex128)
        m[self.rows[idx], self.cols[idx]] = self.vals[idx]
        return m

    def element(self, idx: int) -> BasisElement:
        return BasisElement(self.labels[idx], self.matrix(idx), self.raw_norm)

    def index(self, label: BasisLabel) -> int:
        return self.labels.index(label)

    def expectations(self, rho) -> np.ndarray:
        """Tr[rho M] for every element M, as a complex vector."""
        m = rho.entries if isinstance(rho, ReducedDensity) else np.asarray(rho)
        return (self.vals * m[self.cols, self.rows]).sum(axis=1)

    def to_sparse(self) -> sparse.csr_matrix:
        """Elements as rows of an (n_elements, N**2) matrix (row-major vec)."""
        N = self.space.N
        n = len(self)
        flat = (self.rows * N + self.cols).ravel()
        owner = np.repeat(np.arange(n), N)
        return sparse.csr_matrix((self.vals.ravel(), (owner, flat)), shape=(n, N * N))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def subset(self, keep: Sequence[int]) -> "OperatorBasis":
        keep = np.asarray(keep)
        return OperatorBasis(
            self.kind,
            self.space,
            tuple(self.labels[i] for i in keep),
            _frozen(self.rows[keep]),
            _frozen(self.cols[keep]),
            _frozen(self.vals[keep]),
            self.raw_norm,
        )


def _pack(kind, space, labels, rows, cols, vals, raw_norm) -> OperatorBasis:
    return OperatorBasis(
        kind,
        space,
        tuple(labels),
        _frozen(np.asarray(rows, dtype=np.intp)),
        _frozen(np.asarray(cols, dtype=np.intp)),
        _frozen(np.asarray(vals, dtype=np.complex128) / raw_norm),
        float(raw_norm),
    )


def pauli_basis(space: TorusSpace) -> OperatorBasis:
    N = space.N
    k = N.bit_length() - 1
    if N < 2 or N != 1 << k:
        raise BasisUnavailableError(f"Pauli basis needs N = 2**k, got N = {N}")
    # bits[i, t]: bit of row i on qubit t, qubit 0 being the most significant
    bits = (np.arange(N)[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1
    flip = np.array([0, 1, 1, 0])
    # single-qubit entry of sigma_d in row b: [d][b]
    entry = np.array([[1, 1], [1, 1], [-1j, 1j], [1, -1]], dtype=np.complex128)
    weights = 1 << np.arange(k - 1, -1, -1)

    labels, cols, vals = [], [], []
    for digits in itertools.product(range(4), repeat=k):
        d = np.array(digits)
        cbits = bits ^ flip[d][None, :]
        cols.append(cbits @ weights)
        vals.append(np.prod(entry[d[None, :], bits], axis=1))
        labels.append(PauliString(digits))
    rows = np.broadcast_to(np.arange(N), (len(labels), N))
    return _pack("pauli", space, labels, rows, cols, vals, np.sqrt(N))


def translation_operator(space: TorusSpace, r: int, s: int) -> np.ndarray:
    """Unnormalized translation by chord (r/N, s/N); any integers accepted."""
    rows, cols, vals = _translation_entries(space, r, s)
    T = np.zeros((space.N, space.N), dtype=np.complex128)
    T[rows, cols] = vals
    return T


def _translation_entries(space: TorusSpace, r: int, s: int):
    N = space.N
    i = np.arange(N)
    j = (i + s) % N
    wrap = j - i - s
    phase = (r * ((i + j) / 2 + space.chi_q) - (r / 2 + space.chi_p) * wrap) * (2 * np.pi / N)
    return i, j, np.exp(1j * phase)


def translation_basis(space: TorusSpace) -> OperatorBasis:
    N = space.N
    labels = [Chord(r, s) for r in range(N) for s in range(N)]
    entries = [_translation_entries(space, c.r, c.s) for c in labels]
    rows, cols, vals = (np.array(x) for x in zip(*entries))
    return _pack("translation", space, labels, rows, cols, vals, np.sqrt(N))


def reflection_operator(space: TorusSpace, a2: int, b2: int) -> np.ndarray:
    """Unnormalized reflection about the centre (a2/2N, b2/2N)."""
    rows, cols, vals = _reflection_entries(space, a2, b2)
    R = np.zeros((space.N, space.N), dtype=np.complex128)
    R[rows, cols] = vals
    return R


def _reflection_entries(space: TorusSpace, a2: int, b2: int):
    N = space.N
    a = a2 / 2
    i = np.arange(N)
    j = (b2 - i) % N
    phase = ((j - i) * (a + space.chi_q) + a * (b2 - i - j)) * (2 * np.pi / N)
    return i, j, np.exp(1j * phase)


def reflection_basis(space: TorusSpace) -> OperatorBasis:
    N = space.N
    labels = [Center(a2, b2) for a2 in range(N) for b2 in range(N)]
    entries = [_reflection_entries(space, c.a2, c.b2) for c in labels]
    rows, cols, vals = (np.array(x) for x in zip(*entries))
    return _pack("reflection", space, labels, rows, cols, vals, np.sqrt(N))


def kirkwood_basis(space: TorusSpace) -> OperatorBasis:
    N = space.N
    bra_p = fourier_kernel(space).conj()  # row j holds <p_j|q_n>
    labels = [KirkwoodIdx(i, j) for i in range(N) for j in range(N)]
    rows = np.repeat(np.arange(N), N)[:, None].repeat(N, axis=1)
    cols = np.broadcast_to(np.arange(N), (N * N, N))
    vals = np.tile(bra_p, (N, 1))
    return _pack("kirkwood", space, labels, rows, cols, vals, 1.0)


_BUILDERS = {
    "pauli": pauli_basis,
    "translation": translation_basis,
    "reflection": reflection_basis,
    "kirkwood": kirkwood_basis,
}


def make_basis(kind: str, space: TorusSpace) -> OperatorBasis:
    try:
        builder = _BUILDERS[kind.lower()]
    except KeyError:
        raise BasisUnavailableError(f"unknown basis kind {kind!r}; choose from {KINDS}") from None
    return builder(space)


def completeness_check(basis: OperatorBasis) -> float:
    """Max-norm residual of S^H S - I, with each element a row of S.

    Zero exactly when sum_M M_ij conj(M_ml) = delta_im delta_lj.
    """
    S = basis.to_sparse()
    G = (S.conj().T @ S).tocsr() - sparse.identity(S.shape[1], format="csr")
    return float(abs(G).max()) if G.nnz else 0.0


def orthonormality_residual(basis: OperatorBasis) -> float:
    """Max |Tr[M_a^dag M_b] - delta_ab| over all pairs."""
    S = basis.to_sparse()
    G = (S.conj() @ S.T).tocsr() - sparse.identity(S.shape[0], format="csr")
    return float(abs(G).max()) if G.nnz else 0.0
