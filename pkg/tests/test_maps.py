import math

import numpy as np
import pytest

from catotoc import maps
from catotoc.errors import DimensionMismatchError, NotHyperbolicError, UnsupportedMapError
from catotoc.otoc import evolve_state
from catotoc.torus import (
    BipartiteSpace,
    coherent_state,
    make_bipartite,
    make_space,
    product_state,
    purity_and_entropies,
    reduce,
)

HH = maps.CoupledMapSpec(maps.hyperbolic(), maps.hyperbolic(), 0.5)


def wrapped(a, b):
    d = np.asarray(a) - np.asarray(b)
    return (d + 0.5) % 1 - 0.5


def test_classical_fixed_point():
    for K in (0.0, 0.25, 1.3):
        s = maps.classical_step(maps.hyperbolic(K), maps.ClassicalState(0.5, 0.5))
        np.testing.assert_allclose(wrapped(s.q + s.p, (0.5, 0.5)), 0, atol=1e-15)


def test_classical_elliptic_rotation():
    s = maps.classical_step(maps.elliptic(0.0), maps.ClassicalState(0.25, 0.0))
    np.testing.assert_allclose(wrapped(s.q + s.p, (0.0, 0.75)), 0, atol=1e-15)


def test_classical_hyperbolic_integer_step():
    s = maps.classical_step(maps.hyperbolic(0.0), maps.ClassicalState(0.1, 0.1))
    np.testing.assert_allclose(wrapped(s.q + s.p, (0.3, 0.5)), 0, atol=1e-14)


def test_state_reduced_mod_one():
    s = maps.ClassicalState((1.25, -0.25), (2.5, 0.75))
    assert s.q == (0.25, 0.75) and s.p == (0.5, 0.75)


def test_coupled_without_coupling_is_independent():
    spec = maps.CoupledMapSpec(maps.hyperbolic(), maps.elliptic(), 0.0)
    s = maps.ClassicalState((0.13, 0.71), (0.42, 0.05))
    out = maps.classical_coupled_step(spec, s)
    a = maps.classical_step(spec.map1, maps.ClassicalState(0.13, 0.42))
    b = maps.classical_step(spec.map2, maps.ClassicalState(0.71, 0.05))
    assert out.q == (a.q[0], b.q[0]) and out.p == (a.p[0], b.p[0])


def test_coupled_fixed_point():
    s = maps.ClassicalState((0.5, 0.5), (0.5, 0.5))
    out = maps.classical_coupled_step(HH, s)
    np.testing.assert_allclose(wrapped(out.q + out.p, (0.5,) * 4), 0, atol=1e-14)


@pytest.mark.parametrize("start", [((0.1, 0.37), (0.23, 0.81)), ((0.123, 0.456), (0.789, 0.321))])
def test_coupled_divergence_rate(start):
    a = maps.ClassicalState(*start)
    b = maps.ClassicalState((start[0][0] + 1e-8, start[0][1]), start[1])
    logd = []
    for _ in range(8):
        logd.append(math.log(np.linalg.norm(wrapped(a.q + a.p, b.q + b.p))))
        a, b = maps.classical_coupled_step(HH, a), maps.classical_coupled_step(HH, b)
    rate = np.polyfit(np.arange(8), logd, 1)[0]
    assert rate == pytest.approx(math.log(2 + math.sqrt(3)), rel=0.05)


def test_cat_map_spec_rejects_non_symplectic():
    with pytest.raises(ValueError):
        maps.CatMapSpec(((2, 0), (0, 2)))


@pytest.mark.parametrize("N", [16, 64])
@pytest.mark.parametrize("spec", [maps.hyperbolic(), maps.elliptic(), maps.hyperbolic(0.0)])
def test_propagator_1d_unitary(N, spec):
    U = maps.quantum_propagator_1d(spec, make_space(N)).U
    assert np.abs(U.conj().T @ U - np.eye(N)).max() < 1e-12


def test_propagator_1d_flat_modulus():
    U = maps.quantum_propagator_1d(maps.hyperbolic(), make_space(64)).U
    assert np.abs(np.abs(U) - 1 / 8).max() < 1e-12


def test_elliptic_fourth_power_is_phase():
    U = maps.quantum_propagator_1d(maps.elliptic(0.0), make_space(16)).U
    U4 = np.linalg.matrix_power(U, 4)
    phase = U4[0, 0]
    assert abs(abs(phase) - 1) < 1e-12
    assert np.abs(U4 - phase * np.eye(16)).max() < 1e-12


def test_propagator_needs_m12():
    with pytest.raises(UnsupportedMapError):
        maps.quantum_propagator_1d(maps.CatMapSpec(((1, 0), (1, 1))), make_space(8))


def test_coupling_matrix():
    sp = make_bipartite(64)
    C = maps.coupling_matrix(maps.CoupledMapSpec(maps.hyperbolic(), maps.hyperbolic(), 0.0), sp)
    assert np.all(C == 1)
    C = maps.coupling_matrix(HH, sp)
    assert np.abs(np.abs(C) - 1).max() < 1e-14
    expected = 32 / (2 * math.pi)
    assert abs(np.angle(C[0, 0] * np.exp(-1j * expected))) < 1e-12


def test_propagator_2d_no_coupling_is_kron():
    spec = maps.CoupledMapSpec(maps.hyperbolic(), maps.elliptic(), 0.0)
    sp = make_bipartite(8)
    P = maps.quantum_propagator_2d(spec, sp)
    U1 = maps.quantum_propagator_1d(spec.map1, sp.subsystem_1).U
    U2 = maps.quantum_propagator_1d(spec.map2, sp.subsystem_2).U
    assert np.abs(P.U - np.kron(U1, U2)).max() < 1e-12


@pytest.mark.parametrize("N", [16, 64])
def test_propagator_2d_unitary(N):
    P = maps.quantum_propagator_2d(HH, make_bipartite(N))
    if N == 16:
        U = P.U
        assert np.abs(U.conj().T @ U - np.eye(N * N)).max() < 1e-12
    # factored form: unitary factors and a pure-phase diagonal
    for V in (P.U1, P.U2):
        assert np.abs(V.conj().T @ V - np.eye(N)).max() < 1e-12
    assert np.abs(np.abs(P.C) - 1).max() < 1e-12


def test_propagator_2d_row_phase_and_apply():
    sp = make_bipartite(6)
    P = maps.quantum_propagator_2d(HH, sp)
    base = np.kron(P.U1, P.U2)
    ratio = P.U / base
    np.testing.assert_allclose(ratio, np.repeat(P.C.reshape(-1, 1), 36, axis=1), atol=1e-12)
    rng = np.random.default_rng(1)
    psi = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    np.testing.assert_allclose(P.apply(psi).ravel(), P.U @ psi.ravel(), atol=1e-12)
    np.testing.assert_allclose(P.apply_adjoint(P.apply(psi)), psi, atol=1e-12)


def test_propagator_2d_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        maps.quantum_propagator_2d(HH, BipartiteSpace(make_space(4), make_space(8)))


def test_unstable_direction():
    v = maps.unstable_direction(maps.HYPERBOLIC)
    np.testing.assert_allclose(v, np.array([1, math.sqrt(3)]) / 2, atol=1e-12)
    assert np.linalg.norm(v) == pytest.approx(1, abs=1e-15)
    lam = 2 + math.sqrt(3)
    np.testing.assert_allclose(np.array(maps.HYPERBOLIC) @ v, lam * v, atol=1e-12)
    with pytest.raises(NotHyperbolicError):
        maps.unstable_direction(maps.ELLIPTIC)


def _circular_mean(probs):
    N = len(probs)
    z = np.sum(probs * np.exp(2j * np.pi * np.arange(N) / N))
    return np.angle(z) / (2 * np.pi) % 1


@pytest.mark.parametrize("start", [(0.1, 0.1), (0.3, 0.2), (0.25, 0.0)])
def test_quantum_tracks_classical(start):
    N = 64
    spec = maps.CoupledMapSpec(maps.hyperbolic(0.0), maps.hyperbolic(0.0), 0.0)
    sp = make_bipartite(N)
    P = maps.quantum_propagator_2d(spec, sp)
    psi0 = product_state(coherent_state(sp.subsystem_1, *start), coherent_state(sp.subsystem_2, *start))
    cl = maps.ClassicalState(start[0], start[1])
    for t in range(1, 4):
        cl = maps.classical_step(spec.map1, cl)
        rho = reduce(evolve_state(P, psi0, t), "A").entries
        q = _circular_mean(np.real(np.diag(rho)))
        assert abs(wrapped(q, cl.q[0])) < 3 / N


def test_uncoupled_elliptic_stays_pure():
    sp = make_bipartite(64)
    spec = maps.CoupledMapSpec(maps.elliptic(0.0), maps.elliptic(0.0), 0.0)
    P = maps.quantum_propagator_2d(spec, sp)
    psi = product_state(coherent_state(sp.subsystem_1, 0.5, 0.5), coherent_state(sp.subsystem_2, 0.5, 0.5))
    for t in range(11):
        assert purity_and_entropies(reduce(psi, "B"))[1] < 0.05
        psi = P.step(psi)


def test_construction_is_deterministic():
    a = maps.quantum_propagator_2d(HH, make_bipartite(8)).U
    b = maps.quantum_propagator_2d(HH, make_bipartite(8)).U
    assert a.tobytes() == b.tobytes()
