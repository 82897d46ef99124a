"""Gaussian compiler: symplectic exponentials, Euler factors, meshes."""

import math

import numpy as np
import pytest

from cvcompile.circuit import Circuit, Gate
from cvcompile.gaussian import (
    EulerFactors,
    NonSymplecticInput,
    NonUnitaryInput,
    QuadraticHamiltonian,
    affine_action_of,
    circuit_affine_action,
    compile_gaussian,
    eliminate_linear,
    embed_unitary,
    euler_decompose,
    interferometer_matrix_of,
    is_symplectic,
    mesh_interferometer,
    omega,
    symplectic_from_quadratic,
)

HBAR = 2.0


def random_symmetric(rng, n, scale=1.0):
    A = rng.normal(size=(n, n)) * scale
    return (A + A.T) / 2


def test_symplectic_from_shear_generator():
    h = QuadraticHamiltonian(np.array([[1.0, 0.0], [0.0, 0.0]]))
    S = symplectic_from_quadratic(h)
    assert np.allclose(S, [[1, 0], [1, 1]], atol=1e-12)


def test_symplectic_from_zero_is_identity():
    h = QuadraticHamiltonian(np.zeros((4, 4)))
    assert np.allclose(symplectic_from_quadratic(h), np.eye(4))


def test_symplectic_from_rotation_generator():
    theta = math.pi / 2
    h = QuadraticHamiltonian(theta * np.eye(2))
    S = symplectic_from_quadratic(h)
    # independent oracle: power series of the matrix exponential
    A = -omega(1) @ h.H
    series = sum(np.linalg.matrix_power(A, k) / math.factorial(k) for k in range(40))
    assert np.allclose(S, series, atol=1e-12)
    assert np.allclose(S, [[0, -1], [1, 0]], atol=1e-12)


def test_euler_phase_gate_angles():
    S = np.array([[1.0, 0.0], [1.0, 1.0]])
    factors = euler_decompose(S)
    r = math.log(factors.z[0])
    assert abs(math.sinh(r) - 0.5) < 1e-10
    theta1 = float(np.angle(factors.U1[0, 0]))
    assert abs(math.cos(theta1) - 1 / math.sqrt(1 + math.exp(2 * r))) < 1e-10
    theta2 = float(np.angle(factors.U2[0, 0]))
    assert abs((theta1 - theta2) - math.pi / 2) < 1e-10
    assert np.max(np.abs(factors.reconstruct() - S)) < 1e-9


def test_euler_identity_fixed_phases():
    factors = euler_decompose(np.eye(4))
    assert np.allclose(factors.U1, np.eye(2))
    assert np.allclose(factors.z, [1.0, 1.0])


@pytest.mark.parametrize("seed", range(6))
def test_euler_generate_and_recover(seed):
    rng = np.random.default_rng(seed)
    M = int(rng.integers(1, 4))
    A1, A2 = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M)), rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
    Q1, _ = np.linalg.qr(A1)
    Q2, _ = np.linalg.qr(A2)
    r = rng.uniform(-0.6, 0.6, size=M)
    Z = np.diag(np.concatenate([np.exp(r), np.exp(-r)]))
    S = embed_unitary(Q1) @ Z @ embed_unitary(Q2)
    factors = euler_decompose(S)
    assert np.max(np.abs(factors.reconstruct() - S)) < 1e-9
    zs = np.sort(factors.z)[::-1]
    assert np.allclose(zs, np.sort(np.exp(np.abs(r)))[::-1], atol=1e-9)


def test_euler_pair_structure_of_singular_values():
    rng = np.random.default_rng(42)
    h = QuadraticHamiltonian(random_symmetric(rng, 6, 0.4))
    S = symplectic_from_quadratic(h)
    sv = np.linalg.svd(S, compute_uv=False)
    prod = np.sort(sv) * np.sort(sv)[::-1]
    assert np.allclose(prod, 1.0, atol=1e-9)


def test_euler_rejects_non_symplectic():
    with pytest.raises(NonSymplecticInput):
        euler_decompose(np.diag([2.0, 1.0]))


def test_eliminate_linear_invertible():
    h = QuadraticHamiltonian(2 * np.eye(2), np.array([2.0, 0.0]))
    elim = eliminate_linear(h)
    assert elim.sandwich
    assert np.allclose(elim.displacement, [-1.0, 0.0])


def test_eliminate_linear_zero_drive():
    h = QuadraticHamiltonian(np.eye(2), np.zeros(2))
    elim = eliminate_linear(h)
    assert np.allclose(elim.displacement, 0)


def test_eliminate_linear_singular_matches_augmented_oracle():
    # pure-x^2 generator with a p-direction drive: H singular
    h = QuadraticHamiltonian(np.array([[1.5, 0.0], [0.0, 0.0]]), np.array([0.0, 0.7]))
    elim = eliminate_linear(h)
    assert not elim.sandwich
    S, d = affine_action_of(h)
    # brute-force (2M+1) exponential oracle, via series
    n2 = 2
    aug = np.zeros((3, 3))
    aug[:2, :2] = -omega(1) @ h.H
    aug[:2, 2] = -omega(1) @ h.rbar
    series = sum(np.linalg.matrix_power(aug, k) / math.factorial(k) for k in range(60))
    assert np.max(np.abs(S - series[:2, :2])) < 1e-10
    assert np.max(np.abs(d - series[:2, 2])) < 1e-10
    assert np.max(np.abs(elim.displacement - d)) < 1e-10


def test_compile_phase_gate_structure_and_action():
    s = 1.0
    h = QuadraticHamiltonian(np.array([[s, 0.0], [0.0, 0.0]]))
    circ = compile_gaussian(h, HBAR)
    kinds = [g.kind for g in circ.gates]
    assert kinds == ["R", "T", "R"]
    S, d = circuit_affine_action(circ, HBAR)
    assert np.max(np.abs(S - [[1, 0], [s, 1]])) < 1e-10
    assert np.max(np.abs(d)) < 1e-12
    r = circ.gates[1].params[0]
    assert abs(math.sinh(r) - s / 2) < 1e-10


def test_compile_cz_gate_structure_and_action():
    s = 1.0
    H = np.zeros((4, 4))
    H[0, 1] = H[1, 0] = s
    circ = compile_gaussian(QuadraticHamiltonian(H), HBAR)
    kinds = [g.kind for g in circ.gates]
    assert kinds.count("T") == 2
    assert all(k in ("BS", "T", "R", "U") for k in kinds)
    S, _ = circuit_affine_action(circ, HBAR)
    expected = np.eye(4)
    expected[2, 1] = s
    expected[3, 0] = s
    assert np.max(np.abs(S - expected)) < 1e-10
    rs = [g.params[0] for g in circ.gates if g.kind == "T"]
    for r in rs:
        assert abs(math.sinh(abs(r)) - s / 2) < 1e-10


def test_compile_zero_generator_empty():
    circ = compile_gaussian(QuadraticHamiltonian(np.zeros((2, 2))), HBAR)
    assert len(circ) == 0


def test_compile_pure_displacement():
    h = QuadraticHamiltonian(np.zeros((2, 2)), np.array([0.3, -0.2]))
    circ = compile_gaussian(h, HBAR)
    assert [g.kind for g in circ.gates] == ["D"]
    S, d = circuit_affine_action(circ, HBAR)
    St, dt = affine_action_of(h)
    assert np.max(np.abs(S - St)) < 1e-12
    assert np.max(np.abs(d - dt)) < 1e-10


@pytest.mark.parametrize("seed", range(8))
def test_compile_random_affine_action_matches(seed):
    rng = np.random.default_rng(100 + seed)
    M = int(rng.integers(1, 4))
    H = random_symmetric(rng, 2 * M, 0.5)
    rbar = rng.normal(size=2 * M) * rng.choice([0.0, 1.0])
    h = QuadraticHamiltonian(H, rbar)
    circ = compile_gaussian(h, HBAR)
    S_c, d_c = circuit_affine_action(circ, HBAR)
    S_t, d_t = affine_action_of(h)
    assert np.max(np.abs(S_c - S_t)) < 1e-8
    assert np.max(np.abs(d_c - d_t)) < 1e-8
    assert is_symplectic(S_c)


def test_mesh_single_mode():
    circ = mesh_interferometer(np.array([[np.exp(0.4j)]]))
    assert [g.kind for g in circ.gates] == ["R"]


def test_mesh_symmetric_beamsplitter_detect():
    theta = 0.3
    U = np.array([[np.cos(theta), 1j * np.sin(theta)], [1j * np.sin(theta), np.cos(theta)]])
    from cvcompile.gaussian import _interferometer_gates

    gates = _interferometer_gates(U, mesh=True)
    assert [g.kind for g in gates] == ["BS"]
    assert abs(gates[0].params[0] - theta) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_mesh_random_unitary_reconstruction(seed):
    rng = np.random.default_rng(200 + seed)
    n = 4
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    U, _ = np.linalg.qr(A)
    circ = mesh_interferometer(U)
    assert np.max(np.abs(interferometer_matrix_of(circ) - U)) < 1e-9
    n_bs = sum(1 for g in circ.gates if g.kind == "BS")
    assert n_bs == n * (n - 1) // 2


def test_mesh_rejects_non_unitary():
    with pytest.raises(NonUnitaryInput):
        mesh_interferometer(np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_symplecticity_preserved_end_to_end():
    rng = np.random.default_rng(7)
    for _ in range(20):
        M = int(rng.integers(1, 4))
        h = QuadraticHamiltonian(random_symmetric(rng, 2 * M, 0.6))
        S = symplectic_from_quadratic(h)
        assert is_symplectic(S)
        factors = euler_decompose(S)
        assert is_symplectic(embed_unitary(factors.U1), 1e-8)
        assert is_symplectic(embed_unitary(factors.U2), 1e-8)
