r"""Exact decomposition of Gaussian operations.

A Gaussian operation exp[(i/ħ)(½ r̂ᵀ H r̂ + r̂ᵀ r̄)] with H real symmetric acts
on the quadrature vector r̂ = (x_1..x_M, p_1..p_M) as the affine map
r̂ -> S r̂ + d with S = exp(-Ω H).  The compiler eliminates the linear drive
with displacements, factors S through its symplectic singular-value
(Euler) form  S = O(U1) · diag(z, 1/z) · O(U2), and emits displacement,
interferometer and single-mode squeeze gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.linalg import expm, polar, sqrtm

from .circuit import Circuit, Gate

SYMPLECTIC_TOL = 1e-8
RECON_TOL = 1e-9


class NonSymplecticInput(ValueError):
    pass


class NonUnitaryInput(ValueError):
    pass


class NonGaussianGate(ValueError):
    pass


def omega(num_modes: int) -> np.ndarray:
    eye = np.eye(num_modes)
    zero = np.zeros((num_modes, num_modes))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass
class QuadraticHamiltonian:
    """Quadratic-plus-linear generator: ½ r̂ᵀ H r̂ + r̂ᵀ r̄."""

    H: np.ndarray
    rbar: np.ndarray | None = None

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=float)
        n = self.H.shape[0]
        if self.H.shape != (n, n) or n % 2:
            raise ValueError("H must be 2M x 2M")
        if np.linalg.norm(self.H - self.H.T) > 0:
            if np.linalg.norm(self.H - self.H.T) > 1e-12 * max(1.0, np.linalg.norm(self.H)):
                raise ValueError("H must be symmetric")
            self.H = (self.H + self.H.T) / 2
        if self.rbar is None:
            self.rbar = np.zeros(n)
        else:
            self.rbar = np.asarray(self.rbar, dtype=float)
            if self.rbar.shape != (n,):
                raise ValueError("rbar must have length 2M")

    @property
    def num_modes(self) -> int:
        return self.H.shape[0] // 2

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticHamiltonian":
        return cls(np.asarray(data["H"], dtype=float), np.asarray(data.get("rbar", []), dtype=float) or None)


def is_symplectic(S: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    n = S.shape[0] // 2
    return np.max(np.abs(S @ omega(n) @ S.T - omega(n))) < tol


def symplectic_from_quadratic(h: QuadraticHamiltonian) -> np.ndarray:
    """S = exp(-Ω H); always symplectic for symmetric H."""
    S = expm(-omega(h.num_modes) @ h.H)
    return S


@dataclass
class EulerFactors:
    U1: np.ndarray
    U2: np.ndarray
    z: np.ndarray  # positive, sorted descending

    def reconstruct(self) -> np.ndarray:
        Z = np.diag(np.concatenate([self.z, 1.0 / self.z]))
        return embed_unitary(self.U1) @ Z @ embed_unitary(self.U2)


def embed_unitary(U: np.ndarray) -> np.ndarray:
    """Orthogonal-symplectic image [[Re U, -Im U], [Im U, Re U]]."""
    return np.block([[np.real(U), -np.imag(U)], [np.imag(U), np.real(U)]])


def extract_unitary(O: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Inverse of embed_unitary; validates the block structure."""
    n = O.shape[0] // 2
    A, B = O[:n, :n], O[:n, n:]
    C, D = O[n:, :n], O[n:, n:]
    if np.max(np.abs(A - D)) > tol or np.max(np.abs(B + C)) > tol:
        raise NonSymplecticInput("matrix is not orthogonal-symplectic")
    return A - 1j * B


def _fix_sign(v: np.ndarray) -> np.ndarray:
    for comp in v:
        if abs(comp) > 1e-9:
            return v if comp > 0 else -v
    return v


def _symplectic_orthogonal_eigenbasis(P: np.ndarray, tol: float = 1e-9):
    """Diagonalize a symmetric positive-definite symplectic matrix as
    P = O diag(z, 1/z) Oᵀ with O orthogonal-symplectic and z >= 1 descending.

    Eigenvalues pair as (z, 1/z) with Ω mapping one eigenspace to the other;
    columns are arranged so that Ω c_j = -c_{M+j}, which forces the
    commuting block structure of O.
    """
    n = P.shape[0] // 2
    Om = omega(n)
    vals, vecs = np.linalg.eigh(P)
    # group eigenvalues >= 1 (up to tolerance), track multiplicity
    order = np.argsort(-vals)
    vals, vecs = vals[order], vecs[:, order]
    plus_cols: List[np.ndarray] = []
    zs: List[float] = []
    used = np.zeros(len(vals), dtype=bool)
    unit_space: List[np.ndarray] = []
    for i, z in enumerate(vals):
        if used[i]:
            continue
        if z > 1 + tol:
            v = _fix_sign(vecs[:, i])
            plus_cols.append(v)
            zs.append(float(z))
            used[i] = True
            # mark one matching 1/z eigenvalue as consumed
            target = 1.0 / z
            j = np.argmin(np.where(used, np.inf, np.abs(vals - target)))
            used[j] = True
        elif z < 1 - tol:
            continue  # partner of an already-seen (or to-be-seen) z > 1
        else:
            unit_space.append(vecs[:, i])
            used[i] = True
    # orthonormal symplectic basis of the z = 1 eigenspace, seeded with
    # standard basis vectors for reproducibility
    if unit_space:
        Q = np.column_stack(unit_space)
        proj = Q @ Q.T
        chosen: List[np.ndarray] = []
        k = Q.shape[1] // 2
        for seed_idx in range(2 * n):
            if len(chosen) == k:
                break
            seed = proj @ np.eye(2 * n)[:, seed_idx]
            for c in chosen:
                seed = seed - c * (c @ seed)
                w = -Om @ c
                seed = seed - w * (w @ seed)
            nrm = np.linalg.norm(seed)
            if nrm < 1e-7:
                continue
            chosen.append(_fix_sign(seed / nrm))
        if len(chosen) != k:
            raise NonSymplecticInput("failed to build a symplectic basis of the unit eigenspace")
        for c in chosen:
            plus_cols.append(c)
            zs.append(1.0)
    if len(plus_cols) != n:
        raise NonSymplecticInput("eigenvalue pairing failed")
    # sort by z descending, stable
    order = sorted(range(n), key=lambda i: -zs[i])
    plus_cols = [plus_cols[i] for i in order]
    zs = [zs[i] for i in order]
    cols = plus_cols + [-Om @ v for v in plus_cols]
    O = np.column_stack(cols)
    return O, np.array(zs)


def euler_decompose(S: np.ndarray, tol: float = SYMPLECTIC_TOL) -> EulerFactors:
    """Symplectic singular-value factorization S = O(U1) diag(z,1/z) O(U2)."""
    S = np.asarray(S, dtype=float)
    if not is_symplectic(S, tol):
        raise NonSymplecticInput("input is not symplectic to tolerance")
    n = S.shape[0] // 2
    if np.linalg.norm(S @ S.T - np.eye(2 * n)) < 1e-12:
        U = extract_unitary(S)
        return EulerFactors(U, np.eye(n, dtype=complex), np.ones(n))
    O_pol, _ = polar(S, side="left")  # S = P @ O_pol with P = sqrt(S Sᵀ)
    P = np.real(sqrtm(S @ S.T))
    O1, zs = _symplectic_orthogonal_eigenbasis(P)
    O2 = O1.T @ O_pol
    U1 = extract_unitary(O1)
    U2 = extract_unitary(O2)
    factors = EulerFactors(U1, U2, zs)
    if np.max(np.abs(factors.reconstruct() - S)) > RECON_TOL * max(1.0, float(np.max(np.abs(S)))):
        raise NonSymplecticInput("reconstruction failed; input likely not symplectic")
    return factors


@dataclass
class LinearElimination:
    displacement: np.ndarray
    quadratic: QuadraticHamiltonian
    sandwich: bool  # True: W(r) S W(-r) form; False: trailing W(d) after S


def eliminate_linear(h: QuadraticHamiltonian) -> LinearElimination:
    """Split the affine action into displacement plus purely quadratic parts.

    With invertible H the displacement r = -H⁻¹ r̄ conjugates the quadratic
    part (W(r) S(H) W(-r)).  Otherwise the net displacement is read off the
    augmented (2M+1)-dimensional affine exponential and applied after S(H).
    """
    n2 = h.H.shape[0]
    quad = QuadraticHamiltonian(h.H, None)
    if not np.any(h.rbar):
        return LinearElimination(np.zeros(n2), quad, True)
    try:
        r = np.linalg.solve(h.H, -h.rbar)
        cond_ok = np.linalg.norm(h.H @ r + h.rbar) <= 1e-9 * max(1.0, np.linalg.norm(h.rbar))
    except np.linalg.LinAlgError:
        cond_ok = False
    if cond_ok:
        return LinearElimination(r, quad, True)
    d = affine_action_of(h)[1]
    return LinearElimination(d, quad, False)


def affine_action_of(h: QuadraticHamiltonian) -> Tuple[np.ndarray, np.ndarray]:
    """Heisenberg action (S, d) of the full generator via the augmented
    matrix exponential exp([[-ΩH, -Ω r̄], [0, 0]])."""
    n2 = h.H.shape[0]
    Om = omega(n2 // 2)
    aug = np.zeros((n2 + 1, n2 + 1))
    aug[:n2, :n2] = -Om @ h.H
    aug[:n2, n2] = -Om @ h.rbar
    E = expm(aug)
    return E[:n2, :n2], E[:n2, n2]


# -- gate-level affine actions -------------------------------------------------


def gate_affine_action(gate: Gate, num_modes: int, hbar: float) -> Tuple[np.ndarray, np.ndarray]:
    """Heisenberg action of a single Gaussian gate on (x_1..x_M, p_1..p_M)."""
    S = np.eye(2 * num_modes)
    d = np.zeros(2 * num_modes)
    k = gate.kind
    if k in ("R", "F"):
        theta = gate.params[0] if k == "R" else gate.params[0] * np.pi / 2
        (m,) = gate.modes
        c, s = np.cos(theta), np.sin(theta)
        S[np.ix_([m, m + num_modes], [m, m + num_modes])] = [[c, -s], [s, c]]
    elif k == "Z":
        (m,) = gate.modes
        d[m + num_modes] = gate.params[0]
    elif k == "P":
        (m,) = gate.modes
        S[m + num_modes, m] = gate.params[0]
    elif k == "CZ":
        j, kk = gate.modes
        S[j + num_modes, kk] = gate.params[0]
        S[kk + num_modes, j] = gate.params[0]
    elif k == "D":
        (m,) = gate.modes
        re, im = gate.params
        d[m] = math.sqrt(2 * hbar) * re
        d[m + num_modes] = math.sqrt(2 * hbar) * im
    elif k == "T":
        (m,) = gate.modes
        s = gate.params[0]
        S[m, m] = math.exp(s)
        S[m + num_modes, m + num_modes] = math.exp(-s)
    elif k == "BS":
        theta = gate.params[0]
        U = np.array([[np.cos(theta), 1j * np.sin(theta)], [1j * np.sin(theta), np.cos(theta)]])
        S = _embed_block(embed_unitary(U), gate.modes, num_modes)
    elif k == "U":
        S = _embed_block(embed_unitary(gate.matrix), gate.modes, num_modes)
    else:
        raise NonGaussianGate(f"gate {k} has no affine quadrature action")
    return S, d


def _embed_block(S_local: np.ndarray, modes: Sequence[int], num_modes: int) -> np.ndarray:
    m = len(modes)
    S = np.eye(2 * num_modes)
    idx = list(modes) + [q + num_modes for q in modes]
    S[np.ix_(idx, idx)] = S_local
    return S


def circuit_affine_action(circ: Circuit, hbar: float) -> Tuple[np.ndarray, np.ndarray]:
    """Composed Heisenberg action of a Gaussian circuit (first gate first)."""
    S = np.eye(2 * circ.num_modes)
    d = np.zeros(2 * circ.num_modes)
    for gate in circ.gates:
        Sg, dg = gate_affine_action(gate, circ.num_modes, hbar)
        S = Sg @ S
        d = Sg @ d + dg
    return S, d


# -- compilation ---------------------------------------------------------------


def _displacement_gates(r: np.ndarray, hbar: float) -> List[Gate]:
    n = len(r) // 2
    gates = []
    for m in range(n):
        alpha = complex(r[m], r[m + n]) / math.sqrt(2 * hbar)
        if abs(alpha) > 1e-14:
            gates.append(Gate("D", (m,), (alpha.real, alpha.imag)))
    return gates


def _is_symmetric_bs(U: np.ndarray, tol: float = 1e-10) -> float | None:
    if U.shape != (2, 2):
        return None
    c = U[0, 0]
    s = U[0, 1]
    if abs(c.imag) > tol or abs(s.real) > tol:
        return None
    if abs(U[1, 1] - c) > tol or abs(U[1, 0] - s) > tol:
        return None
    theta = math.atan2(s.imag, c.real)
    target = np.array([[np.cos(theta), 1j * np.sin(theta)], [1j * np.sin(theta), np.cos(theta)]])
    return theta if np.max(np.abs(U - target)) < tol else None


def _interferometer_gates(U: np.ndarray, mesh: bool) -> List[Gate]:
    n = U.shape[0]
    if np.max(np.abs(U - np.eye(n))) < 1e-12:
        return []
    if n == 1:
        theta = float(np.angle(U[0, 0]))
        return [Gate("R", (0,), (theta,))] if abs(theta) > 1e-14 else []
    theta_bs = _is_symmetric_bs(U)
    if theta_bs is not None:
        return [Gate("BS", (0, 1), (theta_bs,))]
    if mesh:
        return mesh_interferometer(U).gates
    return [Gate("U", tuple(range(n)), (), U)]


def _offset_gates(gates: List[Gate], offset_modes: Sequence[int]) -> List[Gate]:
    out = []
    for g in gates:
        modes = tuple(offset_modes[m] for m in g.modes)
        out.append(Gate(g.kind, modes, g.params, g.matrix))
    return out


def compile_gaussian(h: QuadraticHamiltonian, hbar: float = 2.0, mesh: bool = False) -> Circuit:
    """Exact circuit for the Gaussian operation generated by h.

    Gates are restricted to displacements, interferometers (or BS/R blocks
    after meshing) and single-mode squeezers.  The Heisenberg action of the
    result matches the affine map of the generator.
    """
    n = h.num_modes
    elim = eliminate_linear(h)
    S = symplectic_from_quadratic(elim.quadratic)
    circ = Circuit(n, [], set())
    quad_gates: List[Gate] = []
    if np.max(np.abs(S - np.eye(2 * n))) > 1e-13:
        factors = euler_decompose(S)
        # temporal order: U2 block, squeezers, U1 block
        quad_gates.extend(_offset_gates(_interferometer_gates(factors.U2, mesh), list(range(n))))
        for m, z in enumerate(factors.z):
            s = math.log(z)
            if abs(s) > 1e-14:
                quad_gates.append(Gate("T", (m,), (s,)))
        quad_gates.extend(_offset_gates(_interferometer_gates(factors.U1, mesh), list(range(n))))
    if elim.sandwich:
        pre = _displacement_gates(-elim.displacement, hbar)
        post = _displacement_gates(elim.displacement, hbar)
        circ.extend(pre)
        circ.extend(quad_gates)
        circ.extend(post)
    else:
        circ.extend(quad_gates)
        circ.extend(_displacement_gates(elim.displacement, hbar))
    return circ


def mesh_interferometer(U: np.ndarray, tol: float = 1e-10) -> Circuit:
    """Decompose an M-mode interferometer into a triangular mesh of
    beamsplitter/rotation blocks (M(M-1)/2 two-mode blocks plus phases)."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    if np.max(np.abs(U @ U.conj().T - np.eye(n))) > tol:
        raise NonUnitaryInput("matrix is not unitary")
    circ = Circuit(n, [], set())
    if n == 1:
        theta = float(np.angle(U[0, 0]))
        if abs(theta) > 1e-14:
            circ.append(Gate("R", (0,), (theta,)))
        return circ
    work = U.copy()
    blocks: List[Tuple[int, float, float]] = []  # (upper row i-1, theta, phi)
    for col in range(n - 1):
        for row in range(n - 1, col, -1):
            a, b = work[row - 1, col], work[row, col]
            if abs(b) < 1e-14:
                continue
            if abs(a) < 1e-14:
                theta, phi = np.pi / 2, 0.0
            else:
                theta = math.atan2(abs(b), abs(a))
                phi = float(np.angle(-b / a))
            G = np.eye(n, dtype=complex)
            G[row - 1, row - 1] = np.exp(1j * phi) * np.cos(theta)
            G[row - 1, row] = -np.sin(theta)
            G[row, row - 1] = np.exp(1j * phi) * np.sin(theta)
            G[row, row] = np.cos(theta)
            work = G @ work
            blocks.append((row - 1, theta, phi))
    # work is now diagonal; U = (prod G_k)^dagger @ work, so temporally the
    # diagonal phases come first, then the inverted blocks in reverse order.
    for m in range(n):
        ang = float(np.angle(work[m, m]))
        if abs(ang) > 1e-14:
            circ.append(Gate("R", (m,), (ang,)))
    for (i, theta, phi) in reversed(blocks):
        # G† = R_i(-pi/2) then BS(-theta) then R_i(pi/2 - phi) temporally
        circ.append(Gate("R", (i,), (-np.pi / 2,)))
        circ.append(Gate("BS", (i, i + 1), (-theta,)))
        circ.append(Gate("R", (i,), (np.pi / 2 - phi,)))
    return circ


def interferometer_matrix_of(circ: Circuit) -> np.ndarray:
    """Multiply a mesh circuit of R/BS gates back into an M x M unitary."""
    n = circ.num_modes
    total = np.eye(n, dtype=complex)
    for g in circ.gates:
        local = np.eye(n, dtype=complex)
        if g.kind == "R":
            local[g.modes[0], g.modes[0]] = np.exp(1j * g.params[0])
        elif g.kind == "BS":
            i, j = g.modes
            th = g.params[0]
            local[np.ix_([i, j], [i, j])] = [
                [np.cos(th), 1j * np.sin(th)],
                [1j * np.sin(th), np.cos(th)],
            ]
        elif g.kind == "U":
            local[np.ix_(g.modes, g.modes)] = g.matrix
        else:
            raise NonGaussianGate(f"gate {g.kind} is not an interferometer block")
        total = local @ total
    return total
