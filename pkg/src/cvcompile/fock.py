r"""Truncated-Fock-space numerical oracle.

Operators are dense complex matrices on the lowest ``cutoff`` number states
per mode (dimension cutoff**num_modes).  Quadratures are built from the
truncated ladder matrices; exponentials of truncated Hermitians are exactly
unitary, so truncation error shows up as disagreement with the
infinite-dimensional action (reported as leakage), never as non-unitarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.linalg import expm, logm

from .algebra import QuadPoly
from .circuit import Circuit, Gate

DEFAULT_HBAR = 2.0
MAX_DIMENSION = 4096


class DimensionOverflow(ValueError):
    """Requested Fock dimension exceeds the configured dense-matrix cap."""


@dataclass
class FockOperator:
    cutoff: int
    num_modes: int
    matrix: np.ndarray
    hbar: float

    @property
    def dim(self) -> int:
        return self.cutoff ** self.num_modes

    def dagger(self) -> "FockOperator":
        return FockOperator(self.cutoff, self.num_modes, self.matrix.conj().T, self.hbar)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.cutoff, self.num_modes, self.matrix @ other.matrix, self.hbar)


def _check_dim(cutoff: int, num_modes: int, max_dim: int) -> None:
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    if cutoff ** num_modes > max_dim:
        raise DimensionOverflow(
            f"dimension {cutoff}^{num_modes} exceeds the cap {max_dim}; "
            "lower the cutoff or mode count"
        )


def ladder(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(complex)


def quadratures(cutoff: int, hbar: float) -> Tuple[np.ndarray, np.ndarray]:
    a = ladder(cutoff)
    ad = a.conj().T
    x = np.sqrt(hbar / 2.0) * (ad + a)
    p = 1j * np.sqrt(hbar / 2.0) * (ad - a)
    return x, p


def _embed(op: np.ndarray, modes: Sequence[int], num_modes: int, cutoff: int) -> np.ndarray:
    """Embed an operator acting on ``modes`` (in that order) into the full
    row-major product space (mode 0 is the slowest index)."""
    k = len(modes)
    rest = [m for m in range(num_modes) if m not in modes]
    dim_rest = cutoff ** len(rest)
    full = np.kron(op, np.eye(dim_rest, dtype=complex))
    order = list(modes) + rest
    # permute tensor axes from `order` back to 0..M-1
    perm = [order.index(m) for m in range(num_modes)]
    tens = full.reshape([cutoff] * (2 * num_modes))
    tens = tens.transpose(perm + [num_modes + q for q in perm])
    return np.ascontiguousarray(tens.reshape(full.shape))


def build_operator(
    poly: QuadPoly,
    cutoff: int,
    hbar: float = DEFAULT_HBAR,
    num_modes: int | None = None,
    max_dim: int = MAX_DIMENSION,
) -> FockOperator:
    """Assemble the dense matrix of a quadrature polynomial.

    Each normal-form word is realized as the product of truncated ladder-built
    matrices in exactly the recorded order (x powers then p powers per mode);
    no implicit symmetrization is applied.  For Hermitian input the assembled
    matrix is averaged with its adjoint: truncation breaks word-level
    Hermiticity only in the top corner, and removing that artifact keeps the
    matrix exactly Hermitian without touching interior elements.
    """
    modes = poly.modes()
    if num_modes is None:
        num_modes = (max(modes) + 1) if modes else 1
    _check_dim(cutoff, num_modes, max_dim)
    x, p = quadratures(cutoff, hbar)
    dim = cutoff ** num_modes
    total = np.zeros((dim, dim), dtype=complex)
    xpows: Dict[int, np.ndarray] = {0: np.eye(cutoff, dtype=complex)}
    ppows: Dict[int, np.ndarray] = {0: np.eye(cutoff, dtype=complex)}

    def xpow(n):
        if n not in xpows:
            xpows[n] = xpow(n - 1) @ x
        return xpows[n]

    def ppow(n):
        if n not in ppows:
            ppows[n] = ppow(n - 1) @ p
        return ppows[n]

    for monomial, coeff in poly.bind(hbar).items():
        word = None
        involved = []
        for mode, dx, dp in monomial:
            local = xpow(dx) @ ppow(dp)
            involved.append(mode)
            word = local if word is None else np.kron(word, local)
        if word is None:
            total += coeff * np.eye(dim)
        else:
            total += coeff * _embed(word, involved, num_modes, cutoff)
    if poly.is_hermitian():
        total = (total + total.conj().T) / 2
    return FockOperator(cutoff, num_modes, total, hbar)


def unitary_of(
    generator: QuadPoly,
    t: float,
    cutoff: int,
    hbar: float = DEFAULT_HBAR,
    num_modes: int | None = None,
    max_dim: int = MAX_DIMENSION,
) -> FockOperator:
    """exp(i t H) for a Hermitian generator H."""
    if not generator.is_hermitian():
        raise ValueError("generator must be Hermitian")
    op = build_operator(generator, cutoff, hbar, num_modes, max_dim)
    return FockOperator(op.cutoff, op.num_modes, expm(1j * t * op.matrix), hbar)


# -- gate unitaries -----------------------------------------------------------


def _gate_local_unitary(gate: Gate, cutoff: int, hbar: float) -> Tuple[np.ndarray, Tuple[int, ...]]:
    x, p = quadratures(cutoff, hbar)
    a = ladder(cutoff)
    ad = a.conj().T
    k = gate.kind
    if k == "R":
        (theta,) = gate.params
        return expm(1j * theta / (2 * hbar) * (x @ x + p @ p)), gate.modes
    if k == "F":
        (sign,) = gate.params
        return expm(1j * sign * np.pi / 2 / (2 * hbar) * (x @ x + p @ p)), gate.modes
    if k == "Z":
        (t1,) = gate.params
        return expm(1j * t1 / hbar * x), gate.modes
    if k == "P":
        (t2,) = gate.params
        return expm(1j * t2 / (2 * hbar) * x @ x), gate.modes
    if k == "V":
        (t3,) = gate.params
        return expm(1j * t3 / (3 * hbar) * x @ x @ x), gate.modes
    if k == "D":
        re, im = gate.params
        alpha = complex(re, im)
        return expm(alpha * ad - np.conj(alpha) * a), gate.modes
    if k == "T":
        (s,) = gate.params
        return expm(s / 2 * (ad @ ad - a @ a)), gate.modes
    if k == "CZ":
        (tau,) = gate.params
        xx = np.kron(x, x)
        return expm(1j * tau / hbar * xx), gate.modes
    if k == "BS":
        (theta,) = gate.params
        h = np.kron(ad, a) + np.kron(a, ad)
        return expm(1j * theta * h), gate.modes
    if k == "U":
        mat = gate.matrix
        herm = -1j * logm(mat)
        herm = (herm + herm.conj().T) / 2
        m = len(gate.modes)
        dim = cutoff**m
        gen = np.zeros((dim, dim), dtype=complex)
        for i in range(m):
            for j in range(m):
                if herm[i, j] == 0:
                    continue
                ops = [np.eye(cutoff, dtype=complex)] * m
                if i == j:
                    ops[i] = ad @ a
                    local = ops[0]
                    for q in range(1, m):
                        local = np.kron(local, ops[q])
                    gen += herm[i, j] * local
                else:
                    opsA = [np.eye(cutoff, dtype=complex)] * m
                    opsA[i] = ad
                    opsA[j] = a
                    local = opsA[0]
                    for q in range(1, m):
                        local = np.kron(local, opsA[q])
                    gen += herm[i, j] * local
        return expm(1j * gen), gate.modes
    raise ValueError(f"unsupported gate kind {k!r}")


def _apply_local(total: np.ndarray, local: np.ndarray, modes: Sequence[int],
                 num_modes: int, cutoff: int) -> np.ndarray:
    """Left-multiply by a k-mode gate without forming its full embedding."""
    dim = cutoff ** num_modes
    k = len(modes)
    tens = total.reshape([cutoff] * num_modes + [dim])
    perm = list(modes) + [ax for ax in range(num_modes) if ax not in modes] + [num_modes]
    tens = np.transpose(tens, perm)
    rest_shape = tens.shape[k:]
    flat = tens.reshape(cutoff**k, -1)
    flat = local @ flat
    tens = flat.reshape([cutoff] * k + list(rest_shape))
    tens = np.transpose(tens, np.argsort(perm))
    return tens.reshape(dim, dim)


def circuit_unitary(
    circ: Circuit,
    cutoff: int,
    hbar: float = DEFAULT_HBAR,
    max_dim: int = MAX_DIMENSION,
) -> FockOperator:
    """Ordered product of gate unitaries (first gate acts first)."""
    _check_dim(cutoff, circ.num_modes, max_dim)
    dim = cutoff ** circ.num_modes
    total = np.eye(dim, dtype=complex)
    cache: Dict = {}
    for gate in circ.gates:
        key = (gate.kind, gate.modes, gate.params, None if gate.matrix is None else gate.matrix.tobytes())
        if key not in cache:
            cache[key] = _gate_local_unitary(gate, cutoff, hbar)
        local, modes = cache[key]
        total = _apply_local(total, local, modes, circ.num_modes, cutoff)
    return FockOperator(cutoff, circ.num_modes, total, hbar)


# -- comparison ---------------------------------------------------------------


@dataclass
class ComparisonReport:
    subspace_dim: int
    distance: float
    fidelity: float
    leakage: float

    def to_json(self) -> dict:
        return {
            "subspace_dim": self.subspace_dim,
            "distance": self.distance,
            "fidelity": self.fidelity,
            "leakage": self.leakage,
        }


def low_level_indices(cutoff: int, num_modes: int, levels: int) -> list:
    """Indices of basis states with every mode occupation below ``levels``."""
    if levels > cutoff:
        raise ValueError("levels exceeds cutoff")
    idx = [0]
    for _ in range(num_modes):
        idx = [i * cutoff + n for i in idx for n in range(levels)]
    return idx


def photon_shell_indices(cutoff: int, num_modes: int, max_total: int) -> list:
    """Indices of basis states with total occupation <= max_total."""
    idx = []
    def rec(prefix, total, depth):
        if depth == num_modes:
            val = 0
            for n in prefix:
                val = val * cutoff + n
            idx.append(val)
            return
        for n in range(min(cutoff - 1, max_total - total) + 1):
            rec(prefix + [n], total + n, depth + 1)
    rec([], 0, 0)
    return sorted(idx)


def compare(
    u_target: FockOperator,
    u_circuit: FockOperator,
    d: int | None = None,
    indices: Sequence[int] | None = None,
) -> ComparisonReport:
    """Distance and fidelity between two operators on a subspace, after
    optimal global-phase alignment; leakage of the circuit action out of the
    subspace is reported separately."""
    A, B = u_target.matrix, u_circuit.matrix
    if A.shape != B.shape:
        raise ValueError("dimension mismatch")
    n = A.shape[0]
    if indices is None:
        if d is None:
            raise ValueError("give either d or indices")
        if d > n:
            raise ValueError("subspace larger than the operator")
        indices = list(range(d))
    indices = list(indices)
    As = A[np.ix_(indices, indices)]
    Bs = B[np.ix_(indices, indices)]
    tr = np.trace(As.conj().T @ Bs)
    phase = tr / abs(tr) if abs(tr) > 0 else 1.0
    distance = float(np.linalg.norm(As - Bs / phase, 2))
    na = np.sqrt(abs(np.trace(As.conj().T @ As)))
    nb = np.sqrt(abs(np.trace(Bs.conj().T @ Bs)))
    fidelity = float(abs(tr) / (na * nb)) if na > 0 and nb > 0 else 0.0
    fidelity = min(fidelity, 1.0)
    mask = np.ones(n, dtype=bool)
    mask[indices] = False
    leak = float(max(np.linalg.norm(B[mask][:, j]) for j in indices))
    return ComparisonReport(len(indices), distance, fidelity, leak)
