r"""Circuit intermediate representation over the universal gate set.

Gate kinds and their unitaries (hbar is bound at emission/verification):

====  ============================================  =====================
kind  unitary                                       params
====  ============================================  =====================
R     exp(i θ (x² + p²) / 2ħ)                       [theta]
Z     exp(i t₁ x / ħ)                               [t1]
P     exp(i t₂ x² / 2ħ)                             [t2]
V     exp(i t₃ x³ / 3ħ)                             [t3]
CZ    exp(i τ x_j x_k / ħ)                          [tau]
D     exp(α a† − α* a)                              [re α, im α]
T     exp(s (a†² − a²) / 2)                         [s]
BS    exp(i θ (a_j† a_k + a_k† a_j))                [theta]
U     interferometer with M×M unitary matrix        complex matrix
F     Fourier gate R(π/2); param −1 is its inverse  [sign]
====  ============================================  =====================

List order is temporal: the first gate in ``Circuit.gates`` acts first on
states, so the matrix realization multiplies in reverse list order.  Gate
counts follow the convention that Fourier gates are excluded from the
headline total.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

GATE_ARITY = {
    "R": 1, "Z": 1, "P": 1, "V": 1, "D": 1, "T": 1, "F": 1,
    "CZ": 2, "BS": 2,
}

UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Gate:
    kind: str
    modes: Tuple[int, ...]
    params: Tuple[float, ...] = ()
    matrix: np.ndarray | None = None  # Interferometer ("U") only

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind == "U":
            if self.matrix is None:
                raise ValueError("interferometer gate needs a matrix")
            mat = np.asarray(self.matrix, dtype=complex)
            if mat.shape != (len(self.modes), len(self.modes)):
                raise ValueError("interferometer matrix shape does not match modes")
            if np.linalg.norm(mat @ mat.conj().T - np.eye(len(self.modes))) > UNITARY_TOL:
                raise ValueError("interferometer matrix is not unitary")
            object.__setattr__(self, "matrix", mat)
        elif self.kind in GATE_ARITY:
            if len(self.modes) != GATE_ARITY[self.kind]:
                raise ValueError(f"gate {self.kind} expects {GATE_ARITY[self.kind]} mode(s)")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError("gate modes must be distinct")

    def inverse(self) -> "Gate":
        if self.kind == "U":
            return Gate("U", self.modes, (), self.matrix.conj().T)
        if self.kind == "D":
            re, im = self.params
            return Gate("D", self.modes, (-re, -im))
        return Gate(self.kind, self.modes, tuple(-p for p in self.params))

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.modes, self.params) != (other.kind, other.modes, other.params):
            return False
        if self.kind == "U":
            return np.allclose(self.matrix, other.matrix)
        return True


@dataclass
class Circuit:
    """Ordered gate list; first entry acts first on states."""

    num_modes: int
    gates: List[Gate] = field(default_factory=list)
    ancilla_modes: set = field(default_factory=set)

    def __post_init__(self):
        for g in self.gates:
            if max(g.modes, default=-1) >= self.num_modes:
                raise ValueError("gate mode index out of range")

    def append(self, gate: Gate) -> None:
        if max(gate.modes, default=-1) >= self.num_modes:
            raise ValueError("gate mode index out of range")
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def __len__(self):
        return len(self.gates)

    def to_json(self, hbar: float) -> dict:
        gates = []
        for g in self.gates:
            entry: dict = {"kind": g.kind, "modes": list(g.modes)}
            if g.kind == "U":
                entry["params"] = {
                    "re": np.real(g.matrix).tolist(),
                    "im": np.imag(g.matrix).tolist(),
                }
            else:
                entry["params"] = list(g.params)
            gates.append(entry)
        return {
            "num_modes": self.num_modes,
            "gates": gates,
            "ancillae": sorted(self.ancilla_modes),
            "convention": {"hbar": hbar, "order": "first-applied-first"},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Circuit":
        if "gates" not in data and "circuit" in data:
            data = data["circuit"]  # decomposition reports embed the circuit
        gates = []
        for entry in data["gates"]:
            params = entry.get("params", [])
            if isinstance(params, dict):
                mat = np.asarray(params["re"], dtype=float) + 1j * np.asarray(params["im"], dtype=float)
                gates.append(Gate("U", tuple(entry["modes"]), (), mat))
            else:
                gates.append(Gate(entry["kind"], tuple(entry["modes"]), tuple(params)))
        return cls(int(data["num_modes"]), gates, set(data.get("ancillae", [])))

    def dumps(self, hbar: float) -> str:
        return json.dumps(self.to_json(hbar), indent=2)


def inverse(c: Circuit) -> Circuit:
    """Reverse the gate order and invert each gate."""
    return Circuit(c.num_modes, [g.inverse() for g in reversed(c.gates)], set(c.ancilla_modes))


def conjugate(outer: Circuit, inner: Circuit) -> Circuit:
    """outer† ∘ inner ∘ outer as a flat list: outer, then inner, then
    inverse(outer).  Realizes exp(i t U_outer† H U_outer) when inner is
    exp(i t H)."""
    n = max(outer.num_modes, inner.num_modes)
    out = Circuit(n, [], set(outer.ancilla_modes) | set(inner.ancilla_modes))
    out.extend(outer.gates)
    out.extend(inner.gates)
    out.extend(inverse(outer).gates)
    return out


@dataclass
class GateCountReport:
    counts: Dict[str, int]
    total_excluding_fourier: int
    total_including_fourier: int
    ancilla_count: int

    def to_json(self) -> dict:
        return {
            "counts": dict(sorted(self.counts.items())),
            "total_excluding_fourier": self.total_excluding_fourier,
            "total_including_fourier": self.total_including_fourier,
            "ancillae": self.ancilla_count,
        }


def count_gates(c: Circuit) -> GateCountReport:
    counts: Dict[str, int] = {}
    for g in c.gates:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    total_all = len(c.gates)
    total = total_all - counts.get("F", 0)
    return GateCountReport(counts, total, total_all, len(c.ancilla_modes))


# -- composite emission helpers ----------------------------------------------
#
# The exact compilers emit only {Z, P, V, CZ, F} gates.  Momentum-basis and
# coupling gates are Fourier-wrapped positional gates; wraps cancel where
# adjacent so repeated conjugation does not pile up Fourier gates.


def x_power_gate(mode: int, power: int, coeff: float, hbar: float) -> List[Gate]:
    """exp(i coeff x_mode^power) for power in {1, 2, 3} as a single gate."""
    if power == 1:
        return [Gate("Z", (mode,), (coeff * hbar,))]
    if power == 2:
        return [Gate("P", (mode,), (2.0 * hbar * coeff,))]
    if power == 3:
        return [Gate("V", (mode,), (3.0 * hbar * coeff,))]
    raise ValueError("not a primitive power")


def p_cubed_gate(mode: int, coeff: float, hbar: float) -> List[Gate]:
    """exp(i coeff p_mode^3) = F† V F with V realizing exp(-i coeff x³)."""
    return [
        Gate("F", (mode,), (1.0,)),
        Gate("V", (mode,), (-3.0 * hbar * coeff,)),
        Gate("F", (mode,), (-1.0,)),
    ]


def shear_gate(mode_j: int, mode_k: int, weight: float, hbar: float) -> List[Gate]:
    """exp(i (weight/ħ) p_j x_k): maps x_j -> x_j + weight * x_k.

    Fourier-conjugated CZ; one counted gate.
    """
    return [
        Gate("F", (mode_j,), (1.0,)),
        Gate("CZ", (mode_j, mode_k), (-weight,)),
        Gate("F", (mode_j,), (-1.0,)),
    ]


def simplify_fourier_pairs(gates: Sequence[Gate]) -> List[Gate]:
    """Cancel adjacent F / F† pairs on the same mode (emission hygiene)."""
    out: List[Gate] = []
    for g in gates:
        if (
            out
            and g.kind == "F"
            and out[-1].kind == "F"
            and g.modes == out[-1].modes
            and g.params[0] == -out[-1].params[0]
        ):
            out.pop()
        else:
            out.append(g)
    return out


def merge_adjacent(gates: Sequence[Gate]) -> List[Gate]:
    """Merge adjacent same-kind, same-mode parameterized gates by adding
    parameters.  Fourier cancellation runs first so CZ gates separated only
    by an F†F seam merge too.  Interferometer gates are left alone."""
    gates = simplify_fourier_pairs(gates)
    out: List[Gate] = []
    for g in gates:
        if (
            out
            and g.kind == out[-1].kind
            and g.kind in {"Z", "P", "V", "CZ", "BS", "R", "T"}
            and g.modes == out[-1].modes
        ):
            prev = out.pop()
            merged = Gate(g.kind, g.modes, tuple(a + b for a, b in zip(prev.params, g.params)))
            out.append(merged)
        else:
            out.append(g)
    return simplify_fourier_pairs(out)
