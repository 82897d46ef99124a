"""Circuit IR: inversion, conjugation, counting, JSON schema."""

import json

import numpy as np
import pytest

from cvcompile.circuit import (
    Circuit,
    Gate,
    conjugate,
    count_gates,
    inverse,
    merge_adjacent,
    shear_gate,
)


def test_gate_arity_enforced():
    with pytest.raises(ValueError):
        Gate("CZ", (0,), (1.0,))
    with pytest.raises(ValueError):
        Gate("V", (0, 1), (1.0,))
    with pytest.raises(ValueError):
        Gate("CZ", (1, 1), (1.0,))


def test_interferometer_needs_unitary():
    with pytest.raises(ValueError):
        Gate("U", (0, 1), (), np.array([[1.0, 0.2], [0.0, 1.0]]))


def test_mode_bounds():
    circ = Circuit(2, [])
    with pytest.raises(ValueError):
        circ.append(Gate("V", (2,), (0.1,)))


def test_inverse_single_gate():
    circ = Circuit(1, [Gate("V", (0,), (0.3,))])
    inv = inverse(circ)
    assert inv.gates == [Gate("V", (0,), (-0.3,))]


def test_inverse_antidistributes():
    circ = Circuit(2, [Gate("BS", (0, 1), (0.4,)), Gate("T", (0,), (0.2,))])
    inv = inverse(circ)
    assert [g.kind for g in inv.gates] == ["T", "BS"]
    assert inv.gates[0].params == (-0.2,)
    assert inv.gates[1].params == (-0.4,)


def test_inverse_empty():
    assert inverse(Circuit(3, [])).gates == []


def test_conjugate_structure():
    outer = Circuit(2, [Gate("CZ", (0, 1), (0.7,))])
    innerc = Circuit(2, [Gate("V", (0,), (0.1,))])
    out = conjugate(outer, innerc)
    assert [g.kind for g in out.gates] == ["CZ", "V", "CZ"]
    assert out.gates[0].params == (0.7,)
    assert out.gates[2].params == (-0.7,)


def test_conjugate_empty_outer():
    innerc = Circuit(1, [Gate("P", (0,), (0.2,))])
    out = conjugate(Circuit(1, []), innerc)
    assert out.gates == innerc.gates


def test_count_gates_excludes_fourier():
    circ = Circuit(1, [Gate("F", (0,), (1.0,)), Gate("V", (0,), (0.1,)), Gate("F", (0,), (-1.0,))])
    rep = count_gates(circ)
    assert rep.total_excluding_fourier == 1
    assert rep.total_including_fourier == 3
    assert rep.counts == {"F": 2, "V": 1}


def test_count_empty():
    rep = count_gates(Circuit(1, []))
    assert rep.total_excluding_fourier == 0
    assert rep.counts == {}


def test_count_invariant_under_relabeling():
    gates = [Gate("CZ", (0, 1), (0.3,)), Gate("V", (1,), (0.2,))]
    relabeled = [Gate("CZ", (2, 1), (0.3,)), Gate("V", (1,), (0.2,))]
    c1 = count_gates(Circuit(2, gates))
    c2 = count_gates(Circuit(3, relabeled))
    assert c1.counts == c2.counts


def test_json_round_trip():
    circ = Circuit(2, [
        Gate("CZ", (0, 1), (0.5,)),
        Gate("U", (0, 1), (), np.array([[0, 1], [1, 0]], dtype=complex)),
        Gate("D", (0,), (0.1, -0.2)),
    ], {1})
    data = circ.to_json(hbar=2.0)
    assert data["convention"] == {"hbar": 2.0, "order": "first-applied-first"}
    assert data["ancillae"] == [1]
    assert set(data["gates"][0]) == {"kind", "modes", "params"}
    text = json.dumps(data)
    back = Circuit.from_json(json.loads(text))
    assert back.num_modes == 2
    assert back.gates[0] == circ.gates[0]
    assert np.allclose(back.gates[1].matrix, circ.gates[1].matrix)
    assert back.ancilla_modes == {1}


def test_merge_adjacent_shears():
    gates = shear_gate(0, 1, 1.0, 2.0) + shear_gate(0, 1, 1.0, 2.0)
    merged = merge_adjacent(gates)
    kinds = [g.kind for g in merged]
    assert kinds == ["F", "CZ", "F"]
    assert merged[1].params == (-2.0,)


def test_merge_does_not_cross_modes():
    gates = [Gate("CZ", (0, 1), (0.5,)), Gate("CZ", (0, 2), (0.5,))]
    assert merge_adjacent(gates) == gates
