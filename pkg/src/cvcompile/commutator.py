r"""Approximate compilation via commutator rewriting and product formulas.

Pipeline: a Hermitian generator splits into monomial summands (product-formula
repetition when they do not commute); each summand is rewritten as nested
commutators of exponentiable generators; each commutator is expanded with the
group-commutator cell

    exp(w [A, B]) = (e^{i(τ/K)B} e^{i(τ/K)A} e^{-i(τ/K)B} e^{-i(τ/K)A})^{K²},
    τ = sqrt(w),  error O(τ⁴/K),

and its nested variant where one factor is itself a commutator exponential.
Factors that are not primitives recurse through their own rewrites.

The gate-count model is closed-form over the same expansion tree, so counts
for astronomically deep budgets never materialize circuits.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (
    IDENTITY_MONO,
    Coeff,
    CommutatorExpr,
    QuadPoly,
    SumRewriteResult,
    UnsupportedMonomial,
    commutator,
    mono_degree,
    rewrite_hermitian_poly,
    rewrite_to_commutators,
)
from .circuit import Circuit, Gate, GateCountReport, count_gates, p_cubed_gate, x_power_gate
from .exact import DecompositionReport
from .gaussian import QuadraticHamiltonian, compile_gaussian

DEFAULT_HBAR = 2.0
MATERIALIZE_LIMIT = 200_000


class IneligibleTerm(ValueError):
    pass


class UnsynthesizableFactor(ValueError):
    pass


@dataclass
class ApproximationBudget:
    """Precision/repetition budget.

    When only ``epsilon`` is given, every expansion level uses the same
    repetition index K = ceil((L/epsilon)^(1/4)) where L is the number of
    levels in the target's expansion tree (uniform error split across levels;
    quartic root from the O(τ⁴/K) cell error at unit constants).
    """

    epsilon: float | None = None
    t: float = 1.0
    K: int | None = None

    def level_K(self, levels: int) -> int:
        if self.K is not None:
            return max(1, int(self.K))
        if self.epsilon is None:
            raise ValueError("budget needs epsilon or K")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        return max(1, math.ceil((max(1, levels) / self.epsilon) ** 0.25))


@dataclass
class ExpansionTrace:
    label: str
    repetitions: int = 1
    leaf_count: int = 0
    children: List["ExpansionTrace"] = field(default_factory=list)

    def total(self) -> int:
        return self.repetitions * (self.leaf_count + sum(c.total() for c in self.children))

    def depth(self) -> int:
        return (1 if self.repetitions > 1 or self.children else 0) + max(
            (c.depth() for c in self.children), default=0
        )

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "repetitions": self.repetitions,
            "leaves": self.leaf_count,
            "children": [c.to_json() for c in self.children],
            "total": self.total(),
        }


# -- primitive factor emission ---------------------------------------------------


def _leaf_gates(poly: QuadPoly, s: float, hbar: float) -> Optional[List[Gate]]:
    """Gates for exp(i s P) when P is a directly exponentiable generator:
    single-mode powers up to cubic, two-mode quadrature couplings, scalars."""
    if poly.is_zero():
        return []
    if len(poly.terms) != 1:
        return None
    (m, c), = poly.terms.items()
    cval = c.to_complex(hbar)
    if abs(cval.imag) > 1e-12:
        return None
    coeff = s * cval.real
    if m == IDENTITY_MONO:
        return []
    entries = list(m)
    if len(entries) == 1:
        mode, dx, dp = entries[0]
        if dp == 0 and dx <= 3:
            return x_power_gate(mode, dx, coeff, hbar)
        if dx == 0 and dp <= 3:
            if dp == 3:
                return p_cubed_gate(mode, coeff, hbar)
            if dp == 1:
                # exp(i c p) is a position displacement
                alpha = -coeff * math.sqrt(hbar / 2)
                return [Gate("D", (mode,), (alpha, 0.0))]
            if dp == 2:
                return [
                    Gate("F", (mode,), (1.0,)),
                    Gate("P", (mode,), (2.0 * hbar * coeff,)),
                    Gate("F", (mode,), (-1.0,)),
                ]
        return None
    if len(entries) == 2:
        (m1, dx1, dp1), (m2, dx2, dp2) = entries
        if dx1 + dp1 != 1 or dx2 + dp2 != 1:
            return None
        gates: List[Gate] = [Gate("CZ", (m1, m2), (coeff * hbar,))]
        sign = 1.0
        if dp1:
            # p_1-coupling: wrap a Fourier on mode 1 (x -> p costs a sign)
            gates = [Gate("F", (m1,), (1.0,))] + gates + [Gate("F", (m1,), (-1.0,))]
            sign = -sign
        if dp2:
            gates = [Gate("F", (m2,), (1.0,))] + gates + [Gate("F", (m2,), (-1.0,))]
            sign = -sign
        if sign < 0:
            gates = [
                Gate("CZ", g.modes, (-g.params[0],)) if g.kind == "CZ" else g for g in gates
            ]
        return gates
    return None


# -- expansion of commutator trees -------------------------------------------------


class _Expander:
    def __init__(self, K: int, hbar: float, materialize: bool):
        self.K = K
        self.hbar = hbar
        self.materialize = materialize

    def factor(self, poly: QuadPoly, s: float, trace: ExpansionTrace) -> List[Gate]:
        """Gates for exp(i s P), recursing through rewrites when P is not a
        primitive generator."""
        leaf = _leaf_gates(poly, s, self.hbar)
        if leaf is not None:
            trace.leaf_count += sum(1 for g in leaf if g.kind != "F")
            return leaf
        # non-primitive Hermitian generator: rewrite and expand
        if len(poly.terms) == 1:
            (m, c), = poly.terms.items()
            cval = c.to_complex(self.hbar)
            if abs(cval.imag) > 1e-12:
                raise UnsynthesizableFactor(f"non-Hermitian factor {poly!r}")
            try:
                res = rewrite_to_commutators(m)
            except UnsupportedMonomial as exc:
                raise UnsynthesizableFactor(str(exc)) from exc
            return self.rewrite_result(res, s * cval.real, trace)
        res = rewrite_hermitian_poly(poly)
        return self.rewrite_result(res, s, trace)

    def rewrite_result(self, res, s: float, trace: ExpansionTrace) -> List[Gate]:
        trees = res.trees if isinstance(res, SumRewriteResult) else [(res.prefactor, res.tree)]
        gates: List[Gate] = []
        for pref, tree in trees:
            c = pref.to_complex(self.hbar)
            gates.extend(self.tree(tree, s * c, trace))
        return gates

    def tree(self, tree: CommutatorExpr, weight: complex, trace: ExpansionTrace) -> List[Gate]:
        """Gates for exp(i * weight * tree-evaluation).

        Leaf: Hermitian generator, weight real.  Single commutator [L, R] of
        Hermitians is anti-Hermitian, so the weight must be imaginary.  A
        nested [B, [C, D]] is Hermitian again: weight real.
        """
        weight = complex(weight)
        if tree.kind == "leaf":
            if abs(weight.imag) > 1e-12 * (1 + abs(weight)):
                raise UnsynthesizableFactor("imaginary weight on a Hermitian leaf")
            return self.factor(tree.payload, weight.real, trace)
        left, right = tree.payload
        if left.kind == "leaf" and right.kind == "leaf":
            # exp(i w [L,R]) with w = i v  ->  exp(-v [L,R]) = exp(v [R,L])
            if abs(weight.real) > 1e-12 * (1 + abs(weight)):
                raise UnsynthesizableFactor("single-commutator weight must be imaginary")
            v = weight.imag
            return self._group(right.payload, left.payload, v, trace)
        if abs(weight.imag) > 1e-12 * (1 + abs(weight)):
            raise UnsynthesizableFactor("nested-commutator weight must be real")
        if left.kind == "leaf" and right.kind == "comm":
            return self._nested(left.payload, right, weight.real, trace)
        if right.kind == "leaf" and left.kind == "comm":
            return self._nested(right.payload, left, -weight.real, trace)
        raise UnsynthesizableFactor("doubly nested commutator shapes are not expanded")

    def _group(self, A: QuadPoly, B: QuadPoly, w: float, trace: ExpansionTrace) -> List[Gate]:
        """exp(w [A, B]) via K²-repeated four-factor cells, w real."""
        if w < 0:
            A, B = B, A
            w = -w
        tau = math.sqrt(w)
        K = self.K
        node = ExpansionTrace("group-commutator", repetitions=K * K)
        trace.children.append(node)
        cell: List[Gate] = []
        # operator product e^{i(τ/K)B} e^{i(τ/K)A} e^{-i(τ/K)B} e^{-i(τ/K)A},
        # emitted temporally reversed
        cell.extend(self.factor(A, -tau / K, node))
        cell.extend(self.factor(B, -tau / K, node))
        cell.extend(self.factor(A, tau / K, node))
        cell.extend(self.factor(B, tau / K, node))
        if not self.materialize:
            return []
        return cell * (K * K)

    def _nested(self, B: QuadPoly, inner: CommutatorExpr, w: float,
                trace: ExpansionTrace) -> List[Gate]:
        """exp(i w [B, [C, D]]) with Hermitian B and inner commutator [C, D].

        Cells alternate B-factors at parameter t/K with inner-commutator
        blocks of weight t²/K, t = cbrt(w); the K²-repeated product then
        carries the full i t³ [B, [C, D]] with cell error O(t⁴/K).
        """
        t = math.copysign(abs(w) ** (1.0 / 3.0), w)
        K = self.K
        node = ExpansionTrace("nested-group-commutator", repetitions=K * K)
        trace.children.append(node)
        # inner block realizes exp(w_in [C, D]); via tree() that is an
        # imaginary weight -i w_in
        w_in = (t * t) / K
        cell: List[Gate] = []
        # operator product e^{i(t/K)B} e^{w_in[C,D]} e^{-i(t/K)B} e^{-w_in[C,D]}
        cell.extend(self.tree(inner, 1j * w_in, node))
        cell.extend(self.factor(B, -t / K, node))
        cell.extend(self.tree(inner, -1j * w_in, node))
        cell.extend(self.factor(B, t / K, node))
        if not self.materialize:
            return []
        return cell * (K * K)


# -- public operations ---------------------------------------------------------


def group_commutator(A: QuadPoly, B: QuadPoly, t: float, K: int,
                     hbar: float = DEFAULT_HBAR) -> Circuit:
    """Circuit approximating exp(t² [A, B]) with K²-repeated cells."""
    expander = _Expander(K, hbar, materialize=True)
    trace = ExpansionTrace("root")
    gates = expander._group(A, B, t * t, trace)
    return _gates_to_circuit(gates)


def nested_group_commutator(B: QuadPoly, A: QuadPoly, t: float, K: int,
                            hbar: float = DEFAULT_HBAR) -> Circuit:
    """Circuit approximating exp(i t³ [B, [B, A]])."""
    expander = _Expander(K, hbar, materialize=True)
    trace = ExpansionTrace("root")
    inner = CommutatorExpr.comm(CommutatorExpr.leaf(B), CommutatorExpr.leaf(A))
    tree = CommutatorExpr.comm(CommutatorExpr.leaf(B), inner)
    gates = expander.tree(tree, t**3, trace)
    return _gates_to_circuit(gates)


def _gates_to_circuit(gates: List[Gate]) -> Circuit:
    n = max((max(g.modes) for g in gates), default=0) + 1
    circ = Circuit(n, [])
    circ.extend(gates)
    return circ


# -- generator splitting ---------------------------------------------------------


def hermitian_summands(h: QuadPoly, hbar: float) -> List[Tuple[QuadPoly, float]]:
    """Split a Hermitian polynomial into Hermitian monomial summands:
    symmetrized pairs for same-mode mixed words, plain monomials otherwise.
    Returns (generator, real coefficient) pairs; a scalar term is dropped."""
    if not h.is_hermitian():
        raise IneligibleTerm("generator must be Hermitian")
    remaining = dict(h.terms)
    out: List[Tuple[QuadPoly, float]] = []
    guard = 0
    while remaining:
        guard += 1
        if guard > 500:
            raise IneligibleTerm("generator splitting did not terminate")
        m = max(remaining, key=lambda mm: (mono_degree(mm), mm))
        c = remaining.pop(m)
        if m == IDENTITY_MONO:
            continue
        word = QuadPoly({m: Coeff.of(1)})
        if word.is_hermitian():
            cval = c.to_complex(hbar)
            if abs(cval.imag) > 1e-12 * (1 + abs(cval)):
                raise IneligibleTerm(f"non-real coefficient on Hermitian word {m}")
            out.append((word, cval.real))
            continue
        # A non-Hermitian top word of a Hermitian residual always carries a
        # real coefficient (its adjoint partner reorders onto the same word),
        # and the symmetrized pair w + w† holds the word with weight 2.
        cval = c.to_complex(hbar)
        if abs(cval.imag) > 1e-12 * (1 + abs(cval)):
            raise IneligibleTerm(f"top word {m} carries an imaginary coefficient")
        sym = word + word.adjoint()
        half = Coeff({0: (Fraction(1, 2), Fraction(0))})
        rest = QuadPoly(remaining) + word * c - sym * (c * half)
        remaining = dict(rest.terms)
        out.append((sym, cval.real / 2))
    return out


# -- compile pipeline -------------------------------------------------------------


def _mutually_commuting(terms: Sequence[Tuple[QuadPoly, float]]) -> bool:
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if not commutator(terms[i][0], terms[j][0]).is_zero():
                return False
    return True


def _term_depth(poly: QuadPoly) -> int:
    """Number of expansion levels needed for one summand (0 for primitives)."""
    if _leaf_gates(poly, 1.0, DEFAULT_HBAR) is not None:
        return 0
    if poly.degree() <= 2:
        return 0
    if len(poly.terms) == 1:
        (m, _), = poly.terms.items()
        try:
            res = rewrite_to_commutators(m)
        except UnsupportedMonomial:
            return 0
        return _rewrite_depth(res)
    return _rewrite_depth(rewrite_hermitian_poly(poly))


def _rewrite_depth(res) -> int:
    trees = res.trees if isinstance(res, SumRewriteResult) else [(res.prefactor, res.tree)]
    depth = 0
    for _, tree in trees:
        depth = max(depth, _tree_depth(tree))
    return depth


def _tree_depth(tree: CommutatorExpr) -> int:
    if tree.kind == "leaf":
        poly = tree.payload
        if _leaf_gates(poly, 1.0, DEFAULT_HBAR) is not None:
            return 0
        if len(poly.terms) == 1:
            (m, _), = poly.terms.items()
            try:
                return _rewrite_depth(rewrite_to_commutators(m))
            except UnsupportedMonomial:
                return 0
        return 0
    left, right = tree.payload
    return 1 + max(_tree_depth(left), _tree_depth(right))


def compile_approximate(h: QuadPoly, budget: ApproximationBudget,
                        hbar: float = DEFAULT_HBAR,
                        materialize: bool = True) -> DecompositionReport:
    """Approximate circuit for exp(i t h) over the universal set.

    Summands that are Gaussian or primitive are emitted exactly; everything
    else goes through commutator rewriting and group-commutator cells.  When
    all summands commute the product formula is exact (no repetition and the
    split contributes no error).
    """
    terms = hermitian_summands(h, hbar)
    if not terms:
        return DecompositionReport(Circuit(1, []), count_gates(Circuit(1, [])), 0.0,
                                   "commutator", ["identity generator"])
    commuting = _mutually_commuting(terms)
    depths = [_term_depth(p) for p, _ in terms]
    levels = max(depths) + (0 if commuting else 1)
    K = budget.level_K(max(1, levels))
    K_outer = 1 if commuting else K
    expander = _Expander(K, hbar, materialize)
    trace = ExpansionTrace("trotter", repetitions=K_outer)
    gates: List[Gate] = []
    exact_so_far = True
    for (poly, coeff), depth in zip(terms, depths):
        s = budget.t * coeff / K_outer
        if poly.degree() <= 2 and _leaf_gates(poly, s, hbar) is None:
            sub = compile_gaussian(_quadratic_of(poly, s, hbar), hbar)
            trace.leaf_count += len(sub.gates)
            gates.extend(sub.gates)
            continue
        if depth > 0:
            exact_so_far = False
        gates.extend(expander.factor(poly, s, trace))
    if materialize and trace.total() <= MATERIALIZE_LIMIT:
        all_gates = gates * K_outer
        circ = _gates_to_circuit(all_gates) if all_gates else Circuit(1, [])
    else:
        circ = Circuit(1, [])
        materialize = False
    error_bound = 0.0
    if not commuting:
        error_bound += budget.t**2 / K_outer
    if not exact_so_far:
        error_bound += levels / K
    notes = [
        f"levels={levels}, K={K}, outer repetitions={K_outer}",
        "counting model: uniform per-level K = ceil((levels/epsilon)^(1/4))",
    ]
    if not materialize:
        notes.append("circuit not materialized (closed-form count only)")
    report = DecompositionReport(circ, count_gates(circ) if materialize else
                                 GateCountReport({}, trace.total(), trace.total(), 0),
                                 error_bound, "commutator", notes)
    report.trace = trace
    return report


def _quadratic_of(poly: QuadPoly, s: float, hbar: float) -> QuadraticHamiltonian:
    """Quadratic generator matrix H with (s * poly) = (1/2ħ) r^T H r + ..."""
    import numpy as np

    modes = poly.modes()
    M = (max(modes) + 1) if modes else 1
    H = np.zeros((2 * M, 2 * M))
    rbar = np.zeros(2 * M)
    for m, c in poly.terms.items():
        cv = c.to_complex(hbar) * s * hbar  # exp(i s P) = exp(i/ħ (s ħ P))
        entries = list(m)
        if m == IDENTITY_MONO:
            continue
        if len(entries) == 1:
            mode, dx, dp = entries[0]
            if (dx, dp) == (2, 0):
                H[mode, mode] += 2 * cv.real
            elif (dx, dp) == (0, 2):
                H[mode + M, mode + M] += 2 * cv.real
            elif (dx, dp) == (1, 0):
                rbar[mode] += cv.real
            elif (dx, dp) == (0, 1):
                rbar[mode + M] += cv.real
            elif (dx, dp) == (1, 1):
                # normal-form x p: x p = (sym + i ħ)/2; scalar part is a phase
                H[mode, mode + M] += cv.real
                H[mode + M, mode] += cv.real
            else:
                raise IneligibleTerm("not a quadratic generator")
        elif len(entries) == 2:
            (m1, dx1, dp1), (m2, dx2, dp2) = entries
            i1 = m1 if dx1 else m1 + M
            i2 = m2 if dx2 else m2 + M
            H[i1, i2] += cv.real
            H[i2, i1] += cv.real
        else:
            raise IneligibleTerm("not a quadratic generator")
    return QuadraticHamiltonian(H, rbar)


def trotter_split(h: QuadPoly, budget: ApproximationBudget,
                  hbar: float = DEFAULT_HBAR) -> Tuple[List[Tuple[QuadPoly, float]], int, float]:
    """Summands, repetition count and the product-formula error bound.

    The factor list is ordered by canonical monomial order; the split is
    exact (K = 1, bound 0) when all summands commute.
    """
    terms = hermitian_summands(h, hbar)
    if _mutually_commuting(terms):
        return terms, 1, 0.0
    K = budget.level_K(1)
    return terms, K, budget.t**2 / K
