r"""Gate-count comparison table for common target gates.

Reference values are the published counts for the three methods (commutator
approximation at 1e-3 precision, exact synthesis, and exact synthesis via the
product-as-sum expansion).  Exact columns are recomputed by building the
circuits; the commutator column uses the closed-form expansion-count model
(uniform per-level K = ceil((levels/eps)^(1/4))), so astronomically deep
budgets are never materialized.  Cells that deviate from the reference carry
a counting-ledger note.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .algebra import QuadPoly
from .commutator import ApproximationBudget, compile_approximate
from .exact import IneligibleTarget, MonomialTarget, synthesize_product

DEFAULT_HBAR = 2.0

# derivable from the printed identities alone; must match exactly
DERIVABLE_EXACT = {"x1*x2*x3": {"exact": 17, "generalized": 20}, "x1^4": {"exact": 29}}


@dataclass
class TableRow:
    label: str
    exponents: Dict[int, int]
    ref_commutator: float
    ref_exact: Optional[int]
    ref_generalized: Optional[int]
    commutator: float = 0.0
    exact: Optional[int] = None
    generalized: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    def in_band(self) -> bool:
        if self.ref_commutator == 0:
            return True
        ratio = self.commutator / self.ref_commutator
        return 1.0 / 3.0 <= ratio <= 3.0

    def to_json(self) -> dict:
        return {
            "target": self.label,
            "commutator": {
                "count": self.commutator,
                "reference": self.ref_commutator,
                "within_3x_band": self.in_band(),
            },
            "exact": {"count": self.exact, "reference": self.ref_exact,
                      "match": self.exact == self.ref_exact},
            "generalized": {"count": self.generalized, "reference": self.ref_generalized,
                            "match": self.generalized == self.ref_generalized},
            "notes": self.notes,
        }


ROWS = [
    ("x1^4", {0: 4}, 1.8e4, 29, None),
    ("x1^2*x2^2", {0: 2, 1: 2}, 2.8e4, 119, 279),
    ("x1*x2^3", {0: 1, 1: 3}, 2.9e8, 269, 93),
    ("x1*x2*x3", {0: 1, 1: 1, 2: 1}, 4.2e8, 17, 20),
    ("x1^2*x2*x3", {0: 2, 1: 1, 2: 1}, 1.4e9, 249, 198),
    ("x1*x2*x3*x4", {0: 1, 1: 1, 2: 1, 3: 1}, 6.9e13, 440, 280),
    ("x1^6", {0: 6}, 1.2e13, 809, None),
    ("x1^2*x2^4", {0: 2, 1: 4}, 2.4e13, 3320, 12165),
]


def _chain_count(depth: int, epsilon: float) -> float:
    """Closed-form count for a depth-d chain of group-commutator levels whose
    innermost cell pairs two primitive gates: T_1 = 4K², T_d = K²(2 + 2T_{d-1})."""
    import math

    K = max(1, math.ceil((depth / epsilon) ** 0.25))
    total = 4 * K * K
    for _ in range(depth - 1):
        total = K * K * (2 + 2 * total)
    return float(total)


def _commutator_count(label: str, exponents: Dict[int, int], epsilon: float,
                      hbar: float, notes: List[str]) -> float:
    n_modes = len(exponents)
    if n_modes <= 2:
        poly = QuadPoly.scalar(1)
        for m, s in exponents.items():
            poly = poly * QuadPoly.x(m, s)
        report = compile_approximate(poly, ApproximationBudget(epsilon=epsilon),
                                     hbar, materialize=False)
        return float(report.counts.total_excluding_fourier)
    # multimode products: documented mode-by-mode commutator chain (one level
    # per mode, raised exponents ride along) plus the final nested two-mode
    # identity grounding the all-momentum product
    depth = n_modes + 1
    notes.append(
        f"multimode chain model: depth {depth}, innermost nested two-mode identity"
    )
    return _chain_count(depth, epsilon)


def build_table(epsilon: float = 1e-3, hbar: float = DEFAULT_HBAR) -> List[TableRow]:
    rows: List[TableRow] = []
    for label, exps, ref_c, ref_e, ref_g in ROWS:
        row = TableRow(label, exps, ref_c, ref_e, ref_g)
        row.commutator = _commutator_count(label, exps, epsilon, hbar, row.notes)
        try:
            rep = synthesize_product(MonomialTarget(exps, 1.0), "classic", hbar)
            row.exact = rep.counts.total_excluding_fourier
        except IneligibleTarget as exc:
            row.exact = None
            row.notes.append(f"exact: {exc}")
        try:
            rep = synthesize_product(MonomialTarget(exps, 1.0), "generalized", hbar)
            row.generalized = rep.counts.total_excluding_fourier
        except IneligibleTarget:
            row.generalized = None  # single-mode targets have no expansion column
        if row.exact != ref_e and row.exact is not None:
            row.notes.append(
                f"exact-count ledger: construction yields {row.exact} "
                f"(reference {ref_e}); see the per-construction breakdown in the report"
            )
        if row.generalized is not None and row.generalized != ref_g:
            row.notes.append(
                f"generalized-count ledger: {len_terms_note(exps)} "
                f"yields {row.generalized} (reference {ref_g})"
            )
        if not row.in_band():
            row.notes.append(
                "commutator count outside the 3x band: the reference presumes a "
                "deeper repetition allocation than the documented uniform model"
            )
        rows.append(row)
    return rows


def len_terms_note(exps: Dict[int, int]) -> str:
    from .algebra import product_as_power_sum

    expansion = product_as_power_sum(exps)
    nonzero = sum(1 for c, hs in expansion.entries if any(h != 0 for h in hs))
    return f"{nonzero} emitted expansion terms (degenerate weight tuples dropped)"


def format_table(rows: List[TableRow]) -> str:
    header = (
        f"{'target':14s} {'commutator':>12s} {'ref':>9s} {'band':>5s} "
        f"{'exact':>6s} {'ref':>6s} {'ok':>3s} {'general':>8s} {'ref':>6s} {'ok':>3s}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        def fmt(v):
            return "-" if v is None else str(v)

        band = "yes" if r.in_band() else "NO"
        e_ok = "=" if r.exact == r.ref_exact else "*"
        g_ok = "=" if r.generalized == r.ref_generalized else ("-" if r.generalized is None else "*")
        lines.append(
            f"{r.label:14s} {r.commutator:12.3g} {r.ref_commutator:9.2g} {band:>5s} "
            f"{fmt(r.exact):>6s} {fmt(r.ref_exact):>6s} {e_ok:>3s} "
            f"{fmt(r.generalized):>8s} {fmt(r.ref_generalized):>6s} {g_ok:>3s}"
        )
    lines.append("band = commutator count within 3x of the reference at the")
    lines.append("documented uniform K allocation; '*' cells carry ledger notes.")
    return "\n".join(lines)
