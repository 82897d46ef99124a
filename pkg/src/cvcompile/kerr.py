r"""Driven-Kerr frame synthesis: squeeze/displace conjugation of the Kerr
Hamiltonian toward an effective cubic-phase generator.

The driven Kerr Hamiltonian  H = -(χ/2) a†²a² + δ a†a + β (a + a†)  is
conjugated by a displacement D(y) (real y) followed by a squeeze T(log λ),
which acts on quadratures as  x -> λ x + √(2ħ) y,  p -> p / λ.  The
conjugation is computed symbolically on the ladder expression and converted
to quadratures, so every coefficient (including its ħ weight) is derived
rather than transcribed.  Choosing  δ = 3χy² - χ  and  β = -2χy³  cancels
the x² and x terms exactly, leaving a cubic generator with quartic and p²
residuals that shrink as the squeeze scale grows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from .algebra import Coeff, QuadPoly, mono

DEFAULT_HBAR = 2.0


@dataclass
class DrivenKerrParams:
    chi: Fraction
    delta: Fraction
    beta: Fraction

    def __post_init__(self):
        self.chi = Fraction(self.chi)
        self.delta = Fraction(self.delta)
        self.beta = Fraction(self.beta)
        if self.chi == 0:
            raise ValueError("chi must be nonzero for synthesis")


@dataclass
class FrameParams:
    lam: Fraction
    y: Fraction

    def __post_init__(self):
        self.lam = Fraction(self.lam)
        self.y = Fraction(self.y)
        if self.lam <= 0:
            raise ValueError("squeeze scale must be positive")


def driven_kerr_hamiltonian(k: DrivenKerrParams) -> QuadPoly:
    """-(χ/2) a†²a² + δ a†a + β (a + a†) as a quadrature polynomial."""
    a = QuadPoly.a(0)
    ad = QuadPoly.adag(0)
    return (
        ad * ad * a * a * Coeff.of(Fraction(-k.chi, 2))
        + ad * a * Coeff.of(k.delta)
        + (a + ad) * Coeff.of(k.beta)
    )


def effective_hamiltonian(k: DrivenKerrParams, f: FrameParams) -> QuadPoly:
    """Exact conjugated polynomial T†(log λ) D†(y) H D(y) T(log λ)."""
    h = driven_kerr_hamiltonian(k)
    lam = Coeff.of(f.lam)
    inv_lam = Coeff.of(Fraction(1, 1) / f.lam)
    shift = Coeff.of(f.y, 0, 1)  # sqrt(2 hbar) * y
    x_new = QuadPoly.x(0) * lam + QuadPoly.scalar(shift)
    p_new = QuadPoly.p(0) * inv_lam
    return h.substitute({0: (x_new, p_new)})


def solve_cancellation(chi, y) -> Tuple[Fraction, Fraction]:
    """Detuning and drive that cancel the x² and x terms:
    δ = 3χy² - χ,  β = -2χy³."""
    chi, y = Fraction(chi), Fraction(y)
    return 3 * chi * y**2 - chi, -2 * chi * y**3


def _abs_complex(c: Coeff, hbar: float) -> float:
    return abs(c.to_complex(hbar))


def cubic_residual(chi, lam, y_scaling_exponent: int = 3,
                   hbar: float = DEFAULT_HBAR) -> Dict:
    """Leading cubic coefficient and residual-term ratios at y = λ^q.

    All numbers come from the symbolic effective polynomial with the
    cancellation conditions substituted; ratios are evaluated at the bound
    ħ (their ħ weights differ term by term).
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("squeeze scale must be positive")
    chi = Fraction(chi)
    y = lam**y_scaling_exponent
    delta, beta = solve_cancellation(chi, y)
    eff = effective_hamiltonian(DrivenKerrParams(chi, delta, beta), FrameParams(lam, y))
    x3 = eff.coefficient(mono((0, 3, 0)))
    x4 = eff.coefficient(mono((0, 4, 0)))
    p2 = eff.coefficient(mono((0, 0, 2)))
    cubic = _abs_complex(x3, hbar)
    quartic_ratio = _abs_complex(x4, hbar) / cubic if cubic else float("inf")
    p2_ratio = _abs_complex(p2, hbar) / cubic if cubic else float("inf")
    others = 0.0
    for m, c in eff.terms.items():
        if m in (mono((0, 3, 0)), mono((0, 4, 0)), mono((0, 0, 2)), ()):
            continue
        if m in (mono((0, 2, 0)), mono((0, 1, 0))):
            continue  # cancelled exactly; kept out of the tail report
        others = max(others, _abs_complex(c, hbar))
    return {
        "cubic_coeff": -cubic if x3.to_complex(hbar).real < 0 else cubic,
        "ratios": {
            "quartic_over_cubic": quartic_ratio,
            "p2_over_cubic": p2_ratio,
            "tail_over_cubic": others / cubic if cubic else float("inf"),
        },
        "cancellation": {"delta": float(delta), "beta": float(beta)},
        "lambda": float(lam),
        "y": float(y),
    }
