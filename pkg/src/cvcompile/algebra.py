r"""Exact symbolic algebra over polynomials in quadrature operators.

Operators are words in the position/momentum symbols ``x_j``, ``p_j`` of M
bosonic modes, with the canonical commutator ``[x_j, p_k] = i*hbar*delta_jk``.
Polynomials are kept in a normal form where, within each mode, all ``x``
factors precede all ``p`` factors; reordering corrections are tracked exactly.

Coefficients are exact: Gaussian rationals times integer powers of the
symbol ``s = sqrt(2*hbar)``.  Keeping ``s`` (rather than ``hbar``) symbolic
lets ladder-operator expressions like ``a = (x + i p)/sqrt(2*hbar)`` stay in
the same coefficient ring.  ``hbar`` itself is ``s**2 / 2``.  Numeric values
are produced only when a concrete ``hbar`` is bound.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple


class Coeff:
    """Exact scalar: a Laurent polynomial in s = sqrt(2*hbar) with Gaussian
    rational coefficients, i.e. sum_k (re_k + i*im_k) * s**k."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Tuple[Fraction, Fraction]] | None = None):
        clean: Dict[int, Tuple[Fraction, Fraction]] = {}
        if terms:
            for k, (re, im) in terms.items():
                if re or im:
                    clean[k] = (Fraction(re), Fraction(im))
        self.terms = clean

    @classmethod
    def of(cls, re=0, im=0, spow: int = 0) -> "Coeff":
        return cls({spow: (Fraction(re), Fraction(im))})

    @classmethod
    def hbar_pow(cls, n: int) -> "Coeff":
        # hbar**n = s**(2n) / 2**n
        return cls({2 * n: (Fraction(1, 2**n) if n >= 0 else Fraction(2 ** (-n)), Fraction(0))})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Coeff") -> "Coeff":
        out = dict(self.terms)
        for k, (re, im) in other.terms.items():
            r0, i0 = out.get(k, (Fraction(0), Fraction(0)))
            out[k] = (r0 + re, i0 + im)
        return Coeff(out)

    def __neg__(self) -> "Coeff":
        return Coeff({k: (-re, -im) for k, (re, im) in self.terms.items()})

    def __sub__(self, other: "Coeff") -> "Coeff":
        return self + (-other)

    def __mul__(self, other) -> "Coeff":
        if not isinstance(other, Coeff):
            other = _as_coeff(other)
        out: Dict[int, Tuple[Fraction, Fraction]] = {}
        for k1, (a, b) in self.terms.items():
            for k2, (c, d) in other.terms.items():
                k = k1 + k2
                r0, i0 = out.get(k, (Fraction(0), Fraction(0)))
                out[k] = (r0 + a * c - b * d, i0 + a * d + b * c)
        return Coeff(out)

    __rmul__ = __mul__

    def conjugate(self) -> "Coeff":
        return Coeff({k: (re, -im) for k, (re, im) in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, Coeff) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_complex(self, hbar: float) -> complex:
        s = math.sqrt(2.0 * hbar)
        val = 0j
        for k, (re, im) in self.terms.items():
            val += complex(re, im) * s**k
        return val

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            re, im = self.terms[k]
            body = f"({re}{'+' if im >= 0 else '-'}{abs(im)}i)"
            parts.append(body if k == 0 else f"{body}*s^{k}")
        return "+".join(parts)


ZERO = Coeff()
ONE = Coeff.of(1)
I_UNIT = Coeff.of(0, 1)


def _as_coeff(c) -> Coeff:
    if isinstance(c, Coeff):
        return c
    if isinstance(c, complex):
        if c.real != int(c.real) or c.imag != int(c.imag):
            raise TypeError("use Fraction-valued Coeff for non-integer scalars")
        return Coeff.of(int(c.real), int(c.imag))
    return Coeff.of(Fraction(c))


# A monomial is a normal-form word: per-mode (x-degree, p-degree) pairs,
# stored as a sorted tuple of (mode, dx, dp).
Monomial = Tuple[Tuple[int, int, int], ...]

IDENTITY_MONO: Monomial = ()


def mono(*factors: Tuple[int, int, int]) -> Monomial:
    """Build a monomial from (mode, dx, dp) entries."""
    table: Dict[int, Tuple[int, int]] = {}
    for m, dx, dp in factors:
        if m < 0 or dx < 0 or dp < 0:
            raise ValueError("mode and degrees must be non-negative")
        a, b = table.get(m, (0, 0))
        table[m] = (a + dx, b + dp)
    return tuple(sorted((m, a, b) for m, (a, b) in table.items() if a or b))


def mono_degree(m: Monomial) -> int:
    return sum(a + b for _, a, b in m)


def mono_modes(m: Monomial) -> Tuple[int, ...]:
    return tuple(mode for mode, _, _ in m)


class QuadPoly:
    """Polynomial in quadrature operators, kept in normal form."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Coeff] | None = None):
        clean: Dict[Monomial, Coeff] = {}
        if terms:
            for m, c in terms.items():
                c = _as_coeff(c)
                if not c.is_zero():
                    clean[m] = c
        self.terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "QuadPoly":
        return cls()

    @classmethod
    def scalar(cls, c) -> "QuadPoly":
        return cls({IDENTITY_MONO: _as_coeff(c)})

    @classmethod
    def x(cls, mode: int, power: int = 1) -> "QuadPoly":
        if power == 0:
            return cls.scalar(1)
        return cls({mono((mode, power, 0)): ONE})

    @classmethod
    def p(cls, mode: int, power: int = 1) -> "QuadPoly":
        if power == 0:
            return cls.scalar(1)
        return cls({mono((mode, 0, power)): ONE})

    @classmethod
    def a(cls, mode: int) -> "QuadPoly":
        """Annihilation operator (x + i p) / s, with s = sqrt(2*hbar)."""
        inv_s = Coeff.of(1, 0, -1)
        return (cls.x(mode) + cls.p(mode) * I_UNIT) * inv_s

    @classmethod
    def adag(cls, mode: int) -> "QuadPoly":
        inv_s = Coeff.of(1, 0, -1)
        return (cls.x(mode) - cls.p(mode) * I_UNIT) * inv_s

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "QuadPoly") -> "QuadPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, ZERO) + c
        return QuadPoly(out)

    def __sub__(self, other: "QuadPoly") -> "QuadPoly":
        return self + (-other)

    def __neg__(self) -> "QuadPoly":
        return QuadPoly({m: -c for m, c in self.terms.items()})

    def __mul__(self, other) -> "QuadPoly":
        if isinstance(other, QuadPoly):
            out: Dict[Monomial, Coeff] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    for m3, c3 in _mul_monomials(m1, m2):
                        c = c1 * c2 * c3
                        out[m3] = out.get(m3, ZERO) + c
            return QuadPoly(out)
        return QuadPoly({m: c * _as_coeff(other) for m, c in self.terms.items()})

    def __rmul__(self, other) -> "QuadPoly":
        # scalars commute with everything
        return self * other

    def __pow__(self, n: int) -> "QuadPoly":
        if n < 0:
            raise ValueError("negative operator powers are undefined")
        out = QuadPoly.scalar(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, QuadPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure ---------------------------------------------------------

    def modes(self) -> Tuple[int, ...]:
        out = set()
        for m in self.terms:
            out.update(mono_modes(m))
        return tuple(sorted(out))

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def coefficient(self, m: Monomial) -> Coeff:
        return self.terms.get(m, ZERO)

    def adjoint(self) -> "QuadPoly":
        """Formal adjoint: conjugate coefficients, reverse each word."""
        out = QuadPoly.zero()
        for m, c in self.terms.items():
            # reversed word: per mode p^dp x^dx; reorder back to normal form
            word = QuadPoly.scalar(c.conjugate())
            for mode, dx, dp in m:
                word = word * (QuadPoly.p(mode, dp) * QuadPoly.x(mode, dx))
            out = out + word
        return out

    def is_hermitian(self) -> bool:
        return self == self.adjoint()

    def scalar_part(self) -> Coeff:
        return self.terms.get(IDENTITY_MONO, ZERO)

    def without_scalar(self) -> "QuadPoly":
        out = dict(self.terms)
        out.pop(IDENTITY_MONO, None)
        return QuadPoly(out)

    # -- canonical maps ------------------------------------------------------

    def fourier_conjugate(self, mode: int) -> "QuadPoly":
        """Substitute x_mode -> -p_mode and p_mode -> x_mode (single-mode
        rotation by a quarter period), then renormalize ordering."""
        if mode < 0:
            raise ValueError("mode index out of range")
        subs = {mode: (QuadPoly.p(mode) * Coeff.of(-1), QuadPoly.x(mode))}
        return self.substitute(subs)

    def substitute(self, subs: Mapping[int, Tuple["QuadPoly", "QuadPoly"]]) -> "QuadPoly":
        """Replace x_m, p_m by the given polynomials for each mapped mode.

        Each word is rebuilt factor by factor in its normal-form order, so the
        result is exact for canonical (commutator-preserving) substitutions.
        """
        out = QuadPoly.zero()
        for m, c in self.terms.items():
            word = QuadPoly.scalar(c)
            for mode, dx, dp in m:
                if mode in subs:
                    xs, ps = subs[mode]
                    for _ in range(dx):
                        word = word * xs
                    for _ in range(dp):
                        word = word * ps
                else:
                    word = word * QuadPoly({mono((mode, dx, dp)): ONE})
            out = out + word
        return out

    def bind(self, hbar: float) -> Dict[Monomial, complex]:
        """Numeric view of the coefficient table at a concrete hbar."""
        return {m: c.to_complex(hbar) for m, c in self.terms.items()}

    def __repr__(self):
        if not self.terms:
            return "QuadPoly(0)"
        bits = []
        for m in sorted(self.terms, key=lambda m: (mono_degree(m), m)):
            factors = "".join(
                f"x{mode}^{dx}" * (dx > 0) + f"p{mode}^{dp}" * (dp > 0) for mode, dx, dp in m
            )
            bits.append(f"({self.terms[m]!r})*{factors or '1'}")
        return "QuadPoly(" + " + ".join(bits) + ")"


def commutator(a: QuadPoly, b: QuadPoly) -> QuadPoly:
    """[a, b] = a*b - b*a in normal form."""
    return a * b - b * a


def sym_xp(mode: int, m: int, n: int) -> QuadPoly:
    """The two-term symmetrization x^m p^n + p^n x^m on one mode."""
    xm = QuadPoly.x(mode, m)
    pn = QuadPoly.p(mode, n)
    return xm * pn + pn * xm


# -- word multiplication ----------------------------------------------------


def _reorder_px(b: int, c: int) -> Iterable[Tuple[int, int, int, Coeff]]:
    """Normal-order p^b x^c on one mode.

    p^b x^c = sum_k k! C(b,k) C(c,k) (-i hbar)^k  x^(c-k) p^(b-k)
    Yields (dx, dp, k, coeff).
    """
    for k in range(min(b, c) + 1):
        num = math.factorial(k) * math.comb(b, k) * math.comb(c, k)
        # (-i hbar)^k = (-i)^k * (s^2/2)^k
        phase = (-1j) ** k
        coeff = Coeff({2 * k: (Fraction(num * int(phase.real), 2**k), Fraction(num * int(phase.imag), 2**k))})
        yield c - k, b - k, k, coeff


def _mul_monomials(m1: Monomial, m2: Monomial) -> Iterable[Tuple[Monomial, Coeff]]:
    """Product of two normal-form words, renormalized. Yields (monomial, coeff)."""
    d1 = {mode: (dx, dp) for mode, dx, dp in m1}
    d2 = {mode: (dx, dp) for mode, dx, dp in m2}
    modes = sorted(set(d1) | set(d2))
    per_mode: list[list[Tuple[Tuple[int, int], Coeff]]] = []
    for mode in modes:
        a, b = d1.get(mode, (0, 0))
        c, d = d2.get(mode, (0, 0))
        # x^a p^b * x^c p^d  ->  x^a (p^b x^c) p^d
        opts = [((a + dx, dp + d), coeff) for dx, dp, _, coeff in _reorder_px(b, c)]
        per_mode.append(opts)
    for combo in itertools.product(*per_mode) if per_mode else [()]:
        coeff = ONE
        factors = []
        for mode, ((dx, dp), c) in zip(modes, combo):
            coeff = coeff * c
            if dx or dp:
                factors.append((mode, dx, dp))
        yield tuple(factors), coeff


# -- power-sum (product-as-sum) expansions -----------------------------------


class PowerSumExpansion:
    """A sum of scaled powers of linear forms reproducing a product of
    commuting position operators: sum_e c_e * (sum_i h_i x_i)^s."""

    def __init__(self, modes: Sequence[int], power: int,
                 entries: Sequence[Tuple[Fraction, Tuple[Fraction, ...]]]):
        self.modes = tuple(modes)
        self.power = int(power)
        self.entries = [(Fraction(c), tuple(Fraction(h) for h in hs)) for c, hs in entries]

    def __len__(self):
        return len(self.entries)

    def to_poly(self) -> QuadPoly:
        """Re-expand symbolically (multinomial theorem over commuting x's)."""
        out = QuadPoly.zero()
        for c, hs in self.entries:
            form = QuadPoly.zero()
            for mode, h in zip(self.modes, hs):
                form = form + QuadPoly.x(mode) * Coeff.of(h)
            out = out + form ** self.power * Coeff.of(c)
        return out


def product_as_power_sum(exponents: Mapping[int, int]) -> PowerSumExpansion:
    """Expand x_1^{s_1} ... x_n^{s_n} as a rational combination of powers of
    linear forms, with weights h_i = s_i/2 - v_i.

    When at least one exponent is odd, the summation range of the
    lowest-indexed odd mode is halved and every term counted twice.
    """
    modes = sorted(exponents)
    if not modes:
        raise ValueError("need at least one mode")
    svec = [int(exponents[m]) for m in modes]
    if any(s < 1 for s in svec):
        raise ValueError("exponents must be >= 1")
    s = sum(svec)
    odd_idx = next((i for i, si in enumerate(svec) if si % 2 == 1), None)
    ranges = []
    for i, si in enumerate(svec):
        if i == odd_idx:
            ranges.append(range((si - 1) // 2 + 1))
        else:
            ranges.append(range(si + 1))
    prefactor = Fraction(2 if odd_idx is not None else 1, math.factorial(s))
    entries = []
    for vs in itertools.product(*ranges):
        sign = (-1) ** sum(vs)
        binom = 1
        for si, vi in zip(svec, vs):
            binom *= math.comb(si, vi)
        c = prefactor * sign * binom
        hs = tuple(Fraction(si, 2) - vi for si, vi in zip(svec, vs))
        entries.append((c, hs))
    return PowerSumExpansion(modes, s, entries)


def subset_cube_expansion(modes: Sequence[int]) -> PowerSumExpansion:
    """Inclusion-exclusion expansion of a product of k distinct position
    operators as k-th powers of subset sums (0/1 weights)."""
    modes = list(modes)
    k = len(modes)
    if k < 1:
        raise ValueError("need at least one mode")
    entries = []
    prefac = Fraction(1, math.factorial(k))
    for r in range(1, k + 1):
        for subset in itertools.combinations(range(k), r):
            c = prefac * (-1) ** (k - r)
            hs = tuple(Fraction(1 if i in subset else 0) for i in range(k))
            entries.append((c, hs))
    return PowerSumExpansion(modes, k, entries)


# -- commutator rewrite identities -------------------------------------------


class CommutatorExpr:
    """Nested-commutator expression over exponentiable generators.

    ``Leaf`` nodes carry a QuadPoly; inner nodes are commutators of two
    children.  ``evaluate`` multiplies everything out via the exact algebra.
    """

    def __init__(self, kind: str, payload):
        self.kind = kind  # "leaf" | "comm"
        self.payload = payload

    @classmethod
    def leaf(cls, poly: QuadPoly) -> "CommutatorExpr":
        return cls("leaf", poly)

    @classmethod
    def comm(cls, left: "CommutatorExpr", right: "CommutatorExpr") -> "CommutatorExpr":
        return cls("comm", (left, right))

    def evaluate(self) -> QuadPoly:
        if self.kind == "leaf":
            return self.payload
        left, right = self.payload
        return commutator(left.evaluate(), right.evaluate())

    def depth(self) -> int:
        if self.kind == "leaf":
            return 0
        left, right = self.payload
        return 1 + max(left.depth(), right.depth())


class RewriteResult:
    """prefactor * tree-evaluation + scalar_shift == target.

    The scalar shift exponentiates to a global phase; it is tracked so the
    reconstruction is an exact operator identity.
    """

    def __init__(self, prefactor: Coeff, tree: CommutatorExpr, scalar_shift: Coeff = ZERO):
        self.prefactor = prefactor
        self.tree = tree
        self.scalar_shift = scalar_shift

    def reconstruct(self) -> QuadPoly:
        return self.tree.evaluate() * self.prefactor + QuadPoly.scalar(self.scalar_shift)


class UnsupportedMonomial(ValueError):
    """No direct rewrite identity covers this shape; expand it first."""


def rewrite_to_commutators(m: Monomial) -> RewriteResult:
    """Rewrite a covered monomial as a scalar times nested commutators of
    exponentiable generators (single-mode powers and two-mode couplings).

    Covered shapes: pure x^m (m >= 2), the two-term symmetrization
    x^m p^n + p^n x^m on one mode, and two-mode products p_1^m p_2^n.  For the
    symmetrized shape the input monomial is taken to denote the symmetrized
    pair.  A scalar shift (harmless global phase) may accompany the identity.
    """
    entries = list(m)
    if len(entries) == 1:
        mode, dx, dp = entries[0]
        if dp == 0 and dx >= 2:
            return _rewrite_pure_power(mode, dx, momentum=False)
        if dx == 0 and dp >= 2:
            return _rewrite_pure_power(mode, dp, momentum=True)
        if dx >= 1 and dp >= 1:
            return _rewrite_sym(mode, dx, dp)
        raise UnsupportedMonomial(f"degree-1 monomial {m} is a primitive displacement")
    if len(entries) == 2:
        (m1, dx1, dp1), (m2, dx2, dp2) = entries
        if dx1 == 0 and dx2 == 0:
            return _rewrite_two_mode_pp(m1, dp1, m2, dp2)
        if dp1 == 0 and dp2 == 0:
            # Fourier image of the p-p identity
            res = _rewrite_two_mode_pp(m1, dx1, m2, dx2)
            tree = _fourier_tree(res.tree, (m1, m2))
            return RewriteResult(res.prefactor, tree, res.scalar_shift)
    raise UnsupportedMonomial(
        f"monomial {m} has no direct commutator identity; "
        "apply a power-sum expansion or a product-formula split first"
    )


def _fourier_tree(tree: CommutatorExpr, modes: Iterable[int]) -> CommutatorExpr:
    modes = tuple(modes)
    if tree.kind == "leaf":
        poly = tree.payload
        for mode in modes:
            poly = poly.fourier_conjugate(mode)
        return CommutatorExpr.leaf(poly)
    left, right = tree.payload
    return CommutatorExpr.comm(_fourier_tree(left, modes), _fourier_tree(right, modes))


def _rewrite_pure_power(mode: int, m: int, momentum: bool) -> RewriteResult:
    """x^m = -2 / (3 (m-1) (2 hbar)^2) * [x^(m-1), [x^3, p^2]], m >= 2.

    For m in {2, 3} the operator is a primitive gate; the identity is still
    returned for m >= 4 callers.  Momentum powers use the Fourier image.
    """
    if m < 2:
        raise UnsupportedMonomial("power must be >= 2")
    x = QuadPoly.x
    p = QuadPoly.p
    if momentum:
        # p^m = -2/(3(m-1)(2 hbar)^2) [p^(m-1), [p^3, x^2]]
        inner = CommutatorExpr.comm(
            CommutatorExpr.leaf(p(mode, 3)), CommutatorExpr.leaf(x(mode, 2))
        )
        outer = CommutatorExpr.comm(CommutatorExpr.leaf(p(mode, m - 1)), inner)
    else:
        inner = CommutatorExpr.comm(
            CommutatorExpr.leaf(x(mode, 3)), CommutatorExpr.leaf(p(mode, 2))
        )
        outer = CommutatorExpr.comm(CommutatorExpr.leaf(x(mode, m - 1)), inner)
    # -2 / (3 (m-1)) * (2 hbar)^-2 ; (2 hbar)^-2 = s^-4
    pref = Coeff({-4: (Fraction(-2, 3 * (m - 1)), Fraction(0))})
    return RewriteResult(pref, outer)


def _rewrite_sym(mode: int, m: int, n: int) -> "SumRewriteResult":
    """x^m p^n + p^n x^m as commutators of pure powers.

    Leading term: -4i / ((n+1)(m+1) 2 hbar) [x^(m+1), p^(n+1)], plus the
    correction commutators -1/((n+1)(2 hbar)^2) [p^(n-k), [x^m, p^k]].  The
    corrections close the identity only in 2*hbar = 1 units; the remaining
    lower-degree Hermitian residual is decomposed recursively (it bottoms out
    in pure powers, displacements and a scalar phase), so the reconstruction
    is exact for symbolic hbar.
    """
    x = QuadPoly.x
    p = QuadPoly.p
    target = sym_xp(mode, m, n)
    lead_pref = Coeff({-2: (Fraction(0), Fraction(-4, (n + 1) * (m + 1)))})
    lead = CommutatorExpr.comm(
        CommutatorExpr.leaf(x(mode, m + 1)), CommutatorExpr.leaf(p(mode, n + 1))
    )
    total = lead.evaluate() * lead_pref
    corr_pref = Coeff({-4: (Fraction(-1, n + 1), Fraction(0))})
    trees = [(lead_pref, lead)]
    for k in range(1, n):
        sub = CommutatorExpr.comm(
            CommutatorExpr.leaf(p(mode, n - k)),
            CommutatorExpr.comm(CommutatorExpr.leaf(x(mode, m)), CommutatorExpr.leaf(p(mode, k))),
        )
        total = total + sub.evaluate() * corr_pref
        trees.append((corr_pref, sub))
    residual = target - total
    rest = rewrite_hermitian_poly(residual)
    return SumRewriteResult(trees + rest.trees, rest.scalar_shift)


def rewrite_hermitian_poly(poly: QuadPoly) -> "SumRewriteResult":
    """Decompose a single-mode Hermitian polynomial into scaled commutator
    trees over exponentiable generators, plus displacement leaves and a
    scalar phase shift.  Used both for rewrite targets and for the exact
    lower-degree remainders of the symmetrized identity."""
    trees: list = []
    shift = ZERO
    work = poly
    guard = 0
    while not work.is_zero():
        guard += 1
        if guard > 200:
            raise UnsupportedMonomial("hermitian decomposition did not terminate")
        m = max(work.terms, key=lambda mm: (mono_degree(mm), mm))
        c = work.terms[m]
        if m == IDENTITY_MONO:
            shift = shift + c
            work = work.without_scalar()
            continue
        entries = list(m)
        if len(entries) != 1:
            raise UnsupportedMonomial(f"multi-mode term {m} is not handled here")
        mode, dx, dp = entries[0]
        if dx + dp == 1:
            base = QuadPoly.x(mode) if dx else QuadPoly.p(mode)
            trees.append((c, CommutatorExpr.leaf(base)))
            work = work - base * c
        elif dp == 0:
            sub = _rewrite_pure_power(mode, dx, momentum=False)
            trees.append((c * sub.prefactor, sub.tree))
            work = work - QuadPoly.x(mode, dx) * c
        elif dx == 0:
            sub = _rewrite_pure_power(mode, dp, momentum=True)
            trees.append((c * sub.prefactor, sub.tree))
            work = work - QuadPoly.p(mode, dp) * c
        else:
            half = c * Coeff.of(Fraction(1, 2))
            sub = _rewrite_sym(mode, dx, dp)
            trees.extend((half * pref, tree) for pref, tree in sub.trees)
            shift = shift + half * sub.scalar_shift
            work = work - sym_xp(mode, dx, dp) * half
    return SumRewriteResult(trees, shift)


class SumRewriteResult(RewriteResult):
    """Sum of scaled commutator trees (the symmetrized identity for n >= 2)."""

    def __init__(self, trees, scalar_shift: Coeff = ZERO):
        self.trees = [(pref, tree) for pref, tree in trees]
        self.scalar_shift = scalar_shift
        self.prefactor = ONE
        self.tree = None

    def reconstruct(self) -> QuadPoly:
        out = QuadPoly.scalar(self.scalar_shift)
        for pref, tree in self.trees:
            out = out + tree.evaluate() * pref
        return out


def _rewrite_two_mode_pp(m1: int, n1: int, m2: int, n2: int) -> RewriteResult:
    """p_1^m p_2^n = -1 / ((m+1)(n+1) hbar^2) [p_2^(n+1), [p_1^(m+1), x_1 x_2]].

    The identity is symmetric under mode relabeling; the larger power is
    placed on the inner commutator so the outer factor stays as cheap as
    possible when the expression is expanded into gates.
    """
    if n1 < n2:
        m1, n1, m2, n2 = m2, n2, m1, n1
    p = QuadPoly.p
    coupling = QuadPoly.x(m1) * QuadPoly.x(m2)
    inner = CommutatorExpr.comm(CommutatorExpr.leaf(p(m1, n1 + 1)), CommutatorExpr.leaf(coupling))
    outer = CommutatorExpr.comm(CommutatorExpr.leaf(p(m2, n2 + 1)), inner)
    # -1/((m+1)(n+1)) * hbar^-2 ; hbar^-2 = 4 s^-4
    pref = Coeff({-4: (Fraction(-4, (n1 + 1) * (n2 + 1)), Fraction(0))})
    return RewriteResult(pref, outer)
