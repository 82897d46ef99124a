"""Core symbolic-algebra behavior: commutators, ordering, rewrite identities."""

import itertools
import random
from fractions import Fraction

import pytest

from cvcompile.algebra import (
    Coeff,
    QuadPoly,
    UnsupportedMonomial,
    commutator,
    mono,
    product_as_power_sum,
    rewrite_to_commutators,
    subset_cube_expansion,
    sym_xp,
)

X = QuadPoly.x
P = QuadPoly.p
I_HBAR = Coeff({2: (Fraction(0), Fraction(1, 2))})  # i * hbar = i s^2 / 2


def test_canonical_commutator():
    assert commutator(X(0), P(0)) == QuadPoly.scalar(I_HBAR)


def test_distinct_modes_commute():
    assert commutator(X(0), X(1)).is_zero()
    assert commutator(X(0), P(1)).is_zero()


def test_x3_p2_commutator_symmetrized():
    # [x^3, p^2] = 3 i hbar (x^2 p + p x^2)
    lhs = commutator(X(0, 3), P(0, 2))
    rhs = sym_xp(0, 2, 1) * (I_HBAR * 3)
    assert lhs == rhs


def test_commutator_antisymmetry_and_bilinearity():
    rng = random.Random(7)

    def rand_poly():
        poly = QuadPoly.zero()
        for _ in range(4):
            m = rng.randrange(2)
            dx, dp = rng.randrange(3), rng.randrange(3)
            poly = poly + QuadPoly({mono((m, dx, dp)): Coeff.of(rng.randrange(-3, 4))})
        return poly

    for _ in range(12):
        a, b = rand_poly(), rand_poly()
        assert commutator(a, b) == -commutator(b, a)
        c = rand_poly()
        assert commutator(a + b, c) == commutator(a, c) + commutator(b, c)


def test_jacobi_identity():
    rng = random.Random(11)

    def rand_poly():
        poly = QuadPoly.zero()
        for _ in range(3):
            dx, dp = rng.randrange(3), rng.randrange(3)
            poly = poly + QuadPoly({mono((0, dx, dp)): Coeff.of(rng.randrange(-2, 3))})
        return poly

    for _ in range(8):
        a, b, c = rand_poly(), rand_poly(), rand_poly()
        total = (
            commutator(a, commutator(b, c))
            + commutator(b, commutator(c, a))
            + commutator(c, commutator(a, b))
        )
        assert total.is_zero()


def test_hermiticity_of_commutator_of_hermitians():
    # [A, B] is anti-Hermitian for Hermitian A, B
    a = X(0, 3)
    b = P(0, 2)
    c = commutator(a, b)
    assert c.adjoint() == -c


def test_fourier_conjugate_basics():
    assert X(0).fourier_conjugate(0) == P(0) * Coeff.of(-1)
    rot_inv = X(0, 2) + P(0, 2)
    assert rot_inv.fourier_conjugate(0) == rot_inv
    two = X(0) * X(1)
    assert two.fourier_conjugate(0) == -(P(0) * X(1))


def test_fourier_fourth_power_is_identity():
    rng = random.Random(3)
    poly = QuadPoly.zero()
    for _ in range(5):
        poly = poly + QuadPoly(
            {mono((0, rng.randrange(3), rng.randrange(3)), (1, rng.randrange(2), 0)): Coeff.of(rng.randrange(-3, 4))}
        )
    out = poly
    for _ in range(4):
        out = out.fourier_conjugate(0)
    assert out == poly


def test_adjoint_involution_and_hermitian_flag():
    poly = sym_xp(0, 2, 1)
    assert poly.is_hermitian()
    assert poly.adjoint().adjoint() == poly
    assert not (X(0) * P(0)).is_hermitian()


# -- power-sum expansions -----------------------------------------------------


def test_power_sum_single_mode_is_trivial():
    exp = product_as_power_sum({0: 4})
    assert exp.power == 4
    assert exp.to_poly() == X(0, 4)


def test_power_sum_cube_identity_shape():
    # (1,1,1) with one odd exponent halved: 4 terms, weights +-1/2
    exp = product_as_power_sum({0: 1, 1: 1, 2: 1})
    assert len(exp) == 4
    assert exp.to_poly() == X(0) * X(1) * X(2)
    for c, hs in exp.entries:
        assert abs(hs[0]) == Fraction(1, 2)


def test_power_sum_worked_example_1_2_3():
    exp = product_as_power_sum({0: 1, 1: 2, 2: 3})
    assert len(exp) == 12
    assert exp.power == 6
    assert exp.to_poly() == X(0) * X(1, 2) * X(2, 3)
    # factoring each form on its unit-weight mode (else the first nonzero
    # weight) reproduces the worked coefficient values
    normalized = set()
    for c, hs in exp.entries:
        unit = next((h for h in hs if abs(h) == 1), None)
        lead = unit if unit is not None else next(h for h in hs if h != 0)
        normalized.add(abs(c * lead**exp.power))
    assert normalized == {
        Fraction(1, 360),
        Fraction(1, 120),
        Fraction(1, 11520),
        Fraction(1, 3840),
    }


@pytest.mark.parametrize("n_modes", [1, 2, 3])
def test_power_sum_round_trip_up_to_degree_8(n_modes):
    for svec in itertools.product(range(1, 9), repeat=n_modes):
        if sum(svec) > 8:
            continue
        exps = {i: s for i, s in enumerate(svec)}
        expansion = product_as_power_sum(exps)
        target = QuadPoly.scalar(1)
        for i, s in exps.items():
            target = target * X(i, s)
        assert expansion.to_poly() == target, f"round-trip failed for {svec}"


def test_subset_cube_expansion_matches_product():
    exp = subset_cube_expansion([0, 1, 2])
    assert len(exp) == 7
    assert exp.to_poly() == X(0) * X(1) * X(2)
    exp4 = subset_cube_expansion([0, 1, 2, 3])
    assert len(exp4) == 15
    assert exp4.to_poly() == X(0) * X(1) * X(2) * X(3)


# -- rewrite identities --------------------------------------------------------


def test_rewrite_pure_power_x4():
    res = rewrite_to_commutators(mono((0, 4, 0)))
    assert res.reconstruct() == X(0, 4)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_rewrite_pure_power_family(m):
    res = rewrite_to_commutators(mono((0, m, 0)))
    assert res.reconstruct() == X(0, m)
    res_p = rewrite_to_commutators(mono((0, 0, m)))
    assert res_p.reconstruct() == P(0, m)


def test_rewrite_symmetrized_x2p():
    res = rewrite_to_commutators(mono((0, 2, 1)))
    assert res.reconstruct() == sym_xp(0, 2, 1)


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (3, 2), (2, 3)])
def test_rewrite_symmetrized_family(m, n):
    res = rewrite_to_commutators(mono((0, m, n)))
    assert res.reconstruct() == sym_xp(0, m, n)


def test_rewrite_two_mode_pp():
    res = rewrite_to_commutators(mono((0, 0, 1), (1, 0, 1)))
    assert res.reconstruct() == P(0) * P(1)


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 2), (1, 3), (2, 4), (3, 3)])
def test_rewrite_two_mode_family(m, n):
    res = rewrite_to_commutators(mono((0, 0, m), (1, 0, n)))
    assert res.reconstruct() == P(0, m) * P(1, n)
    res_x = rewrite_to_commutators(mono((0, m, 0), (1, n, 0)))
    assert res_x.reconstruct() == X(0, m) * X(1, n)


def test_rewrite_rejects_three_mode():
    with pytest.raises(UnsupportedMonomial):
        rewrite_to_commutators(mono((0, 1, 0), (1, 1, 0), (2, 1, 0)))


def test_normal_ordering_idempotent():
    # multiplication always returns normal form; multiplying by 1 is stable
    poly = P(0, 2) * X(0, 3)
    assert poly * QuadPoly.scalar(1) == poly
