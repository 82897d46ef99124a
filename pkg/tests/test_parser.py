"""Target-expression parser: grammar, round-trips, fuzzing."""

import random
from fractions import Fraction

import pytest

from cvcompile.algebra import QuadPoly, sym_xp
from cvcompile.parsing import ParseError, format_spec, parse

X, P = QuadPoly.x, QuadPoly.p


def test_monomial_example():
    spec = parse("x1*x2^2*x3^3")
    coeff, exps, basis = spec.monomial()
    assert coeff == 1
    assert exps == {0: 1, 1: 2, 2: 3}
    assert all(b == "x" for b in basis.values())


def test_sym_example():
    spec = parse("sym(x1^2*p1)")
    assert spec.poly() == sym_xp(0, 2, 1)


def test_zero_exponent_rejected():
    with pytest.raises(ParseError):
        parse("x1^0")


def test_mode_zero_rejected():
    with pytest.raises(ParseError):
        parse("x0")


def test_mixed_basis_rejected_with_pointer():
    with pytest.raises(ParseError) as err:
        parse("x1*p1")
    assert "commutator" in str(err.value)


def test_coefficients():
    spec = parse("-1/3 * x1 + 0.25*p2^2 - 2")
    poly = spec.poly()
    from cvcompile.algebra import Coeff, mono

    assert poly.coefficient(mono((0, 1, 0))) == Coeff.of(Fraction(-1, 3))
    assert poly.coefficient(mono((1, 0, 2))) == Coeff.of(Fraction(1, 4))
    assert poly.coefficient(()) == Coeff.of(-2)


def test_whitespace_insensitive():
    assert parse(" x1 * x2 ").poly() == parse("x1*x2").poly()


def test_format_rational_never_decimal():
    spec = parse("1/3*x1")
    assert "1/3" in format_spec(spec)
    assert "0.3" not in format_spec(spec)


def test_format_parse_round_trip_canonical():
    for text in ["x1", "x1*x2^2*x3^3", "sym(x1^2*p1)", "2 - 1/3*p2 + 1/2*x1^2"]:
        spec = parse(text)
        canon = format_spec(spec)
        again = parse(canon)
        assert format_spec(again) == canon
        assert again.poly() == spec.poly()


def _random_spec_text(rng: random.Random) -> str:
    terms = []
    for _ in range(rng.randint(1, 4)):
        factors = []
        basis_by_mode = {}
        for _ in range(rng.randint(1, 3)):
            mode = rng.randint(1, 4)
            b = basis_by_mode.setdefault(mode, rng.choice("xp"))
            exp = rng.randint(1, 3)
            factors.append(f"{b}{mode}^{exp}" if exp > 1 else f"{b}{mode}")
        num = rng.randint(-9, 9) or 1
        den = rng.randint(1, 9)
        coeff = f"{abs(num)}/{den}*" if rng.random() < 0.7 else ""
        sign = "-" if num < 0 else ("+" if terms else "")
        terms.append(f"{sign} {coeff}{'*'.join(factors)}")
    return " ".join(terms)


def test_random_round_trip_degree_6():
    rng = random.Random(11)
    for _ in range(100):
        text = _random_spec_text(rng)
        spec = parse(text)
        canon = format_spec(spec)
        again = parse(canon)
        assert again.poly() == spec.poly(), text
        assert format_spec(again) == canon


def test_fuzz_never_crashes():
    rng = random.Random(99)
    alphabet = "xps ym()^*/+-.0123456789e\t"
    for _ in range(10_000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 24)))
        try:
            spec = parse(text)
            format_spec(spec)
        except ParseError:
            pass  # positioned error is the contract


def test_oversized_input_rejected():
    with pytest.raises(ParseError):
        parse("x1" + " " * 70000)
