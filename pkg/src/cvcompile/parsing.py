r"""Text front-end for target generators.

Grammar (whitespace-insensitive)::

    expr    :=  ['+'|'-'] term (('+' | '-') term)*
    term    :=  coeff ['*' factors] | factors
    factors :=  factor ('*' factor)*
    factor  :=  atom ['^' posint]
    atom    :=  'x' mode | 'p' mode | 'sym(' factors ')'
    coeff   :=  integer | integer '/' integer | decimal
    mode    :=  positive integer (1-based)

``sym(x1^m * p1^n)`` denotes the two-term symmetrization x^m p^n + p^n x^m.
Mixing x and p of the same mode outside ``sym(...)`` is rejected: such
generators are reachable through the commutator method, which accepts the
``sym`` form directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple, Union

from .algebra import Coeff, QuadPoly, sym_xp


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} (line {line}, column {col})")
        self.pos = pos
        self.line = line
        self.col = col


@dataclass(frozen=True)
class SymFactor:
    mode: int
    m: int  # x power
    n: int  # p power


Factor = Tuple[str, int, int]  # (basis, mode, exponent)
TermFactors = Tuple[Union[Factor, SymFactor], ...]


@dataclass
class TargetSpec:
    terms: List[Tuple[Fraction, TermFactors]]
    source: str = ""

    def poly(self) -> QuadPoly:
        out = QuadPoly.zero()
        for coeff, factors in self.terms:
            word = QuadPoly.scalar(Coeff.of(coeff))
            for f in factors:
                if isinstance(f, SymFactor):
                    word = word * sym_xp(f.mode, f.m, f.n)
                else:
                    basis, mode, exp = f
                    word = word * (QuadPoly.x(mode, exp) if basis == "x" else QuadPoly.p(mode, exp))
            out = out + word
        return out

    def is_monomial_product(self) -> bool:
        """True for a single term of plain per-mode powers (one basis per
        mode), the shape the exact compilers accept."""
        if len(self.terms) != 1:
            return False
        _, factors = self.terms[0]
        if not factors:
            return False
        return all(not isinstance(f, SymFactor) for f in factors)

    def monomial(self) -> Tuple[Fraction, Dict[int, int], Dict[int, str]]:
        """(coefficient, exponents per mode, basis per mode) for a single
        product term."""
        if not self.is_monomial_product():
            raise ValueError("not a single monomial product")
        coeff, factors = self.terms[0]
        exps: Dict[int, int] = {}
        basis: Dict[int, str] = {}
        for b, mode, exp in factors:
            exps[mode] = exps.get(mode, 0) + exp
            basis[mode] = b
        return coeff, exps, basis


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None):
        raise ParseError(message, self.pos if pos is None else pos, self.text)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def number(self) -> Fraction:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
            self.pos += 1
        if start == self.pos:
            self.error("expected a number")
        body = self.text[start:self.pos]
        try:
            value = Fraction(body)
        except (ValueError, ZeroDivisionError):
            self.error("malformed number", start)
        if self.peek() == "/":
            self.pos += 1
            denom = self.integer()
            if denom == 0:
                self.error("zero denominator")
            value = value / denom
        return value

    def parse(self) -> TargetSpec:
        terms: List[Tuple[Fraction, TermFactors]] = []
        sign = 1
        if self.peek() in "+-":
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        while True:
            coeff, factors = self.term()
            terms.append((sign * coeff, factors))
            self.skip_ws()
            if self.pos >= len(self.text):
                break
            ch = self.peek()
            if ch == "+":
                sign = 1
            elif ch == "-":
                sign = -1
            else:
                self.error(f"unexpected character {ch!r}")
            self.pos += 1
        spec = TargetSpec(terms, self.text)
        self._check_bases(spec)
        return spec

    def term(self) -> Tuple[Fraction, TermFactors]:
        coeff = Fraction(1)
        factors: List[Union[Factor, SymFactor]] = []
        ch = self.peek()
        if ch.isdigit() or ch == ".":
            coeff = self.number()
            if self.peek() == "*":
                self.pos += 1
            else:
                return coeff, tuple(factors)
        while True:
            factors.append(self.factor())
            if self.peek() == "*":
                self.pos += 1
                continue
            break
        return coeff, tuple(factors)

    def factor(self) -> Union[Factor, SymFactor]:
        self.skip_ws()
        start = self.pos
        if self.text.startswith("sym", self.pos):
            self.pos += 3
            self.take("(")
            inner: List[Factor] = []
            while True:
                f = self.factor()
                if isinstance(f, SymFactor):
                    self.error("nested sym(...) is not allowed", start)
                inner.append(f)
                if self.peek() == "*":
                    self.pos += 1
                    continue
                break
            self.take(")")
            modes = {m for _, m, _ in inner}
            if len(modes) != 1:
                self.error("sym(...) must involve exactly one mode", start)
            mode = modes.pop()
            m = sum(e for b, _, e in inner if b == "x")
            n = sum(e for b, _, e in inner if b == "p")
            if m == 0 or n == 0:
                self.error("sym(...) needs both x and p powers", start)
            return SymFactor(mode, m, n)
        ch = self.peek()
        if ch not in ("x", "p"):
            self.error("expected an atom 'x<k>', 'p<k>' or 'sym(...)'")
        self.pos += 1
        mode = self.integer()
        if mode == 0:
            self.error("mode indices are 1-based", start)
        exp = 1
        if self.peek() == "^":
            self.pos += 1
            exp_pos = self.pos
            exp = self.integer()
            if exp < 1:
                self.error("exponent must be >= 1", exp_pos)
        return (ch, mode - 1, exp)

    def _check_bases(self, spec: TargetSpec):
        for _, factors in spec.terms:
            seen: Dict[int, str] = {}
            for f in factors:
                if isinstance(f, SymFactor):
                    continue
                b, mode, _ = f
                if seen.get(mode, b) != b:
                    self.error(
                        f"mode {mode + 1} mixes x and p in one product; use sym(...) "
                        "or route the generator through --method commutator",
                        0,
                    )
                seen[mode] = b


def parse(text: str) -> TargetSpec:
    if len(text.encode()) > 65536:
        raise ParseError("input too large", 0, "")
    return _Parser(text).parse()


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_spec(spec: TargetSpec) -> str:
    """Canonical text: terms in canonical monomial order, exact coefficients."""
    def term_key(entry):
        coeff, factors = entry
        flat = []
        for f in factors:
            if isinstance(f, SymFactor):
                flat.append((f.mode, 2, f.m, f.n))
            else:
                b, mode, exp = f
                flat.append((mode, 0 if b == "x" else 1, exp, 0))
        degree = sum((f.m + f.n) if isinstance(f, SymFactor) else f[2] for f in factors)
        return (degree, sorted(flat))

    pieces = []
    for coeff, factors in sorted(spec.terms, key=term_key):
        if not factors:
            pieces.append(_format_coeff(coeff))
            continue
        names = []
        for f in sorted(factors, key=lambda f: (f.mode if isinstance(f, SymFactor) else f[1])):
            if isinstance(f, SymFactor):
                x_part = f"x{f.mode + 1}" + (f"^{f.m}" if f.m > 1 else "")
                p_part = f"p{f.mode + 1}" + (f"^{f.n}" if f.n > 1 else "")
                names.append(f"sym({x_part}*{p_part})")
            else:
                b, mode, exp = f
                names.append(f"{b}{mode + 1}" + (f"^{exp}" if exp > 1 else ""))
        body = "*".join(names)
        if coeff == 1:
            pieces.append(body)
        elif coeff == -1:
            pieces.append(f"-{body}")
        else:
            pieces.append(f"{_format_coeff(coeff)}*{body}")
    out = ""
    for piece in pieces:
        if not out:
            out = piece
        elif piece.startswith("-"):
            out += " - " + piece[1:]
        else:
            out += " + " + piece
    return out or "0"
