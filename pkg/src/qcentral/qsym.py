"""Exact arithmetic in the field Q(q) of rational functions in one variable.

Elements are stored canonically as ``q**shift * num / den`` where ``num`` and
``den`` are integer polynomials (FLINT ``fmpz_poly``) that are coprime, neither
is divisible by ``q`` and ``den`` has a positive leading coefficient.  Two
elements are equal exactly when their stored triples are equal.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

from flint import fmpq, fmpz_poly

__all__ = [
    "QRat",
    "DivisionByZero",
    "PoleAtSample",
    "Q",
    "ZERO",
    "ONE",
    "q_int",
    "q_factorial",
    "q_binomial",
    "qpow",
    "eval_at",
    "parse_qrat",
]


class DivisionByZero(ZeroDivisionError):
    """Division by the zero element of Q(q)."""


class PoleAtSample(ValueError):
    """The denominator vanishes at the requested sample point."""


_ZPOLY = fmpz_poly([])
_ONEPOLY = fmpz_poly([1])


def _strip_q(p: fmpz_poly) -> tuple[fmpz_poly, int]:
    """Split ``p = q**k * r`` with ``r(0) != 0``."""
    if p.is_zero():
        return p, 0
    c = p.coeffs()
    k = 0
    while c[k] == 0:
        k += 1
    if k == 0:
        return p, 0
    return fmpz_poly(c[k:]), k


def _unpickle(num, den, shift):
    return QRat(fmpz_poly(num), fmpz_poly(den), shift, _canonical=True)


class QRat:
    """An element of Q(q) in canonical form.  Immutable."""

    __slots__ = ("num", "den", "shift", "_hash")

    def __init__(self, num=0, den=None, shift: int = 0, *, _canonical: bool = False):
        if _canonical:
            self.num = num
            self.den = den
            self.shift = shift
            self._hash = None
            return
        if isinstance(num, QRat):
            if den is not None:
                raise TypeError("cannot combine a QRat numerator with a denominator")
            self.num, self.den, self.shift = num.num, num.den, num.shift
            self._hash = None
            return
        if isinstance(num, (Fraction, fmpq)):
            n = fmpz_poly([int(num.numerator)])
            d = fmpz_poly([int(num.denominator)])
        elif isinstance(num, int):
            n = fmpz_poly([num])
            d = _ONEPOLY
        else:
            n = num if isinstance(num, fmpz_poly) else fmpz_poly(list(num))
            d = _ONEPOLY
        if den is not None:
            d = den if isinstance(den, fmpz_poly) else fmpz_poly(list(den)) if not isinstance(den, int) else fmpz_poly([den])
        self.num, self.den, self.shift = _canon(n, d, shift)
        self._hash = None

    def __reduce__(self):
        return (_unpickle, ([int(c) for c in self.num.coeffs()], [int(c) for c in self.den.coeffs()], self.shift))

    # construction helpers -------------------------------------------------
    @classmethod
    def laurent(cls, coeffs: dict[int, int]) -> "QRat":
        """Build ``sum c * q**e`` from an exponent -> integer map."""
        coeffs = {e: c for e, c in coeffs.items() if c}
        if not coeffs:
            return ZERO
        lo = min(coeffs)
        hi = max(coeffs)
        return cls(fmpz_poly([coeffs.get(lo + i, 0) for i in range(hi - lo + 1)]), None, lo)

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den.is_one()

    def is_one(self) -> bool:
        return self.shift == 0 and self.den.is_one() and self.num.is_one()

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QRat):
            other = _coerce(other)
            if other is NotImplemented:
                return other
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        s = min(self.shift, other.shift)
        a = self.num.left_shift(self.shift - s) if self.shift > s else self.num
        b = other.num.left_shift(other.shift - s) if other.shift > s else other.num
        if self.den.is_one() and other.den.is_one():
            return _from_laurent(a + b, s)
        if self.den == other.den:
            return _make(a + b, self.den, s)
        return _make(a * other.den + b * self.den, self.den * other.den, s)

    __radd__ = __add__

    def __neg__(self):
        return QRat(-self.num, self.den, self.shift, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, QRat):
            other = _coerce(other)
            if other is NotImplemented:
                return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QRat):
            other = _coerce(other)
            if other is NotImplemented:
                return other
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        s = self.shift + other.shift
        if self.den.is_one() and other.den.is_one():
            return QRat(self.num * other.num, _ONEPOLY, s, _canonical=True)
        # cross-cancel first to keep the products small
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1, d2 = (self.num, other.den) if g1.is_one() else (self.num // g1, other.den // g1)
        n2, d1 = (other.num, self.den) if g2.is_one() else (other.num // g2, self.den // g2)
        n = n1 * n2
        d = d1 * d2
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return QRat(n, d, s, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "QRat":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero in Q(q)")
        n, d = self.den, self.num
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return QRat(n, d, -self.shift, _canonical=True)

    def __truediv__(self, other):
        if not isinstance(other, QRat):
            other = _coerce(other)
            if other is NotImplemented:
                return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if self.num.is_zero():
            return ONE if n == 0 else ZERO
        return QRat(self.num ** n, self.den ** n, self.shift * n, _canonical=True)

    # comparison / hashing ------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QRat):
            other = _coerce(other)
            if other is NotImplemented:
                return False
        return (
            self.shift == other.shift
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(int(c) for c in self.num.coeffs()),
                               tuple(int(c) for c in self.den.coeffs()), self.shift))
        return self._hash

    # substitution ---------------------------------------------------------
    def bar(self) -> "QRat":
        """Image under the field automorphism q -> 1/q."""
        if self.num.is_zero():
            return self
        n = self.num.coeffs()
        d = self.den.coeffs()
        dn, dd = len(n) - 1, len(d) - 1
        return QRat(fmpz_poly(n[::-1]), fmpz_poly(d[::-1]), -self.shift - dn + dd)

    def __call__(self, q0):
        return eval_at(self, q0)

    def eval_mod(self, q0: int, p: int) -> int:
        """Evaluate at ``q0`` modulo the prime ``p``."""
        n = _poly_mod(self.num, q0, p)
        d = _poly_mod(self.den, q0, p)
        if d == 0:
            raise PoleAtSample(f"denominator vanishes at {q0} mod {p}")
        return n * pow(d, -1, p) * pow(q0, self.shift, p) % p

    # inspection -----------------------------------------------------------
    def numerator_laurent(self) -> dict[int, int]:
        return {self.shift + i: int(c) for i, c in enumerate(self.num.coeffs()) if c}

    def denominator_poly(self) -> dict[int, int]:
        return {i: int(c) for i, c in enumerate(self.den.coeffs()) if c}

    def max_abs_coeff(self) -> int:
        cs = [abs(int(c)) for c in self.num.coeffs()] + [abs(int(c)) for c in self.den.coeffs()]
        return max(cs) if cs else 0

    def degree_spread(self) -> int:
        """Width of the exponent range of numerator and denominator combined."""
        if self.num.is_zero():
            return 0
        return self.num.degree() + self.den.degree()

    def __str__(self):
        ns = _laurent_str(self.numerator_laurent())
        if self.den.is_one():
            return ns
        return f"({ns})/({_laurent_str(self.denominator_poly())})"

    def __repr__(self):
        return f"QRat('{self}')"


def _poly_mod(p: fmpz_poly, x: int, m: int) -> int:
    acc = 0
    for c in reversed(p.coeffs()):
        acc = (acc * x + int(c)) % m
    return acc


def _from_laurent(n: fmpz_poly, s: int) -> QRat:
    if n.is_zero():
        return ZERO
    n, k = _strip_q(n)
    return QRat(n, _ONEPOLY, s + k, _canonical=True)


def _make(n: fmpz_poly, d: fmpz_poly, s: int) -> QRat:
    if n.is_zero():
        return ZERO
    n, d, s = _canon(n, d, s)
    return QRat(n, d, s, _canonical=True)


def _canon(n: fmpz_poly, d: fmpz_poly, s: int):
    if d.is_zero():
        raise DivisionByZero("zero denominator")
    if n.is_zero():
        return _ZPOLY, _ONEPOLY, 0
    n, k1 = _strip_q(n)
    d, k2 = _strip_q(d)
    s += k1 - k2
    if not d.is_one():
        g = n.gcd(d)
        if not g.is_one():
            n = n // g
            d = d // g
        if d.leading_coefficient() < 0:
            n, d = -n, -d
    return n, d, s


def _coerce(x):
    if isinstance(x, QRat):
        return x
    if isinstance(x, (int, Fraction, fmpq)):
        return QRat(x)
    return NotImplemented


def _laurent_str(coeffs: dict[int, int]) -> str:
    if not coeffs:
        return "0"
    parts = []
    for e in sorted(coeffs, reverse=True):
        c = coeffs[e]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mon = "q" if e == 1 else f"q^{e}"
            body = mon if a == 1 else f"{a}*{mon}"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += sign + body
    return out


ZERO = QRat(_ZPOLY, _ONEPOLY, 0, _canonical=True)
ONE = QRat(_ONEPOLY, _ONEPOLY, 0, _canonical=True)
Q = QRat(_ONEPOLY, _ONEPOLY, 1, _canonical=True)


@lru_cache(maxsize=None)
def qpow(k: int) -> QRat:
    """The monomial ``q**k``."""
    return QRat(_ONEPOLY, _ONEPOLY, k, _canonical=True)


@lru_cache(maxsize=None)
def q_int(n: int, d: int = 1) -> QRat:
    """Symmetric quantum integer ``(q^{dn} - q^{-dn}) / (q^d - q^{-d})``."""
    if n == 0:
        return ZERO
    if n < 0:
        return -q_int(-n, d)
    # q^{-d(n-1)} + q^{-d(n-3)} + ... + q^{d(n-1)}
    return QRat.laurent({d * (n - 1 - 2 * k): 1 for k in range(n)})


@lru_cache(maxsize=None)
def q_factorial(n: int, d: int = 1) -> QRat:
    out = ONE
    for k in range(1, n + 1):
        out = out * q_int(k, d)
    return out


@lru_cache(maxsize=None)
def q_binomial(n: int, k: int, d: int = 1) -> QRat:
    if k < 0 or k > n:
        return ZERO
    return q_factorial(n, d) / (q_factorial(k, d) * q_factorial(n - k, d))


def eval_at(x: QRat, q0) -> Fraction:
    """Exact evaluation of ``x`` at a rational point ``q0``."""
    q0 = Fraction(q0)
    if q0 == 0 and x.shift < 0 and not x.num.is_zero():
        raise PoleAtSample("q = 0 is a pole")
    f = fmpq(q0.numerator, q0.denominator)
    d = x.den(f)
    if d == 0:
        raise PoleAtSample(f"denominator of {x} vanishes at q = {q0}")
    v = x.num(f) / d
    out = Fraction(int(v.p), int(v.q))
    if x.shift:
        out *= q0 ** x.shift
    return out


# parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|(\*\*|[-+*/^()]))")


def parse_qrat(text: str) -> QRat:
    """Parse expressions such as ``(q^2+1)/(q)``, ``-3*q^-2 + 1`` or ``q**2``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at {pos}")
        pos = m.end()
        if m.group(1):
            tokens.append(("int", int(m.group(1))))
        elif m.group(2):
            tokens.append(("q", None))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op))
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        t = tokens[i]
        i += 1
        return t

    def expr():
        val = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = unary()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            kind, val = take()
            if kind != "int":
                raise ValueError("exponent must be an integer")
            return base ** (sign * val)
        return base

    def atom():
        kind, val = take()
        if kind == "int":
            return QRat(val)
        if kind == "q":
            return Q
        if (kind, val) == ("op", "("):
            v = expr()
            if take() != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return v
        raise ValueError(f"unexpected token {val!r}")

    out = expr()
    if peek()[0] != "end":
        raise ValueError(f"trailing input in {text!r}")
    return out
