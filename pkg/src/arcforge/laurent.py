"""Integer Laurent polynomials in one variable and exact determinants over them."""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence


class LaurentPoly:
    """Immutable element of Z[t, t^-1], stored as a sparse exponent -> coefficient map.

    Zero coefficients are never stored, so structural equality is ring equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        acc: dict[int, int] = {}
        items = terms.items() if hasattr(terms, "items") else terms
        for e, c in items:
            if c:
                acc[e] = acc.get(e, 0) + c
        self._terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        self._hash = None

    # construction helpers

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, exp: int, coef: int = 1) -> "LaurentPoly":
        return cls({exp: coef})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int], low: int = 0) -> "LaurentPoly":
        """``coeffs[i]`` is the coefficient of ``t**(low + i)``."""
        return cls({low + i: c for i, c in enumerate(coeffs)})

    # inspection

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def min_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        return self._terms[0][0]

    @property
    def max_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        return self._terms[-1][0]

    def coeff(self, exp: int) -> int:
        for e, c in self._terms:
            if e == exp:
                return c
        return 0

    def coeff_list(self) -> list[int]:
        """Dense coefficients from ``min_exp`` to ``max_exp``."""
        if not self._terms:
            return []
        lo = self.min_exp
        out = [0] * (self.max_exp - lo + 1)
        for e, c in self._terms:
            out[e - lo] = c
        return out

    def __call__(self, x):
        return sum(c * x ** e if e >= 0 else c / x ** (-e) for e, c in self._terms)

    def eval_int(self, x: int) -> int:
        """Value at an integer where all exponents are non-negative."""
        if self._terms and self._terms[0][0] < 0:
            raise ValueError("negative exponents; shift first")
        return sum(c * x ** e for e, c in self._terms)

    # arithmetic

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for e, c in other._terms:
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly((e, -c) for e, c in self._terms)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[int, int] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self._terms) == 1 and abs(self._terms[0][1]) == 1:
                e, c = self._terms[0]
                return LaurentPoly({-e * -k: c ** -k})
            raise ValueError("only units can be inverted")
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by t**k."""
        return LaurentPoly((e + k, c) for e, c in self._terms)

    def invert_variable(self) -> "LaurentPoly":
        """Substitute t -> 1/t."""
        return LaurentPoly((-e, c) for e, c in self._terms)

    def divexact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient of an exact division in Z[t, t^-1]; raises ArithmeticError otherwise."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return ZERO
        num = self.coeff_list()
        den = other.coeff_list()
        if len(num) < len(den):
            raise ArithmeticError("not divisible")
        quot = [0] * (len(num) - len(den) + 1)
        lead = den[-1]
        for i in range(len(quot) - 1, -1, -1):
            top = num[i + len(den) - 1]
            q, r = divmod(top, lead)
            if r:
                raise ArithmeticError("not divisible over the integers")
            quot[i] = q
            if q:
                for j, d in enumerate(den):
                    num[i + j] -= q * d
        if any(num):
            raise ArithmeticError("nonzero remainder")
        return LaurentPoly.from_coeffs(quot, self.min_exp - other.min_exp)

    # normal form

    def normalized(self) -> "LaurentPoly":
        """Representative of the class modulo units +-t^k: lowest term at t^0 with positive coefficient."""
        if self.is_zero():
            return self
        lo, c = self._terms[0]
        sign = 1 if c > 0 else -1
        return LaurentPoly((e - lo, sign * cc) for e, cc in self._terms)

    def equal_up_to_units(self, other: "LaurentPoly") -> bool:
        return self.normalized() == other.normalized()

    # protocol

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"LaurentPoly({dict(self._terms)!r})"

    def __str__(self):
        return self.format()

    def format(self, var: str = "t") -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in reversed(self._terms):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                pw = var if e == 1 else f"{var}^{e}"
                body = pw if mag == 1 else f"{mag}*{pw}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict[str, int]:
        return {str(e): c for e, c in self._terms}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> "LaurentPoly":
        return cls({int(e): c for e, c in data.items()})


def _coerce(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly.const(x)
    return NotImplemented


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
T = LaurentPoly.monomial(1)


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free Gaussian elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            a = ri[k]
            for j in range(k + 1, n):
                ri[j] = (pivot * ri[j] - a * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def det(matrix: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Exact determinant of a square matrix of Laurent polynomials.

    Rows are shifted into Z[t], the matrix is evaluated at t = 2**k with k large
    enough that every coefficient of the result is recoverable from balanced
    base-2**k digits, and the integer determinant is taken with Bareiss
    elimination.
    """
    n = len(matrix)
    if n == 0:
        return ONE
    shifts = []
    bound = 1
    for row in matrix:
        nonzero = [p for p in row if p]
        if not nonzero:
            return ZERO
        shifts.append(min(p.min_exp for p in nonzero))
        bound *= sum(abs(c) for p in nonzero for _, c in p._terms)
    bits = (2 * bound).bit_length() + 1
    base = 1 << bits
    ints = [
        [sum(c << (bits * (e - s)) for e, c in p._terms) for p in row]
        for row, s in zip(matrix, shifts)
    ]
    value = bareiss_det(ints)
    coeffs = []
    half = base >> 1
    mask = base - 1
    while value:
        digit = value & mask
        if digit >= half:
            digit -= base
        coeffs.append(digit)
        value = (value - digit) >> bits
    return LaurentPoly.from_coeffs(coeffs, sum(shifts))
