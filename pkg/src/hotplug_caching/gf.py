"""Exact finite-field arithmetic for prime fields GF(p) and binary fields GF(2^m).

Binary-field elements are integers in [0, 2^m - 1]; bit i is the coefficient
of x^i in the polynomial basis.  Multiplication and inversion go through
exp/log tables built from a fixed published primitive polynomial per degree
(the table below, the one conventional in the LFSR/Reed-Solomon literature;
alpha = x = 2 is a generator for every listed polynomial).

Prime-field elements are integers in [0, p - 1] under modular arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidField

# Primitive polynomial per extension degree, as an integer including the x^m
# term.  Degree 8 is 0x11D (x^8+x^4+x^3+x^2+1), the classic RS/QR polynomial.
PRIMITIVE_POLY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x402B,
    15: 0x8003,
    16: 0x1100B,
}


@dataclass(frozen=True)
class FieldSpec:
    """Order and kind of a finite field: ``prime`` or ``binary`` (2^m, m <= 16)."""

    kind: str
    order: int

    def __post_init__(self):
        if self.kind not in ("prime", "binary"):
            raise InvalidField(f"unknown field kind {self.kind!r}")
        if self.kind == "prime" and not _is_prime(self.order):
            raise InvalidField(f"{self.order} is not prime")
        if self.kind == "binary":
            m = self.order.bit_length() - 1
            if self.order <= 1 or self.order != 1 << m or m > 16:
                raise InvalidField(f"{self.order} is not 2^m with 1 <= m <= 16")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class FieldContext:
    """Arithmetic context shared by both field kinds.

    Immutable after construction; all operations are pure functions, so a
    context may be shared freely across threads.
    """

    order: int
    is_binary: bool

    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def sub(self, a: int, b: int) -> int:
        raise NotImplementedError

    def neg(self, a: int) -> int:
        raise NotImplementedError

    def mul(self, a: int, b: int) -> int:
        raise NotImplementedError

    def inv(self, a: int) -> int:
        raise NotImplementedError

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def elements(self):
        return range(self.order)


class PrimeField(FieldContext):
    is_binary = False

    def __init__(self, p: int):
        self.order = p
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def __repr__(self):
        return f"GF({self.p})"


class BinaryField(FieldContext):
    is_binary = True

    def __init__(self, m: int, poly: int | None = None):
        if not 1 <= m <= 16:
            raise InvalidField(f"unsupported extension degree {m}")
        self.m = m
        self.order = 1 << m
        self.poly = PRIMITIVE_POLY[m] if poly is None else poly
        self._build_tables()
        self._scale_tables: dict[int, bytes] = {}

    def _build_tables(self):
        size = self.order - 1
        exp = [0] * (2 * size)
        log = [0] * self.order
        x = 1
        for i in range(size):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= self.poly
        if x != 1:
            raise InvalidField(f"polynomial 0x{self.poly:X} is not primitive for m={self.m}")
        for i in range(size, 2 * size):
            exp[i] = exp[i - size]
        self.exp = exp
        self.log = log

    def add(self, a, b):
        return a ^ b

    sub = add

    def neg(self, a):
        return a

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self.exp[self.order - 1 - self.log[a]]

    def generator(self) -> int:
        return 2 if self.m > 1 else 1

    def scale_table(self, c: int) -> bytes:
        """256-entry translation table mapping x to c*x, for byte-payload kernels.

        Only meaningful for m <= 8 (every element fits in one byte).
        """
        if self.m > 8:
            raise InvalidField("scale tables require order <= 256")
        tab = self._scale_tables.get(c)
        if tab is None:
            row = bytes(self.mul(c, x) for x in range(self.order))
            tab = row + bytes(256 - self.order)
            self._scale_tables[c] = tab
        return tab

    def __repr__(self):
        return f"GF(2^{self.m})"


@lru_cache(maxsize=None)
def _cached_field(kind: str, order: int) -> FieldContext:
    if kind == "prime":
        return PrimeField(order)
    return BinaryField(order.bit_length() - 1)


def make_field(spec: FieldSpec | int) -> FieldContext:
    """Build the arithmetic context for a field spec.

    A bare integer is accepted and classified as a power of two or a prime;
    anything else raises InvalidField.
    """
    if isinstance(spec, int):
        n = spec
        if n > 1 and n == 1 << (n.bit_length() - 1):
            spec = FieldSpec("binary", n)
        else:
            spec = FieldSpec("prime", n)
    return _cached_field(spec.kind, spec.order)


def gf256() -> BinaryField:
    """The default byte-oriented field GF(2^8)."""
    f = make_field(FieldSpec("binary", 256))
    assert isinstance(f, BinaryField)
    return f
