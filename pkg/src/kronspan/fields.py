"""Exact scalar domains: prime fields F_p and the rationals.

Elements are plain Python objects: residues are ``int`` in ``[0, p)`` and
rationals are :class:`fractions.Fraction` (always lowest terms, positive
denominator). A field object carries the arithmetic; tensors and matrices
carry a field and refuse to mix with a different one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction]

#: Largest prime below 2**61 (the Mersenne prime 2**61 - 1).
DEFAULT_PRIME = 2**61 - 1
#: Next prime below DEFAULT_PRIME; used as the second modulus in two-prime checks.
SECOND_PRIME = 2305843009213693921


class DomainMismatch(ValueError):
    """Raised when operands live over different scalar domains."""


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"modulus must be a prime >= 2, got {self.p}")

    zero = 0
    one = 1

    @property
    def tag(self) -> str:
        return str(self.p)

    @property
    def characteristic(self) -> int:
        return self.p

    def cardinality_exceeds(self, q: int) -> bool:
        return self.p > q

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self(parse_scalar(x))
        return int(x) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.p)

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def format(self, a: int) -> str:
        return str(a)

    def __str__(self) -> str:
        return f"F_{self.p}"


@dataclass(frozen=True)
class RationalField:
    zero = Fraction(0)
    one = Fraction(1)

    @property
    def tag(self) -> str:
        return "Q"

    @property
    def characteristic(self) -> int:
        return 0

    def cardinality_exceeds(self, q: int) -> bool:
        return True

    def __call__(self, x) -> Fraction:
        if isinstance(x, str):
            return parse_scalar(x)
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def pow(self, a, e: int):
        return Fraction(a) ** e

    def random(self, rng: random.Random, height: int = 9) -> Fraction:
        return Fraction(rng.randint(-height, height), rng.randint(1, height))

    def format(self, a: Fraction) -> str:
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def __str__(self) -> str:
        return "Q"


Field = Union[PrimeField, RationalField]

QQ = RationalField()


def parse_scalar(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def field_from_tag(tag) -> Field:
    """``"Q"`` gives the rationals; an integer (or its decimal string) a prime field."""
    if isinstance(tag, (PrimeField, RationalField)):
        return tag
    if str(tag).upper() in ("Q", "QQ"):
        return QQ
    return PrimeField(int(tag))


def check_same_field(*fields: Field) -> Field:
    first = fields[0]
    for other in fields[1:]:
        if other != first:
            raise DomainMismatch(f"scalar domains differ: {first} vs {other}")
    return first
