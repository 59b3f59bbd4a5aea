"""Exact base fields: prime fields F_p (p <= 97) and the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

Element = Union[int, Fraction]

MAX_PRIME = 97


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Field:
    """A prime field ``F_p`` when ``p`` is set, the rationals when ``p is None``.

    Elements of ``F_p`` are plain ints in ``range(p)``; rationals are
    :class:`fractions.Fraction`.
    """

    p: int | None = None

    def __post_init__(self) -> None:
        if self.p is not None:
            if not isinstance(self.p, int) or not _is_prime(self.p):
                raise ValueError(f"field characteristic must be prime, got {self.p!r}")
            if self.p > MAX_PRIME:
                raise ValueError(f"prime fields are limited to p <= {MAX_PRIME}")

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def order(self) -> int:
        if self.p is None:
            raise ValueError("the rationals are infinite")
        return self.p

    def __call__(self, x) -> Element:
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        if isinstance(x, str):
            return self(Fraction(x))
        return int(x) % self.p

    def inv(self, a: Element) -> Element:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / Fraction(a)
        return pow(a, -1, self.p)

    def neg(self, a: Element) -> Element:
        return (-a) % self.p if self.p is not None else -a

    def elements(self) -> Iterator[int]:
        return iter(range(self.order))

    def format(self, a: Element):
        """JSON form of an element: int mod p, or a "num/den" string."""
        if self.p is not None:
            return int(a)
        a = Fraction(a)
        return f"{a.numerator}/{a.denominator}"

    def to_json(self):
        return "Q" if self.p is None else {"p": self.p}

    @classmethod
    def from_json(cls, obj) -> "Field":
        if obj == "Q":
            return QQ
        if isinstance(obj, dict) and set(obj) == {"p"}:
            return cls(obj["p"])
        raise ValueError(f"unrecognised field spec {obj!r}")

    def __str__(self) -> str:
        return "Q" if self.p is None else f"F_{self.p}"


QQ = Field(None)


def GF(p: int) -> Field:
    return Field(p)
