"""Exact semirings: Boolean, natural numbers, integers, rationals.

Values are plain Python scalars: ``int`` 0/1 for the Boolean semiring,
``int`` for naturals and integers, ``fractions.Fraction`` for rationals.
A :class:`Semiring` instance carries the arithmetic plus the capability
flags that decide which algorithms are legal on its carrier.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

from .errors import CapabilityError, CarrierError, DivergentStarError, PreconditionError

Value = Union[int, Fraction]

_INT_RE = re.compile(r"-?\d+\Z")
_RAT_RE = re.compile(r"-?\d+(?:/\d+)?\Z")


class Carrier(enum.Enum):
    BOOL = "bool"
    NAT = "nat"
    INT = "int"
    RAT = "rat"


@dataclass(frozen=True)
class Semiring:
    carrier: Carrier
    is_ring: bool
    is_commutative: bool
    is_positive: bool
    is_equisubtractive: bool
    is_unit_generated: bool
    has_star: bool

    @property
    def name(self) -> str:
        return self.carrier.value

    def __repr__(self):
        return f"Semiring({self.name})"

    # -- carrier membership -------------------------------------------------

    def coerce(self, x) -> Value:
        """Validate ``x`` and return it in the carrier's normal form."""
        c = self.carrier
        if c is Carrier.RAT:
            if isinstance(x, str):
                return self.parse_value(x)
            if isinstance(x, float):
                raise CarrierError(f"floating-point value {x!r} is not exact")
            try:
                return Fraction(x)
            except (TypeError, ValueError):
                raise CarrierError(f"{x!r} is not a rational number") from None
        if isinstance(x, str):
            return self.parse_value(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise CarrierError(f"{x} is not in {self.name}")
            x = x.numerator
        if isinstance(x, (bool, np.bool_)):
            x = int(x)
        if not isinstance(x, (int, np.integer)):
            raise CarrierError(f"{x!r} is not in {self.name}")
        x = int(x)
        if c is Carrier.BOOL and x not in (0, 1):
            raise CarrierError(f"{x} is not a Boolean value (0 or 1)")
        if c is Carrier.NAT and x < 0:
            raise CarrierError(f"{x} is not a natural number")
        return x

    def parse_value(self, text: str) -> Value:
        text = text.strip()
        if self.carrier is Carrier.RAT:
            if not _RAT_RE.match(text):
                raise CarrierError(f"{text!r} is not a rational literal")
            num, _, den = text.partition("/")
            if den and int(den) == 0:
                raise CarrierError(f"{text!r} has a zero denominator")
            return Fraction(int(num), int(den) if den else 1)
        if not _INT_RE.match(text):
            raise CarrierError(f"{text!r} is not a valid {self.name} literal")
        return self.coerce(int(text))

    def format_value(self, a: Value) -> str:
        if isinstance(a, Fraction):
            return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        return str(int(a))

    # -- arithmetic ----------------------------------------------------------

    @property
    def zero(self) -> Value:
        return Fraction(0) if self.carrier is Carrier.RAT else 0

    @property
    def one(self) -> Value:
        return Fraction(1) if self.carrier is Carrier.RAT else 1

    def add(self, a: Value, b: Value) -> Value:
        if self.carrier is Carrier.BOOL:
            return 1 if (a or b) else 0
        return a + b

    def mul(self, a: Value, b: Value) -> Value:
        if self.carrier is Carrier.BOOL:
            return 1 if (a and b) else 0
        return a * b

    def sum(self, values: Iterable[Value]) -> Value:
        total = self.zero
        for v in values:
            total = total + v
        return self.clamp(total)

    def clamp(self, a: Value) -> Value:
        # Results computed with integer arithmetic are mapped back to the
        # Boolean carrier through the homomorphism n -> [n != 0].
        if self.carrier is Carrier.BOOL:
            return 1 if a else 0
        return a

    def neg(self, a: Value) -> Value:
        if not self.is_ring:
            raise CapabilityError(f"{self.name} has no additive inverses")
        return -a

    def star(self, a: Value) -> Value:
        if not self.has_star:
            raise CapabilityError(f"{self.name} has no star operation")
        if self.carrier is Carrier.BOOL:
            return 1
        if a == 0:
            return self.one
        if abs(a) >= 1:
            raise DivergentStarError(f"star({self.format_value(a)}) diverges: need |a| < 1")
        return 1 / (1 - Fraction(a))

    def is_unit(self, a: Value) -> bool:
        if self.carrier is Carrier.RAT:
            return a != 0
        if self.carrier is Carrier.INT:
            return a in (1, -1)
        return a == 1

    def inv(self, a: Value) -> Value:
        if not self.is_unit(a):
            raise CapabilityError(f"{self.format_value(a)} is not a unit of {self.name}")
        if self.carrier is Carrier.RAT:
            return 1 / Fraction(a)
        return a

    # -- structure used by the decomposition algorithms ---------------------

    def unit_decompose(self, a: Value) -> list[Value]:
        """Write ``a`` as a sum of units.

        Zero becomes the empty sum over naturals and ``1 + (-1)`` over rings,
        so ring decompositions never have an empty summand list.
        """
        if self.carrier is Carrier.BOOL or not self.is_unit_generated:
            raise CapabilityError(f"unit decomposition is not supported over {self.name}")
        if self.carrier is Carrier.RAT:
            return [Fraction(1), Fraction(-1)] if a == 0 else [Fraction(a)]
        if a == 0:
            return [1, -1] if self.is_ring else []
        unit = 1 if a > 0 else -1
        return [unit] * abs(a)

    def equisubtract(self, a1: Value, b1: Value, a2: Value, b2: Value):
        """Refine ``a1 + b1 == a2 + b2`` into ``(c1, c2, d1, d2)`` with

        a1 = c1 + d1, b1 = c2 + d2, a2 = c1 + c2, b2 = d1 + d2.
        """
        if not self.is_equisubtractive:
            raise CapabilityError(f"{self.name} is not equisubtractive")
        if a1 + b1 != a2 + b2:
            raise PreconditionError(
                f"equisubtract needs equal sums, got {a1}+{b1} != {a2}+{b2}"
            )
        if self.is_ring:
            return a2, self.zero, a1 - a2, b1
        c1 = min(a1, a2)
        c2 = a2 - c1
        d1 = a1 - c1
        return c1, c2, d1, b2 - d1

    # -- numpy helpers --------------------------------------------------------

    def zeros(self, shape) -> np.ndarray:
        arr = np.empty(shape, dtype=object)
        arr.fill(self.zero)
        return arr

    def normalize(self, arr: np.ndarray) -> np.ndarray:
        """Bring an object array produced by numpy arithmetic back into the carrier."""
        if self.carrier is Carrier.BOOL:
            out = np.empty(arr.shape, dtype=object)
            out[...] = 0
            out[arr != 0] = 1
            return out
        if self.carrier is Carrier.RAT:
            flat = [x if isinstance(x, Fraction) else Fraction(x) for x in arr.flat]
            out = np.empty(arr.shape, dtype=object)
            out.reshape(-1)[:] = flat if flat else []
            return out
        return arr


BOOL = Semiring(Carrier.BOOL, is_ring=False, is_commutative=True, is_positive=True,
                is_equisubtractive=False, is_unit_generated=True, has_star=True)
NAT = Semiring(Carrier.NAT, is_ring=False, is_commutative=True, is_positive=True,
               is_equisubtractive=True, is_unit_generated=True, has_star=False)
INT = Semiring(Carrier.INT, is_ring=True, is_commutative=True, is_positive=False,
               is_equisubtractive=True, is_unit_generated=True, has_star=False)
RAT = Semiring(Carrier.RAT, is_ring=True, is_commutative=True, is_positive=False,
               is_equisubtractive=True, is_unit_generated=True, has_star=True)

SEMIRINGS = {s.name: s for s in (BOOL, NAT, INT, RAT)}


def get_semiring(name: str) -> Semiring:
    try:
        return SEMIRINGS[name.lower()]
    except KeyError:
        raise CapabilityError(
            f"unknown semiring {name!r}; expected one of {', '.join(SEMIRINGS)}"
        ) from None


def require_decomposition_carrier(sr: Semiring, what: str) -> None:
    """Reject carriers outside {nat, int, rat} for unit/equisubtraction based ops."""
    if sr.carrier is Carrier.BOOL:
        raise CapabilityError(f"{what} is not supported over the Boolean semiring")
