"""Arbitrary-precision reals, named irrational constants, and precision escalation.

Precision is expressed in decimal digits everywhere in the public API; MPFR
(through gmpy2) works in bits, so :func:`digits_to_bits` is the single place
where the two are converted.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, replace
from functools import lru_cache, total_ordering
from typing import Callable

import gmpy2
from gmpy2 import mpfr, mpz

from .errors import CertificationFailure, ParseError, PerfectPower

_LOG2_10 = math.log2(10)


def digits_to_bits(digits: int) -> int:
    return math.ceil(digits * _LOG2_10) + 8


def precision(digits: int):
    """Context manager activating an MPFR context good for ``digits`` decimal digits."""
    return gmpy2.context(precision=digits_to_bits(digits))


@dataclass(frozen=True)
class PrecisionConfig:
    target_digits: int = 80
    guard_digits: int = 40
    escalation_factor: int = 2

    def __post_init__(self) -> None:
        if self.target_digits < 1:
            raise ValueError(f"target_digits must be >= 1, got {self.target_digits}")
        if self.guard_digits < 10:
            raise ValueError(f"guard_digits must be >= 10, got {self.guard_digits}")
        if self.escalation_factor < 2:
            raise ValueError(f"escalation_factor must be >= 2, got {self.escalation_factor}")

    @property
    def working_digits(self) -> int:
        return self.target_digits + self.guard_digits

    @property
    def bits(self) -> int:
        return digits_to_bits(self.working_digits)

    def escalated(self, times: int = 1) -> PrecisionConfig:
        """Same target, working precision multiplied by ``escalation_factor**times``."""
        working = self.working_digits * self.escalation_factor**times
        return replace(self, guard_digits=working - self.target_digits)

    def context(self):
        return precision(self.working_digits)


def _coerce(other, digits: int):
    if isinstance(other, Real):
        return other.value, min(digits, other.digits)
    if isinstance(other, (int, mpz)):
        return other, digits
    return NotImplemented, digits


@total_ordering
@dataclass(frozen=True, eq=False)
class Real:
    """An MPFR value tagged with the decimal precision it was computed at.

    Binary operations run at the smaller of the two operands' precisions.
    Python ints are exact and never lower the precision of a result.
    """

    value: object
    digits: int

    @classmethod
    def from_int(cls, k: int, digits: int) -> Real:
        with precision(digits):
            return cls(mpfr(k), digits)

    @classmethod
    def parse(cls, text: str, digits: int) -> Real:
        with precision(digits):
            return cls(mpfr(text), digits)

    def _binop(self, other, op):
        rhs, digits = _coerce(other, self.digits)
        if rhs is NotImplemented:
            return NotImplemented
        with precision(digits):
            return Real(op(self.value, rhs), digits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binop(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binop(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __pow__(self, k: int):
        with precision(self.digits):
            return Real(self.value**k, self.digits)

    def __neg__(self):
        with precision(self.digits):
            return Real(-self.value, self.digits)

    def __abs__(self):
        with precision(self.digits):
            return Real(abs(self.value), self.digits)

    def __eq__(self, other):
        rhs, _ = _coerce(other, self.digits)
        if rhs is NotImplemented:
            return NotImplemented
        return self.value == rhs

    def __lt__(self, other):
        rhs, _ = _coerce(other, self.digits)
        if rhs is NotImplemented:
            return NotImplemented
        return self.value < rhs

    def __hash__(self):
        return hash((self.value, self.digits))

    def __float__(self) -> float:
        return float(self.value)

    def floor(self) -> int:
        return int(gmpy2.floor(self.value))

    def sqrt(self) -> Real:
        with precision(self.digits):
            return Real(gmpy2.sqrt(self.value), self.digits)

    def to_decimal(self, places: int | None = None) -> str:
        """Fixed-point decimal string with ``places`` fractional digits (default: all)."""
        return to_decimal(self.value, self.digits if places is None else places)

    def __str__(self) -> str:
        return self.to_decimal()

    def __repr__(self) -> str:
        return f"Real({self.to_decimal(20)}..., digits={self.digits})"


def to_decimal(value, places: int) -> str:
    return format(value, f".{places}f")


def agreeing_digits(a: Real, b: Real) -> int:
    """Number of leading fractional digits on which two values' decimal expansions agree.

    Returns the full shared precision when the two strings are identical.
    """
    places = min(a.digits, b.digits)
    sa, sb = a.to_decimal(places), b.to_decimal(places)
    ia, fa = sa.split(".")
    ib, fb = sb.split(".")
    if ia != ib:
        return 0
    for k, (ca, cb) in enumerate(zip(fa, fb)):
        if ca != cb:
            return k
    return places


# --- named constants -----------------------------------------------------------


class ConstantKind(enum.Enum):
    SQRT = "sqrt"
    CBRT = "cbrt"
    E = "e"
    PI = "pi"


_SYMBOLS = {ConstantKind.SQRT: "√", ConstantKind.CBRT: "∛"}


@dataclass(frozen=True)
class ConstantSpec:
    kind: ConstantKind
    operand: int | None = None

    def __post_init__(self) -> None:
        if self.kind in (ConstantKind.SQRT, ConstantKind.CBRT):
            if self.operand is None or self.operand < 1:
                raise ValueError(f"{self.kind.value} needs a positive integer operand")
            root = 2 if self.kind is ConstantKind.SQRT else 3
            if gmpy2.iroot(mpz(self.operand), root)[1]:
                raise PerfectPower(f"{self.kind.value}({self.operand}) is rational")
        elif self.operand is not None:
            raise ValueError(f"{self.kind.value} takes no operand")

    @classmethod
    def parse(cls, text: str) -> ConstantSpec:
        spec, end = _parse_constant(text, 0)
        end = _skip_ws(text, end)
        if end != len(text):
            raise ParseError("trailing input", text, end, "end of expression")
        return spec

    def __str__(self) -> str:
        if self.operand is None:
            return self.kind.value
        return f"{self.kind.value}({self.operand})"

    @property
    def symbol(self) -> str:
        if self.kind is ConstantKind.E:
            return "e"
        if self.kind is ConstantKind.PI:
            return "π"
        return f"{_SYMBOLS[self.kind]}{self.operand}"


_TOKEN = re.compile(r"(sqrt|cbrt|pi|e)", re.IGNORECASE)


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_constant(text: str, pos: int) -> tuple[ConstantSpec, int]:
    """Parse one ``const`` starting at ``pos``; returns the spec and the end offset."""
    pos = _skip_ws(text, pos)
    m = _TOKEN.match(text, pos)
    if not m:
        raise ParseError("unknown constant", text, pos, "'sqrt(', 'cbrt(', 'e' or 'pi'")
    name = m.group(1).lower()
    pos = m.end()
    if name in ("e", "pi"):
        return ConstantSpec(ConstantKind(name)), pos
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] != "(":
        raise ParseError("missing '('", text, pos, "'('")
    pos = _skip_ws(text, pos + 1)
    m = re.compile(r"\d+").match(text, pos)
    if not m:
        raise ParseError("missing integer operand", text, pos, "INT")
    operand = int(m.group())
    pos = _skip_ws(text, m.end())
    if pos >= len(text) or text[pos] != ")":
        raise ParseError("missing ')'", text, pos, "')'")
    return ConstantSpec(ConstantKind(name), operand), pos + 1


def parse_constant_list(text: str, count: int) -> tuple[ConstantSpec, ...]:
    """Parse ``count`` comma-separated constants, e.g. ``"sqrt(2), e"``."""
    specs = []
    pos = 0
    for i in range(count):
        if i:
            pos = _skip_ws(text, pos)
            if pos >= len(text) or text[pos] != ",":
                raise ParseError("missing ','", text, pos, "','")
            pos += 1
        spec, pos = _parse_constant(text, pos)
        specs.append(spec)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise ParseError("trailing input", text, pos, "end of expression")
    return tuple(specs)


def _e_series(bits: int) -> mpfr:
    """e = sum 1/k!, summed in scaled integers; truncation error < 2/(K+1)!."""
    scale = mpz(1) << (bits + 16)
    term, total, k = scale, mpz(0), 0
    while term:
        total += term
        k += 1
        term //= k
    return mpfr(total) / mpfr(scale)


def _machin_pi(bits: int) -> mpfr:
    """pi = 16 atan(1/5) - 4 atan(1/239), each arctan as a scaled-integer series."""
    scale = mpz(1) << (bits + 16)

    def arctan_inv(x: int) -> mpz:
        power = scale // x
        total, k, sign, x2 = mpz(0), 1, 1, x * x
        while power:
            total += sign * (power // k)
            power //= x2
            k += 2
            sign = -sign
        return total

    return mpfr(16 * arctan_inv(5) - 4 * arctan_inv(239)) / mpfr(scale)


@lru_cache(maxsize=None)
def _constant_value(spec: ConstantSpec, digits: int):
    bits = digits_to_bits(digits)
    with gmpy2.context(precision=bits):
        if spec.kind is ConstantKind.SQRT:
            x = gmpy2.sqrt(mpfr(spec.operand))
        elif spec.kind is ConstantKind.CBRT:
            x = gmpy2.cbrt(mpfr(spec.operand))
        elif spec.kind is ConstantKind.E:
            x = gmpy2.exp(mpfr(1))
        else:
            x = gmpy2.const_pi()
    # cross-check at doubled precision against an identity or an independent series
    with gmpy2.context(precision=2 * bits):
        tol = mpfr(10) ** (-(digits - 2))
        if spec.kind is ConstantKind.SQRT:
            err = abs(mpfr(x) ** 2 - spec.operand)
        elif spec.kind is ConstantKind.CBRT:
            err = abs(mpfr(x) ** 3 - spec.operand)
        elif spec.kind is ConstantKind.E:
            err = abs(mpfr(x) - _e_series(bits))
        else:
            err = abs(mpfr(x) - _machin_pi(bits))
        if err > tol * max(1, spec.operand or 1):
            raise ArithmeticError(f"cross-check failed for {spec}: error {err}")
    return x


def make_constant(spec: ConstantSpec, cfg: PrecisionConfig) -> Real:
    """Return ``spec`` evaluated to the working precision of ``cfg``."""
    digits = cfg.working_digits
    return Real(_constant_value(spec, digits), digits)


def frac(x: Real) -> Real:
    """Fractional part ``x - floor(x)`` of a non-negative real."""
    if x.value < 0:
        raise ValueError("frac is only defined here for x >= 0")
    with precision(x.digits):
        return Real(x.value - gmpy2.floor(x.value), x.digits)


@dataclass(frozen=True)
class Certified:
    value: Real
    certified_digits: int
    working_digits: int


def certify(compute: Callable[[PrecisionConfig], Real], cfg: PrecisionConfig) -> Certified:
    """Evaluate ``compute`` at escalating precisions until ``target_digits`` agree.

    ``compute`` receives a PrecisionConfig whose working precision is the one
    to use. Gives up with CertificationFailure after two escalations.
    """
    previous = compute(cfg)
    for times in (1, 2):
        current_cfg = cfg.escalated(times)
        current = compute(current_cfg)
        agree = agreeing_digits(previous, current)
        if agree >= cfg.target_digits:
            return Certified(current, agree, current_cfg.working_digits)
        previous = current
    raise CertificationFailure(
        f"only {agree} digits agree after two escalations (target {cfg.target_digits})"
    )
