"""Kronecker point sets ``{(frac(i*alpha), frac(i*beta)) : i = 1..n}`` on the unit torus."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import gmpy2

from .errors import SymmetryViolation
from .numerics import (
    ConstantSpec,
    PrecisionConfig,
    Real,
    certify,
    frac,
    make_constant,
    parse_constant_list,
    precision,
)


@dataclass(frozen=True)
class VectorSpec:
    alpha: ConstantSpec
    beta: ConstantSpec

    def __post_init__(self) -> None:
        if self.alpha == self.beta:
            raise ValueError(f"alpha and beta must differ, both are {self.alpha}")

    @classmethod
    def parse(cls, text: str) -> VectorSpec:
        alpha, beta = parse_constant_list(text, 2)
        return cls(alpha, beta)

    def __str__(self) -> str:
        return f"{self.alpha},{self.beta}"

    @property
    def label(self) -> str:
        return f"({self.alpha.symbol}, {self.beta.symbol})"


@dataclass(frozen=True)
class TorusPoint:
    x: Real
    y: Real

    def __post_init__(self) -> None:
        for c in (self.x, self.y):
            if not 0 <= c.value < 1:
                raise ValueError(f"torus coordinate out of [0,1): {c!r}")

    def as_float(self) -> tuple[float, float]:
        return float(self.x), float(self.y)


@dataclass(frozen=True, eq=False)
class SiteSet:
    """Sites ``points[0..n-1]``; ``points[i-1]`` is the image of ``i * v``."""

    n: int
    v: VectorSpec
    points: tuple[TorusPoint, ...]
    cfg: PrecisionConfig

    def point(self, i: int) -> TorusPoint:
        """1-based access matching the multiple ``i``."""
        return self.points[i - 1]

    def prefix(self, n: int) -> SiteSet:
        if not 1 <= n <= self.n:
            raise ValueError(f"prefix length {n} outside 1..{self.n}")
        return SiteSet(n, self.v, self.points[:n], self.cfg)

    @cached_property
    def raw(self) -> tuple[tuple[object, object], ...]:
        return tuple((p.x.value, p.y.value) for p in self.points)

    def to_json(self) -> dict:
        places = self.cfg.target_digits
        return {
            "n": self.n,
            "vector": str(self.v),
            "target_digits": self.cfg.target_digits,
            "points": [[p.x.to_decimal(places), p.y.to_decimal(places)] for p in self.points],
        }


def generate_sites(v: VectorSpec, n: int, cfg: PrecisionConfig | None = None) -> SiteSet:
    cfg = cfg or PrecisionConfig()
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    # certify the generators once; i*alpha then loses at most log10(n) digits to the guard
    alpha = certify(lambda c: make_constant(v.alpha, c), cfg).value
    beta = certify(lambda c: make_constant(v.beta, c), cfg).value
    digits = cfg.working_digits
    a, b = alpha.value, beta.value
    points = []
    with precision(digits):
        for i in range(1, n + 1):
            x = Real(i * a, digits)
            y = Real(i * b, digits)
            points.append(TorusPoint(frac(x), frac(y)))
    return SiteSet(n, v, tuple(points), cfg)


def _circular_diff(a, b):
    d = a - b
    return abs(d - gmpy2.rint(d))


def central_pairing(s: SiteSet) -> list[tuple[int, int]]:
    """Index pairs ``(i, n+1-i)``; a middle index pairs with itself when n is odd.

    Checks ``p_i + p_{n+1-i} == (n+1) v  (mod 1)`` to the target precision.
    """
    n = s.n
    pairs = [(i, n + 1 - i) for i in range(1, n // 2 + 1)]
    if n % 2:
        pairs.append(((n + 1) // 2, (n + 1) // 2))
    cfg = s.cfg
    digits = cfg.working_digits
    alpha = make_constant(s.v.alpha, cfg).value
    beta = make_constant(s.v.beta, cfg).value
    with precision(digits):
        cx, cy = (n + 1) * alpha, (n + 1) * beta
        tol = gmpy2.mpfr(10) ** (-cfg.target_digits)
        for i, j in pairs:
            pi, pj = s.point(i), s.point(j)
            ex = _circular_diff(pi.x.value + pj.x.value, cx)
            ey = _circular_diff(pi.y.value + pj.y.value, cy)
            if ex >= tol or ey >= tol:
                raise SymmetryViolation(f"sites {i} and {j} are not centrally paired (error {max(ex, ey)})")
    return pairs
