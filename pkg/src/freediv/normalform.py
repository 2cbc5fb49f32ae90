"""Rank-k free modules with an x-power basis and a rewriting rule for x^k.

Models a finite free module over a polynomial coefficient ring: elements
are polynomials in one extra variable x with coefficients in the ring, and
a single relation x^rank = (lower-degree polynomial) rewrites everything to
x-degree < rank.  Used for the pushforward ring of a stable unfolding and
for the critical-locus ring of a one-variable versal deformation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from freediv.polyring import Polynomial, WeightSystem

XElement = tuple[Polynomial, ...]  # index = x-degree


@dataclass(frozen=True)
class NormalFormRing:
    ring: WeightSystem  # coefficient ring
    rank: int
    reduction: tuple[Polynomial, ...]  # x^rank = sum_d reduction[d] * x^d
    x_weight: int = 1

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("rank must be at least 1")
        if len(self.reduction) != self.rank:
            raise ValueError("reduction must give x^rank in degrees < rank")

    def zero(self) -> XElement:
        return tuple(self.ring.zero() for _ in range(self.rank))

    def x_power(self, e: int) -> XElement:
        """The class of x^e, reduced to degree < rank."""
        if e < 0:
            raise ValueError("negative power")
        raw = [self.ring.zero()] * (e + 1)
        raw[e] = self.ring.one()
        return self.reduce(raw)

    def from_coeffs(self, coeffs: Sequence[Polynomial]) -> XElement:
        return self.reduce(list(coeffs))

    def reduce(self, coeffs: Sequence[Polynomial]) -> XElement:
        """Rewrite until the x-degree is strictly below the rank."""
        work = list(coeffs)
        if len(work) < self.rank:
            work += [self.ring.zero()] * (self.rank - len(work))
        d = len(work) - 1
        while d >= self.rank:
            top = work[d]
            if not top.is_zero():
                work[d] = self.ring.zero()
                for r, red in enumerate(self.reduction):
                    if not red.is_zero():
                        work[d - self.rank + r] = work[d - self.rank + r] + top * red
            d -= 1
        return tuple(work[: self.rank])

    def mul(self, a: Sequence[Polynomial], b: Sequence[Polynomial]) -> XElement:
        out = [self.ring.zero()] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca.is_zero():
                continue
            for j, cb in enumerate(b):
                if not cb.is_zero():
                    out[i + j] = out[i + j] + ca * cb
        return self.reduce(out)

    def scale(self, a: Sequence[Polynomial], p: Polynomial) -> XElement:
        return self.reduce([c * p for c in a])

    def add(self, a: XElement, b: XElement) -> XElement:
        return tuple(x + y for x, y in zip(a, b))

    def socle_coefficient(self, elem: XElement) -> Polynomial:
        """Coefficient of x^(rank-1), the projection defining the pairing."""
        return elem[self.rank - 1]
