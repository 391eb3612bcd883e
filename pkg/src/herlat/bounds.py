"""Exact power-product bounds and the constants of the reduction theorem."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable


@dataclass(frozen=True)
class PowerBound:
    """prod base_k^exp_k with positive rational bases and rational exponents."""

    factors: tuple[tuple[Fraction, Fraction], ...]

    @classmethod
    def of(cls, pairs: Iterable[tuple]) -> "PowerBound":
        merged: dict[Fraction, Fraction] = {}
        for base, exp in pairs:
            base, exp = Fraction(base), Fraction(exp)
            if base <= 0:
                raise ValueError("PowerBound bases must be positive")
            if base == 1 or exp == 0:
                continue
            merged[base] = merged.get(base, Fraction(0)) + exp
        return cls(tuple(sorted((b, x) for b, x in merged.items() if x != 0)))

    def __mul__(self, other: "PowerBound") -> "PowerBound":
        return PowerBound.of(self.factors + other.factors)

    def power(self, k) -> "PowerBound":
        return PowerBound.of((b, x * k) for b, x in self.factors)

    def log(self) -> float:
        return sum(float(x) * _log(b) for b, x in self.factors)

    def to_float(self) -> float:
        lg = self.log()
        return math.exp(lg) if lg < 700 else math.inf

    def cleared(self) -> tuple[Fraction, int]:
        """(B, Q) with bound = B^(1/Q) and B an exact rational."""
        Q = 1
        for _, x in self.factors:
            Q = lcm(Q, x.denominator)
        B = Fraction(1)
        for b, x in self.factors:
            B *= b ** int(x * Q)
        return B, Q


def _log(b: Fraction) -> float:
    return math.log(b.numerator) - math.log(b.denominator)


def compare_power_bound(value, bound: PowerBound) -> bool:
    """Exactly decide value <= bound (value a positive rational or zero)."""
    value = Fraction(value)
    if value <= 0:
        return True
    Q = 1
    for _, x in bound.factors:
        Q = lcm(Q, x.denominator)
    lhs = value ** Q
    rhs = Fraction(1)
    for b, x in bound.factors:
        k = int(x * Q)
        if k >= 0:
            rhs *= b ** k
        else:
            lhs *= b ** (-k)
    return lhs <= rhs


@dataclass(frozen=True)
class TableConstants:
    """Multipliers and exponents bounding index and form values."""

    index_mult: PowerBound
    index_eta: Fraction
    index_R: Fraction
    index_L: Fraction
    psi_mult: PowerBound
    psi_eta: Fraction
    psi_R: Fraction
    psi_L: Fraction


def table_constants(d: int, e: int, m: int) -> TableConstants:
    F = Fraction
    if d == 1:
        base = e * m * m
        return TableConstants(
            index_mult=PowerBound.of([(base, F(e * m * (m + 2), 16))]),
            index_eta=F(0),
            index_R=F(m * (m + 2), 8),
            index_L=F(m - 2, 4),
            psi_mult=PowerBound.of([(base, F(m * (m + 2) + 24, 32))]),
            psi_eta=F(0),
            psi_R=F(m * (m + 2) - 8, 16 * e),
            psi_L=F(m + 2, 8 * e),
        )
    if d == 2:
        base = 2 * e * m * m
        return TableConstants(
            index_mult=PowerBound.of([(base, F(e * m * (m + 2), 2))]),
            index_eta=F(14 * e * m),
            index_R=F(m * (m + 16), 4),
            index_L=F(m - 1, 2),
            psi_mult=PowerBound.of([(base, F(m * (m + 1) + 14, 8))]),
            psi_eta=F(7),
            psi_R=F(m * (m + 1) + 26, 16 * e),
            psi_L=F(m + 1, 8 * e),
        )
    raise ValueError("d must be 1 or 2")


def index_bound(d, e, m, eta, disc_R, disc_L) -> PowerBound:
    c = table_constants(d, e, m)
    return c.index_mult * PowerBound.of(
        [(eta, c.index_eta), (abs(disc_R), c.index_R), (abs(disc_L), c.index_L)])


def psi_bound(d, e, m, eta, disc_R, disc_L) -> PowerBound:
    c = table_constants(d, e, m)
    return c.psi_mult * PowerBound.of(
        [(eta, c.psi_eta), (abs(disc_R), c.psi_R), (abs(disc_L), c.psi_L)])


def theorem_bounds(d, e, m, disc_R, disc_L) -> tuple[PowerBound, PowerBound]:
    """Index and form bounds with eta = |disc L| folded into the L exponent."""
    c = table_constants(d, e, m)
    L = abs(disc_L)
    index = c.index_mult * PowerBound.of(
        [(abs(disc_R), c.index_R), (L, c.index_eta + c.index_L)])
    psi = c.psi_mult * PowerBound.of([(abs(disc_R), c.psi_R), (L, c.psi_eta + c.psi_L)])
    return index, psi
