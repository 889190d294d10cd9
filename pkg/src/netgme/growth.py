"""Symbolic growth rates of the form ``c * N**a * (log N)**b``."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction


class GrowthRelation(enum.Enum):
    LITTLE_O = "little_o"
    THETA = "theta"
    LITTLE_OMEGA = "little_omega"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=False)
class GrowthExpr:
    """``coefficient * N**power * (log N)**log_power``.

    ``log_power`` may be negative so that rates such as ``N / log N`` are
    expressible. The constant expression (power 0, log_power 0) is the
    bounded class.
    """

    coefficient: Fraction = Fraction(1)
    power: Fraction = Fraction(0)
    log_power: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        object.__setattr__(self, "power", Fraction(self.power))
        if self.coefficient <= 0:
            raise ValueError(f"coefficient must be positive, got {self.coefficient}")
        if int(self.log_power) != self.log_power:
            raise ValueError("log_power must be an integer")
        object.__setattr__(self, "log_power", int(self.log_power))

    @classmethod
    def bounded(cls, value: Fraction | int = 1) -> "GrowthExpr":
        return cls(Fraction(value), Fraction(0), 0)

    @property
    def is_bounded(self) -> bool:
        return self.power == 0 and self.log_power == 0

    @property
    def diverges(self) -> bool:
        return (self.power, self.log_power) > (0, 0)

    def __call__(self, size: float) -> float:
        return float(self.coefficient) * size ** float(self.power) * math.log(size) ** self.log_power

    def __str__(self) -> str:
        if self.is_bounded:
            return f"O(1)[{self.coefficient}]"
        parts = [] if self.coefficient == 1 else [str(self.coefficient)]
        if self.power:
            parts.append("N" if self.power == 1 else f"N^({self.power})")
        if self.log_power:
            parts.append("log N" if self.log_power == 1 else f"(log N)^({self.log_power})")
        return "*".join(parts)

    def to_dict(self) -> dict:
        return {
            "coefficient": str(self.coefficient),
            "power": str(self.power),
            "log_power": self.log_power,
            "text": str(self),
        }


LINEAR = GrowthExpr(1, 1, 0)
LOGARITHMIC = GrowthExpr(1, 0, 1)
BOUNDED = GrowthExpr.bounded()


def compare_growth(a: GrowthExpr, b: GrowthExpr) -> GrowthRelation:
    """Relation of ``a`` to ``b`` as N grows; coefficients never change the class."""
    ka, kb = (a.power, a.log_power), (b.power, b.log_power)
    if ka < kb:
        return GrowthRelation.LITTLE_O
    if ka > kb:
        return GrowthRelation.LITTLE_OMEGA
    return GrowthRelation.THETA


def is_big_omega(a: GrowthExpr, b: GrowthExpr) -> bool:
    return compare_growth(a, b) is not GrowthRelation.LITTLE_O


def is_little_o(a: GrowthExpr, b: GrowthExpr) -> bool:
    return compare_growth(a, b) is GrowthRelation.LITTLE_O


def is_little_omega(a: GrowthExpr, b: GrowthExpr) -> bool:
    return compare_growth(a, b) is GrowthRelation.LITTLE_OMEGA


def log_of(expr: GrowthExpr) -> GrowthExpr:
    """Growth of ``log(expr)`` for a polynomially diverging ``expr``."""
    if expr.power > 0:
        return GrowthExpr(expr.power, 0, 1)
    if expr.power == 0 and expr.log_power > 0:
        raise ValueError("log of a polylogarithm (log log N) is not expressible")
    raise ValueError(f"log of a non-diverging expression {expr}")
