"""Exact free-divisor constructions and Saito-criterion certificates."""

from freediv.polyring import (
    MIXED,
    Polynomial,
    WeightSystem,
    exact_divide,
    gcd,
    is_squarefree,
    monomials_of_weighted_degree,
    weighted_degree,
    ws,
)

__all__ = [
    "MIXED",
    "Polynomial",
    "WeightSystem",
    "exact_divide",
    "gcd",
    "is_squarefree",
    "monomials_of_weighted_degree",
    "weighted_degree",
    "ws",
]
