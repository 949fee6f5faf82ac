"""
Exact linear algebra over Fraction
"""

from fractions import Fraction
from typing import List, Sequence

from .errors import InvariantViolation

Matrix = List[List[Fraction]]
Vector = List[Fraction]


def identity(size: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    inner = range(len(b))
    return [[sum((row[k] * b[k][j] for k in inner), Fraction(0)) for j in range(len(b[0]))] for row in a]


def matvec(a: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> Vector:
    return [sum((c * v for c, v in zip(row, x) if c), Fraction(0)) for row in a]


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vector:
    """
    Solve matrix * x = rhs exactly by Gaussian elimination.

    Args:
        matrix: Square matrix of Fractions
        rhs: Right-hand side

    Returns:
        list: The unique solution

    Raises:
        InvariantViolation: If the matrix is singular
    """
    size = len(matrix)
    rows = [[Fraction(c) for c in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            raise InvariantViolation(f"singular system at column {col}")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        lead = rows[col][col]
        for r in range(col + 1, size):
            factor = rows[r][col] / lead
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    x = [Fraction(0)] * size
    for j in reversed(range(size)):
        acc = sum((rows[j][k] * x[k] for k in range(j + 1, size)), Fraction(0))
        x[j] = (rows[j][size] - acc) / rows[j][j]
    return x
