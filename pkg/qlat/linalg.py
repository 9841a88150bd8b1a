"""Exact integer and rational linear algebra

Matrices are plain nested sequences of Python ``int`` (or ``Fraction``);
products go through ``numpy`` object arrays so entries never leave exact
arithmetic. Row-major tuples of tuples are the canonical immutable form.
Determinants, inverses, ranks and Smith forms are computed on
``sympy.polys.matrices.DomainMatrix`` over ``ZZ`` or ``QQ``.
"""
import numpy as np

from math import gcd
from functools import reduce
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError
from sympy.polys.matrices.normalforms import smith_normal_decomp

Matrix = Tuple[Tuple[int, ...], ...]
Scalar = Union[int, Fraction]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(A: Sequence[Sequence[int]]) -> Matrix:
    return tuple(zip(*A)) if len(A) else ()


def matmul(*mats: Sequence[Sequence[int]]) -> Matrix:
    """Exact product of one or more matrices"""
    arrays = [np.array(m, dtype=object) for m in mats]
    prod = reduce(lambda a, b: a.dot(b), arrays)
    return tuple(tuple(row) for row in prod.tolist())


def congruent(
        E: Sequence[Sequence[int]], U: Sequence[Sequence[int]]) -> Matrix:
    """Return Uᵀ E U"""
    return matmul(transpose(U), E, U)


def _is_integral(A: Sequence[Sequence]) -> bool:
    return all(isinstance(x, (int, np.integer)) for row in A for x in row)


def _to_domain(A: Sequence[Sequence], domain=None) -> DomainMatrix:
    """``DomainMatrix`` over ``ZZ`` for integer input, else over ``QQ``"""
    if domain is None:
        domain = ZZ if _is_integral(A) else QQ
    if domain == ZZ:
        rows = [[int(x) for x in row] for row in A]
    else:
        rows = [[(Fraction(x).numerator, Fraction(x).denominator) for x in row]
                for row in A]
    return DomainMatrix.from_list(rows, domain)


def _from_domain(x) -> Scalar:
    if hasattr(x, 'denominator'):
        value = Fraction(int(x.numerator), int(x.denominator))
        return int(value) if value.denominator == 1 else value
    return int(x)


def _to_rows(dM: DomainMatrix) -> tuple:
    return tuple(tuple(_from_domain(x) for x in row) for row in dM.to_list())


def det(A: Sequence[Sequence]) -> Scalar:
    """Exact determinant

    Integer input gives an ``int``; rational input gives a ``Fraction`` (or
    an ``int`` when the determinant is integral).
    """
    n = len(A)
    if n == 0:
        return 1
    if any(len(row) != n for row in A):
        raise ValueError('det() needs a square matrix')
    return _from_domain(_to_domain(A).det())


def inverse(A: Sequence[Sequence]) -> Tuple[Tuple[Fraction, ...], ...]:
    """Inverse over the rationals"""
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError('inverse() needs a square matrix')
    if n == 0:
        return ()
    try:
        inv = _to_domain(A, QQ).inv()
    except DMNonInvertibleMatrixError:
        raise ValueError('Matrix is singular')
    return tuple(tuple(Fraction(x) for x in row) for row in _to_rows(inv))


def inverse_unimodular(U: Sequence[Sequence[int]]) -> Matrix:
    inv = inverse(U)
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError('Matrix is not unimodular')
    return tuple(tuple(int(x) for x in row) for row in inv)


def smith_form(A: Sequence[Sequence[int]]) -> Tuple[Matrix, Matrix, Matrix]:
    """Smith normal form over the integers

    Returns:
        ``(U, D, V)`` with ``U`` and ``V`` unimodular, ``U A V = D``,
        ``D`` diagonal with non-negative entries ``d_1 | d_2 | ...``.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    if not rows or not cols:
        return identity(rows), as_matrix(A), identity(cols)
    D, U, V = smith_normal_decomp(_to_domain(A, ZZ))
    D = [list(row) for row in _to_rows(D)]
    U = [list(row) for row in _to_rows(U)]
    for i in range(min(rows, cols)):
        if D[i][i] < 0:
            D[i] = [-x for x in D[i]]
            U[i] = [-x for x in U[i]]
    return as_matrix(U), as_matrix(D), _to_rows(V)


def invariant_factors(A: Sequence[Sequence[int]]) -> List[int]:
    """Diagonal of the Smith form, zeros included"""
    if not len(A) or not len(A[0]):
        return []
    _, D, _ = smith_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0])))]


def rank(A: Sequence[Sequence]) -> int:
    if not len(A) or not len(A[0]):
        return 0
    return _to_domain(A, QQ).rank()


def is_primitive(T: Sequence[Sequence[int]]) -> bool:
    """Columns of ``T`` span a saturated sublattice of full column rank"""
    if not len(T) or not len(T[0]):
        return True
    if len(T[0]) > len(T):
        return False
    return all(d == 1 for d in invariant_factors(T))


def kernel(A: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Saturated integral basis of ``{x : A x = 0}``

    The basis comes from the trailing columns of the right Smith transform,
    so it spans the full integer kernel, not merely a finite-index sublattice.
    """
    cols = len(A[0])
    U, D, V = smith_form(A)
    r = sum(1 for i in range(min(len(D), cols)) if D[i][i])
    return [tuple(V[i][j] for i in range(cols)) for j in range(r, cols)]


def row_span_basis(vectors: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Basis of the Z-module spanned by the given integer row vectors"""
    U, D, V = smith_form(vectors)
    Vinv = inverse_unimodular(V)
    basis = []
    for i in range(min(len(D), len(D[0]))):
        if D[i][i]:
            basis.append(tuple(D[i][i] * x for x in Vinv[i]))
    return basis


def primitive_vector(v: Sequence[int]) -> Tuple[int, ...]:
    """Divide by the content and make the first nonzero entry positive"""
    g = reduce(gcd, v, 0)
    if g == 0:
        raise ValueError('Zero vector has no primitive multiple')
    first = next(x for x in v if x)
    if first < 0:
        g = -g
    return tuple(x // g for x in v)
