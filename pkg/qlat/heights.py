"""Contents of rational vectors and heights of integral subspaces

Everything is exact: heights are carried as squared rationals and only the
``decimal`` property renders a square root.
"""
from math import gcd
from decimal import Decimal, localcontext
from functools import reduce
from fractions import Fraction
from itertools import combinations
from typing import List, NamedTuple, Optional, Sequence, Tuple

from . import linalg
from .lattice import QuadLattice, pair_reduce
from .utils import _mywrap, decode_fraction, decode_int

Vector = Tuple[int, ...]


class HeightReport(NamedTuple):
    """Exact height data

    ``squared`` is the squared content (vectors) or the squared height
    (subspaces). For a vector, ``finite`` is the product of its ``p``-adic
    norms and ``archimedean_squared`` its squared Euclidean norm; their
    product ``finite² · archimedean_squared`` is ``squared``.
    """
    squared: Fraction
    dimension: int
    basis: Tuple[Vector, ...]
    finite: Fraction = Fraction(1)
    archimedean_squared: Optional[Fraction] = None

    @property
    def decimal(self) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = 30
            return (Decimal(self.squared.numerator)
                    / Decimal(self.squared.denominator)).sqrt()

    def to_json(self) -> dict:
        out = {
            'squared': self.squared,
            'decimal': str(self.decimal),
            'dimension': self.dimension,
            'basis': [list(v) for v in self.basis],
            'finite': self.finite}
        if self.archimedean_squared is not None:
            out['archimedean_squared'] = self.archimedean_squared
        return out


def content(w: Sequence) -> HeightReport:
    """Content of a nonzero rational vector over all places

    ``c(w) = Π_p ‖w‖_p · ‖w‖_∞`` with the sup norm at every prime and the
    Euclidean norm at infinity. Writing ``w = α u`` with ``u`` a primitive
    integer vector, the product formula gives ``c(w) = ‖u‖_∞``.

    Args:
        w: integers, ``Fraction`` or ``"num/den"`` strings
    Returns:
        ``HeightReport`` with ``basis = (u,)``

    Examples:

        .. code-block:: python

            >>> from qlat.heights import content
            >>> content(['1/2', 1]).squared
            Fraction(5, 1)
    """
    w = [decode_fraction(x) for x in w]
    if not any(w):
        raise ValueError('Content of the zero vector is undefined')
    den = reduce(
        lambda a, b: a * b // gcd(a, b), (x.denominator for x in w), 1)
    num = [int(x * den) for x in w]
    g = reduce(gcd, num, 0)
    u = linalg.primitive_vector(num)
    alpha = Fraction(g, den)
    arch = sum(x * x for x in w)
    return HeightReport(
        squared=Fraction(sum(x * x for x in u)),
        dimension=len(w),
        basis=(u,),
        finite=1 / alpha,
        archimedean_squared=arch)


class KernelBasis(NamedTuple):
    vectors: Tuple[Vector, ...]
    height_product_squared: int

    def to_json(self) -> dict:
        return {
            'vectors': [list(v) for v in self.vectors],
            'height_product_squared': self.height_product_squared}


def _reduce_rows(B: List[Vector]) -> List[Vector]:
    """Pair-reduce integer rows for the Euclidean form, normalize, sort"""
    if not B:
        return []
    E = [[2 * sum(a * b for a, b in zip(u, v)) for v in B] for u in B]
    _, U = pair_reduce(QuadLattice.from_gram(E))
    rows = linalg.matmul(linalg.transpose(U.matrix), B)
    rows = [linalg.primitive_vector(r) for r in rows]
    return sorted(rows, key=lambda v: (sum(x * x for x in v), v))


def kernel_basis_integral(A: Sequence[Sequence[int]]) -> KernelBasis:
    """Saturated integral basis of the kernel of a full-rank matrix

    Args:
        A: integer matrix ``k×ℓ`` of rank ``k < ℓ``
    Returns:
        ``KernelBasis`` whose vectors span the whole integer kernel, sorted
        by Euclidean norm, with the product of their squared heights.

    Examples:

        .. code-block:: python

            >>> kernel_basis_integral([[2, 4]]).vectors
            ((2, -1),)
    """
    A = [[decode_int(x) for x in row] for row in A]
    k = len(A)
    ell = len(A[0]) if k else 0
    r = linalg.rank(A) if k else 0
    if k == 0 or r != k or k >= ell:
        msg = f"""\
        kernel_basis_integral needs a full row rank k×ℓ matrix with k < ℓ;
        got shape {k}×{ell} with rank {r}
        """
        raise ValueError(_mywrap(msg))
    vectors = _reduce_rows(linalg.kernel(A))
    product = 1
    for v in vectors:
        product *= sum(x * x for x in v)
    return KernelBasis(tuple(vectors), product)


def plucker_vector(B: Sequence[Sequence[int]]) -> Vector:
    """Primitive vector of maximal minors of the rows of ``B``

    Minors are listed over column subsets in lexicographic order. The number
    of coordinates is a binomial coefficient, so this is meant for small
    shapes; ``subspace_height`` never calls it.
    """
    k = len(B)
    if k == 0:
        return (1,)
    cols = len(B[0])
    minors = [
        linalg.det([[row[j] for j in S] for row in B])
        for S in combinations(range(cols), k)]
    return linalg.primitive_vector(minors)


def subspace_height(B: Sequence[Sequence[int]]) -> HeightReport:
    """Height of the rational span of integer rows

    The squared norm of the wedge is ``det(B Bᵀ)`` (Cauchy–Binet); dividing
    by the squared product of the invariant factors of ``B`` gives the
    primitive wedge. The empty span has height 1.
    """
    B = [tuple(decode_int(x) for x in row) for row in B]
    if not B:
        return HeightReport(Fraction(1), 0, ())
    if linalg.rank(B) != len(B):
        raise ValueError('Rows must be linearly independent')
    gram = [[sum(a * b for a, b in zip(u, v)) for v in B] for u in B]
    index = 1
    for d in linalg.invariant_factors(B):
        index *= d
    return HeightReport(
        Fraction(linalg.det(gram), index * index), len(B), tuple(B))


def _vectorize(X: Sequence[Sequence[int]]) -> Vector:
    return tuple(x for row in X for x in row)


def _unvectorize(v: Sequence[int], n: int) -> linalg.Matrix:
    return tuple(tuple(v[i * n:(i + 1) * n]) for i in range(n))


def lie_so(Q: QuadLattice) -> List[linalg.Matrix]:
    """Saturated integral basis of the Lie algebra of ``SO_Q``

    Solves ``X E + E Xᵀ = 0`` on ``vec(X)``; the constraint has one row per
    entry of the (symmetric) left-hand side on or above the diagonal.

    Args:
        Q: lattice
    Returns:
        ``n(n-1)/2`` integer ``n×n`` matrices
    """
    n = Q.n
    if n == 1:
        return []
    E = Q.gram
    rows = []
    for a in range(n):
        for b in range(a, n):
            row = [0] * (n * n)
            for c in range(n):
                row[a * n + c] += E[c][b]
                row[b * n + c] += E[a][c]
            rows.append(row)
    basis = kernel_basis_integral(rows).vectors
    assert len(basis) == n * (n - 1) // 2
    return [_unvectorize(v, n) for v in basis]


def lie_height(Q: QuadLattice) -> HeightReport:
    return subspace_height([_vectorize(X) for X in lie_so(Q)])


def stabilizer_algebra(
        Q: QuadLattice, W: Sequence[Sequence[int]]) -> List[linalg.Matrix]:
    """Saturated integral basis of ``{X ∈ Lie(SO_Q) : X w = 0 for w ∈ W}``

    Args:
        Q: lattice of rank ``n``
        W: linearly independent integer vectors of length ``n``
    """
    n = Q.n
    W = [tuple(decode_int(x) for x in w) for w in W]
    if any(len(w) != n for w in W):
        raise ValueError(f'Subspace vectors must have length {n}')
    if W and linalg.rank(W) != len(W):
        raise ValueError('Subspace vectors must be linearly independent')
    algebra = lie_so(Q)
    if not W or not algebra:
        return algebra
    C = [[sum(X[a][b] * w[b] for b in range(n)) for X in algebra]
         for w in W for a in range(n)]
    coords = linalg.kernel(C)
    # saturated in coefficients and the Lie basis is saturated, so the
    # combinations are saturated in Mat_n(Z)
    B = []
    if coords:
        B = linalg.matmul(coords, [_vectorize(X) for X in algebra])
    return [_unvectorize(v, n) for v in _reduce_rows(list(B))]


def stabilizer_height(
        Q: QuadLattice, W: Sequence[Sequence[int]]) -> HeightReport:
    """Height of the pointwise stabilizer algebra of a subspace

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice
            >>> Q = QuadLattice.identity(3)
            >>> stabilizer_height(Q, [[1, 0, 0]]).squared
            Fraction(2, 1)
    """
    return subspace_height([_vectorize(X) for X in stabilizer_algebra(Q, W)])
