#! /usr/bin/env python3
"""Positive definite integral quadratic lattices

A lattice is stored through its doubled Gram matrix ``E`` (integer,
symmetric, even diagonal) so that ``Q(x) = xᵀEx / 2``. The coefficient form
``Q = Σ_{i≤j} m_ij x_i x_j`` is the I/O form.
"""
from math import isqrt
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from . import linalg
from .utils import (
    _mywrap, Caps, ResourceError, decode_int, encode_int, get_caps)

Vector = Tuple[int, ...]


class QuadLattice(object):
    """Create a QuadLattice object.

    Args:
        coeffs:
            Upper-triangular coefficient rows: row ``i`` holds ``m_ij`` for
            ``j >= i`` so that ``Q = Σ_{i≤j} m_ij x_i x_j``.
    Returns:
        ``QuadLattice`` object, immutable and hashable on its Gram matrix.

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice
            >>> L = QuadLattice([[2, 2], [3]])
            >>> L.gram
            ((4, 2), (2, 6))
            >>> L.value((1, -1))
            3
    """

    def __init__(self, coeffs: Sequence[Sequence[int]]) -> None:
        if isinstance(coeffs, (str, bytes)) or not len(coeffs):
            raise ValueError('coeffs must be a non-empty list of rows')

        n = len(coeffs)
        E = [[0] * n for _ in range(n)]
        for i, row in enumerate(coeffs):
            if len(row) != n - i:
                msg = f"""\
                Row {i} of coeffs must hold {n - i} entries (m_ij for j >= i),
                got {len(row)}
                """
                raise ValueError(_mywrap(msg))
            for k, m in enumerate(row):
                m = decode_int(m)
                j = i + k
                if i == j:
                    E[i][i] = 2 * m
                else:
                    E[i][j] = E[j][i] = m

        self._gram = linalg.as_matrix(E)
        self._pivots = _ldl(self._gram)

    @classmethod
    def from_gram(cls, E: Sequence[Sequence[int]]) -> 'QuadLattice':
        """Build a lattice from a doubled Gram matrix"""
        n = len(E)
        for i in range(n):
            if len(E[i]) != n:
                raise ValueError('Gram matrix must be square')
            if E[i][i] % 2:
                raise ValueError('Gram matrix must be even on the diagonal')
            for j in range(i + 1, n):
                if E[i][j] != E[j][i]:
                    raise ValueError('Gram matrix must be symmetric')
        coeffs = [[E[i][i] // 2] + [E[i][j] for j in range(i + 1, n)]
                  for i in range(n)]
        return cls(coeffs)

    @classmethod
    def diagonal(cls, *entries: int) -> 'QuadLattice':
        n = len(entries)
        return cls([[a] + [0] * (n - i - 1) for i, a in enumerate(entries)])

    @classmethod
    def identity(cls, n: int) -> 'QuadLattice':
        return cls.diagonal(*([1] * n))

    @classmethod
    def from_json(cls, data: dict) -> 'QuadLattice':
        if not isinstance(data, dict) or 'coeffs' not in data:
            raise ValueError('Lattice JSON must be an object with "coeffs"')
        L = cls(data['coeffs'])
        if 'n' in data and decode_int(data['n']) != L.n:
            raise ValueError(f'"n" is {data["n"]} but coeffs have {L.n} rows')
        return L

    def to_json(self) -> dict:
        return {
            'n': self.n,
            'coeffs': [[encode_int(x) for x in row] for row in self.coeffs]}

    @property
    def n(self) -> int:
        return len(self._gram)

    @property
    def gram(self) -> linalg.Matrix:
        return self._gram

    @property
    def coeffs(self) -> List[List[int]]:
        E = self._gram
        return [[E[i][i] // 2] + [E[i][j] for j in range(i + 1, self.n)]
                for i in range(self.n)]

    def value(self, x: Sequence[int]) -> int:
        """Q(x)"""
        return self.inner(x, x) // 2

    def inner(self, x: Sequence[int], y: Sequence[int]) -> int:
        """The bilinear form xᵀEy, so that inner(x, x) = 2 Q(x)"""
        E = self._gram
        return sum(
            x[i] * sum(E[i][j] * y[j] for j in range(self.n))
            for i in range(self.n) if x[i])

    def transform(self, U: Sequence[Sequence[int]]) -> 'QuadLattice':
        """Lattice with Gram ``Uᵀ E U``"""
        return QuadLattice.from_gram(linalg.congruent(self._gram, U))

    def __eq__(self, other) -> bool:
        return isinstance(other, QuadLattice) and self._gram == other._gram

    def __hash__(self) -> int:
        return hash(self._gram)

    def __repr__(self) -> str:
        return f'QuadLattice({self.coeffs})'


class UnimodularChange(object):
    """Integer base change with determinant ±1

    Columns are the images of the standard basis vectors.
    """

    def __init__(self, U: Sequence[Sequence[int]]) -> None:
        U = linalg.as_matrix(U)
        n = len(U)
        if n == 0 or any(len(row) != n for row in U):
            raise ValueError('UnimodularChange needs a square matrix')
        if not all(isinstance(x, int) for row in U for x in row):
            raise TypeError('UnimodularChange entries must be int')
        d = linalg.det(U)
        if d not in (1, -1):
            raise ValueError(f'Base change has determinant {d}, not ±1')
        self.matrix = U
        self.det = d

    @classmethod
    def identity(cls, n: int) -> 'UnimodularChange':
        return cls(linalg.identity(n))

    @property
    def n(self) -> int:
        return len(self.matrix)

    def apply(self, L: QuadLattice) -> QuadLattice:
        return L.transform(self.matrix)

    def inverse(self) -> 'UnimodularChange':
        return UnimodularChange(linalg.inverse_unimodular(self.matrix))

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.matrix)

    def __matmul__(self, other: 'UnimodularChange') -> 'UnimodularChange':
        return UnimodularChange(linalg.matmul(self.matrix, other.matrix))

    def __eq__(self, other) -> bool:
        return (isinstance(other, UnimodularChange)
                and self.matrix == other.matrix)

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f'UnimodularChange({[list(r) for r in self.matrix]})'

    def to_json(self) -> dict:
        return {
            'matrix': [[encode_int(x) for x in row] for row in self.matrix],
            'det': self.det}


def _ldl(E: linalg.Matrix) -> List[List[Fraction]]:
    """Exact square-completion of Q = xᵀEx/2

    Returns ``q`` with ``Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)²``; raises
    if ``E`` is not positive definite.
    """
    n = len(E)
    q = [[Fraction(E[i][j], 2) for j in range(n)] for i in range(n)]
    for i in range(n):
        if q[i][i] <= 0:
            msg = f"""\
            Quadratic form is not positive definite (pivot {i} is
            {q[i][i]})
            """
            raise ValueError(_mywrap(msg))
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for m in range(k, n):
                q[k][m] -= q[k][i] * q[i][m]
    return q


def discriminant(L: QuadLattice) -> Tuple[int, Fraction]:
    """Determinant invariants of a lattice

    Args:
        L: lattice
    Returns:
        ``(detE, disc)`` where ``detE = det(E)`` is the canonical integer
        invariant and ``disc = det(E/2) = detE / 2^n``.
    """
    detE = linalg.det(L.gram)
    return detE, Fraction(detE, 2 ** L.n)


def _interval(center: Fraction, radius_sq: Fraction) -> range:
    # integers x with (x - center)^2 <= radius_sq
    if radius_sq < 0:
        return range(0)
    s = isqrt(radius_sq.numerator // radius_sq.denominator) + 1
    lo = int(center) - s - 1
    hi = int(center) + s + 1
    while (lo - center) ** 2 > radius_sq and lo <= hi:
        lo += 1
    while (hi - center) ** 2 > radius_sq and hi >= lo:
        hi -= 1
    return range(lo, hi + 1)


def _enumerate(
        L: QuadLattice, bound: int, cap: int) -> List[Tuple[Vector, int]]:
    # all nonzero x with Q(x) <= bound, both signs
    n = L.n
    q = L._pivots
    found = []
    x = [0] * n

    def descend(i: int, remaining: Fraction) -> None:
        shift = sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        for xi in _interval(-shift, remaining / q[i][i]):
            x[i] = xi
            rest = remaining - q[i][i] * (xi + shift) ** 2
            if i:
                descend(i - 1, rest)
            elif any(x):
                value = bound - rest
                found.append((tuple(x), int(value)))
                if len(found) > 2 * cap:
                    raise ResourceError(_mywrap(f"""\
                    More than {cap} short vectors below {bound}; raise the
                    short_vectors cap or lower the bound
                    """))
        x[i] = 0

    descend(n - 1, Fraction(bound))
    return found


def _canonical_sign(x: Vector) -> bool:
    return next(v for v in x if v) > 0


def short_vectors(
        L: QuadLattice,
        bound: int,
        caps: Optional[Caps] = None) -> List[Tuple[Vector, int]]:
    """Enumerate all short vectors of a lattice

    Fincke-Pohst enumeration over the exact rational square completion of
    ``Q``; no floating point is involved.

    Args:
        L: lattice
        bound: inclusive upper bound on ``Q(x)``
        caps: resource caps; ``caps.short_vectors`` bounds the output size.
    Returns:
        ``list`` of ``(x, Q(x))`` with ``0 < Q(x) <= bound``, one vector per
        ``±`` pair (first nonzero coordinate positive), sorted by ``Q(x)``
        and then lexicographically.
    Raises:
        ResourceError if more than ``caps.short_vectors`` vectors qualify.
    """
    if bound < 0:
        raise ValueError('bound must be non-negative')
    caps = caps or get_caps()
    vecs = [(x, v) for x, v in _enumerate(L, bound, caps.short_vectors)
            if _canonical_sign(x)]
    if len(vecs) > caps.short_vectors:
        raise ResourceError(
            f'More than {caps.short_vectors} short vectors below {bound}')
    return sorted(vecs, key=lambda t: (t[1], t[0]))


def minimum(L: QuadLattice, caps: Optional[Caps] = None) -> int:
    """min Q(x) over nonzero x

    The bound starts at 1 and doubles; the smallest diagonal coefficient
    caps it, so the search always terminates.
    """
    ceiling = min(L.gram[i][i] // 2 for i in range(L.n))
    bound = 1
    while True:
        bound = min(bound, ceiling)
        vecs = short_vectors(L, bound, caps)
        if vecs:
            return vecs[0][1]
        bound *= 2


def theta_prefix(
        L: QuadLattice, bound: int, caps: Optional[Caps] = None
        ) -> Tuple[int, ...]:  # yapf: disable
    """Number of ± pairs of each norm ``1..bound``"""
    counts = [0] * bound
    for _, v in short_vectors(L, bound, caps):
        counts[v - 1] += 1
    return tuple(counts)


def _round_half_up(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def pair_reduce(L: QuadLattice) -> Tuple[QuadLattice, UnimodularChange]:
    """Pairwise size reduction

    Subtracts integral multiples of one basis vector from another while that
    strictly lowers ``Q``; the total of the diagonal decreases on every
    step, so the loop stops.
    """
    n = L.n
    G = [list(r) for r in L.gram]
    U = [list(r) for r in linalg.identity(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j or not G[i][j]:
                    continue
                c = _round_half_up(Fraction(G[i][j], G[j][j]))
                # Q(v_i - c v_j) - Q(v_i), doubled
                delta = -2 * c * G[i][j] + c * c * G[j][j]
                if c == 0 or delta >= 0:
                    continue
                for row in U:
                    row[i] -= c * row[j]
                col = [G[k][i] - c * G[k][j] for k in range(n)]
                col[i] = G[i][i] - 2 * c * G[i][j] + c * c * G[j][j]
                for k in range(n):
                    G[k][i] = G[i][k] = col[k]
                changed = True
    return QuadLattice.from_gram(G), UnimodularChange(U)


def minkowski_reduce(
        L: QuadLattice,
        caps: Optional[Caps] = None) -> Tuple[QuadLattice, UnimodularChange]:
    """Minkowski reduction

    Successively picks ``v_i`` as the shortest vector (ties broken
    lexicographically) such that ``v_1, ..., v_i`` extends to a basis, then
    flips signs so that ``b(v_i, v_{i+1}) >= 0``. The result satisfies
    ``Q(v_1) <= ... <= Q(v_n)`` and ``|b(v_i, v_j)| <= Q(v_i)`` for
    ``i < j`` with ``b(x, y) = xᵀEy``.

    Args:
        L: lattice
        caps: resource caps for the short-vector search.
    Returns:
        ``(L', U)`` with ``L' = Uᵀ L U``.

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice, minkowski_reduce
            >>> R, U = minkowski_reduce(QuadLattice([[5, 8], [5]]))
            >>> R.coeffs
            [[2, 2], [5]]
    """
    n = L.n
    L1, U1 = pair_reduce(L)
    # earlier picks stay valid when the bound grows: the list is prefix-stable
    bound = min(L1.gram[i][i] // 2 for i in range(n))
    vecs = short_vectors(L1, bound, caps)

    chosen: List[Vector] = []
    while len(chosen) < n:
        pick = None
        for x, _ in vecs:
            cols = [list(c) for c in zip(*(chosen + [x]))]
            if linalg.is_primitive(cols):
                pick = x
                break
        if pick is None:
            bound *= 2
            vecs = short_vectors(L1, bound, caps)
            continue
        chosen.append(pick)

    for i in range(1, n):
        if L1.inner(chosen[i - 1], chosen[i]) < 0:
            chosen[i] = tuple(-v for v in chosen[i])

    V = linalg.transpose(chosen)
    U = U1 @ UnimodularChange(V)
    return U.apply(L), U


def _isometries(
        L1: QuadLattice,
        E2: linalg.Matrix,
        caps: Optional[Caps] = None) -> Iterator[linalg.Matrix]:
    """Backtracking over short-vector images

    Yields every integer ``n×m`` matrix ``T`` with ``Tᵀ E1 T = E2`` in
    canonical order, ``m = len(E2)``. Column ``j`` ranges over vectors of
    norm ``E2[j][j] / 2`` whose inner products with the earlier columns
    match ``E2``.
    """
    n = L1.n
    m = len(E2)
    E1 = L1.gram
    norms = sorted({E2[j][j] // 2 for j in range(m)})
    by_norm: Dict[int, List[Tuple[Vector, Vector]]] = {q: [] for q in norms}
    for x, v in short_vectors(L1, norms[-1], caps):
        if v in by_norm:
            for y in (x, tuple(-a for a in x)):
                Ey = tuple(sum(E1[i][k] * y[k] for k in range(n))
                           for i in range(n))
                by_norm[v].append((y, Ey))
    for v in by_norm:
        by_norm[v].sort()

    cols: List[Tuple[Vector, Vector]] = []

    def extend(j: int) -> Iterator[linalg.Matrix]:
        if j == m:
            yield linalg.transpose([c for c, _ in cols])
            return
        for y, Ey in by_norm[E2[j][j] // 2]:
            if all(sum(a * b for a, b in zip(Ec, y)) == E2[k][j]
                   for k, (_, Ec) in enumerate(cols)):
                cols.append((y, Ey))
                yield from extend(j + 1)
                cols.pop()

    yield from extend(0)


def _find_isometry(
        R1: QuadLattice,
        R2: QuadLattice,
        caps: Optional[Caps] = None) -> Optional[linalg.Matrix]:
    # both arguments are expected to be reduced already
    if R1.n != R2.n or linalg.det(R1.gram) != linalg.det(R2.gram):
        return None
    return next(_isometries(R1, R2.gram, caps), None)


def isometric(
        L1: QuadLattice,
        L2: QuadLattice,
        caps: Optional[Caps] = None) -> Optional[UnimodularChange]:
    """Decide whether two lattices are isometric

    Args:
        L1: first lattice
        L2: second lattice
        caps: resource caps for the short-vector search.
    Returns:
        ``UnimodularChange`` ``U`` with ``Uᵀ E1 U = E2``, or ``None`` if the
        lattices are not isometric.
    """
    if L1.n != L2.n:
        return None
    if linalg.det(L1.gram) != linalg.det(L2.gram):
        return None

    R1, U1 = minkowski_reduce(L1, caps)
    R2, U2 = minkowski_reduce(L2, caps)
    bound = max(R2.gram[i][i] // 2 for i in range(R2.n))
    if theta_prefix(R1, bound, caps) != theta_prefix(R2, bound, caps):
        return None

    V = _find_isometry(R1, R2, caps)
    if V is None:
        return None
    return U1 @ UnimodularChange(V) @ U2.inverse()


def _closure(gens: List[linalg.Matrix], n: int) -> set:
    group = {linalg.identity(n)}
    frontier = list(group)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = linalg.matmul(g, h)
                if gh not in group:
                    group.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return group


def automorphisms(
        L: QuadLattice,
        caps: Optional[Caps] = None
        ) -> Tuple[Tuple[UnimodularChange, ...], int]:  # yapf: disable
    """Automorphism group of a lattice

    Args:
        L: lattice
        caps: resource caps for the short-vector search.
    Returns:
        ``(generators, order)``: a generating set of ``Aut(L)`` (chosen
        greedily in canonical order) and the exact group order.

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice, automorphisms
            >>> automorphisms(QuadLattice.identity(4))[1]
            384
    """
    R, U = minkowski_reduce(L, caps)
    Uinv = U.inverse()
    elements = [linalg.matmul(U.matrix, A, Uinv.matrix)
                for A in _isometries(R, R.gram, caps)]

    gens: List[linalg.Matrix] = []
    group = {linalg.identity(L.n)}
    for g in sorted(elements):
        if g not in group:
            gens.append(g)
            group = _closure(gens, L.n)
        if len(group) == len(elements):
            break

    return tuple(UnimodularChange(g) for g in gens), len(elements)


def automorphism_elements(
        L: QuadLattice, caps: Optional[Caps] = None) -> List[linalg.Matrix]:
    """Every automorphism of ``L`` as a matrix, in canonical order"""
    R, U = minkowski_reduce(L, caps)
    Uinv = U.inverse()
    return sorted(linalg.matmul(U.matrix, A, Uinv.matrix)
                  for A in _isometries(R, R.gram, caps))


def random_unimodular(
        n: int, rng, steps: int = 8, size: int = 2) -> UnimodularChange:
    """Product of random elementary matrices and sign flips

    Args:
        n: dimension
        rng: ``numpy.random.Generator``
        steps: number of elementary operations
        size: bound on the elementary multipliers
    """
    U = [list(r) for r in linalg.identity(n)]
    for _ in range(steps):
        if n > 1:
            i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
            c = int(rng.integers(-size, size + 1))
            for row in U:
                row[j] += c * row[i]
        k = int(rng.integers(0, n))
        if rng.integers(0, 2):
            for row in U:
                row[k] = -row[k]
    return UnimodularChange(U)


def signed_permutations(n: int) -> Iterator[linalg.Matrix]:
    """All signed permutation matrices, used as an independent check"""
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            yield tuple(
                tuple(signs[j] if perm[j] == i else 0 for j in range(n))
                for i in range(n))
