#! /usr/bin/env python3
"""Local (primitive) representability of one lattice by another

A representation of ``M`` by ``L`` over Z_p is a matrix ``T`` with
``Q_L(t_a) = Q_M(e_a)`` and ``t_aᵀ E_L t_b = E_M[a][b]``. Solutions modulo
``p^j`` are refined digit by digit; a node is certified once the Jacobian of
that system clears the Newton margin, so every answer is exact.
"""
from time import time
from fractions import Fraction
from itertools import product
from math import isqrt
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from joblib import Parallel, delayed
from sympy import isprime, nextprime, primefactors

from . import linalg
from .lattice import QuadLattice
from .padic import ord_p, snf_valuations
from .utils import (
    _mywrap, _report, Caps, PrecisionError, PreconditionError, ResourceError,
    encode_int, get_caps)

Column = Tuple[int, ...]


class LocalCertificate(NamedTuple):
    p: int
    e: int
    witness: Optional[Tuple[Tuple[int, ...], ...]]
    verdict: bool
    liftable: bool
    primitive: bool = True

    def to_json(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = [[encode_int(x) for x in row] for row in self.witness]
        return {
            'p': self.p,
            'e': self.e,
            'witness': witness,
            'verdict': self.verdict,
            'liftable': self.liftable,
            'primitive': self.primitive}


class LocalReport(NamedTuple):
    verdict: bool
    certificates: Tuple[LocalCertificate, ...]


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool) or not isprime(p):
        raise ValueError(f'{p!r} is not a prime')


def count_solutions_mod(
        M: QuadLattice,
        L: QuadLattice,
        p: int,
        e: int,
        caps: Optional[Caps] = None) -> int:
    """Count ``T`` over Z/p^e with ``Tᵀ E_L T ≡ E_M mod p^e``

    Brute force, column by column.

    Args:
        M: lattice of rank ``m``
        L: lattice of rank ``n``
        p: prime
        e: precision exponent
        caps: ``caps.modpe`` bounds ``p^(e·n·m)``.
    Returns:
        exact number of ``n×m`` matrices.
    Raises:
        ResourceError if the search space exceeds the cap.

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice
            >>> from qlat.localrep import count_solutions_mod
            >>> M = QuadLattice([[1]])
            >>> count_solutions_mod(M, M, 3, 1)
            2
    """
    _check_prime(p)
    if e < 1:
        raise ValueError('Precision e must be positive')
    caps = caps or get_caps()
    n, m = L.n, M.n
    if p ** (e * n * m) > caps.modpe:
        msg = f"""\
        count_solutions_mod would enumerate {p}^{e * n * m} matrices, above
        the modpe cap of {caps.modpe}
        """
        raise ResourceError(_mywrap(msg))

    q = p ** e
    E, F = L.gram, M.gram
    vectors = []
    for v in product(range(q), repeat=n):
        Ev = tuple(sum(E[i][j] * v[j] for j in range(n)) for i in range(n))
        norm = sum(a * b for a, b in zip(v, Ev)) % q
        vectors.append((v, Ev, norm))

    def count(c: int, chosen: List[Column]) -> int:
        if c == m:
            return 1
        total = 0
        for v, Ev, norm in vectors:
            if norm != F[c][c] % q:
                continue
            if all(sum(a * b for a, b in zip(Ev, t)) % q == F[b_][c] % q
                   for b_, t in enumerate(chosen)):
                total += count(c + 1, chosen + [v])
        return total

    return count(0, [])


def _rank_mod_p(columns: Sequence[Column], p: int) -> int:
    rows = [[x % p for x in col] for col in columns]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [
                    (a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _affine_solutions(
        A: List[List[int]], b: List[int], p: int) -> Iterator[List[int]]:
    """All x in (Z/p)^k with A x ≡ b, in lexicographic order of free values"""
    nr = len(A)
    k = len(A[0]) if nr else 0
    R = [[x % p for x in row] + [y % p] for row, y in zip(A, b)]
    pivots = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, nr) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = pow(R[r][c], -1, p)
        R[r] = [x * inv % p for x in R[r]]
        for i in range(nr):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [(a - f * bb) % p for a, bb in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    if any(R[i][k] for i in range(r, nr)):
        return
    free = [c for c in range(k) if c not in pivots]
    for vals in product(range(p), repeat=len(free)):
        x = [0] * k
        for c, v in zip(free, vals):
            x[c] = v
        for i, c in enumerate(pivots):
            x[c] = (R[i][k] - sum(R[i][f] * x[f] for f in free)) % p
        yield x


class _Search(object):
    """Digit-by-digit search for local representations"""

    def __init__(self, M, L, p, primitive, caps):
        self.M = M
        self.L = L
        self.p = p
        self.primitive = primitive
        self.caps = caps
        self.n = L.n
        self.m = M.n
        self.pairs = [(a, b) for a in range(self.m) for b in range(a, self.m)]
        self.nodes = 0
        self.open = False
        self.deepest = 0

    def residual(self, T: List[Column]) -> List[int]:
        L, M = self.L, self.M
        out = []
        for a, b in self.pairs:
            if a == b:
                out.append(L.value(T[a]) - M.gram[a][a] // 2)
            else:
                out.append(L.inner(T[a], T[b]) - M.gram[a][b])
        return out

    def jacobian(self, T: List[Column]) -> List[List[int]]:
        E = self.L.gram
        n = self.n
        ET = [[sum(E[i][j] * t[j] for j in range(n)) for i in range(n)]
              for t in T]
        J = []
        for a, b in self.pairs:
            row = [0] * (n * self.m)
            for i in range(n):
                if a == b:
                    row[a * n + i] = ET[a][i]
                else:
                    row[a * n + i] = ET[b][i]
                    row[b * n + i] = ET[a][i]
            J.append(row)
        return J

    def margin(self, T: List[Column], j: int) -> Optional[int]:
        vals = snf_valuations(self.jacobian(T), self.p, j)
        r = len(self.pairs)
        if len(vals) < r or any(v >= j for v in vals[:r]):
            return None
        return sum(vals[:r])

    def roots(self) -> Iterator[List[Column]]:
        p, n = self.p, self.n
        F = self.M.gram

        def extend(chosen: List[Column]):
            c = len(chosen)
            if c == self.m:
                yield list(chosen)
                return
            for v in product(range(p), repeat=n):
                if (self.L.value(v) - F[c][c] // 2) % p:
                    continue
                if any((self.L.inner(t, v) - F[b][c]) % p
                       for b, t in enumerate(chosen)):
                    continue
                if self.primitive and _rank_mod_p(chosen + [v], p) < c + 1:
                    continue
                chosen.append(v)
                yield from extend(chosen)
                chosen.pop()

        yield from extend([])

    def children(self, T: List[Column], j: int) -> Iterator[List[Column]]:
        p, n = self.p, self.n
        pj = p ** j
        rhs = [-(f // pj) for f in self.residual(T)]
        for delta in _affine_solutions(self.jacobian(T), rhs, p):
            yield [tuple(t[i] + pj * delta[c * n + i] for i in range(n))
                   for c, t in enumerate(T)]

    def visit(self, T: List[Column], j: int, depth: int):
        self.nodes += 1
        if self.nodes > self.caps.local_nodes:
            raise ResourceError(_mywrap(f"""\
            Local search at p = {self.p} visited more than
            {self.caps.local_nodes} nodes; raise the local_nodes cap
            """))
        self.deepest = max(self.deepest, j)
        k = self.margin(T, j)
        if k is not None and 2 * k + 1 <= j:
            return T, j
        if j >= depth:
            self.open = True
            return None
        for child in self.children(T, j):
            found = self.visit(child, j + 1, depth)
            if found is not None:
                return found
        return None

    def run(self, depth: int):
        self.nodes = 0
        self.open = False
        self.deepest = 0
        for T in self.roots():
            found = self.visit(T, 1, depth)
            if found is not None:
                return found
        return None


def required_precision(M: QuadLattice, L: QuadLattice, p: int) -> int:
    """Starting precision ``ord_p(4·detE_L·detE_M) + 3``"""
    return ord_p(4 * linalg.det(L.gram) * linalg.det(M.gram), p) + 3


def is_locally_primitively_representable(
        M: QuadLattice,
        L: QuadLattice,
        p: int,
        primitive: bool = True,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> LocalCertificate:
    """Decide whether ``M`` is (primitively) represented by ``L`` over Z_p

    Solutions modulo ``p^j`` are refined one digit at a time. A node whose
    Jacobian has minimal maximal-minor valuation ``k`` with ``2k + 1 <= j``
    lifts to Z_p, which certifies ``True``; a level with no surviving node
    certifies ``False``. The depth starts at
    ``ord_p(4·detE_L·detE_M) + 3`` and is raised ``caps.precision_steps``
    times before giving up.

    Args:
        M: lattice of rank ``m``
        L: lattice of rank ``n >= m``
        p: prime
        primitive: require ``T mod p`` to have rank ``m``; ``False`` asks for
            any representation.
        caps: resource caps (``local_nodes``, ``precision_steps``)
        verbose: print status to stderr
    Returns:
        ``LocalCertificate``
    Raises:
        PrecisionError if no certified answer is reached.
        ResourceError if the search exceeds ``caps.local_nodes``.

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice
            >>> from qlat.localrep import is_locally_primitively_representable
            >>> cert = is_locally_primitively_representable(
            ...     QuadLattice([[5]]), QuadLattice.identity(3), 5)
            >>> cert.verdict, cert.witness
            (True, ((0,), (1,), (2,)))
    """
    t0 = time()
    _check_prime(p)
    if M.n > L.n:
        raise PreconditionError(
            f'rank(M) = {M.n} exceeds rank(L) = {L.n}')
    caps = caps or get_caps()

    if M == L:
        return LocalCertificate(
            p, 1, linalg.identity(L.n), True, True, primitive)

    search = _Search(M, L, p, primitive, caps)
    start = required_precision(M, L, p)
    for step in range(caps.precision_steps + 1):
        depth = start + 2 * step
        found = search.run(depth)
        if found is not None:
            T, j = found
            witness = linalg.transpose(T)
            cert = LocalCertificate(p, j, witness, True, True, primitive)
            break
        if not search.open:
            cert = LocalCertificate(
                p, search.deepest + 1, None, False, False, primitive)
            break
    else:
        msg = f"""\
        Local representability at p = {p} is still undecided at precision
        p^{depth}; raise the precision_steps cap
        """
        raise PrecisionError(_mywrap(msg))

    if verbose:
        msg = f"""\
        Local check at p = {p}: verdict {cert.verdict} at precision p^{cert.e}
        - search nodes: {search.nodes}
        """
        _report(msg, t0)
    return cert


def _equal_rank_ok(M: QuadLattice, L: QuadLattice, primitive: bool) -> bool:
    # T square: det(T)^2 detE_L = detE_M, and T primitive means det(T) = ±1
    ratio = Fraction(linalg.det(M.gram), linalg.det(L.gram))
    if primitive:
        return ratio == 1
    if ratio.denominator != 1:
        return False
    return isqrt(ratio.numerator) ** 2 == ratio.numerator


def locally_primitively_representable_everywhere(
        M: QuadLattice,
        L: QuadLattice,
        primitive: bool = True,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> LocalReport:
    """Local (primitive) representability at every place

    The real place holds for positive definite lattices with
    ``rank(M) <= rank(L)``. Primes not dividing ``2·detE_L·detE_M`` are
    automatic; :func:`check_good_primes` samples them. The remaining primes
    are checked exactly, in increasing order.

    Args:
        M: lattice of rank ``m``
        L: lattice of rank ``n >= m``
        primitive: ask for primitive representations
        caps: resource caps; ``caps.n_jobs`` runs primes in parallel.
        verbose: print status to stderr
    Returns:
        ``LocalReport(verdict, certificates)``
    """
    t0 = time()
    if M.n > L.n:
        raise PreconditionError(
            f'rank(M) = {M.n} exceeds rank(L) = {L.n}')
    caps = caps or get_caps()

    if M.n == L.n and not _equal_rank_ok(M, L, primitive):
        if verbose:
            _report('Equal ranks with incompatible determinants', t0)
        return LocalReport(False, ())

    detL = linalg.det(L.gram)
    detM = linalg.det(M.gram)
    primes = sorted(primefactors(2 * detL * detM))
    certs = Parallel(n_jobs=caps.n_jobs)(
        delayed(is_locally_primitively_representable)(
            M, L, p, primitive, caps) for p in primes)
    certs = tuple(sorted(certs, key=lambda c: c.p))
    verdict = all(c.verdict for c in certs)

    if verbose:
        msg = f"""\
        Checked primes {primes}
        - verdict: {verdict}
        """
        _report(msg, t0)
    return LocalReport(verdict, certs)


def check_good_primes(
        M: QuadLattice,
        L: QuadLattice,
        count: int = 10,
        seed: int = 0,
        caps: Optional[Caps] = None) -> dict:
    """Run the direct local test at random primes not dividing
    ``2·detE_L·detE_M``

    Args:
        M: lattice
        L: lattice
        count: number of primes to sample
        seed: seed for ``numpy.random.default_rng``
        caps: resource caps
    Returns:
        ``dict`` mapping each sampled prime to its verdict; the skip in
        :func:`locally_primitively_representable_everywhere` is sound when
        every value is ``True``.
    """
    bad = 2 * linalg.det(L.gram) * linalg.det(M.gram)
    pool = []
    p = 2
    while len(pool) < 3 * count:
        p = int(nextprime(p))
        if bad % p:
            pool.append(p)
    rng = np.random.default_rng(seed)
    picked = rng.choice(pool, size=count, replace=False)
    sample = sorted(int(x) for x in picked)
    return {
        p: is_locally_primitively_representable(M, L, p, caps=caps).verdict
        for p in sample}
