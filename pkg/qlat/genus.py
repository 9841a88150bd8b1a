#! /usr/bin/env python3
"""Genus enumeration, spinor genera and the genus oracle"""
import sys

from time import time
from math import gcd
from fractions import Fraction
from collections import deque
from itertools import product
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from joblib import Parallel, delayed
from sympy import factorint, isprime, nextprime, primefactors
from tqdm import tqdm

from . import linalg
from .lattice import (
    QuadLattice, _find_isometry, automorphism_elements, minimum,
    minkowski_reduce, random_unimodular, short_vectors, theta_prefix)
from .utils import (
    _mywrap, _report, Caps, PreconditionError, QlatError, ResourceError,
    UnresolvedError, encode_fraction, get_caps)


def neighbor_primes(detE: int, count: int = 2) -> List[int]:
    """The ``count`` smallest odd primes not dividing ``detE``"""
    primes = []
    p = 2
    while len(primes) < count:
        p = int(nextprime(p))
        if detE % p:
            primes.append(p)
    return primes


def _isotropic_lines(L: QuadLattice, p: int):
    # one vector per line, first nonzero coordinate 1
    n = L.n
    for lead in range(n):
        for tail in product(range(p), repeat=n - lead - 1):
            x = (0,) * lead + (1,) + tail
            if L.value(x) % p == 0:
                yield x


def _neighbor(L: QuadLattice, p: int, x: Sequence[int]) -> QuadLattice:
    """The p-neighbor Z·x̃/p + {v : vᵀEx̃ ≡ 0 mod p}"""
    n = L.n
    E = L.gram
    Ex = [sum(E[i][j] * x[j] for j in range(n)) for i in range(n)]
    i0 = next(i for i in range(n) if Ex[i] % p)
    c = -(L.value(x) // p) * pow(Ex[i0], -1, p) % p
    xt = list(x)
    xt[i0] += p * c

    a = [sum(E[i][j] * xt[j] for j in range(n)) % p for i in range(n)]
    i1 = next(i for i in range(n) if a[i])
    inv = pow(a[i1], -1, p)
    gens = []
    for j in range(n):
        v = [0] * n
        if j == i1:
            v[i1] = p
        else:
            v[j] = 1
            v[i1] = -a[j] * inv % p
        gens.append([p * t for t in v])
    gens.append(xt)

    B = linalg.row_span_basis(gens)
    p2 = p * p
    G = linalg.matmul(B, E, linalg.transpose(B))
    if any(g % p2 for row in G for g in row):
        raise QlatError('Neighbor construction produced a non-integral form')
    return QuadLattice.from_gram([[g // p2 for g in row] for row in G])


def _canonical_key(R: QuadLattice, caps: Optional[Caps] = None):
    return (minimum(R, caps), R.gram)


class _ClassIndex(object):
    """Isometry-class lookup over reduced lattices"""

    def __init__(self, bound: int, caps: Caps) -> None:
        self.bound = bound
        self.caps = caps
        self.reps: List[QuadLattice] = []
        self.by_gram: Dict[linalg.Matrix, int] = {}
        self.by_theta: Dict[tuple, List[int]] = {}

    def locate(self, R: QuadLattice) -> Tuple[int, bool]:
        """Index of the class of ``R``, adding it if new"""
        if R.gram in self.by_gram:
            return self.by_gram[R.gram], False
        key = theta_prefix(R, self.bound, self.caps)
        for i in self.by_theta.get(key, []):
            if _find_isometry(self.reps[i], R, self.caps) is not None:
                self.by_gram[R.gram] = i
                return i, False
        i = len(self.reps)
        self.reps.append(R)
        self.by_gram[R.gram] = i
        self.by_theta.setdefault(key, []).append(i)
        return i, True


def neighbors(
        L: QuadLattice,
        p: int,
        caps: Optional[Caps] = None) -> List[QuadLattice]:
    """All p-neighbors of a lattice up to isometry

    Args:
        L: lattice
        p: odd prime not dividing ``detE``
        caps: resource caps
    Returns:
        ``list`` of Minkowski-reduced neighbors, pairwise non-isometric,
        ordered by (minimum, Gram matrix).

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice
            >>> from qlat.genus import neighbors
            >>> len(neighbors(QuadLattice.identity(4), 3))
            1
    """
    caps = caps or get_caps()
    if p == 2 or not isprime(p):
        raise ValueError(f'p must be an odd prime, got {p}')
    if linalg.det(L.gram) % p == 0:
        raise ValueError(f'p = {p} divides detE')

    found = None
    for x in _isotropic_lines(L, p):
        R, _ = minkowski_reduce(_neighbor(L, p, x), caps)
        if found is None:
            bound = max(R.gram[i][i] // 2 for i in range(R.n))
            found = _ClassIndex(bound, caps)
        found.locate(R)
    if found is None:
        return []
    return sorted(found.reps, key=lambda R: _canonical_key(R, caps))


class _FormPart(NamedTuple):
    orders: Tuple[int, ...]
    gram: Tuple[Tuple[Fraction, ...], ...]


def _discriminant_parts(E: linalg.Matrix) -> Dict[int, _FormPart]:
    """p-parts of the discriminant form of the even lattice (Zⁿ, E)

    Generators are ``V e_i / p^{v_i}`` where ``U E V = D`` is the Smith form
    and ``p^{v_i}`` exactly divides ``d_i``.
    """
    _, D, V = linalg.smith_form(E)
    G = linalg.congruent(E, V)
    n = len(E)
    d = [D[i][i] for i in range(n)]
    parts = {}
    detE = 1
    for x in d:
        detE *= x
    for p in primefactors(detE):
        idx = [i for i in range(n) if d[i] % p == 0]
        orders = []
        for i in idx:
            o = 1
            while d[i] % (o * p) == 0:
                o *= p
            orders.append(o)
        gram = tuple(
            tuple(Fraction(G[i][j], oi * oj) for j, oj in zip(idx, orders))
            for i, oi in zip(idx, orders))
        parts[p] = _FormPart(tuple(orders), gram)
    return parts


def _mod(x: Fraction, m: int) -> Fraction:
    return x - m * (x.numerator // (m * x.denominator))


def _q(part: _FormPart, c: Sequence[int]) -> Fraction:
    B = part.gram
    k = len(c)
    return _mod(sum((c[i] * c[j] * B[i][j]
                     for i in range(k) for j in range(k)), Fraction(0)), 2)


def _b(part: _FormPart, c: Sequence[int], d: Sequence[int]) -> Fraction:
    B = part.gram
    k = len(c)
    return _mod(sum((c[i] * d[j] * B[i][j]
                     for i in range(k) for j in range(k)), Fraction(0)), 1)


def _order(part: _FormPart, c: Sequence[int]) -> int:
    return max([o // gcd(x, o) for x, o in zip(c, part.orders)] + [1])


def _elements(part: _FormPart, caps: Caps):
    size = 1
    for o in part.orders:
        size *= o
    if size > caps.discriminant_group:
        msg = f"""\
        Discriminant group part of order {size} exceeds the
        discriminant_group cap of {caps.discriminant_group}
        """
        raise ResourceError(_mywrap(msg))
    return [(c, _order(part, c), _q(part, c))
            for c in product(*(range(o) for o in part.orders))]


def _forms_isomorphic(A: _FormPart, B: _FormPart, caps: Caps) -> bool:
    if sorted(A.orders) != sorted(B.orders):
        return False
    elems_a = _elements(A, caps)
    elems_b = _elements(B, caps)
    hist_a = sorted((o, q) for _, o, q in elems_a)
    hist_b = sorted((o, q) for _, o, q in elems_b)
    if hist_a != hist_b:
        return False

    k = len(A.orders)
    gens = sorted(range(k), key=lambda i: -A.orders[i])
    unit = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    images: List[Tuple[int, ...]] = []

    def extend(pos: int) -> bool:
        if pos == k:
            return True
        g = gens[pos]
        qa = _q(A, unit[g])
        for c, o, q in elems_b:
            if o != A.orders[g] or q != qa:
                continue
            if all(_b(B, c, img) == _b(A, unit[g], unit[gens[t]])
                   for t, img in enumerate(images)):
                images.append(c)
                if extend(pos + 1):
                    return True
                images.pop()
        return False

    return extend(0)


def same_genus(
        L1: QuadLattice,
        L2: QuadLattice,
        caps: Optional[Caps] = None) -> bool:
    """Exact genus comparison

    Two positive definite even lattices of equal rank are in the same genus
    iff their discriminant quadratic forms ``E⁻¹Zⁿ/Zⁿ`` (``q(x) = xᵀEx``
    mod 2) are isomorphic; the comparison runs on each p-primary part.

    Args:
        L1: lattice
        L2: lattice
        caps: ``caps.discriminant_group`` bounds the part sizes.
    Returns:
        ``bool``
    """
    caps = caps or get_caps()
    if L1.n != L2.n:
        return False
    if linalg.det(L1.gram) != linalg.det(L2.gram):
        return False
    if linalg.invariant_factors(L1.gram) != linalg.invariant_factors(L2.gram):
        return False
    parts1 = _discriminant_parts(L1.gram)
    parts2 = _discriminant_parts(L2.gram)
    if set(parts1) != set(parts2):
        return False
    return all(_forms_isomorphic(parts1[p], parts2[p], caps) for p in parts1)


def _squarefree(x: Fraction) -> int:
    sign = -1 if x < 0 else 1
    out = 1
    for p, k in factorint(abs(x.numerator) * x.denominator).items():
        if k % 2:
            out *= p
    return sign * out


def _reflection_norm(
        sigma: Sequence[Sequence[int]],
        E: Sequence[Sequence[int]]) -> Fraction:
    """Product of ``Q(v_i)`` over a reflection factorization of ``sigma``"""
    n = len(E)
    tau = [[Fraction(x) for x in row] for row in sigma]
    norm = Fraction(1)
    for i in range(n):
        y = [tau[r][i] for r in range(n)]
        v = [y[r] - int(r == i) for r in range(n)]
        if not any(v):
            continue
        Ev = [sum(E[r][s] * v[s] for s in range(n)) for r in range(n)]
        Qv = sum(a * b for a, b in zip(v, Ev)) / 2
        if Qv == 0:
            raise UnresolvedError('Reflection vector is isotropic')
        norm *= Qv
        for c in range(n):
            col = [tau[r][c] for r in range(n)]
            f = sum(a * b for a, b in zip(col, Ev)) / Qv
            for r in range(n):
                tau[r][c] = col[r] - f * v[r]

    if any(tau[r][c] != int(r == c) for r in range(n) for c in range(n)):
        raise UnresolvedError('Reflection factorization did not terminate')
    return norm


def spinor_norm(
        sigma: Sequence[Sequence[int]],
        L: QuadLattice,
        caps: Optional[Caps] = None,
        seed: int = 0) -> int:
    """Spinor norm of an isometry through reflections

    ``sigma`` is written as a product of at most ``n`` reflections in
    vectors ``v_i`` (Cartan-Dieudonné); the spinor norm is ``Π Q(v_i)``
    modulo squares. A failed factorization is retried on ``U⁻¹ σ U`` with
    the form ``Uᵀ E U``, ``U`` a seeded random unimodular matrix, up to
    ``caps.spinor_retries`` times.

    Args:
        sigma: integer or rational matrix with ``σᵀ E σ = E``
        L: lattice carrying ``E``
        caps: resource caps
        seed: seed for the conjugating matrices
    Returns:
        square-free integer representing the class in Q×/(Q×)².
    Raises:
        UnresolvedError if every factorization attempt degenerates.
    """
    caps = caps or get_caps()
    n = L.n
    E = L.gram
    if linalg.congruent(E, sigma) != linalg.as_matrix(E):
        raise ValueError('sigma does not preserve the form')

    rng = np.random.default_rng(seed)
    S = sigma
    for attempt in range(caps.spinor_retries + 1):
        try:
            return _squarefree(_reflection_norm(S, E))
        except UnresolvedError as err:
            if attempt == caps.spinor_retries:
                raise UnresolvedError(_mywrap(f"""\
                Reflection factorization failed after {attempt} unimodular
                conjugations ({err}); raise the spinor_retries cap
                """))
        U = random_unimodular(n, rng).matrix
        S = linalg.matmul(linalg.inverse_unimodular(U), sigma, U)
        E = linalg.congruent(L.gram, U)


class GenusClass(NamedTuple):
    lattice: QuadLattice
    aut_order: int
    weight: Fraction
    minimum: int
    block: Optional[int] = None
    spinor_norms: Optional[Tuple[int, ...]] = None

    def to_json(self) -> dict:
        return {
            'coeffs': self.lattice.coeffs,
            'gram': [list(r) for r in self.lattice.gram],
            'aut_order': self.aut_order,
            'weight': encode_fraction(self.weight),
            'minimum': self.minimum,
            'block': self.block,
            'spinor_norms': (None if self.spinor_norms is None
                             else list(self.spinor_norms))}


class GenusPartition(object):
    """Classes of a genus, optionally split into spinor genera

    Attributes:
        base: the input lattice
        classes: ``GenusClass`` records in canonical order
        base_index: index of the class of ``base``
        primes: neighbor primes used for the closure
        edges: ``(i, j, p)`` neighbor steps between classes, ``i <= j``
        spin_blocks: tuples of class indices, ``None`` until
            :func:`spin_partition` has run
    """

    def __init__(
            self,
            base: QuadLattice,
            classes: Sequence[GenusClass],
            base_index: int,
            primes: Sequence[int],
            edges: Sequence[Tuple[int, int, int]],
            spin_blocks: Optional[Sequence[Sequence[int]]] = None) -> None:
        self.base = base
        self.classes = tuple(classes)
        self.base_index = base_index
        self.primes = tuple(primes)
        self.edges = tuple(sorted(edges))
        self.spin_blocks = None
        if spin_blocks is not None:
            self.spin_blocks = tuple(tuple(b) for b in spin_blocks)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def omega_gen(self) -> Fraction:
        return sum((c.weight for c in self.classes), Fraction(0))

    @property
    def omega_spn(self) -> Optional[Tuple[Fraction, ...]]:
        if self.spin_blocks is None:
            return None
        return tuple(
            sum((self.classes[i].weight for i in b), Fraction(0))
            for b in self.spin_blocks)

    @property
    def base_block(self) -> Optional[int]:
        return self.classes[self.base_index].block

    def to_json(self) -> dict:
        omega_spn = self.omega_spn
        return {
            'base': self.base.to_json(),
            'primes': list(self.primes),
            'base_index': self.base_index,
            'classes': [c.to_json() for c in self.classes],
            'omega_gen': encode_fraction(self.omega_gen),
            'spin_blocks': (None if self.spin_blocks is None
                            else [list(b) for b in self.spin_blocks]),
            'omega_spn': (None if omega_spn is None
                          else [encode_fraction(w) for w in omega_spn]),
            'completeness': (
                'neighbor closure at primes '
                f'{", ".join(str(p) for p in self.primes)}; '
                'not certified unless compared with oracle_genus')}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'minimum': [c.minimum for c in self.classes],
            'aut_order': [c.aut_order for c in self.classes],
            'weight': [encode_fraction(c.weight) for c in self.classes],
            'block': [c.block for c in self.classes],
            'coeffs': [str(c.lattice.coeffs) for c in self.classes]})


def _aut_order(R: QuadLattice, caps: Caps) -> int:
    return len(automorphism_elements(R, caps))


def genus_classes(
        L: QuadLattice,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> GenusPartition:
    """Isometry classes of the genus of ``L`` by neighbor closure

    Starts from the reduced form of ``L`` and closes under p-neighbors at
    the two smallest odd primes not dividing ``detE``. Every new class is
    checked with :func:`same_genus`.

    Args:
        L: lattice of rank at least 2
        caps: ``caps.classes`` bounds the number of classes.
        verbose: print status and a progress bar to stderr
    Returns:
        ``GenusPartition`` ordered by (minimum, reduced Gram), without spinor
        blocks.
    Raises:
        ResourceError if the genus exceeds the class cap.

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice, genus_classes
            >>> G = genus_classes(QuadLattice.identity(4))
            >>> len(G), G.classes[0].aut_order
            (1, 384)
    """
    t0 = time()
    caps = caps or get_caps()
    if L.n < 2:
        raise PreconditionError('genus_classes needs rank at least 2')

    detE = linalg.det(L.gram)
    primes = neighbor_primes(detE)
    R0, _ = minkowski_reduce(L, caps)
    index = _ClassIndex(max(R0.gram[i][i] // 2 for i in range(R0.n)), caps)
    index.locate(R0)

    edges = set()
    queue = deque([0])
    with tqdm(desc='genus', disable=not verbose, file=sys.stderr) as pbar:
        while queue:
            i = queue.popleft()
            for p in primes:
                for x in _isotropic_lines(index.reps[i], p):
                    N, _ = minkowski_reduce(
                        _neighbor(index.reps[i], p, x), caps)
                    j, new = index.locate(N)
                    if new:
                        if len(index.reps) > caps.classes:
                            raise ResourceError(_mywrap(f"""\
                            Genus has more than {caps.classes} classes; raise
                            the classes cap
                            """))
                        if not same_genus(L, N, caps):
                            raise QlatError('Neighbor left the genus')
                        queue.append(j)
                    edges.add((min(i, j), max(i, j), p))
            pbar.update(1)

    reps = index.reps
    auts = Parallel(n_jobs=caps.n_jobs)(
        delayed(_aut_order)(R, caps) for R in reps)
    keys = [_canonical_key(R, caps) for R in reps]
    order = sorted(range(len(reps)), key=lambda i: keys[i])
    position = {old: new for new, old in enumerate(order)}

    classes = [
        GenusClass(reps[i], auts[i], Fraction(1, auts[i]), keys[i][0])
        for i in order]
    edges = [(min(position[i], position[j]), max(position[i], position[j]), p)
             for i, j, p in edges]

    if verbose:
        msg = f"""\
        Genus of detE = {detE} has {len(classes)} classes
        - neighbor primes: {primes}
        """
        _report(msg, t0)
    return GenusPartition(L, classes, position[0], primes, edges)


def _xor_reduce(x: int, basis: Dict[int, int]) -> int:
    # basis maps leading bit to vector; the result has no pivot bit set
    for top in sorted(basis, reverse=True):
        if x >> top & 1:
            x ^= basis[top]
    return x


def spin_partition(
        G: GenusPartition,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> GenusPartition:
    """Split a genus into spinor genera

    A p-neighbor step multiplies the spinor class by the idèle ``p``, so
    every neighbor edge carries its prime as a label in an F_2-space. Label
    sums around cycles of the neighbor graph are trivial; two classes share
    a block iff the label sum along a connecting path lies in the span of
    these cycle relations. Spinor norms of the proper automorphisms of each
    class are computed through reflection factorizations and reported.

    Args:
        G: output of :func:`genus_classes`
        caps: resource caps
        verbose: print status to stderr
    Returns:
        a new ``GenusPartition`` with ``spin_blocks`` and per-class spinor
        norms filled in.
    """
    t0 = time()
    caps = caps or get_caps()
    if G.base.n < 3:
        raise PreconditionError('spin_partition needs rank at least 3')

    bit = {p: 1 << i for i, p in enumerate(G.primes)}
    adj: Dict[int, List[Tuple[int, int]]] = {i: [] for i in range(len(G))}
    for i, j, p in G.edges:
        adj[i].append((j, bit[p]))
        adj[j].append((i, bit[p]))

    potential = {G.base_index: 0}
    queue = deque([G.base_index])
    while queue:
        i = queue.popleft()
        for j, label in adj[i]:
            if j not in potential:
                potential[j] = potential[i] ^ label
                queue.append(j)
    if len(potential) != len(G):
        raise QlatError('Neighbor graph of the genus is not connected')

    relations: Dict[int, int] = {}
    for i, j, p in G.edges:
        r = _xor_reduce(potential[i] ^ potential[j] ^ bit[p], relations)
        if r:
            relations[r.bit_length() - 1] = r

    keys = [_xor_reduce(potential[i], relations) for i in range(len(G))]
    blocks: List[List[int]] = []
    block_of: Dict[int, int] = {}
    for i, key in enumerate(keys):
        if key not in block_of:
            block_of[key] = len(blocks)
            blocks.append([])
        blocks[block_of[key]].append(i)

    norms = Parallel(n_jobs=caps.n_jobs)(
        delayed(_proper_spinor_norms)(c.lattice, caps) for c in G.classes)
    classes = [
        c._replace(block=block_of[keys[i]], spinor_norms=norms[i])
        for i, c in enumerate(G.classes)]

    if verbose:
        msg = f"""\
        Genus splits into {len(blocks)} spinor genera
        - relation rank: {len(relations)} of {len(G.primes)}
        """
        _report(msg, t0)
    return GenusPartition(
        G.base, classes, G.base_index, G.primes, G.edges, blocks)


def _proper_spinor_norms(R: QuadLattice, caps: Caps) -> Tuple[int, ...]:
    norms = {
        spinor_norm(A, R, caps)
        for A in automorphism_elements(R, caps) if linalg.det(A) == 1}
    # the image of Aut⁺ under the spinor norm is a subgroup
    for a in norms:
        for b in norms:
            if _squarefree(Fraction(a * b)) not in norms:
                raise QlatError(_mywrap(f"""\
                Spinor norms {sorted(norms)} of a class are not closed under
                products
                """))
    return tuple(sorted(norms))


_PRODUCT_BOUND = {
    1: Fraction(1),
    2: Fraction(4, 3),
    3: Fraction(2),
    4: Fraction(4),
    5: Fraction(8)}


def _adjugate(A: Sequence[Sequence[int]]) -> List[List[int]]:
    d = linalg.det(A)
    return [[int(x * d) for x in row] for row in linalg.inverse(A)]


def reduced_forms(
        n: int,
        detE: int,
        caps: Optional[Caps] = None) -> List[linalg.Matrix]:
    """Doubled Gram matrices of determinant ``detE`` with reduced shape

    Every class of that determinant has a representative here: diagonal
    ``a_1 <= ... <= a_n``, ``|E_ij| <= a_i`` for ``i < j``,
    ``E_{i,i+1} >= 0`` and ``Π a_i <= λ_n · detE / 2^n``.
    """
    caps = caps or get_caps()
    if n not in _PRODUCT_BOUND:
        raise PreconditionError('reduced_forms supports rank 1 to 5')
    limit = _PRODUCT_BOUND[n] * Fraction(detE, 2 ** n)
    out = []

    if n == 1:
        if detE % 2 == 0 and detE > 0:
            out.append(((detE,),))
        return out

    def last_column(E: List[List[int]], diag: List[int]) -> None:
        A = [row[:] for row in E]
        detA = linalg.det(A)
        amax = int(limit / _prod(diag))
        if amax < diag[-1]:
            return
        room = 2 * amax * detA - detE
        if room < 0:
            return
        adjA = _adjugate(A)
        Lam = QuadLattice.from_gram([[2 * x for x in row] for row in adjA])
        ws = [((0,) * (n - 1), 0)]
        for w, v in short_vectors(Lam, room, caps):
            ws.append((w, v))
            ws.append((tuple(-x for x in w), v))
        for w, v in ws:
            if any(abs(w[i]) > diag[i] for i in range(n - 1)) or w[-1] < 0:
                continue
            num = detE + v
            if num % detA:
                continue
            c = num // detA
            if c % 2 or c // 2 < diag[-1] or c // 2 > amax:
                continue
            full = [row[:] + [w[i]] for i, row in enumerate(E)]
            full.append(list(w) + [c])
            out.append(linalg.as_matrix(full))

    def build(E: List[List[int]], diag: List[int]) -> None:
        k = len(diag)
        if k == n - 1:
            last_column(E, diag)
            return
        lo = diag[-1] if diag else 1
        a = lo
        while _prod(diag) * a ** (n - k) <= limit:
            ranges = [range(-diag[i], diag[i] + 1) for i in range(k)]
            if k:
                ranges[-1] = range(0, diag[-1] + 1)
            for col in product(*ranges):
                F = [row[:] + [col[i]] for i, row in enumerate(E)]
                F.append(list(col) + [2 * a])
                if linalg.det(F) > 0:
                    build(F, diag + [a])
            a += 1

    build([], [])
    return out


def _prod(xs: Sequence[int]) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def oracle_genus(
        L: QuadLattice,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> List[QuadLattice]:
    """Independent brute-force genus enumeration

    Lists every reduced-shape form of the same ``detE``
    (:func:`reduced_forms`), keeps those in the genus of ``L``
    (:func:`same_genus`) and buckets them by isometry.

    Args:
        L: lattice of rank at most 5
        caps: resource caps
        verbose: print status to stderr
    Returns:
        reduced class representatives ordered by (minimum, Gram).
    """
    t0 = time()
    caps = caps or get_caps()
    detE = linalg.det(L.gram)
    factors = linalg.invariant_factors(L.gram)
    candidates = reduced_forms(L.n, detE, caps)

    index = None
    kept = 0
    for E in candidates:
        if linalg.invariant_factors(E) != factors:
            continue
        M = QuadLattice.from_gram(E)
        if not same_genus(L, M, caps):
            continue
        kept += 1
        R, _ = minkowski_reduce(M, caps)
        if index is None:
            top = max(R.gram[i][i] // 2 for i in range(R.n))
            index = _ClassIndex(top, caps)
        index.locate(R)

    reps = [] if index is None else index.reps
    if verbose:
        msg = f"""\
        oracle_genus: {len(candidates)} reduced forms of detE = {detE}, {kept}
        in the genus, {len(reps)} classes
        """
        _report(msg, t0)
    return sorted(reps, key=lambda R: _canonical_key(R, caps))
