#! /usr/bin/env python3
"""Bounded-precision p-adic arithmetic and lifting kernels

Everything is exact modulo an explicit ``p^e``; a zero residue never gets a
made-up valuation.
"""
from time import time
from math import gcd
from functools import reduce
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from joblib import Parallel, delayed
from sympy import (
    Matrix as SymMatrix, Poly, factorial, isprime, symbols, sympify)

from . import linalg
from .utils import (
    _mywrap, _report, Caps, MarginError, NotFoundError, decode_int, encode_int,
    encode_fraction, get_caps)


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool):
        raise TypeError('p must be an int')
    if not isprime(p):
        raise ValueError(f'{p} is not prime')


def ord_p(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer"""
    if x == 0:
        raise ValueError('ord_p(0) is infinite')
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def ord_p_vector(xs: Sequence[int], p: int, cap: int) -> int:
    """Minimum valuation of the entries, capped at ``cap``"""
    return min([min(ord_p(x, p), cap) for x in xs if x] + [cap])


class Valuation(NamedTuple):
    """A valuation known exactly, or only as a lower bound"""
    value: int
    exact: bool

    def __str__(self) -> str:
        return str(self.value) if self.exact else f'>={self.value}'

    def to_json(self) -> str:
        return str(self)


class PadicScalar(object):
    """Element of Z/p^e standing in for a p-adic integer

    Args:
        p: prime
        e: precision exponent (``>= 1``)
        residue: any integer; stored reduced into ``[0, p^e)``

    Examples:

        .. code-block:: python

            >>> from qlat.padic import PadicScalar
            >>> PadicScalar(5, 3, 50).valuation()
            Valuation(value=2, exact=True)
            >>> str(PadicScalar(5, 3, 0).valuation())
            '>=3'
    """

    def __init__(self, p: int, e: int, residue: int) -> None:
        _check_prime(p)
        if not isinstance(e, int) or e < 1:
            raise ValueError('Precision e must be a positive integer')
        self.p = p
        self.e = e
        self.residue = residue % p ** e

    @property
    def modulus(self) -> int:
        return self.p ** self.e

    def valuation(self) -> Valuation:
        if self.residue == 0:
            return Valuation(self.e, False)
        return Valuation(ord_p(self.residue, self.p), True)

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def inverse(self) -> 'PadicScalar':
        if not self.is_unit():
            raise ValueError(f'{self!r} is not a unit')
        return PadicScalar(self.p, self.e, pow(self.residue, -1, self.modulus))

    def _coerce(self, other) -> int:
        if isinstance(other, PadicScalar):
            if (other.p, other.e) != (self.p, self.e):
                raise ValueError('Mixed p or precision in p-adic arithmetic')
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        x = self._coerce(other)
        if x is NotImplemented:
            return x
        return PadicScalar(self.p, self.e, self.residue + x)

    __radd__ = __add__

    def __sub__(self, other):
        x = self._coerce(other)
        if x is NotImplemented:
            return x
        return PadicScalar(self.p, self.e, self.residue - x)

    def __rsub__(self, other):
        x = self._coerce(other)
        if x is NotImplemented:
            return x
        return PadicScalar(self.p, self.e, x - self.residue)

    def __mul__(self, other):
        x = self._coerce(other)
        if x is NotImplemented:
            return x
        return PadicScalar(self.p, self.e, self.residue * x)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(self.p, self.e, -self.residue)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.residue == other % self.modulus
        return (isinstance(other, PadicScalar)
                and (self.p, self.e, self.residue)
                == (other.p, other.e, other.residue))

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.residue))

    def __repr__(self) -> str:
        return f'PadicScalar(p={self.p}, e={self.e}, residue={self.residue})'

    def to_json(self) -> dict:
        return {'p': self.p, 'e': self.e, 'residue': encode_int(self.residue)}


class PadicMatrix(object):
    """Matrix over Z/p^e with uniform precision"""

    def __init__(self, rows: Sequence[Sequence[int]], p: int, e: int) -> None:
        _check_prime(p)
        if not isinstance(e, int) or e < 1:
            raise ValueError('Precision e must be a positive integer')
        q = p ** e
        rows = [[int(x) % q for x in row] for row in rows]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError('PadicMatrix rows must all have the same length')
        self.p = p
        self.e = e
        self.rows = linalg.as_matrix(rows)

    @classmethod
    def from_json(cls, data: dict) -> 'PadicMatrix':
        try:
            rows = [[decode_int(x) for x in row] for row in data['rows']]
            return cls(rows, decode_int(data['p']), decode_int(data['e']))
        except KeyError as err:
            raise ValueError(f'PadicMatrix JSON is missing {err}')

    @classmethod
    def identity(cls, n: int, p: int, e: int) -> 'PadicMatrix':
        return cls(linalg.identity(n), p, e)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    @property
    def modulus(self) -> int:
        return self.p ** self.e

    def __getitem__(self, ij: Tuple[int, int]) -> PadicScalar:
        i, j = ij
        return PadicScalar(self.p, self.e, self.rows[i][j])

    def __matmul__(self, other: 'PadicMatrix') -> 'PadicMatrix':
        if (other.p, other.e) != (self.p, self.e):
            raise ValueError('Mixed p or precision in p-adic arithmetic')
        return PadicMatrix(
            linalg.matmul(self.rows, other.rows), self.p, self.e)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PadicMatrix)
                and (self.p, self.e, self.rows)
                == (other.p, other.e, other.rows))

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.rows))

    def __repr__(self) -> str:
        rows = [list(r) for r in self.rows]
        return f'PadicMatrix({rows}, p={self.p}, e={self.e})'

    def to_json(self) -> dict:
        return {
            'p': self.p,
            'e': self.e,
            'rows': [[encode_int(x) for x in row] for row in self.rows]}


def _valuation_mod(x: int, p: int, e: int) -> int:
    # e stands for "at least e" when x is zero mod p^e
    x %= p ** e
    return e if x == 0 else ord_p(x, p)


def _snf_residues(rows: Sequence[Sequence[int]], p: int, e: int):
    q = p ** e
    M = [[x % q for x in r] for r in rows]
    nr = len(M)
    nc = len(M[0]) if nr else 0
    U = [list(r) for r in linalg.identity(nr)]
    V = [list(r) for r in linalg.identity(nc)]

    for t in range(min(nr, nc)):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if M[i][j]:
                    v = ord_p(M[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        M[t], M[i] = M[i], M[t]
        U[t], U[i] = U[i], U[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]

        # scale the pivot to an exact power of p
        uinv = pow(M[t][t] // p ** v, -1, q)
        M[t] = [x * uinv % q for x in M[t]]
        U[t] = [x * uinv % q for x in U[t]]

        pv = p ** v
        for i in range(t + 1, nr):
            c = M[i][t] // pv
            if c:
                M[i] = [(a - c * b) % q for a, b in zip(M[i], M[t])]
                U[i] = [(a - c * b) % q for a, b in zip(U[i], U[t])]
        for j in range(t + 1, nc):
            c = M[t][j] // pv
            if c:
                for row in M:
                    row[j] = (row[j] - c * row[t]) % q
                for row in V:
                    row[j] = (row[j] - c * row[t]) % q

    return U, M, V


def smith_normal_form(
        A: PadicMatrix) -> Tuple[PadicMatrix, PadicMatrix, PadicMatrix]:
    """Smith normal form over Z/p^e

    Args:
        A: matrix at precision ``e``
    Returns:
        ``(U, D, V)`` with ``U A V = D`` modulo ``p^e``; ``U`` and ``V``
        invertible, ``D`` diagonal whose residues are exact powers
        ``p^{k_1} | p^{k_2} | ...`` or zero.

    Examples:

        .. code-block:: python

            >>> from qlat.padic import PadicMatrix, smith_normal_form
            >>> A = PadicMatrix([[5, 1], [0, 5]], 5, 4)
            >>> U, D, V = smith_normal_form(A)
            >>> D.rows
            ((1, 0), (0, 25))
    """
    U, D, V = _snf_residues(A.rows, A.p, A.e)
    return (
        PadicMatrix(U, A.p, A.e), PadicMatrix(D, A.p, A.e),
        PadicMatrix(V, A.p, A.e))


def invariant_valuations(D: PadicMatrix) -> List[Valuation]:
    """Valuations along the diagonal of a Smith form"""
    r, c = D.shape
    return [D[i, i].valuation() for i in range(min(r, c))]


def snf_valuations(rows: Sequence[Sequence[int]], p: int, e: int) -> List[int]:
    """Invariant-factor valuations of an integer matrix modulo ``p^e``

    Zero residues are reported as ``e``.
    """
    _, D, _ = _snf_residues(rows, p, e)
    nr = len(D)
    nc = len(D[0]) if nr else 0
    return [_valuation_mod(D[i][i], p, e) for i in range(min(nr, nc))]


class PolySystem(object):
    """Integer polynomial system ``f_1, ..., f_r`` in ``m`` variables

    Args:
        polys: one list of ``(coefficient, exponent vector)`` terms per
            polynomial
        nvars: number of variables ``m``
    """

    def __init__(
            self,
            polys: Sequence[Sequence[Tuple[int, Sequence[int]]]],
            nvars: int) -> None:
        if not isinstance(nvars, int) or nvars < 1:
            raise ValueError('nvars must be a positive integer')
        self.gens = symbols(f'x0:{nvars}')
        self.polys = []
        for i, terms in enumerate(polys):
            coeffs: Dict[Tuple[int, ...], int] = {}
            for term in terms:
                coef, exps = term
                exps = tuple(decode_int(x) for x in exps)
                if len(exps) != nvars or any(x < 0 for x in exps):
                    msg = f"""\
                    Polynomial {i} has exponent vector {list(exps)}; expected
                    {nvars} non-negative integers
                    """
                    raise ValueError(_mywrap(msg))
                coeffs[exps] = coeffs.get(exps, 0) + decode_int(coef)
            self.polys.append(Poly.from_dict(coeffs, *self.gens, domain='ZZ'))
        if not self.polys:
            raise ValueError('PolySystem needs at least one polynomial')
        self._partials = [[f.diff(x) for x in self.gens] for f in self.polys]

    @classmethod
    def from_json(cls, data: dict) -> 'PolySystem':
        if not isinstance(data, dict) or not {'polys', 'vars'} <= set(data):
            raise ValueError('Polynomial JSON needs "vars" and "polys"')
        return cls(data['polys'], decode_int(data['vars']))

    @classmethod
    def from_strings(
            cls,
            exprs: Sequence[str],
            variables: Sequence[str]) -> 'PolySystem':
        gens = symbols(list(variables))
        polys = []
        for s in exprs:
            P = Poly(sympify(s), *gens, domain='ZZ')
            polys.append([(int(c), m) for m, c in P.terms()])
        return cls(polys, len(gens))

    @property
    def nvars(self) -> int:
        return len(self.gens)

    @property
    def npolys(self) -> int:
        return len(self.polys)

    @property
    def degree(self) -> int:
        return max(
            (sum(m) for f in self.polys for m, c in f.terms() if c != 0),
            default=0)

    @property
    def height(self) -> int:
        return max(abs(int(c)) for f in self.polys for c in f.coeffs())

    def _eval(self, f: Poly, x: Sequence[int]) -> int:
        if f.is_zero:
            return 0
        return int(f.eval(dict(zip(self.gens, x))))

    def evaluate(self, x: Sequence[int]) -> Tuple[int, ...]:
        if len(x) != self.nvars:
            raise ValueError(
                f'Expected {self.nvars} coordinates, got {len(x)}')
        return tuple(self._eval(f, x) for f in self.polys)

    def jacobian(self, x: Sequence[int]) -> linalg.Matrix:
        return tuple(
            tuple(self._eval(df, x) for df in row) for row in self._partials)

    def to_json(self) -> dict:
        return {
            'vars': self.nvars,
            'polys': [[[encode_int(int(c)), list(m)] for m, c in f.terms()]
                      for f in self.polys]}


def _adjugate(J: Sequence[Sequence[int]], d: int) -> List[List[int]]:
    inv = linalg.inverse(J)
    return [[int(x * d) for x in row] for row in inv]


def _newton(
        f: PolySystem,
        x0: Sequence[int],
        p: int,
        k: int,
        target: int,
        cols: Sequence[int]) -> Tuple[int, ...]:
    """Newton iteration on the square subsystem in variables ``cols``

    The derivative is recomputed at every step; each correction lies in
    ``p^{k+1} Z_p`` so the result stays congruent to ``x0`` mod ``p^{k+1}``.
    """
    W = target + k + 1
    q = p ** W
    x = [v % q for v in x0]
    prec = ord_p_vector(f.evaluate(x), p, W)
    while prec < target:
        J = f.jacobian(x)
        Jc = [[J[i][j] for j in cols] for i in range(f.npolys)]
        d = linalg.det(Jc)
        if d == 0 or ord_p(d, p) != k:
            raise MarginError(
                'Jacobian valuation changed during Newton iteration')
        adj = _adjugate(Jc, d)
        fx = f.evaluate(x)
        pk = p ** k
        uinv = pow(d // pk, -1, q)
        for i, j in enumerate(cols):
            num = sum(adj[i][l] * fx[l] for l in range(f.npolys))
            x[j] = (x[j] - (num // pk) * uinv) % q
        newprec = ord_p_vector(f.evaluate(x), p, W)
        if newprec <= prec:
            raise MarginError('Newton iteration stalled')
        prec = newprec
    return tuple(v % p ** target for v in x)


def newton_lift(
        f: PolySystem, x0: Sequence[int], p: int,
        target_e: int) -> Tuple[int, ...]:
    """Lift an approximate zero of a square system by Newton's method

    With ``p^{-k} = |det Df(x0)|_p`` the start must satisfy
    ``f(x0) ≡ 0 mod p^{2k+1}``; both ``k`` and the congruence are computed
    here, never assumed.

    Args:
        f: system with as many polynomials as variables
        x0: integer start vector
        p: prime
        target_e: precision of the returned zero
    Returns:
        ``x`` in ``[0, p^target_e)`` with ``f(x) ≡ 0 mod p^target_e`` and
        ``x ≡ x0 mod p^{k+1}``.
    Raises:
        MarginError if the Jacobian is singular at ``x0`` or the start is not
        close enough to a zero.

    Examples:

        .. code-block:: python

            >>> from qlat.padic import PolySystem, newton_lift
            >>> f = PolySystem.from_strings(['x**2 - 2'], ['x'])
            >>> newton_lift(f, [3], 7, 2)
            (10,)
    """
    _check_prime(p)
    if f.npolys != f.nvars:
        raise ValueError(f'newton_lift needs a square system, got {f.npolys} '
                         f'polynomials in {f.nvars} variables')
    if len(x0) != f.nvars:
        raise ValueError(f'x0 must have {f.nvars} coordinates')
    if target_e < 1:
        raise ValueError('target_e must be positive')

    d = linalg.det(f.jacobian(x0))
    if d == 0:
        raise MarginError('Jacobian determinant vanishes at x0')
    k = ord_p(d, p)
    need = 2 * k + 1
    have = ord_p_vector(f.evaluate(x0), p, need)
    if have < need:
        msg = f"""\
        Margin violated: ord_p det Df(x0) = {k} needs f(x0) = 0 mod p^{need},
        but only mod p^{have} holds
        """
        raise MarginError(_mywrap(msg))
    return _newton(f, x0, p, k, target_e, list(range(f.nvars)))


class GreenbergResult(NamedTuple):
    point: Tuple[int, ...]
    precision: int
    agreement: int
    exponent: Fraction
    method: str
    tried: int

    def to_json(self) -> dict:
        return {
            'point': [encode_int(x) for x in self.point],
            'precision': self.precision,
            'agreement': self.agreement,
            'exponent': encode_fraction(self.exponent),
            'method': self.method,
            'tried': self.tried}


def _smooth_start(f: PolySystem, x: Sequence[int], p: int, W: int):
    # minimal-valuation maximal minor; None unless it meets the Newton margin
    r, m = f.npolys, f.nvars
    if r > m:
        return None
    J = f.jacobian(x)
    best = None
    for cols in combinations(range(m), r):
        d = linalg.det([[J[i][j] for j in cols] for i in range(r)])
        if d:
            v = ord_p(d, p)
            if best is None or v < best[0]:
                best = (v, cols)
    if best is None:
        return None
    k, cols = best
    if ord_p_vector(f.evaluate(x), p, W) < 2 * k + 1:
        return None
    return k, cols


def _descent(f: PolySystem, x: Sequence[int], p: int, W: int):
    """Linearised steps along the invertible block of a Smith form of Df

    Each step solves ``U f(x) + D y ≡ 0 mod p^W`` for ``δ = V y`` using only
    the diagonal entries of ``D`` whose valuation does not exceed the
    matching entry of ``U f(x)``. Returns ``None`` as soon as a step cannot be
    taken or fails to raise the precision.
    """
    q = p ** W
    r, m = f.npolys, f.nvars
    x = [v % q for v in x]
    prec = ord_p_vector(f.evaluate(x), p, W)
    while prec < W:
        U, D, V = _snf_residues(f.jacobian(x), p, W)
        fx = f.evaluate(x)
        g = [sum(U[i][j] * fx[j] for j in range(r)) % q for i in range(r)]
        y = [0] * m
        for i in range(r):
            d = D[i][i] if i < m else 0
            if d == 0:
                if g[i]:
                    return None
                continue
            v = ord_p(d, p)
            if _valuation_mod(g[i], p, W) < v:
                return None
            y[i] = -(g[i] // p ** v) % q
        x = [(x[a] + sum(V[a][b] * y[b] for b in range(m))) % q
             for a in range(m)]
        newprec = ord_p_vector(f.evaluate(x), p, W)
        if newprec <= prec:
            return None
        prec = newprec
    return tuple(x)


def _perturbations(m: int, low: int, high: int):
    """Nonzero ``δ`` in ``[-high, high]^m`` with max abs above ``low``

    Ordered by (number of nonzeros, max abs, lex).
    """
    for nnz in range(1, m + 1):
        for top in range(low + 1, high + 1):
            group = []
            for support in combinations(range(m), nnz):
                for vals in product(range(-top, top + 1), repeat=nnz):
                    if 0 in vals or max(abs(v) for v in vals) != top:
                        continue
                    delta = [0] * m
                    for i, v in zip(support, vals):
                        delta[i] = v
                    group.append(tuple(delta))
            yield from sorted(group)


def greenberg_lift(
        f: PolySystem,
        w: Sequence[int],
        k: int,
        p: int,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> GreenbergResult:
    """Replace an approximate zero by a nearby zero at working precision 3k

    ``w`` itself is tried first: as an exact zero, then by Newton on a
    minimal-valuation maximal minor when the margin holds, then by descent
    along the invertible block of a Smith form of the Jacobian. Failing all
    three, the search visits ``w + p^a δ`` with ``δ`` running through shells
    of ``s`` base-``p`` digits, ``s = 1, 2, ...``, and ``a = k, ..., 1``
    within each shell, until every residue class of ``w`` mod ``p^a`` has
    been covered. A candidate is accepted if it is a zero at working
    precision or satisfies the Newton margin.

    Args:
        f: polynomial system
        w: integer vector with ``f(w) ≡ 0 mod p^k``
        k: approximation exponent
        p: prime
        caps: ``caps.greenberg_budget`` bounds the number of candidates.
        verbose: print status to stderr
    Returns:
        ``GreenbergResult`` with the point (residues mod ``p^{3k}``), the
        agreement ``a`` with ``w`` and the achieved exponent ``k / a``.
    Raises:
        NotFoundError if the budget runs out. That is a budget failure, not
        a proof that no zero exists.

    Examples:

        .. code-block:: python

            >>> from qlat.padic import PolySystem, greenberg_lift
            >>> f = PolySystem.from_strings(['x*y'], ['x', 'y'])
            >>> greenberg_lift(f, [5, 5], 2, 5).point
            (0, 5)
    """
    t0 = time()
    _check_prime(p)
    caps = caps or get_caps()
    if len(w) != f.nvars:
        raise ValueError(f'w must have {f.nvars} coordinates')
    if k < 1:
        raise ValueError('k must be a positive integer')
    if ord_p_vector(f.evaluate(w), p, k) < k:
        raise ValueError(f'f(w) is not zero mod {p}^{k}')

    N = 3 * k
    q = p ** N

    def result(point, method, tried):
        point = tuple(x % q for x in point)
        a = ord_p_vector([x - y for x, y in zip(point, w)], p, N)
        if verbose:
            msg = f"""\
            greenberg_lift: {method} point found after {tried} candidates,
            agreement mod {p}^{a}
            """
            _report(msg, t0)
        return GreenbergResult(point, N, a, Fraction(k, a), method, tried)

    tried = 1
    if ord_p_vector(f.evaluate(w), p, N) >= N:
        return result(w, 'exact', tried)
    smooth = _smooth_start(f, w, p, N)
    if smooth is not None:
        kk, cols = smooth
        return result(_newton(f, w, p, kk, N, cols), 'newton', tried)
    point = _descent(f, w, p, N)
    if point is not None:
        return result(point, 'descent', tried)

    for s in range(1, N):
        low, high = p ** (s - 1) // 2, p ** s // 2
        for a in range(k, 0, -1):
            if s > N - a:
                continue
            for delta in _perturbations(f.nvars, low, high):
                tried += 1
                if tried > caps.greenberg_budget:
                    raise NotFoundError(_mywrap(f"""\
                    No lift found within {caps.greenberg_budget} candidates;
                    raise the greenberg_budget cap
                    """))
                c = [x + p ** a * d for x, d in zip(w, delta)]
                if ord_p_vector(f.evaluate(c), p, N) >= N:
                    return result(c, 'search', tried)
                smooth = _smooth_start(f, c, p, N)
                if smooth is not None:
                    kk, cols = smooth
                    point = _newton(f, c, p, kk, N, cols)
                    return result(point, 'search+newton', tried)

    raise NotFoundError(f'No lift found among {tried} candidates')


def _check_nilpotent(N: linalg.Matrix) -> None:
    n = len(N)
    P = N
    for _ in range(n - 1):
        P = linalg.matmul(P, N)
    if any(x for row in P for x in row):
        raise ValueError(f'Matrix {[list(r) for r in N]} is not nilpotent')


def _exp_nilpotent(N: linalg.Matrix, t: int):
    n = len(N)
    total = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    power = linalg.identity(n)
    for j in range(1, n):
        power = linalg.matmul(power, N)
        c = Fraction(t ** j, int(factorial(j)))
        for a in range(n):
            for b in range(n):
                total[a][b] += c * power[a][b]
    return total


def _derivative(nilpotents: Sequence[linalg.Matrix], t: Sequence[int]):
    """Left-trivialised derivative φ(t)⁻¹ ∂φ/∂t_i, one column per i"""
    s = len(nilpotents)
    cols = []
    for i in range(s):
        S = linalg.identity(len(nilpotents[0]))
        Sinv = S
        for j in range(i + 1, s):
            S = linalg.matmul(S, _exp_nilpotent(nilpotents[j], t[j]))
            Sinv = linalg.matmul(_exp_nilpotent(nilpotents[j], -t[j]), Sinv)
        X = linalg.matmul(Sinv, nilpotents[i], S)
        cols.append([x for row in X for x in row])
    return [list(r) for r in zip(*cols)]


def kgen_valuation(
        nilpotents: Sequence[Sequence[Sequence[int]]],
        m_dim: int,
        p: int,
        t: Sequence[int]) -> Optional[int]:
    """Minimal valuation of the m_dim-minors of the derivative at ``t``

    Equals the sum of the ``m_dim`` smallest invariant-factor valuations;
    ``None`` when every such minor vanishes.
    """
    D = _derivative([linalg.as_matrix(N) for N in nilpotents], t)
    dens = [Fraction(x).denominator for row in D for x in row]
    scale = reduce(lambda a, b: a * b // gcd(a, b), dens, 1)
    if scale % p == 0:
        raise ValueError(f'Exponential has a denominator divisible by {p}')
    Z = [[int(Fraction(x) * scale) for x in row] for row in D]
    factors = [d for d in linalg.invariant_factors(Z) if d]
    if len(factors) < m_dim:
        return None
    return sum(ord_p(d, p) for d in factors[:m_dim])


class KGenResult(NamedTuple):
    k: Optional[int]
    witness: Optional[Tuple[int, ...]]
    scanned: int
    exhausted: bool


def _grid(s: int, bound: int, budget: int) -> List[Tuple[int, ...]]:
    # ordered by (max abs, lex)
    points = [(0,) * s]
    for r in range(1, bound + 1):
        for t in product(range(-r, r + 1), repeat=s):
            if max(abs(v) for v in t) == r:
                points.append(t)
                if len(points) >= budget:
                    return points
    return points[:budget]


def _scan(nilpotents, m_dim, p, chunk, offset):
    best = None
    for i, t in enumerate(chunk):
        k = kgen_valuation(nilpotents, m_dim, p, t)
        if k is not None and (best is None or k < best[0]):
            best = (k, offset + i)
            if k == 0:
                break
    return best


def k_generation_check(
        nilpotents: Sequence[Sequence[Sequence[int]]],
        m_dim: int,
        p: int,
        search_budget: Optional[int] = None,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> KGenResult:
    """Search for a small k such that the nilpotents k-generate

    Scans ``t`` over a low-height grid with entries in ``{0, ±1, ..., ±d^s}``
    (``d = n - 1`` the degree of the exponentials), ordered by max abs and
    then lexicographically, and returns the minimal ``k`` with its first
    witness.

    Args:
        nilpotents: ``s`` integer ``n×n`` nilpotent matrices
        m_dim: size of the minors
        p: prime with ``p > n``
        search_budget: number of grid points; ``caps.kgen_budget`` if
            ``None``
        caps: resource caps (``n_jobs`` parallelises the scan)
        verbose: print status to stderr
    Returns:
        ``KGenResult``; ``k`` is ``None`` if nothing was found. ``exhausted``
        tells whether the whole grid was scanned.
    """
    t0 = time()
    _check_prime(p)
    caps = caps or get_caps()
    budget = search_budget or caps.kgen_budget
    if not nilpotents:
        raise ValueError('Need at least one nilpotent matrix')
    mats = [linalg.as_matrix(N) for N in nilpotents]
    n = len(mats[0])
    if any(len(N) != n or any(len(r) != n for r in N) for N in mats):
        raise ValueError('Nilpotents must all be square of the same size')
    if p <= n:
        raise ValueError(f'p must exceed the matrix size {n}')
    for N in mats:
        _check_nilpotent(N)
    s = len(mats)
    if not 1 <= m_dim <= min(s, n * n):
        raise ValueError(f'm_dim must lie in [1, {min(s, n * n)}]')

    bound = max(1, n - 1) ** s
    points = _grid(s, bound, budget)
    exhausted = len(points) == (2 * bound + 1) ** s

    if caps.n_jobs == 1:
        best = _scan(mats, m_dim, p, points, 0)
    else:
        size = max(1, -(-len(points) // caps.n_jobs))
        chunks = [(points[i:i + size], i) for i in range(0, len(points), size)]
        found = Parallel(n_jobs=caps.n_jobs)(
            delayed(_scan)(mats, m_dim, p, chunk, off)
            for chunk, off in chunks)
        found = [x for x in found if x is not None]
        best = min(found) if found else None

    if verbose:
        msg = f"""\
        k_generation_check: scanned {len(points)} grid points
        - minimal k: {None if best is None else best[0]}
        """
        _report(msg, t0)

    if best is None:
        return KGenResult(None, None, len(points), exhausted)
    return KGenResult(best[0], points[best[1]], len(points), exhausted)


def kgen_symbolic_minors(
        nilpotents: Sequence[Sequence[Sequence[int]]],
        m_dim: int) -> Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], object]:
    """Nonzero m_dim-minors of the derivative as polynomials in t_1..t_s

    Keys are ``(rows, columns)`` index tuples into the ``n² × s`` derivative;
    values are expanded ``sympy`` expressions.
    """
    mats = [SymMatrix(N) for N in nilpotents]
    n = mats[0].shape[0]
    s = len(mats)
    t = symbols(f't1:{s + 1}')

    def exp(N, x):
        total = SymMatrix.eye(n)
        power = SymMatrix.eye(n)
        for j in range(1, n):
            power = power * N
            total += x ** j * power / factorial(j)
        return total

    columns = []
    for i in range(s):
        S = SymMatrix.eye(n)
        Sinv = SymMatrix.eye(n)
        for j in range(i + 1, s):
            S = S * exp(mats[j], t[j])
            Sinv = exp(mats[j], -t[j]) * Sinv
        X = (Sinv * mats[i] * S).expand()
        columns.append([X[a, b] for a in range(n) for b in range(n)])
    D = SymMatrix(columns).T

    minors = {}
    for rows in combinations(range(n * n), m_dim):
        for cols in combinations(range(s), m_dim):
            val = D.extract(list(rows), list(cols)).det().expand()
            if val != 0:
                minors[(rows, cols)] = val
    return minors
