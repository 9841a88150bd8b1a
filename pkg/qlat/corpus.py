"""Seeded instance supply for local-global experiments"""
from time import time
from typing import List, NamedTuple, Optional

import numpy as np
import pandas as pd

from tqdm import tqdm

from . import linalg
from .lattice import QuadLattice, minkowski_reduce
from .localrep import locally_primitively_representable_everywhere
from .utils import (
    _mywrap, _report, Caps, PreconditionError, ResourceError, get_caps)


class CorpusInstance(NamedTuple):
    M: QuadLattice
    L: QuadLattice
    detE_L: int
    locally_ok: bool

    def to_json(self) -> dict:
        return {
            'M': self.M.to_json(),
            'L': self.L.to_json(),
            'detE_L': self.detE_L,
            'locally_ok': self.locally_ok}


def _diagonal_cap(n: int, det_bound: int) -> int:
    """Largest ``c`` with ``2^n c^n <= det_bound``"""
    c = 1
    while 2 ** n * (c + 1) ** n <= det_bound:
        c += 1
    return c


def random_lattice(
        n: int, det_bound: int, rng, max_tries: int = 10000) -> QuadLattice:
    """Random reduced positive definite lattice with ``detE <= det_bound``

    Diagonal coefficients are drawn so that Hadamard's inequality bounds the
    determinant; off-diagonal entries are bounded by the smaller diagonal
    entry of their pair. Draws that are not positive definite are rejected.
    """
    if det_bound < 2 ** n:
        msg = f"""\
        det_bound must be at least {2 ** n} for rank {n}, got {det_bound}
        """
        raise ValueError(_mywrap(msg))
    cap = _diagonal_cap(n, det_bound)
    for _ in range(max_tries):
        diag = [int(x) for x in rng.integers(1, cap + 1, size=n)]
        coeffs = []
        for i in range(n):
            row = [diag[i]]
            for j in range(i + 1, n):
                b = min(diag[i], diag[j])
                row.append(int(rng.integers(-b, b + 1)))
            coeffs.append(row)
        try:
            L = QuadLattice(coeffs)
        except ValueError:
            continue
        return minkowski_reduce(L)[0]
    raise ResourceError(f'No positive definite draw in {max_tries} tries')


def gen_corpus(
        seed: int,
        m: int,
        n: int,
        det_bound: int,
        count: int,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> List[CorpusInstance]:
    """Deterministic pseudorandom ``(M, L)`` pairs

    Args:
        seed: seed for ``numpy.random.default_rng``
        m: rank of ``M``
        n: rank of ``L``, at least ``m + 3``
        det_bound: bound on ``detE_L``; for ``m = 1`` the target is
            ``M = ⟨t⟩`` with ``1 <= t <= 2·det_bound``
        count: number of instances
        caps: resource caps for the local checks
        verbose: print status and a progress bar to stderr
    Returns:
        ``list`` of ``CorpusInstance`` with ``locally_ok`` precomputed.

    Examples:

        .. code-block:: python

            >>> from qlat.corpus import gen_corpus
            >>> inst = gen_corpus(seed=1, m=1, n=4, det_bound=10000, count=20)
            >>> len(inst)
            20
    """
    t0 = time()
    if n < m + 3:
        msg = f"""\
        gen_corpus needs n >= m + 3 (codimension at least 3), got m = {m},
        n = {n}
        """
        raise PreconditionError(_mywrap(msg))
    if count < 0:
        raise ValueError('count must be non-negative')
    caps = caps or get_caps()
    rng = np.random.default_rng(seed)

    out = []
    for _ in tqdm(range(count), disable=not verbose):
        L = random_lattice(n, det_bound, rng)
        if m == 1:
            M = QuadLattice([[int(rng.integers(1, 2 * det_bound + 1))]])
        else:
            M = random_lattice(m, det_bound, rng)
        locally_ok = locally_primitively_representable_everywhere(
            M, L, caps=caps).verdict
        out.append(CorpusInstance(M, L, linalg.det(L.gram), locally_ok))

    if verbose:
        msg = f"""\
        Generated {count} instances (m = {m}, n = {n}, seed = {seed})
        - locally representable: {sum(x.locally_ok for x in out)}
        """
        _report(msg, t0)
    return out


def corpus_frame(instances: List[CorpusInstance]) -> pd.DataFrame:
    """Summary table with one row per instance"""
    rows = [(str(x.M.coeffs), str(x.L.coeffs), x.detE_L, x.locally_ok)
            for x in instances]
    return pd.DataFrame(rows, columns=['M', 'L', 'detE_L', 'locally_ok'])
