#! /usr/bin/env python3
"""Representation counts and averaged representation numbers"""
from time import time
from math import gcd, isqrt
from functools import reduce
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from joblib import Parallel, delayed

from . import linalg
from .genus import GenusPartition, genus_classes
from .lattice import QuadLattice, _isometries, minimum, short_vectors
from .localrep import locally_primitively_representable_everywhere
from .utils import _report, Caps, PreconditionError, encode_int, get_caps


class Representation(NamedTuple):
    T: linalg.Matrix
    primitive: bool

    def to_json(self) -> dict:
        return {
            'T': [[encode_int(x) for x in row] for row in self.T],
            'primitive': self.primitive}


def representations(
        M: QuadLattice,
        L: QuadLattice,
        primitive_only: bool = False,
        caps: Optional[Caps] = None) -> List[Representation]:
    """All representations of ``M`` by ``L``

    Columns are chosen among short vectors of ``L`` of the right norm with
    exact inner-product constraints, in canonical order.

    Args:
        M: lattice of rank ``m``
        L: lattice of rank ``n >= m``
        primitive_only: drop representations whose invariant factors are
            not all 1
        caps: resource caps for the short-vector search
    Returns:
        ``list`` of ``Representation`` (``T`` is ``n×m``).

    Examples:

        .. code-block:: python

            >>> from qlat import QuadLattice, representations
            >>> M, L = QuadLattice([[2]]), QuadLattice.identity(4)
            >>> len(representations(M, L))
            24
    """
    if M.n > L.n:
        raise PreconditionError(
            f'rank(M) = {M.n} exceeds rank(L) = {L.n}')
    out = []
    for T in _isometries(L, M.gram, caps):
        prim = linalg.is_primitive(T)
        if prim or not primitive_only:
            out.append(Representation(T, prim))
    return out


def representation_count(
        M: QuadLattice,
        L: QuadLattice,
        primitive: bool = True,
        caps: Optional[Caps] = None) -> int:
    return len(representations(M, L, primitive, caps))


def representation_counts(
        L: QuadLattice,
        bound: int,
        primitive: bool = False,
        caps: Optional[Caps] = None) -> Dict[int, int]:
    """``r(⟨t⟩, L)`` for every ``t`` in ``1..bound`` from one enumeration

    A vector is a primitive representation of ``⟨t⟩`` iff its coordinates
    are coprime.
    """
    counts = {t: 0 for t in range(1, bound + 1)}
    for x, v in short_vectors(L, bound, caps):
        if primitive and reduce(gcd, x) != 1:
            continue
        counts[v] += 2
    return counts


def brute_force_count(t: int, L: QuadLattice, primitive: bool = False) -> int:
    """Count ``x`` with ``Q(x) = t`` over a coordinate box

    Uses ``x_i² <= 2t (E⁻¹)_ii``, which holds for every solution, and plain
    ``numpy`` arithmetic over the whole box.
    """
    n = L.n
    Einv = linalg.inverse(L.gram)
    bounds = [isqrt(int(2 * t * Einv[i][i])) for i in range(n)]
    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    X = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing='ij')])
    E = np.array(L.gram, dtype=np.int64)
    Q = (X * (E @ X)).sum(axis=0) // 2
    hit = Q == t
    if primitive:
        hit &= np.gcd.reduce(np.abs(X), axis=0) == 1
    return int(hit.sum())


class RepReport(NamedTuple):
    r: int
    r_all: int
    r_gen: Fraction
    r_spn: Optional[Fraction]
    r_spn_blocks: Optional[Tuple[Fraction, ...]]
    per_class: Tuple[Tuple[int, int], ...]


def _class_counts(
        M: QuadLattice, R: QuadLattice, caps: Caps) -> Tuple[int, int]:
    reps = representations(M, R, False, caps)
    return sum(1 for x in reps if x.primitive), len(reps)


def _weighted_average(
        values: Sequence[int], G: GenusPartition,
        members: Sequence[int]) -> Fraction:
    total = sum((G.classes[i].weight for i in members), Fraction(0))
    return sum((values[i] * G.classes[i].weight for i in members),
               Fraction(0)) / total


def rep_numbers(
        M: QuadLattice,
        G: GenusPartition,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> RepReport:
    """Primitive representation numbers averaged over a genus

    ``r_gen = (1/ω_gen) Σ_i r(M, L_i) / #Aut(L_i)``; ``r_spn`` is the same
    average over the spinor block of the base class. Both are exact
    rationals.

    Args:
        M: lattice
        G: genus partition; blocks are used when present
        caps: resource caps; ``caps.n_jobs`` counts classes in parallel.
        verbose: print status to stderr
    Returns:
        ``RepReport``
    """
    t0 = time()
    caps = caps or get_caps()
    counts = Parallel(n_jobs=caps.n_jobs)(
        delayed(_class_counts)(M, c.lattice, caps) for c in G.classes)
    prim = [c[0] for c in counts]

    r_gen = _weighted_average(prim, G, range(len(G)))
    r_spn = None
    blocks = None
    if G.spin_blocks is not None:
        blocks = tuple(_weighted_average(prim, G, b) for b in G.spin_blocks)
        r_spn = blocks[G.base_block]

    r, r_all = counts[G.base_index]
    if verbose:
        msg = f"""\
        rep_numbers over {len(G)} classes
        - r = {r}, r_gen = {r_gen}, r_spn = {r_spn}
        """
        _report(msg, t0)
    return RepReport(r, r_all, r_gen, r_spn, blocks, tuple(counts))


class LgpVerdict(NamedTuple):
    locally_ok: bool
    min_M: int
    detE_L: int
    genus_size: int
    per_class_r: Tuple[int, ...]
    base_r: int
    holds: bool


def verify_lgp(
        M: QuadLattice,
        L: QuadLattice,
        G: Optional[GenusPartition] = None,
        caps: Optional[Caps] = None,
        verbose: bool = False) -> LgpVerdict:
    """Check one local-global instance

    Reports whether ``M`` is locally primitively representable by ``L`` and
    whether every class of the genus then represents it primitively. Only
    the outcome of this instance is recorded.

    Args:
        M: lattice of rank ``m``
        L: lattice of rank ``n >= m + 3``
        G: genus of ``L`` if already computed
        caps: resource caps
        verbose: print status to stderr
    Returns:
        ``LgpVerdict``
    """
    if L.n < M.n + 3:
        raise PreconditionError(
            f'verify_lgp needs rank(L) >= rank(M) + 3, got {L.n} and {M.n}')
    caps = caps or get_caps()
    locally_ok = locally_primitively_representable_everywhere(
        M, L, caps=caps, verbose=verbose).verdict
    G = G or genus_classes(L, caps, verbose)
    report = rep_numbers(M, G, caps, verbose)
    per_class = tuple(c[0] for c in report.per_class)
    holds = (not locally_ok) or all(r > 0 for r in per_class)
    return LgpVerdict(
        locally_ok, minimum(M, caps), linalg.det(L.gram), len(G), per_class,
        report.r, holds)


def ratio_experiment(
        G: GenusPartition,
        t_values: Sequence[int],
        caps: Optional[Caps] = None,
        verbose: bool = False) -> pd.DataFrame:
    """Compare ``r(⟨t⟩, L)`` with the genus average

    Args:
        G: genus of a lattice of rank at least 4
        t_values: positive integers
        caps: resource caps
        verbose: print status to stderr
    Returns:
        ``pd.DataFrame`` with columns ``t``, ``r``, ``r_gen``, ``rel_error``
        and ``skipped``, one row per locally representable ``t``. Rows with
        ``r_gen = 0`` are kept with ``skipped`` set and no error.
    """
    t0 = time()
    caps = caps or get_caps()
    if G.base.n < 4:
        raise PreconditionError('ratio_experiment needs rank at least 4')
    columns = ['t', 'r', 'r_gen', 'rel_error', 'skipped']
    t_values = [int(t) for t in t_values]
    if any(t < 1 for t in t_values):
        raise ValueError('t values must be positive')
    if not t_values:
        return pd.DataFrame(columns=columns)

    bound = max(t_values)
    counts = Parallel(n_jobs=caps.n_jobs)(
        delayed(representation_counts)(c.lattice, bound, True, caps)
        for c in G.classes)

    rows = []
    for t in t_values:
        M = QuadLattice([[t]])
        if not locally_primitively_representable_everywhere(
                M, G.base, caps=caps).verdict:
            continue
        r_gen = _weighted_average([c[t] for c in counts], G, range(len(G)))
        r = counts[G.base_index][t]
        if r_gen == 0:
            rows.append((t, r, r_gen, None, True))
        else:
            rows.append((t, r, r_gen, abs(Fraction(r) / r_gen - 1), False))

    if verbose:
        msg = f"""\
        ratio_experiment: {len(rows)} of {len(t_values)} values locally
        representable
        """
        _report(msg, t0)
    return pd.DataFrame(rows, columns=columns)
