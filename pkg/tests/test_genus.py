import pytest

import numpy as np

from math import prod
from fractions import Fraction
from sympy import factorint

from qlat import genus, linalg
from qlat.genus import (
    GenusPartition, genus_classes, neighbor_primes, neighbors, oracle_genus,
    reduced_forms, same_genus, spin_partition, spinor_norm)
from qlat.lattice import QuadLattice, isometric, random_unimodular
from qlat.library import lattice_library
from qlat.utils import Caps, PreconditionError, ResourceError, UnresolvedError


def squarefree_part(x):
    return prod(p for p, k in factorint(x).items() if k % 2)


def matched(reps, others):
    """Every lattice in ``reps`` is isometric to exactly one in ``others``"""
    return len(reps) == len(others) and all(
        sum(1 for B in others if isometric(A, B) is not None) == 1
        for A in reps)


class TestNeighbors(object):
    def test_primes(self):
        assert neighbor_primes(10000) == [3, 7]
        assert neighbor_primes(16) == [3, 5]
        assert neighbor_primes(23) == [3, 5]

    def test_class_number_one(self):
        L = QuadLattice.identity(4)
        found = neighbors(L, 3)
        assert len(found) == 1
        assert isometric(found[0], L) is not None

    def test_rank_one(self):
        assert neighbors(QuadLattice([[1]]), 3) == []

    @pytest.mark.parametrize('p', [2, 4, 5])
    def test_bad_prime(self, p):
        # 5 divides detE = 10000
        with pytest.raises(ValueError):
            neighbors(lattice_library('kitaoka'), p)

    def test_kitaoka_leaves_class(self):
        L = lattice_library('kitaoka')
        found = neighbors(L, 3)
        assert any(isometric(N, L) is None for N in found)
        assert all(same_genus(L, N) for N in found)
        assert all(linalg.det(N.gram) == 10000 for N in found)


class TestSameGenus(object):
    def test_binary_forms_of_discriminant_20(self):
        assert not same_genus(
            lattice_library('binary5'), QuadLattice([[2, 2], [3]]))

    def test_binary_forms_of_discriminant_23(self):
        assert same_genus(
            QuadLattice([[1, 1], [6]]), QuadLattice([[2, 1], [3]]))

    def test_base_change(self):
        L = lattice_library('kitaoka')
        assert same_genus(L, L.transform([[1, 1, 0, 0], [0, 1, 0, 0],
                                          [0, 0, 1, 2], [0, 0, 0, 1]]))

    def test_rank_and_det(self):
        assert not same_genus(QuadLattice.identity(2), QuadLattice.identity(3))
        assert not same_genus(
            QuadLattice.identity(2), QuadLattice.diagonal(1, 2))


class TestSpinorNorm(object):
    def test_identity(self):
        assert spinor_norm(linalg.identity(3), QuadLattice.identity(3)) == 1

    def test_swap(self):
        swap = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
        assert spinor_norm(swap, QuadLattice.identity(3)) == 2

    def test_sign_change(self):
        sigma = [[-1, 0, 0], [0, 1, 0], [0, 0, 1]]
        assert spinor_norm(sigma, QuadLattice.diagonal(3, 1, 1)) == 3

    def test_retry_after_failed_factorization(self, monkeypatch):
        forms = []
        factorize = genus._reflection_norm

        def fail_once(S, E):
            forms.append(E)
            if len(forms) == 1:
                raise UnresolvedError('Reflection vector is isotropic')
            return factorize(S, E)

        monkeypatch.setattr(genus, '_reflection_norm', fail_once)
        swap = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
        assert spinor_norm(swap, QuadLattice.identity(3), seed=5) == 2
        assert len(forms) == 2
        assert linalg.det(forms[1]) == 8

    def test_retries_exhausted(self, monkeypatch):
        def always_fail(S, E):
            raise UnresolvedError('Reflection vector is isotropic')

        monkeypatch.setattr(genus, '_reflection_norm', always_fail)
        with pytest.raises(UnresolvedError):
            spinor_norm([[0, 1, 0], [1, 0, 0], [0, 0, 1]],
                        QuadLattice.identity(3), Caps(spinor_retries=2))

    @pytest.mark.parametrize('seed', [0, 1, 7])
    def test_conjugation_invariant(self, seed):
        L = QuadLattice.diagonal(3, 1, 1)
        U = random_unimodular(3, np.random.default_rng(seed)).matrix
        sigma = [[-1, 0, 0], [0, 1, 0], [0, 0, 1]]
        conjugate = linalg.matmul(linalg.inverse_unimodular(U), sigma, U)
        assert spinor_norm(conjugate, L.transform(U)) == 3

    def test_not_an_isometry(self):
        with pytest.raises(ValueError):
            spinor_norm([[1, 1, 0], [0, 1, 0], [0, 0, 1]],
                        QuadLattice.identity(3))


class TestGenusClasses(object):
    @pytest.mark.parametrize(
        'name,aut',
        [('i2', 8),
         ('i3', 48),
         ('i4', 384)]) # yapf: disable
    def test_single_class(self, name, aut):
        G = genus_classes(lattice_library(name))
        assert len(G) == 1
        assert G.classes[0].aut_order == aut
        assert G.omega_gen == Fraction(1, aut)

    def test_two_classes(self):
        # x² + xy + 6y² and 2x² + xy + 3y²
        G = genus_classes(QuadLattice([[1, 1], [6]]))
        assert len(G) == 2
        assert [c.minimum for c in G.classes] == [1, 2]
        assert [c.aut_order for c in G.classes] == [4, 2]
        assert G.omega_gen == Fraction(3, 4)
        assert G.base_index == 0
        assert matched([c.lattice for c in G.classes],
                       oracle_genus(G.base))

    def test_base_index(self):
        G = genus_classes(QuadLattice([[2, 1], [3]]))
        assert G.classes[G.base_index].minimum == 2
        assert isometric(G.classes[G.base_index].lattice, G.base) is not None

    def test_class_cap(self):
        with pytest.raises(ResourceError):
            genus_classes(QuadLattice([[1, 1], [6]]), Caps(classes=1))

    def test_rank_one(self):
        with pytest.raises(PreconditionError):
            genus_classes(QuadLattice([[3]]))

    @pytest.mark.parametrize(
        'L',
        [QuadLattice([[1, 1], [6]]),
         QuadLattice([[1, 0, 0], [1, 1], [4]])]) # yapf: disable
    def test_closure_from_every_class(self, L):
        G = genus_classes(L)
        reps = [c.lattice for c in G.classes]
        for R in reps:
            other = genus_classes(R)
            assert other.omega_gen == G.omega_gen
            assert matched([c.lattice for c in other.classes], reps)

    def test_serialization(self):
        G = genus_classes(QuadLattice([[1, 1], [6]]))
        data = G.to_json()
        assert data['omega_gen'] == '3/4'
        assert data['spin_blocks'] is None
        assert len(data['classes']) == 2
        df = G.to_frame()
        assert list(df['aut_order']) == [4, 2]


class TestSpinPartition(object):
    def test_single_class(self):
        G = spin_partition(genus_classes(QuadLattice.identity(3)))
        assert G.spin_blocks == ((0,),)
        assert G.base_block == 0
        assert G.classes[0].spinor_norms == (1, 2)
        assert G.omega_spn == (G.omega_gen,)

    def test_rank_two(self):
        with pytest.raises(PreconditionError):
            spin_partition(genus_classes(QuadLattice.identity(2)))

    def test_spinor_norms_form_subgroups(self):
        G = spin_partition(
            genus_classes(QuadLattice([[1, 0, 0], [1, 1], [4]])))
        for c in G.classes:
            norms = set(c.spinor_norms)
            assert 1 in norms
            assert all(squarefree_part(a * b) in norms
                       for a in norms for b in norms)

    def test_partition_identity(self):
        L = QuadLattice([[1, 0, 0], [1, 1], [4]])
        G = spin_partition(genus_classes(L))
        members = sorted(i for b in G.spin_blocks for i in b)
        assert members == list(range(len(G)))
        assert sum(G.omega_spn) == G.omega_gen
        assert isinstance(G, GenusPartition)


class TestOracle(object):
    def test_reduced_forms_binary(self):
        assert sorted(reduced_forms(2, 23)) == [((2, 1), (1, 12)),
                                                ((4, 1), (1, 6))]

    def test_rank_limit(self):
        with pytest.raises(ValueError):
            reduced_forms(6, 64)

    @pytest.mark.parametrize('name', ['i3', 'i4', 'a2', 'd4'])
    def test_single_class_genera(self, name):
        L = lattice_library(name)
        assert matched(oracle_genus(L), [L])

    def test_ternary(self):
        L = QuadLattice([[1, 0, 0], [1, 1], [4]])
        G = genus_classes(L)
        assert matched([c.lattice for c in G.classes], oracle_genus(L))


@pytest.mark.slow
class TestKitaokaGenus(object):
    @pytest.fixture(scope='class')
    def G(self):
        return spin_partition(genus_classes(lattice_library('kitaoka')))

    def test_several_classes(self, G):
        assert len(G) >= 2

    def test_oracle(self, G):
        assert matched([c.lattice for c in G.classes],
                       oracle_genus(G.base))

    def test_blocks(self, G):
        assert sum(G.omega_spn) == G.omega_gen
        members = sorted(i for b in G.spin_blocks for i in b)
        assert members == list(range(len(G)))
