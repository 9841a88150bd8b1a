"""End-to-end checks on the classical examples; these take minutes"""
import pytest

from fractions import Fraction
from sympy import divisors

from qlat import linalg
from qlat.corpus import gen_corpus
from qlat.genus import genus_classes, oracle_genus, spin_partition
from qlat.lattice import QuadLattice, isometric
from qlat.library import lattice_library
from qlat.localrep import locally_primitively_representable_everywhere
from qlat.padic import PolySystem, newton_lift
from qlat.represent import (
    brute_force_count, ratio_experiment, rep_numbers, representation_counts,
    verify_lgp)


def jacobi_four_squares(t):
    return 8 * sum(d for d in divisors(t) if d % 4)


def average(values, G, members):
    weights = [Fraction(1, G.classes[i].aut_order) for i in members]
    return sum(values[i] * w for i, w in zip(members, weights)) / sum(weights)


def matched(reps, others):
    return len(reps) == len(others) and all(
        sum(1 for B in others if isometric(A, B) is not None) == 1
        for A in reps)


@pytest.fixture(scope='module')
def kitaoka():
    L = lattice_library('kitaoka')
    return L, spin_partition(genus_classes(L))


@pytest.fixture(scope='module')
def two_blocks():
    return spin_partition(genus_classes(QuadLattice.diagonal(1, 1, 16, 16)))


@pytest.mark.slow
class TestSumsOfFourSquares(object):
    def test_counts(self):
        L = QuadLattice.identity(4)
        counts = representation_counts(L, 50)
        for t in range(1, 51):
            assert counts[t] == jacobi_four_squares(t)
            assert counts[t] == brute_force_count(t, L)


@pytest.mark.slow
class TestKitaoka(object):
    def test_exception(self, kitaoka):
        L, G = kitaoka
        verdict = verify_lgp(QuadLattice([[3]]), L, G)
        assert verdict.locally_ok
        assert verdict.base_r == 0
        assert not verdict.holds
        assert any(r > 0 for r in verdict.per_class_r)

    def test_ratio(self, kitaoka):
        _, G = kitaoka
        df = ratio_experiment(G, [1, 2, 3])
        row = df[df['t'] == 3].iloc[0]
        assert row['r'] == 0
        assert row['r_gen'] > 0
        assert row['rel_error'] == 1

    @pytest.mark.parametrize('t', range(1, 7))
    def test_spinor_average(self, kitaoka, t):
        _, G = kitaoka
        report = rep_numbers(QuadLattice([[t]]), G)
        assert report.r_spn == report.r_gen
        assert sum(Fraction(1, c.aut_order) for c in G.classes) == G.omega_gen


@pytest.mark.slow
class TestSpinorBlocks(object):
    def test_block_count(self, two_blocks):
        assert len(two_blocks) == 5
        assert len(two_blocks.spin_blocks) == 2

    def test_block_averages(self, two_blocks):
        G = two_blocks
        counts = [representation_counts(c.lattice, 200, primitive=True)
                  for c in G.classes]
        for t in range(1, 201):
            r_gen = average([x[t] for x in counts], G, range(len(G)))
            for block in G.spin_blocks:
                assert average([x[t] for x in counts], G, block) == r_gen

    @pytest.mark.parametrize('t', [1, 2, 5, 17, 32])
    def test_rep_numbers(self, two_blocks, t):
        report = rep_numbers(QuadLattice([[t]]), two_blocks)
        assert report.r_spn == report.r_gen
        assert all(x == report.r_gen for x in report.r_spn_blocks)


@pytest.mark.slow
class TestGenusOracle(object):
    @pytest.fixture(scope='class')
    def lattices(self):
        corpus = gen_corpus(seed=5, m=1, n=4, det_bound=5000, count=10)
        return [QuadLattice.identity(2)] + [x.L for x in corpus]

    def test_small_determinants(self, lattices):
        assert len(lattices) == 11
        for L in lattices:
            assert linalg.det(L.gram) <= 5000
            G = genus_classes(L)
            oracle = oracle_genus(L)
            assert len(G) == len(oracle)
            assert matched([c.lattice for c in G.classes], oracle)


@pytest.mark.slow
class TestCorpus(object):
    def test_local_verdicts_agree(self):
        for x in gen_corpus(seed=7, m=1, n=4, det_bound=400, count=4):
            verdict = verify_lgp(x.M, x.L)
            assert verdict.locally_ok == x.locally_ok
            assert verdict.detE_L == x.detE_L

    def test_large_targets(self):
        instances = gen_corpus(seed=11, m=1, n=4, det_bound=400, count=100)
        assert len(instances) == 100
        for x in instances:
            t = x.M.coeffs[0][0]
            if x.locally_ok and t >= x.detE_L:
                assert verify_lgp(x.M, x.L).holds

    def test_relative_error_trend(self, kitaoka):
        _, G = kitaoka
        df = ratio_experiment(G, range(3, 320, 8))
        df = df[~df['skipped'].astype(bool)]
        low, high = df['t'].quantile(0.25), df['t'].quantile(0.75)
        bottom = max(df[df['t'] <= low]['rel_error'])
        top = max(df[df['t'] >= high]['rel_error'])
        assert bottom >= 1
        assert top <= bottom


class TestKitaokaLocal(object):
    @pytest.mark.parametrize('k', range(5))
    def test_locally_represented(self, k):
        L = lattice_library('kitaoka')
        M = QuadLattice([[3 * 2 ** k]])
        assert locally_primitively_representable_everywhere(
            M, L, primitive=False).verdict
        assert representation_counts(L, 3 * 2 ** k)[3 * 2 ** k] == 0

    @pytest.mark.parametrize('k', range(3))
    def test_locally_primitively_represented(self, k):
        L = lattice_library('kitaoka')
        assert locally_primitively_representable_everywhere(
            QuadLattice([[3 * 2 ** k]]), L).verdict


class TestNewtonPrecision(object):
    def test_square_root_of_two(self):
        f = PolySystem.from_strings(['x**2 - 2'], ['x'])
        for e in (1, 10, 50):
            x, = newton_lift(f, [3], 7, e)
            assert (x * x - 2) % 7 ** e == 0


@pytest.mark.slow
class TestGenusWeights(object):
    @pytest.mark.parametrize('name', ['i2', 'i3', 'i4', 'kitaoka'])
    def test_probability_measure(self, name):
        G = genus_classes(lattice_library(name))
        assert sum(1 / (G.omega_gen * c.aut_order) for c in G.classes) == 1
