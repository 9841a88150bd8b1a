import pytest

from qlat.lattice import QuadLattice
from qlat.library import lattice_library
from qlat.localrep import (
    check_good_primes, count_solutions_mod,
    is_locally_primitively_representable,
    locally_primitively_representable_everywhere, required_precision)
from qlat.represent import representation_counts
from qlat.utils import Caps, ResourceError


def unary(t):
    return QuadLattice([[t]])


class TestCountSolutionsMod(object):
    @pytest.mark.parametrize(
        't,count',
        [(1, 2),
         (2, 0)]) # yapf: disable
    def test_unary(self, t, count):
        assert count_solutions_mod(unary(t), unary(1), 3, 1) == count

    def test_sum_of_two_squares(self):
        # x² + y² ≡ 1 mod 5 has p - (-1/p) = 4 solutions
        assert count_solutions_mod(unary(1), QuadLattice.identity(2), 5, 1) \
            == 4

    def test_zero_form_rejected(self):
        with pytest.raises(ValueError):
            count_solutions_mod(unary(0), unary(1), 3, 1)

    def test_cap(self):
        with pytest.raises(ResourceError):
            count_solutions_mod(
                unary(1), QuadLattice.identity(4), 7, 2, Caps(modpe=100))


class TestLocalRepresentability(object):
    def test_kitaoka_at_two(self):
        cert = is_locally_primitively_representable(
            unary(3), lattice_library('kitaoka'), 2)
        assert cert.verdict
        assert cert.liftable
        assert cert.witness is not None

    def test_witness(self):
        cert = is_locally_primitively_representable(
            unary(5), QuadLattice.identity(3), 5)
        assert cert.verdict
        assert cert.witness == ((0,), (1,), (2,))
        assert cert.e == 1

    def test_identity_witness(self):
        L = lattice_library('d4')
        cert = is_locally_primitively_representable(L, L, 2)
        assert cert.verdict
        assert cert.witness == tuple(
            tuple(int(i == j) for j in range(4)) for i in range(4))

    def test_seven_not_three_squares(self):
        cert = is_locally_primitively_representable(
            unary(7), QuadLattice.identity(3), 2)
        assert not cert.verdict
        assert cert.witness is None
        assert cert.e <= 4

    @pytest.mark.parametrize('primitive', [True, False])
    def test_seven_not_three_squares_at_all(self, primitive):
        cert = is_locally_primitively_representable(
            unary(28), QuadLattice.identity(3), 2, primitive=primitive)
        assert not cert.verdict

    def test_primitive_vs_plain(self):
        # 8 = 2² + 2² is a representation but never a primitive one 2-adically
        L = QuadLattice.identity(4)
        assert is_locally_primitively_representable(
            unary(8), L, 2, primitive=False).verdict
        assert not is_locally_primitively_representable(
            unary(8), L, 2, primitive=True).verdict

    def test_witness_is_solution(self):
        L = lattice_library('kitaoka')
        cert = is_locally_primitively_representable(unary(6), L, 5)
        q = 5 ** cert.e
        x = [row[0] for row in cert.witness]
        assert (L.value(x) - 6) % q == 0

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            is_locally_primitively_representable(
                QuadLattice.identity(3), unary(1), 2)

    def test_required_precision(self):
        # ord_2(4 · 16 · 2) + 3
        assert required_precision(unary(1), QuadLattice.identity(4), 2) == 10


class TestEverywhere(object):
    def test_kitaoka(self):
        report = locally_primitively_representable_everywhere(
            unary(3), lattice_library('kitaoka'))
        assert report.verdict
        assert [c.p for c in report.certificates] == [2, 3, 5]

    def test_sum_of_four_squares(self):
        assert locally_primitively_representable_everywhere(
            unary(1), QuadLattice.identity(4)).verdict

    def test_seven(self):
        report = locally_primitively_representable_everywhere(
            unary(7), QuadLattice.identity(3))
        assert not report.verdict
        failing = [c.p for c in report.certificates if not c.verdict]
        assert failing == [2]

    def test_equal_rank_determinants(self):
        L = QuadLattice.identity(2)
        assert not locally_primitively_representable_everywhere(
            QuadLattice.diagonal(1, 2), L).verdict
        assert locally_primitively_representable_everywhere(
            QuadLattice([[1, 0], [1]]), L).verdict

    @pytest.mark.parametrize('name', ['i3', 'binary5', 'kitaoka'])
    def test_global_representation_is_local(self, name):
        L = lattice_library(name)
        primitive = representation_counts(L, 30, primitive=True)
        counts = representation_counts(L, 30)
        for t in range(1, 31):
            if primitive[t]:
                assert locally_primitively_representable_everywhere(
                    unary(t), L).verdict
            if counts[t]:
                assert locally_primitively_representable_everywhere(
                    unary(t), L, primitive=False).verdict

    def test_good_primes(self):
        verdicts = check_good_primes(
            unary(3), lattice_library('kitaoka'), count=4, seed=1)
        assert len(verdicts) == 4
        assert all(p not in (2, 3, 5) for p in verdicts)
        assert all(verdicts.values())
