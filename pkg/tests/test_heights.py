import pytest

from decimal import Decimal
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from qlat import linalg
from qlat.heights import (
    content, kernel_basis_integral, lie_height, lie_so, plucker_vector,
    stabilizer_algebra, stabilizer_height, subspace_height)
from qlat.lattice import QuadLattice
from qlat.library import lattice_library


class TestContent(object):
    @pytest.mark.parametrize(
        'w,squared',
        [([1, 0, 0], 1),
         ([6, 0], 1),
         (['1/2', 1], 5),
         ([Fraction(2, 3), Fraction(4, 3)], 5)]) # yapf: disable
    def test_values(self, w, squared):
        assert content(w).squared == squared

    def test_product_formula(self):
        report = content(['1/2', 1])
        assert report.basis == ((1, 2),)
        assert report.finite == 2
        assert report.archimedean_squared == Fraction(5, 4)
        assert report.finite ** 2 * report.archimedean_squared \
            == report.squared

    @settings(max_examples=50, deadline=None)
    @given(w=st.lists(st.integers(-50, 50), min_size=2, max_size=4),
           scale=st.fractions(min_value=Fraction(1, 100),
                              max_value=100).filter(lambda x: x != 0))
    def test_scaling_invariance(self, w, scale):
        if not any(w):
            return
        assert content([scale * x for x in w]).squared == content(w).squared

    def test_zero(self):
        with pytest.raises(ValueError):
            content([0, 0])

    def test_decimal(self):
        assert content(['1/2', 1]).decimal.quantize(Decimal('0.0001')) \
            == Decimal('2.2361')


class TestKernelBasis(object):
    @pytest.mark.parametrize(
        'A,basis',
        [([[1, 1]], ((1, -1),)),
         ([[2, 4]], ((2, -1),))]) # yapf: disable
    def test_values(self, A, basis):
        assert kernel_basis_integral(A).vectors == basis

    @pytest.mark.parametrize(
        'A',
        [[[1, 0], [0, 1]],
         [[1, 2], [2, 4], [0, 1]],
         [[1, 2, 3], [2, 4, 6]]]) # yapf: disable
    def test_precondition(self, A):
        with pytest.raises(ValueError):
            kernel_basis_integral(A)

    def test_saturated(self):
        K = kernel_basis_integral([[1, 1, 1, 1], [0, 2, 4, 6]])
        assert len(K.vectors) == 2
        assert linalg.is_primitive(linalg.transpose(K.vectors))
        product = 1
        for v in K.vectors:
            product *= sum(x * x for x in v)
        assert K.height_product_squared == product


class TestSubspaceHeight(object):
    def test_empty(self):
        report = subspace_height([])
        assert report.squared == 1
        assert report.dimension == 0

    def test_line(self):
        assert subspace_height([[2, 4]]).squared == 5

    def test_plucker(self):
        B = [[1, 0, 1], [0, 2, 2]]
        v = plucker_vector(B)
        assert subspace_height(B).squared == sum(x * x for x in v)

    def test_dependent_rows(self):
        with pytest.raises(ValueError):
            subspace_height([[1, 2], [2, 4]])


class TestLieSO(object):
    @pytest.mark.parametrize(
        'n,squared',
        [(2, 2),
         (3, 8),
         (4, 64)]) # yapf: disable
    def test_sums_of_squares(self, n, squared):
        Q = QuadLattice.identity(n)
        assert len(lie_so(Q)) == n * (n - 1) // 2
        assert lie_height(Q).squared == squared

    def test_rank_one(self):
        assert lie_so(QuadLattice([[3]])) == []
        assert lie_height(QuadLattice([[3]])).squared == 1

    @pytest.mark.parametrize('name', ['a2', 'binary5', 'kitaoka', 'd4'])
    def test_annihilates_form(self, name):
        Q = lattice_library(name)
        E = Q.gram
        for X in lie_so(Q):
            XE = linalg.matmul(X, E)
            assert XE == tuple(
                tuple(-x for x in row) for row in linalg.transpose(XE))


class TestStabilizer(object):
    def test_line(self):
        Q = QuadLattice.identity(3)
        assert len(stabilizer_algebra(Q, [[1, 0, 0]])) == 1
        assert stabilizer_height(Q, [[1, 0, 0]]).squared == 2

    def test_full_space(self):
        report = stabilizer_height(QuadLattice.identity(3), linalg.identity(3))
        assert report.squared == 1
        assert report.dimension == 0

    def test_zero_subspace(self):
        Q = QuadLattice.identity(4)
        assert stabilizer_height(Q, []).squared == lie_height(Q).squared == 64

    def test_kills_subspace(self):
        Q = lattice_library('kitaoka')
        W = [[1, 1, 0, 0]]
        for X in stabilizer_algebra(Q, W):
            assert all(sum(X[a][b] * W[0][b] for b in range(4)) == 0
                       for a in range(4))

    @pytest.mark.parametrize(
        'W', [[[1, 0]], [[1, 0, 0], [2, 0, 0]]])
    def test_bad_subspace(self, W):
        with pytest.raises(ValueError):
            stabilizer_algebra(QuadLattice.identity(3), W)
