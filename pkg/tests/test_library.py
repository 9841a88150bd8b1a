import pytest

from qlat.lattice import QuadLattice
from qlat.library import lattice_library, library_names


class TestLibrary(object):
    def test_names(self):
        names = library_names()
        for name in ['one', 'two', 'three', 'i1', 'i5', 'kitaoka', 'binary5',
                     'a2', 'd4']:
            assert name in names
        assert names == sorted(names)

    @pytest.mark.parametrize('name', library_names())
    def test_loads(self, name):
        assert isinstance(lattice_library(name), QuadLattice)

    def test_kitaoka(self):
        assert lattice_library('kitaoka').gram == (
            (2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 50, 0), (0, 0, 0, 50))

    @pytest.mark.parametrize(
        'name,n',
        [('one', 1),
         ('i3', 3),
         ('d4', 4)]) # yapf: disable
    def test_rank(self, name, n):
        assert lattice_library(name).n == n

    def test_sums_of_squares(self):
        assert lattice_library('i4') == QuadLattice.identity(4)
        assert lattice_library('three') == QuadLattice([[3]])

    def test_missing(self):
        with pytest.raises(KeyError):
            lattice_library('e8')
