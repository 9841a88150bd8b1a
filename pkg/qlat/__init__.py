# -*- coding: utf-8 -*-

__version__ = '0.1.0'

from .utils import (
    Caps, QlatError, ResourceError, PrecisionError, MarginError, NotFoundError,
    UnresolvedError, PreconditionError, get_caps)
from .lattice import (
    QuadLattice, UnimodularChange, discriminant, short_vectors, minimum,
    minkowski_reduce, isometric, automorphisms)
from .localrep import (
    count_solutions_mod, is_locally_primitively_representable,
    locally_primitively_representable_everywhere, check_good_primes)
from .genus import (
    GenusPartition, neighbors, genus_classes, spin_partition, same_genus,
    spinor_norm, oracle_genus)
from .represent import (
    Representation, representations, representation_counts, rep_numbers,
    verify_lgp, ratio_experiment)
from .library import lattice_library, library_names
from . import padic
from . import heights
from .corpus import gen_corpus
