import json
import pkg_resources as pkg

from pathlib import Path
from typing import List

from .lattice import QuadLattice


def library_names() -> List[str]:
    """Names of the lattices shipped with the package"""
    path = Path(pkg.resource_filename('qlat', 'metadata/lattices'))
    return sorted(p.stem for p in path.glob('*.json'))


def lattice_library(name: str) -> QuadLattice:
    """Load a named lattice

    Args:
        name:

            Name of a shipped lattice, for example

            - ``i1`` … ``i5`` (sums of squares)
            - ``one``, ``two``, ``three`` (unary forms ``⟨t⟩``)
            - ``kitaoka`` (``x² + y² + 25z² + 25w²``)
            - ``binary5`` (``x² + 5y²``)
            - ``a2``, ``d4`` (root lattices)

    Returns:
        ``QuadLattice``
    Examples:

        .. code-block:: python

            >>> from qlat import lattice_library
            >>> lattice_library('kitaoka').gram
            ((2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 50, 0), (0, 0, 0, 50))
    """
    path = pkg.resource_filename('qlat', f'metadata/lattices/{name}.json')

    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError:
        raise KeyError(f'No shipped lattice named {name!r}')

    return QuadLattice.from_json(data)
