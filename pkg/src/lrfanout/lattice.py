"""D-dimensional qubit lattices, distances, and data/ancilla placements.

Sites live on an integer grid with unit spacing and are ordered row-major
(first coordinate slowest).  Distances are Euclidean; squared distances are
exact int64 values, which keeps tie-breaking in the planners deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import CapacityError, GeometryError, StrategyError

DEFAULT_SITE_CAP = 1 << 22


@dataclass(frozen=True)
class LatticeLayout:
    """Immutable site geometry: integer coordinates on a unit-spaced grid."""

    dimension: int
    extents: tuple[int, ...]
    coords: np.ndarray = field(repr=False)  # (n_sites, dimension) int64

    @property
    def n_sites(self) -> int:
        return self.coords.shape[0]

    def sqdist(self, i: int, j: int) -> int:
        """Exact squared Euclidean distance between sites i and j."""
        d = self.coords[i] - self.coords[j]
        return int(np.dot(d, d))

    def distance(self, i: int, j: int) -> float:
        return math.sqrt(self.sqdist(i, j))

    def diameter(self) -> float:
        """Largest pairwise distance (opposite grid corners)."""
        span = np.asarray(self.extents, dtype=np.int64) - 1
        return math.sqrt(float(np.dot(span, span)))

    def max_sqdist(self) -> int:
        span = np.asarray(self.extents, dtype=np.int64) - 1
        return int(np.dot(span, span))


def build_lattice(dimension: int, extents, site_cap: int = DEFAULT_SITE_CAP) -> LatticeLayout:
    """Build a row-major D-dimensional lattice with unit spacing.

    Raises GeometryError for bad dimensions/extents and CapacityError when
    the total site count exceeds ``site_cap``.
    """
    if not 1 <= dimension <= 3:
        raise GeometryError(f"dimension must be 1, 2 or 3, got {dimension}")
    extents = tuple(int(e) for e in extents)
    if len(extents) != dimension:
        raise GeometryError(f"expected {dimension} extents, got {len(extents)}")
    if any(e <= 0 for e in extents):
        raise GeometryError(f"extents must be positive, got {extents}")
    n_sites = math.prod(extents)
    if n_sites > site_cap:
        raise CapacityError(f"{n_sites} sites exceeds cap {site_cap}")
    axes = [np.arange(e, dtype=np.int64) for e in extents]
    grids = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([g.reshape(-1) for g in grids], axis=1)
    coords.setflags(write=False)
    return LatticeLayout(dimension=dimension, extents=extents, coords=coords)


def distance(layout: LatticeLayout, i: int, j: int) -> float:
    """Euclidean distance between two sites; raises IndexError when out of range."""
    n = layout.n_sites
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"site index out of range for {n}-site layout")
    return layout.distance(i, j)


@dataclass(frozen=True)
class QubitAssignment:
    """Mapping of logical qubits (0-based) onto lattice sites.

    ``data_sites[k]`` is the site of logical qubit k+1; for fanout layouts
    ``ancilla_sites[k]`` is the dedicated ancilla adjacent to it.
    """

    layout: LatticeLayout
    n: int
    strategy: str
    data_sites: np.ndarray = field(repr=False)
    ancilla_sites: np.ndarray | None = field(default=None, repr=False)

    @property
    def has_ancillas(self) -> bool:
        return self.ancilla_sites is not None

    def data_site(self, k: int) -> int:
        return int(self.data_sites[k])

    def ancilla_site(self, k: int) -> int:
        if self.ancilla_sites is None:
            raise StrategyError("assignment has no ancillae")
        return int(self.ancilla_sites[k])

    def role_map(self) -> dict[int, tuple[str, int]]:
        """site -> (role, logical index); sites absent from the map are unused."""
        roles: dict[int, tuple[str, int]] = {}
        for k, s in enumerate(self.data_sites):
            roles[int(s)] = ("data", k)
        if self.ancilla_sites is not None:
            for k, s in enumerate(self.ancilla_sites):
                roles[int(s)] = ("ancilla", k)
        return roles


def _interleaved_order(n: int) -> np.ndarray:
    """Chain position p (0-based) -> logical qubit (0-based).

    Position 2k-1 (1-based) holds qubit k and position 2k holds qubit
    n+1-k, i.e. the second half of the register is woven in reverse order
    between the qubits of the first half.
    """
    order = np.empty(n, dtype=np.int64)
    for k in range(1, n // 2 + 2):
        p_odd = 2 * k - 1
        if p_odd <= n:
            order[p_odd - 1] = k - 1
        p_even = 2 * k
        if p_even <= n:
            order[p_even - 1] = n - k
    return order


def assign_qubits(
    layout: LatticeLayout,
    n: int,
    strategy: str = "canonical",
    ancillas: bool = False,
) -> QubitAssignment:
    """Place n logical qubits on the layout.

    canonical: qubit k at the k-th data site in row-major order.  With
    ``ancillas=True`` the first axis must have even extent; data qubits sit
    at even first-axis coordinates and each ancilla at the odd neighbour
    (distance exactly 1).
    interleaved: 1D chains without ancillae only.
    """
    if n < 1:
        raise GeometryError(f"need at least one qubit, got n={n}")
    if strategy not in ("canonical", "interleaved"):
        raise StrategyError(f"unknown placement strategy {strategy!r}")
    if strategy == "interleaved":
        if layout.dimension != 1:
            raise StrategyError("interleaved placement is defined for 1D chains only")
        if ancillas:
            raise StrategyError("interleaved placement does not support ancillae")
        if layout.n_sites < n:
            raise CapacityError(f"{layout.n_sites} sites cannot hold {n} qubits")
        positions = _interleaved_order(n)
        data_sites = np.empty(n, dtype=np.int64)
        data_sites[positions] = np.arange(n, dtype=np.int64)
        return QubitAssignment(layout, n, strategy, data_sites)

    if not ancillas:
        if layout.n_sites < n:
            raise CapacityError(f"{layout.n_sites} sites cannot hold {n} qubits")
        data_sites = np.arange(n, dtype=np.int64)
        return QubitAssignment(layout, n, strategy, data_sites)

    if layout.extents[0] % 2 != 0:
        raise GeometryError("fanout layouts need an even extent along the first axis")
    if layout.n_sites < 2 * n:
        raise CapacityError(f"{layout.n_sites} sites cannot hold {n} data + {n} ancilla qubits")
    # Row-major site index advances fastest along the last axis; stepping the
    # first coordinate by one moves the index by the product of the others.
    stride0 = layout.n_sites // layout.extents[0]
    all_sites = np.arange(layout.n_sites, dtype=np.int64)
    first_coord = all_sites // stride0
    data_candidates = all_sites[first_coord % 2 == 0]
    if data_candidates.shape[0] < n:
        raise CapacityError("not enough even-axis sites for the data qubits")
    data_sites = data_candidates[:n]
    ancilla_sites = data_sites + stride0
    return QubitAssignment(layout, n, strategy, data_sites, ancilla_sites)
