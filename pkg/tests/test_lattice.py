import math

import numpy as np
import pytest

from lrfanout.exceptions import CapacityError, GeometryError, StrategyError
from lrfanout.lattice import assign_qubits, build_lattice, distance


def test_build_1d_chain():
    lay = build_lattice(1, [4])
    assert lay.n_sites == 4
    assert [int(c) for c in lay.coords[:, 0]] == [0, 1, 2, 3]
    assert lay.diameter() == 3.0


def test_build_2d_square():
    lay = build_lattice(2, [2, 2])
    assert lay.n_sites == 4
    assert lay.diameter() == pytest.approx(math.sqrt(2), abs=1e-15)


def test_build_3d_cube():
    lay = build_lattice(3, [2, 2, 2])
    assert lay.n_sites == 8
    assert lay.diameter() == pytest.approx(math.sqrt(3), abs=1e-15)


def test_row_major_ordering():
    lay = build_lattice(2, [2, 3])
    expected = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    assert [tuple(c) for c in lay.coords] == expected


@pytest.mark.parametrize("extents", [[0], [-1], [4, 0]])
def test_bad_extents(extents):
    with pytest.raises(GeometryError):
        build_lattice(len(extents), extents)


def test_dimension_out_of_range():
    with pytest.raises(GeometryError):
        build_lattice(4, [2, 2, 2, 2])


def test_site_cap():
    with pytest.raises(CapacityError):
        build_lattice(1, [100], site_cap=64)


def test_distance_values():
    lay = build_lattice(1, [4])
    assert distance(lay, 0, 3) == 3.0
    assert distance(lay, 2, 2) == 0.0
    lay2 = build_lattice(2, [2, 2])
    assert distance(lay2, 0, 3) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_distance_index_error():
    lay = build_lattice(1, [4])
    with pytest.raises(IndexError):
        distance(lay, 0, 4)
    with pytest.raises(IndexError):
        distance(lay, -1, 0)


@pytest.mark.parametrize(
    "dim,extents",
    [(1, [64]), (2, [8, 8]), (3, [4, 4, 4])],
)
def test_metric_axioms_exhaustive(dim, extents):
    lay = build_lattice(dim, extents)
    coords = lay.coords.astype(np.float64)
    diff = coords[:, None, :] - coords[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    assert np.array_equal(d, d.T)
    assert np.all(d[~np.eye(lay.n_sites, dtype=bool)] > 0)
    # triangle inequality over all ordered triples
    lhs = d[:, None, :]  # d(i, k)
    rhs = d[:, :, None] + d[None, :, :]  # d(i, j) + d(j, k)
    assert np.all(lhs <= rhs + 1e-9)


def test_canonical_assignment_order():
    lay = build_lattice(1, [4])
    asgn = assign_qubits(lay, 4)
    assert [asgn.data_site(k) for k in range(4)] == [0, 1, 2, 3]
    assert not asgn.has_ancillas


def test_interleaved_order_n4():
    lay = build_lattice(1, [4])
    asgn = assign_qubits(lay, 4, strategy="interleaved")
    # chain reads q1, q4, q2, q3
    chain = sorted(range(4), key=asgn.data_site)
    assert chain == [0, 3, 1, 2]


def test_interleaved_odd_n():
    lay = build_lattice(1, [5])
    asgn = assign_qubits(lay, 5, strategy="interleaved")
    chain = sorted(range(5), key=asgn.data_site)
    assert chain == [0, 4, 1, 3, 2]


@pytest.mark.parametrize("n", [2, 3, 17, 256, 1024])
def test_interleaved_is_permutation(n):
    lay = build_lattice(1, [n])
    asgn = assign_qubits(lay, n, strategy="interleaved")
    assert sorted(int(s) for s in asgn.data_sites) == list(range(n))


def test_fanout_assignment_1d():
    lay = build_lattice(1, [8])
    asgn = assign_qubits(lay, 4, ancillas=True)
    assert [asgn.data_site(k) for k in range(4)] == [0, 2, 4, 6]
    assert [asgn.ancilla_site(k) for k in range(4)] == [1, 3, 5, 7]
    dists = [lay.distance(asgn.data_site(k), asgn.ancilla_site(k)) for k in range(4)]
    assert min(dists) == max(dists) == 1.0


@pytest.mark.parametrize("dim,extents,n", [(2, [4, 3], 6), (3, [4, 2, 2], 8)])
def test_fanout_assignment_higher_dim(dim, extents, n):
    lay = build_lattice(dim, extents)
    asgn = assign_qubits(lay, n, ancillas=True)
    dists = [lay.distance(asgn.data_site(k), asgn.ancilla_site(k)) for k in range(n)]
    assert min(dists) == max(dists) == 1.0
    roles = asgn.role_map()
    assert len(roles) == 2 * n


def test_fanout_needs_even_first_axis():
    lay = build_lattice(1, [9])
    with pytest.raises(GeometryError):
        assign_qubits(lay, 4, ancillas=True)


def test_capacity_errors():
    lay = build_lattice(1, [4])
    with pytest.raises(CapacityError):
        assign_qubits(lay, 5)
    with pytest.raises(CapacityError):
        assign_qubits(lay, 3, ancillas=True)


def test_interleaved_unsupported_cases():
    lay2 = build_lattice(2, [4, 4])
    with pytest.raises(StrategyError):
        assign_qubits(lay2, 4, strategy="interleaved")
    lay1 = build_lattice(1, [8])
    with pytest.raises(StrategyError):
        assign_qubits(lay1, 4, strategy="interleaved", ancillas=True)
    with pytest.raises(StrategyError):
        assign_qubits(lay1, 4, strategy="diagonal")
