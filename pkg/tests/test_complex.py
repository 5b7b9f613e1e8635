import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelets.complex import (
    ComplexError,
    Geometry,
    SimplicialComplex,
    boundary_1,
    boundary_2,
    delaunay,
    from_simplices,
    hex_complex,
    hex_complex_for_target,
    is_delaunay,
    punch_hole,
    random_complex,
)
from hodgelets.spectral import betti_1


def test_filled_triangle_from_edges_and_triangle(filled_triangle):
    X = from_simplices(3, [{1, 2}, {2, 3}, {1, 3}], [{1, 2, 3}])
    assert X.shape == (3, 3, 1)
    assert X == filled_triangle


def test_closure_adds_missing_edges():
    X = from_simplices(3, [], [(3, 1, 2)])
    assert X.edges == ((1, 2), (1, 3), (2, 3))
    assert X.triangles == ((1, 2, 3),)


def test_out_of_range_vertex():
    with pytest.raises(ComplexError):
        from_simplices(2, [{1, 2}], [{1, 2, 3}])


def test_degenerate_simplex():
    with pytest.raises(ComplexError):
        from_simplices(3, [(2, 2)], [])


def test_boundary_1_single_edge():
    X = from_simplices(2, [(1, 2)])
    assert boundary_1(X).toarray().tolist() == [[-1], [1]]


def test_boundary_1_filled_triangle(filled_triangle):
    B1 = boundary_1(filled_triangle).toarray()
    # columns ordered e12, e13, e23
    cols = {e: B1[:, filled_triangle.edge_index[e]].tolist() for e in filled_triangle.edges}
    assert cols[(1, 2)] == [-1, 1, 0]
    assert cols[(2, 3)] == [0, -1, 1]
    assert cols[(1, 3)] == [-1, 0, 1]
    assert B1.dtype.kind == "i"


def test_boundary_2_filled_triangle(filled_triangle):
    B2 = boundary_2(filled_triangle).toarray()
    idx = filled_triangle.edge_index
    assert B2[[idx[(1, 2)], idx[(2, 3)], idx[(1, 3)]], 0].tolist() == [1, 1, -1]
    assert not (boundary_1(filled_triangle) @ boundary_2(filled_triangle)).toarray().any()


def test_boundary_2_without_triangles(empty_triangle):
    assert boundary_2(empty_triangle).shape == (3, 0)


def test_json_roundtrip(filled_triangle):
    assert SimplicialComplex.from_dict(filled_triangle.to_dict()) == filled_triangle


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.floats(0.1, 0.9), st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_chain_identity_and_column_sums(n, pe, pt, seed):
    X = random_complex(np.random.default_rng(seed), n, pe, pt)
    B1, B2 = boundary_1(X), boundary_2(X)
    assert not (B1 @ B2).toarray().any()
    assert not B1.sum(axis=0).any()
    if X.triangles:
        assert (np.asarray(B2.sum(axis=0)) == 1).all()
    for t in X.triangles:
        for e in itertools.combinations(t, 2):
            assert e in X.edge_index


# -- Delaunay


def test_delaunay_three_points():
    X, G = delaunay([[0, 0], [1, 0], [0, 1]])
    assert X.shape == (3, 3, 1)


def test_delaunay_unit_square_picks_lexicographic_diagonal():
    X, _ = delaunay([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert X.shape == (4, 5, 2)
    assert (1, 3) in X.edge_index and (2, 4) not in X.edge_index


def test_delaunay_square_brute_force_both_diagonals_valid():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    for tris in ([(1, 2, 3), (1, 3, 4)], [(1, 2, 4), (2, 3, 4)]):
        assert is_delaunay(from_simplices(4, [], tris), Geometry(pts))


def test_delaunay_random_disc_euler():
    pts = np.random.default_rng(7).random((40, 2))
    X, G = delaunay(pts)
    assert X.euler_characteristic == 1
    assert is_delaunay(X, G)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 40), st.integers(0, 2**31))
def test_delaunay_empty_circumcircle(n, seed):
    pts = np.random.default_rng(seed).random((n, 2))
    X, G = delaunay(pts)
    assert is_delaunay(X, G)
    assert X.euler_characteristic == 1
    assert X.is_connected()


def test_delaunay_grid_is_deterministic():
    # many co-circular quadruples
    pts = np.array([[x, y] for y in range(4) for x in range(4)], float)
    X1, _ = delaunay(pts)
    X2, _ = delaunay(pts.copy())
    assert X1 == X2 and X1.shape == (16, 33, 18)


@pytest.mark.parametrize(
    "pts", [[[0, 0], [1, 1]], [[0, 0], [1, 1], [2, 2], [3, 3]], [[0, 0], [1, 0], [0, 0]]]
)
def test_delaunay_rejects_degenerate_input(pts):
    with pytest.raises(ComplexError):
        delaunay(pts)


# -- holes


def test_punch_hole_filled_triangle():
    pts = np.array([[0, 0], [1, 0], [0, 1]], float)
    X, G = delaunay(pts)
    Y, H = punch_hole(X, (0.4, 0.4), 1.0, G)
    assert Y.shape == (3, 3, 0)
    assert betti_1(Y) == 1
    assert np.array_equal(H.positions, G.positions)


def test_punch_hole_zero_radius_is_identity():
    X, G = delaunay(np.random.default_rng(1).random((20, 2)))
    Y, H = punch_hole(X, (0.5, 0.5), 0.0, G)
    assert Y == X


def test_punch_hole_interior_of_delaunay():
    X, G = delaunay(np.random.default_rng(7).random((40, 2)))
    Y, H = punch_hole(X, (0.5, 0.5), 0.15, G)
    assert len(Y.triangles) < len(X.triangles)
    assert betti_1(Y) == 1
    assert len(H) == Y.n_nodes


def test_punch_hole_everything_leaves_hull_cycle():
    X, G = delaunay(np.random.default_rng(3).random((15, 2)))
    Y, H = punch_hole(X, (0.5, 0.5), 10.0, G)
    assert len(Y.triangles) == 0
    assert Y.n_nodes == len(Y.edges)  # a single cycle
    assert betti_1(Y) == 1


# -- hexagons


def test_hex_three_mutual_neighbours():
    X, G, meta = hex_complex((-0.5, 2.2, -0.5, 2.0), 1.0, origin=(0.0, 0.0))
    assert X.shape == (3, 3, 1)


def test_hex_meta_geometry():
    X, G, meta = hex_complex((-0.5, 2.2, -0.5, 2.0), 1.0, origin=(0.0, 0.0))
    P = G.positions
    for k, (i, j) in enumerate(X.edges):
        d = P[j - 1] - P[i - 1]
        assert np.isclose(np.linalg.norm(d), np.sqrt(3.0))
        assert np.allclose(meta.normals[k], d / np.linalg.norm(d))
        assert np.allclose(meta.midpoints[k], (P[i - 1] + P[j - 1]) / 2)
    assert np.allclose(meta.lengths, 1.0)


def test_hex_target_counts_near_printed():
    X, G, meta = hex_complex_for_target((-2, 2, -2, 2), 225)
    n0, n1, n2 = X.shape
    assert abs(n0 - 225) <= 22.5 and abs(n1 - 629) <= 62.9 and abs(n2 - 405) <= 40.5
    assert X.euler_characteristic == 1


@settings(max_examples=20, deadline=None)
@given(st.floats(0.15, 1.2))
def test_hex_patch_is_disc(r):
    X, G, meta = hex_complex((-2, 2, -2, 2), r)
    assert X.euler_characteristic == 1
    assert X.is_connected()
    assert not (boundary_1(X) @ boundary_2(X)).toarray().any()


def test_hex_nothing_fits():
    with pytest.raises(ComplexError):
        hex_complex((0.1, 0.2, 0.1, 0.2), 5.0, origin=(0.0, 0.0))
