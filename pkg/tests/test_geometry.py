"""Polyline primitives: arclength, nearest point, sidedness, crossings."""

import numpy as np

from oscgauss import geometry


def test_cumulative_arclength_unit_square():
    pts = np.array([0, 1, 1 + 1j, 1j, 0], dtype=complex)
    s = geometry.cumulative_arclength(pts)
    assert np.allclose(s, [0, 1, 2, 3, 4])
    assert geometry.max_segment_length(pts) == 1.0


def test_nearest_on_polyline_exact_cases():
    pts = np.array([0, 2, 2 + 2j], dtype=complex)
    d, s, k, t, proj = geometry.nearest_on_polyline(1 + 1j, pts)
    assert abs(d - 1.0) < 1e-14
    assert abs(s - 1.0) < 1e-14
    assert k == 0 and abs(t - 0.5) < 1e-14
    assert abs(proj - 1.0) < 1e-14
    d, s, k, t, proj = geometry.nearest_on_polyline(3 + 3j, pts)
    assert k == 1 and abs(s - 4.0) < 1e-14
    assert abs(proj - (2 + 2j)) < 1e-14


def test_nearest_on_polyline_matches_brute_force():
    rng = np.random.default_rng(5)
    ts = np.linspace(0, 1, 400)
    pts = ts + 1j * np.sin(3 * ts)
    dense = np.concatenate([np.linspace(pts[i], pts[i + 1], 40, endpoint=False)
                            for i in range(len(pts) - 1)])
    for _ in range(20):
        z = complex(rng.uniform(-0.5, 1.5), rng.uniform(-2, 2))
        d, _, _, _, _ = geometry.nearest_on_polyline(z, pts)
        brute = np.min(np.abs(dense - z))
        assert d <= brute + 1e-9
        assert d >= brute - 5e-3  # dense sampling resolution


def test_side_of_polyline_signs():
    pts = np.array([0, 2], dtype=complex)  # oriented left to right
    assert geometry.side_of_polyline(1 + 1j, pts) == 1
    assert geometry.side_of_polyline(1 - 1j, pts) == -1


def test_segment_polyline_crossings_parity():
    pts = np.array([-1 + 0j, 1 + 0j], dtype=complex)
    assert geometry.segment_polyline_crossings(-0.5 - 1j, -0.5 + 1j, pts) == 1
    assert geometry.segment_polyline_crossings(2 - 1j, 2 + 1j, pts) == 0
    assert geometry.segment_polyline_crossings(-0.5 + 0.5j, 0.5 + 0.5j, pts) == 0


def test_point_in_triangle():
    a, b, c = 0 + 0j, 2 + 0j, 1 + 2j
    assert geometry.point_in_triangle(1 + 0.5j, a, b, c)
    assert not geometry.point_in_triangle(2 + 2j, a, b, c)


def test_as_complex_array_accepts_pairs():
    arr = geometry.as_complex_array([(0.0, 1.0), (2.0, 3.0)])
    assert arr.dtype == complex
    assert arr[0] == 1j and arr[1] == 2 + 3j
