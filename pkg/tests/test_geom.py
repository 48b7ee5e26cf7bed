import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import Polygon

from axialgen import geom
from axialgen.errors import (
    DegenerateRing,
    GeometryError,
    HoleOutsideOuter,
    NestedHoles,
    OverlappingHoles,
    PointOutsideFreeSpace,
    SelfIntersectingRing,
    ViewpointOutsideFreeSpace,
)

from conftest import isovist_area_sampled, random_interior_points, segment_stays_inside

UNIT_SQUARE = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float)


class TestPrimitives:
    def test_point_rejects_non_finite(self):
        with pytest.raises(GeometryError):
            geom.Point2(float("nan"), 0.0)
        with pytest.raises(GeometryError):
            geom.Point2(0.0, float("inf"))

    def test_segment_rejects_degenerate(self):
        p = geom.Point2(1.0, 2.0)
        with pytest.raises(GeometryError):
            geom.Segment(p, geom.Point2(1.0, 2.0))

    def test_segment_length(self):
        s = geom.Segment(geom.Point2(0, 0), geom.Point2(3, 4))
        assert s.length == 5.0


class TestBuildFreeSpace:
    def test_square_area(self, square):
        assert square.free_area() == pytest.approx(100.0)
        assert square.holes == []

    def test_square_with_hole_area(self):
        space = geom.build_free_space(
            [(0, 0), (10, 0), (10, 10), (0, 10)],
            [[(4, 4), (6, 4), (6, 6), (4, 6)]],
        )
        assert space.free_area() == pytest.approx(96.0)

    def test_hole_outside_outer(self):
        with pytest.raises(HoleOutsideOuter):
            geom.build_free_space(
                [(0, 0), (10, 0), (10, 10), (0, 10)],
                [[(20, 20), (22, 20), (22, 22), (20, 22)]],
            )

    def test_self_intersecting_ring(self):
        with pytest.raises(SelfIntersectingRing):
            geom.build_free_space([(0, 0), (10, 10), (10, 0), (0, 10)])

    def test_degenerate_ring(self):
        with pytest.raises(DegenerateRing):
            geom.build_free_space([(0, 0), (10, 0)])

    def test_overlapping_holes(self):
        with pytest.raises(OverlappingHoles):
            geom.build_free_space(
                [(0, 0), (20, 0), (20, 20), (0, 20)],
                [
                    [(2, 2), (8, 2), (8, 8), (2, 8)],
                    [(6, 6), (12, 6), (12, 12), (6, 12)],
                ],
            )

    def test_nested_holes(self):
        with pytest.raises(NestedHoles):
            geom.build_free_space(
                [(0, 0), (20, 0), (20, 20), (0, 20)],
                [
                    [(2, 2), (12, 2), (12, 12), (2, 12)],
                    [(4, 4), (6, 4), (6, 6), (4, 6)],
                ],
            )

    def test_orientation_normalized(self):
        space = geom.build_free_space(
            [(0, 0), (0, 10), (10, 10), (10, 0)],  # clockwise input
            [[(4, 4), (6, 4), (6, 6), (4, 6)]],  # counter-clockwise hole
        )
        assert geom.ring_area(space.outer) > 0
        assert geom.ring_area(space.holes[0]) < 0

    def test_geojson_style_closed_ring_accepted(self):
        space = geom.build_free_space([(0, 0), (10, 0), (10, 10), (0, 10), (0, 0)])
        assert len(space.outer) == 4


class TestContains:
    def test_center_inside(self, square):
        assert geom.contains(square, geom.Point2(5, 5))

    def test_point_in_hole_outside(self):
        space = geom.build_free_space(
            [(0, 0), (10, 0), (10, 10), (0, 10)],
            [[(4, 4), (6, 4), (6, 6), (4, 6)]],
        )
        assert not geom.contains(space, geom.Point2(5, 5))

    def test_boundary_counts_as_inside(self, square):
        assert geom.contains(square, geom.Point2(0.0, 5.0))
        assert geom.contains(square, geom.Point2(10.0, 10.0))

    def test_outside(self, square):
        assert not geom.contains(square, geom.Point2(15, 5))


class TestIsovist:
    def test_convex_room_fully_visible(self, square):
        iso = geom.compute_isovist(square, geom.Point2(5, 5))
        assert iso.area == pytest.approx(100.0, rel=1e-6)

    def test_lshape_matches_sampling_oracle(self, lshape):
        p = geom.Point2(2.5, 2.5)
        iso = geom.compute_isovist(lshape, p)
        sampled = isovist_area_sampled(lshape, p)
        assert iso.area == pytest.approx(sampled, rel=0.01)

    def test_viewpoint_in_hole_rejected(self):
        space = geom.build_free_space(
            [(0, 0), (10, 0), (10, 10), (0, 10)],
            [[(4, 4), (6, 4), (6, 6), (4, 6)]],
        )
        with pytest.raises(ViewpointOutsideFreeSpace):
            geom.compute_isovist(space, geom.Point2(5, 5))

    def test_star_shape_about_viewpoint(self, lshape):
        rng = np.random.default_rng(3)
        p = geom.Point2(2.0, 3.0)
        iso = geom.compute_isovist(lshape, p)
        n = len(iso.boundary)
        idx = rng.integers(0, n, size=100)
        fr = rng.uniform(0, 1, size=100)
        targets = iso.boundary[idx] + fr[:, None] * (
            iso.boundary[(idx + 1) % n] - iso.boundary[idx]
        )
        origin = p.as_array()
        for t in targets:
            assert segment_stays_inside(lshape, origin, t)

    def test_isovist_subset_of_free_space(self, lshape, grid):
        rng = np.random.default_rng(11)
        for space in (lshape, grid):
            free = Polygon(
                [tuple(q) for q in space.outer],
                [[tuple(q) for q in h] for h in space.holes],
            )
            for p in random_interior_points(space, 5, rng, min_clearance=0.3):
                iso = geom.compute_isovist(space, p)
                poly = Polygon([tuple(q) for q in iso.boundary])
                clipped = poly.intersection(free)
                assert abs(clipped.area - poly.area) <= 1e-3 * poly.area


class TestCastRay:
    def test_square_horizontal(self, square):
        ray = geom.cast_ray(square, geom.Point2(5, 5), (1, 0))
        assert ray.seg.a.x == pytest.approx(0.0, abs=1e-9)
        assert ray.seg.b.x == pytest.approx(10.0, abs=1e-9)
        assert ray.length == pytest.approx(10.0)
        assert ray.origin == geom.Point2(5, 5)

    def test_blocked_by_hole(self):
        space = geom.build_free_space(
            [(0, 0), (10, 0), (10, 10), (0, 10)],
            [[(4, 4), (6, 4), (6, 6), (4, 6)]],
        )
        ray = geom.cast_ray(space, geom.Point2(2, 5), (1, 0))
        assert ray.seg.a.x == pytest.approx(0.0, abs=1e-9)
        assert ray.seg.b.x == pytest.approx(4.0, abs=1e-9)
        assert ray.length == pytest.approx(4.0)

    def test_point_outside_rejected(self, square):
        with pytest.raises(PointOutsideFreeSpace):
            geom.cast_ray(square, geom.Point2(15, 5), (1, 0))

    def test_zero_direction_rejected(self, square):
        with pytest.raises(GeometryError):
            geom.cast_ray(square, geom.Point2(5, 5), (0, 0))

    def test_maximality(self, lshape):
        rng = np.random.default_rng(5)
        for p in random_interior_points(lshape, 10, rng, min_clearance=0.2):
            theta = rng.uniform(0, math.pi)
            ray = geom.cast_ray(lshape, p, (math.cos(theta), math.sin(theta)))
            d = ray.seg.direction()
            eps = lshape.epsilon
            beyond_b = ray.seg.b.as_array() + 10 * eps * d
            beyond_a = ray.seg.a.as_array() - 10 * eps * d
            outside = ~lshape.contains_many(np.vstack([beyond_a, beyond_b]))
            assert outside.all()

    def test_endpoints_on_boundary(self, grid):
        rng = np.random.default_rng(6)
        for p in random_interior_points(grid, 10, rng, min_clearance=0.2):
            theta = rng.uniform(0, math.pi)
            ray = geom.cast_ray(grid, p, (math.cos(theta), math.sin(theta)))
            ends = np.array([[ray.seg.a.x, ray.seg.a.y], [ray.seg.b.x, ray.seg.b.y]])
            assert (grid.boundary_distance(ends) <= 10 * grid.epsilon).all()


class TestLengthInside:
    def test_fully_inside(self):
        seg = geom.Segment(geom.Point2(0.2, 0.5), geom.Point2(0.8, 0.5))
        assert geom.length_inside(seg, UNIT_SQUARE) == pytest.approx(0.6)

    def test_half_inside(self):
        seg = geom.Segment(geom.Point2(-0.5, 0.5), geom.Point2(0.5, 0.5))
        assert geom.length_inside(seg, UNIT_SQUARE) == pytest.approx(0.5)

    def test_disjoint(self):
        seg = geom.Segment(geom.Point2(2, 2), geom.Point2(3, 3))
        assert geom.length_inside(seg, UNIT_SQUARE) == 0.0

    def test_through_concavity(self):
        # u-shaped ring; the segment crosses both prongs but not the gap
        ring = np.array(
            [(0, 0), (5, 0), (5, 3), (4, 3), (4, 1), (1, 1), (1, 3), (0, 3)], dtype=float
        )
        seg = geom.Segment(geom.Point2(-1, 2), geom.Point2(6, 2))
        assert geom.length_inside(seg, ring) == pytest.approx(2.0)

    @given(
        split=st.floats(min_value=0.01, max_value=0.99),
        y=st.floats(min_value=-0.5, max_value=1.5),
    )
    @settings(max_examples=60, deadline=None)
    def test_additivity(self, split, y):
        a = geom.Point2(-0.7, y)
        b = geom.Point2(1.9, y * 0.3 + 0.1)
        mid = geom.Point2(a.x + split * (b.x - a.x), a.y + split * (b.y - a.y))
        whole = geom.length_inside(geom.Segment(a, b), UNIT_SQUARE)
        parts = geom.length_inside(geom.Segment(a, mid), UNIT_SQUARE) + geom.length_inside(
            geom.Segment(mid, b), UNIT_SQUARE
        )
        assert whole == pytest.approx(parts, abs=1e-9)


class TestSimilarityEquivariance:
    @pytest.mark.parametrize("scale", [0.01, 3.0, 1000.0])
    def test_isovist_and_ray_scale(self, scale):
        base = [(0, 0), (10, 0), (10, 5), (5, 5), (5, 10), (0, 10)]
        scaled = [(x * scale, y * scale) for x, y in base]
        s1 = geom.build_free_space(base)
        s2 = geom.build_free_space(scaled)
        p1 = geom.Point2(2.5, 2.5)
        p2 = geom.Point2(2.5 * scale, 2.5 * scale)
        a1 = geom.compute_isovist(s1, p1).area
        a2 = geom.compute_isovist(s2, p2).area
        assert a2 == pytest.approx(a1 * scale * scale, rel=1e-6)
        r1 = geom.cast_ray(s1, p1, (2, 1))
        r2 = geom.cast_ray(s2, p2, (2, 1))
        assert r2.length == pytest.approx(r1.length * scale, rel=1e-6)
