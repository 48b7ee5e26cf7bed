import numpy as np
import pytest
from shapely.geometry import Polygon

from axialgen import bucket, geom, medial, ridge
from axialgen.errors import DegenerateBucket



def make_ray(space, p, direction, ray_id=0):
    r = geom.cast_ray(space, geom.Point2(*p), direction)
    return geom.Ray(r.seg, r.origin, r.length, ray_id)


def all_scene_rays(space, graph):
    return ridge.rays_from_medial(space, graph)


class TestTraceCrossings:
    def test_four_block_scene_counts(self, four_blocks, four_blocks_graph):
        # a ray threading the four blocks: endpoints on block edges, three
        # region boundaries crossed, one branch vertex per region passage
        ray = make_ray(four_blocks, (21.5, 11.0), (27, -2))
        trace = bucket.trace_crossings(ray, four_blocks_graph)
        assert (ray.seg.a.x, ray.seg.a.y) == pytest.approx((8.0, 12.0))
        assert (ray.seg.b.x, ray.seg.b.y) == pytest.approx((35.0, 10.0))
        assert len(trace.crossings) == 3
        assert len(trace.branch_points) == 2
        assert len(trace.endpoint_associates) == 4
        # crossings come ordered along the ray
        d = ray.seg.direction()
        a = ray.seg.a.as_array()
        ts = [float((p.as_array() - a) @ d) for p in trace.crossings]
        assert ts == sorted(ts)
        # every endpoint associate flanks its endpoint within reach
        cell = four_blocks_graph.cell_size
        e11, e12, e21, e22 = trace.endpoint_associates
        assert e11.distance_to(ray.seg.a) <= 2 * cell
        assert e12.distance_to(ray.seg.a) <= 2 * cell
        assert e21.distance_to(ray.seg.b) <= 2 * cell
        assert e22.distance_to(ray.seg.b) <= 2 * cell

    def test_corridor_skeleton_chord_no_transverse_crossings(self, corridor, corridor_graph):
        ray = make_ray(corridor, (5.0, 1.0), (1, 0))
        trace = bucket.trace_crossings(ray, corridor_graph)
        assert len(trace.crossings) == 0
        assert trace.collinear_spans  # the chord rides the skeleton
        assert trace.branch_points  # on-ray vertices keep the bucket alive

    def test_rect_off_axis_chord_two_crossings(self, rect, rect_graph):
        # off the skeleton, the chord meets the two corner-branch fans
        ray = make_ray(rect, (5.0, 1.37), (1, 0))
        trace = bucket.trace_crossings(ray, rect_graph)
        assert len(trace.crossings) == 2

    def test_empty_graph_trace(self, corridor):
        empty = medial.MedialAxisGraph([], [], cell_size=1.0)
        ray = make_ray(corridor, (5.0, 1.0), (1, 0))
        trace = bucket.trace_crossings(ray, empty)
        assert trace.crossings == ()
        assert trace.branch_points == ()


class TestBuildBucket:
    def test_corridor_bucket_covers_corridor(self, corridor, corridor_graph):
        ray = make_ray(corridor, (5.0, 1.0), (1, 0))
        trace = bucket.trace_crossings(ray, corridor_graph)
        b = bucket.build_bucket(ray, trace, corridor)
        assert abs(b.area - 20.0) <= 0.1 * 20.0
        assert bucket.ray_bucket_overlap(ray, b) >= 0.99

    def test_four_block_bucket_contains_ray(self, four_blocks, four_blocks_graph):
        ray = make_ray(four_blocks, (21.5, 11.0), (27, -2))
        trace = bucket.trace_crossings(ray, four_blocks_graph)
        b = bucket.build_bucket(ray, trace, four_blocks)
        assert bucket.ray_bucket_overlap(ray, b) >= 0.99

    def test_quadrilateral_from_endpoint_associates(self, corridor):
        # graph with samples but no vertices: only the 4 endpoint
        # associates remain to chain
        samples = medial.densify_boundary(corridor, 2 / 3)
        empty = medial.MedialAxisGraph([], [], cell_size=2 / 3, samples=samples)
        ray = make_ray(corridor, (5.0, 1.0), (1, 0))
        trace = bucket.trace_crossings(ray, empty)
        assert len(trace.endpoint_associates) == 4
        b = bucket.build_bucket(ray, trace, corridor)
        assert 3 <= len(b.boundary) <= 8
        assert bucket.ray_bucket_overlap(ray, b) >= 0.99

    def test_degenerate_bucket(self, corridor):
        empty = medial.MedialAxisGraph([], [], cell_size=1.0)
        ray = make_ray(corridor, (5.0, 1.0), (1, 0))
        trace = bucket.trace_crossings(ray, empty)  # associates collapse to endpoints
        with pytest.raises(DegenerateBucket):
            bucket.build_bucket(ray, trace, corridor)

    def test_mismatched_trace_rejected(self, corridor, corridor_graph):
        r0 = make_ray(corridor, (5.0, 1.0), (1, 0), ray_id=0)
        r1 = make_ray(corridor, (5.0, 1.0), (1, 0), ray_id=1)
        trace = bucket.trace_crossings(r0, corridor_graph)
        with pytest.raises(Exception):
            bucket.build_bucket(r1, trace, corridor)

    def test_bucket_subset_of_free_space(self, grid, grid_graph):
        free = Polygon(
            [tuple(p) for p in grid.outer], [[tuple(p) for p in h] for h in grid.holes]
        )
        for ray in all_scene_rays(grid, grid_graph)[:6]:
            trace = bucket.trace_crossings(ray, grid_graph)
            b = bucket.build_bucket(ray, trace, grid)
            poly = Polygon([tuple(p) for p in b.boundary])
            clipped = poly.intersection(free)
            assert abs(clipped.area - poly.area) <= 1e-3 * poly.area

    def test_self_containment_all_scene_rays(self, grid, grid_graph, tshape):
        tgraph = medial.build_graph(tshape)
        for space, graph in ((grid, grid_graph), (tshape, tgraph)):
            for ray in all_scene_rays(space, graph):
                trace = bucket.trace_crossings(ray, graph)
                b = bucket.build_bucket(ray, trace, space)
                assert bucket.ray_bucket_overlap(ray, b) >= 0.99

    def test_visibility_soundness(self, grid, grid_graph):
        from shapely.geometry import Point

        from conftest import visible_from_ray

        rng = np.random.default_rng(17)
        rays = all_scene_rays(grid, grid_graph)[:4]
        for ray in rays:
            trace = bucket.trace_crossings(ray, grid_graph)
            b = bucket.build_bucket(ray, trace, grid)
            poly = Polygon([tuple(p) for p in b.boundary])
            minx, miny, maxx, maxy = poly.bounds
            count = 0
            while count < 50:
                q = rng.uniform([minx, miny], [maxx, maxy])
                if not poly.contains(Point(q)):
                    continue
                count += 1
                assert visible_from_ray(grid, ray, q)


class TestRayBucketOverlap:
    def test_disjoint_ray(self, corridor, corridor_graph):
        ray = make_ray(corridor, (5.0, 1.0), (1, 0))
        trace = bucket.trace_crossings(ray, corridor_graph)
        b = bucket.build_bucket(ray, trace, corridor)
        far = geom.Ray(
            geom.Segment(geom.Point2(0, 50), geom.Point2(10, 50)), geom.Point2(5, 50), 10.0, 9
        )
        assert bucket.ray_bucket_overlap(far, b) == 0.0

    def test_half_inside(self):
        square_ring = np.array([(0, 0), (10, 0), (10, 10), (0, 10)], dtype=float)
        b = bucket.Bucket(owner_ray_id=0, boundary=square_ring, area=100.0)
        seg = geom.Segment(geom.Point2(-5, 5), geom.Point2(5, 5))
        ray = geom.Ray(seg, geom.Point2(0, 5), seg.length, 1)
        assert bucket.ray_bucket_overlap(ray, b) == pytest.approx(0.5)

    def test_scale_invariance(self, tshape):
        graph = medial.build_graph(tshape)
        ray = all_scene_rays(tshape, graph)[0]
        trace = bucket.trace_crossings(ray, graph)
        b = bucket.build_bucket(ray, trace, tshape)
        base = bucket.ray_bucket_overlap(ray, b)

        s = 1000.0
        scaled_space = geom.build_free_space([(s * x, s * y) for x, y in
                                              [(6, 0), (10, 0), (10, 8), (16, 8), (16, 12), (0, 12), (0, 8), (6, 8)]])
        scaled_graph = medial.build_graph(scaled_space)
        scaled_rays = all_scene_rays(scaled_space, scaled_graph)
        match = min(
            scaled_rays,
            key=lambda r: abs(r.length - s * ray.length),
        )
        tr = bucket.trace_crossings(match, scaled_graph)
        b2 = bucket.build_bucket(match, tr, scaled_space)
        assert bucket.ray_bucket_overlap(match, b2) == pytest.approx(base, abs=1e-6)
