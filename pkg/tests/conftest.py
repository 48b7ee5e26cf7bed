import numpy as np
import pytest

from axialgen import geom, medial


SQUARE = [(0, 0), (10, 0), (10, 10), (0, 10)]
LSHAPE = [(0, 0), (10, 0), (10, 5), (5, 5), (5, 10), (0, 10)]
CORRIDOR = [(0, 0), (10, 0), (10, 2), (0, 2)]
RECT = [(0, 0), (10, 0), (10, 4), (0, 4)]
PLUS = [(4, 0), (8, 0), (8, 4), (12, 4), (12, 8), (8, 8), (8, 12), (4, 12), (4, 8), (0, 8), (0, 4), (4, 4)]
TSHAPE = [(6, 0), (10, 0), (10, 8), (16, 8), (16, 12), (0, 12), (0, 8), (6, 8)]

GRID_OUTER = [(0, 0), (100, 0), (100, 100), (0, 100)]
GRID_BLOCKS = [
    [(bx, by), (bx + 20, by), (bx + 20, by + 20), (bx, by + 20)]
    for bx in (10, 40, 70)
    for by in (10, 40, 70)
]

FOUR_BLOCKS_OUTER = [(0, 0), (44, 0), (44, 22), (0, 22)]
FOUR_BLOCKS_HOLES = [
    [(4, 12), (12, 12), (12, 19), (4, 19)],
    [(13, 3), (21, 3), (21, 10), (13, 10)],
    [(22, 12), (30, 12), (30, 19), (22, 19)],
    [(31, 3), (39, 3), (39, 10), (31, 10)],
]


@pytest.fixture(scope="session")
def square():
    return geom.build_free_space(SQUARE)


@pytest.fixture(scope="session")
def lshape():
    return geom.build_free_space(LSHAPE)


@pytest.fixture(scope="session")
def corridor():
    return geom.build_free_space(CORRIDOR)


@pytest.fixture(scope="session")
def rect():
    return geom.build_free_space(RECT)


@pytest.fixture(scope="session")
def plus():
    return geom.build_free_space(PLUS)


@pytest.fixture(scope="session")
def tshape():
    return geom.build_free_space(TSHAPE)


@pytest.fixture(scope="session")
def grid():
    return geom.build_free_space(GRID_OUTER, GRID_BLOCKS)


@pytest.fixture(scope="session")
def four_blocks():
    return geom.build_free_space(FOUR_BLOCKS_OUTER, FOUR_BLOCKS_HOLES)


@pytest.fixture(scope="session")
def corridor_graph(corridor):
    return medial.build_graph(corridor)


@pytest.fixture(scope="session")
def rect_graph(rect):
    return medial.build_graph(rect)


@pytest.fixture(scope="session")
def grid_graph(grid):
    return medial.build_graph(grid)


@pytest.fixture(scope="session")
def four_blocks_graph(four_blocks):
    return medial.build_graph(four_blocks)


def isovist_area_sampled(space, p, n=36000):
    """Independent polar-integration oracle for isovist areas."""
    ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
    dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    _, t, _ = geom.first_hits(space, p.as_array(), dirs)
    return float(0.5 * np.sum(t ** 2) * (2 * np.pi / n))


def random_interior_points(space, count, rng, min_clearance=0.0):
    """Rejection-sampled interior points, kept away from the boundary."""
    x0, y0, x1, y1 = space.bbox
    pts = []
    while len(pts) < count:
        q = rng.uniform([x0, y0], [x1, y1])
        if not space.contains_many(q[None, :])[0]:
            continue
        if space.boundary_distance(q[None, :])[0] <= min_clearance:
            continue
        pts.append(geom.Point2(float(q[0]), float(q[1])))
    return pts


def random_seed_segment(space, rng):
    x0, y0, x1, y1 = space.bbox
    while True:
        p = rng.uniform([x0, y0], [x1, y1])
        q = rng.uniform([x0, y0], [x1, y1])
        if np.linalg.norm(p - q) < 0.05 * space.diagonal:
            continue
        mid = 0.5 * (p + q)
        if space.contains_many(mid[None, :])[0]:
            return geom.Segment(geom.Point2(*p), geom.Point2(*q))


def segment_stays_inside(space, a, b, samples=24):
    """True if the open segment a-b lies in free space (sampled)."""
    fr = np.linspace(0.02, 0.98, samples)
    pts = a[None, :] + fr[:, None] * (b - a)[None, :]
    return bool(space.contains_many(pts).all())


def visible_from_ray(space, ray, q, probes=24):
    """True if some point of the ray sees q; nearest point tried first."""
    a = ray.seg.a.as_array()
    d = ray.seg.direction()
    t = float(np.clip((np.asarray(q) - a) @ d, 0.0, ray.length))
    candidates = [t] + list(np.linspace(0.0, ray.length, probes))
    return any(segment_stays_inside(space, np.asarray(q), a + tc * d) for tc in candidates)


def ray_key(ray, digits=6):
    pts = sorted(
        [
            (round(ray.seg.a.x, digits), round(ray.seg.a.y, digits)),
            (round(ray.seg.b.x, digits), round(ray.seg.b.y, digits)),
        ]
    )
    return tuple(pts[0] + pts[1])


def line_sets_equal(am1, am2):
    return sorted(ray_key(r) for r in am1.lines) == sorted(ray_key(r) for r in am2.lines)


def mutual_bucket_match(am1, am2, threshold=0.85):
    """Same line count and a mutual-absorption partner for every line."""
    from axialgen.bucket import ray_bucket_overlap

    if len(am1.lines) != len(am2.lines):
        return False
    for r1, b1 in zip(am1.lines, am1.buckets):
        if not any(
            ray_bucket_overlap(r1, b2) >= threshold and ray_bucket_overlap(r2, b1) >= threshold
            for r2, b2 in zip(am2.lines, am2.buckets)
        ):
            return False
    return True
