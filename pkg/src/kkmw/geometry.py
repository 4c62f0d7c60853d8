"""Planar substrate: convex polygons, half-plane clipping, measures, transversals.

Compact convex sets are represented as counterclockwise polygons (points and
segments are degenerate cases).  Measures are weighted point clouds smeared to
uniform disks, or raster densities; both are normalized to total mass 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GEOM_EPS = 1e-9


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane {(x, y) : a x + b y <= c} with unit normal (a, b)."""

    a: float
    b: float
    c: float

    def signed(self, p) -> float:
        return self.a * p[0] + self.b * p[1] - self.c

    def contains(self, p, eps: float = GEOM_EPS) -> bool:
        return self.signed(p) <= eps

    def complement(self) -> "HalfPlane":
        return HalfPlane(-self.a, -self.b, -self.c)


def halfplane_through(p, q) -> HalfPlane:
    """Closed half-plane left of the directed line p -> q."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    n = math.hypot(dx, dy)
    if n == 0:
        raise ValueError("degenerate direction")
    # left side of p->q is where cross((q-p), (z-p)) >= 0
    a, b = dy / n, -dx / n
    c = a * p[0] + b * p[1]
    return HalfPlane(a, b, c)


@dataclass(frozen=True)
class DirectedLine:
    """The line {a x + b y = c}; the positive side is a x + b y >= c."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if abs(self.a * self.a + self.b * self.b - 1.0) > 1e-12:
            raise ValueError("normal must be unit length")

    def signed(self, p) -> float:
        return self.a * p[0] + self.b * p[1] - self.c

    def meets_polygon(self, poly, eps: float = GEOM_EPS) -> bool:
        ds = [self.signed(p) for p in poly]
        return min(ds) <= eps and max(ds) >= -eps


def line_through(p, q) -> DirectedLine:
    hp = halfplane_through(p, q)
    return DirectedLine(hp.a, hp.b, hp.c)


def polygon_area(poly) -> float:
    if len(poly) < 3:
        return 0.0
    s = 0.0
    for i in range(len(poly)):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % len(poly)]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def clip(poly, hp: HalfPlane):
    """Sutherland-Hodgman clip of a convex polygon against a closed half-plane."""
    if not poly:
        return []
    out = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        dc, dn = hp.signed(cur), hp.signed(nxt)
        if dc <= 0:
            out.append(cur)
            if dn > 0:
                t = dc / (dc - dn)
                out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
        elif dn <= 0:
            t = dc / (dc - dn)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    if n == 1:  # degenerate point
        return list(poly) if hp.signed(poly[0]) <= 0 else []
    return out


def dedup_poly(poly, eps: float = 1e-12):
    """Drop consecutive (cyclically) duplicate vertices."""
    out = []
    for p in poly:
        if out and abs(p[0] - out[-1][0]) <= eps and abs(p[1] - out[-1][1]) <= eps:
            continue
        out.append(p)
    while len(out) > 1 and abs(out[0][0] - out[-1][0]) <= eps and abs(out[0][1] - out[-1][1]) <= eps:
        out.pop()
    return out


def clip_many(poly, halfplanes):
    for hp in halfplanes:
        poly = clip(poly, hp)
        if not poly:
            return []
    return poly


def convex_hull(points):
    """Andrew monotone chain; returns CCW hull, handles degenerate inputs."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts

    def half(pts):
        out = []
        for p in pts:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) >= 3 else pts[:2]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def point_in_convex(poly, p, eps: float = GEOM_EPS) -> bool:
    n = len(poly)
    if n == 0:
        return False
    if n == 1:
        return abs(p[0] - poly[0][0]) <= eps and abs(p[1] - poly[0][1]) <= eps
    if n == 2:
        a, b = poly
        if abs(_cross(a, b, p)) > eps:
            return False
        return (
            min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps
        )
    for i in range(n):
        if _cross(poly[i], poly[(i + 1) % n], p) < -eps:
            return False
    return True


def regular_polygon(cx, cy, r, n=64, phase=0.0):
    return [
        (cx + r * math.cos(phase + 2 * math.pi * i / n), cy + r * math.sin(phase + 2 * math.pi * i / n))
        for i in range(n)
    ]


# -- disk / polygon overlap ---------------------------------------------------


def disk_polygon_area(cx, cy, r, poly) -> float:
    """Area of the intersection of the disk (cx, cy, r) with a convex polygon.

    Classic decomposition: sum signed contributions of triangles
    (center, v_i, v_{i+1}) intersected with the disk, each handled by
    chord/segment cases in closed form.
    """
    if r <= 0 or len(poly) < 3:
        return 0.0

    def seg_contrib(p1, p2):
        # signed area contribution of triangle (0, p1, p2) clipped to disk of radius r at origin
        x1, y1 = p1
        x2, y2 = p2
        cross = x1 * y2 - x2 * y1
        d1 = math.hypot(x1, y1)
        d2 = math.hypot(x2, y2)
        in1, in2 = d1 <= r, d2 <= r
        dx, dy = x2 - x1, y2 - y1
        seg2 = dx * dx + dy * dy
        if seg2 == 0:
            return 0.0
        # intersection params of segment with circle
        a = seg2
        b = 2 * (x1 * dx + y1 * dy)
        c = d1 * d1 - r * r
        disc = b * b - 4 * a * c
        ts = []
        if disc > 0:
            sq = math.sqrt(disc)
            for t in ((-b - sq) / (2 * a), (-b + sq) / (2 * a)):
                if 0.0 < t < 1.0:
                    ts.append(t)
        ts.sort()

        def arc(pa, pb):
            a1 = math.atan2(pa[1], pa[0])
            a2 = math.atan2(pb[1], pb[0])
            da = a2 - a1
            while da <= -math.pi:
                da += 2 * math.pi
            while da > math.pi:
                da -= 2 * math.pi
            return 0.5 * r * r * da

        def tri(pa, pb):
            return 0.5 * (pa[0] * pb[1] - pb[0] * pa[1])

        pts = [(x1, y1)] + [(x1 + t * dx, y1 + t * dy) for t in ts] + [(x2, y2)]
        total = 0.0
        for i in range(len(pts) - 1):
            pa, pb = pts[i], pts[i + 1]
            mid = ((pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2)
            if math.hypot(*mid) <= r + 1e-15:
                total += tri(pa, pb)
            else:
                total += arc(pa, pb)
        return total

    shifted = [(x - cx, y - cy) for x, y in poly]
    area = 0.0
    for i in range(len(shifted)):
        area += seg_contrib(shifted[i], shifted[(i + 1) % len(shifted)])
    return abs(area) if polygon_area(poly) >= 0 else abs(area)


# -- measures ----------------------------------------------------------------


class PlanarMeasure:
    def mass(self, region_poly) -> float:
        raise NotImplementedError

    def total(self) -> float:
        raise NotImplementedError


class PointCloudMeasure(PlanarMeasure):
    """Weighted points smeared to uniform disks of radius r (default 0.01).

    Smoothing keeps region masses continuous in the region geometry, which the
    simplicial solves rely on.
    """

    def __init__(self, points, weights=None, radius: float = 0.01):
        self.points = [(float(x), float(y)) for x, y in points]
        if weights is None:
            weights = [1.0] * len(self.points)
        w = np.asarray(weights, dtype=float)
        if w.sum() <= 0:
            raise ValueError("weights must have positive total")
        self.weights = (w / w.sum()).tolist()
        self.radius = float(radius)
        if any(math.hypot(x, y) + self.radius > 1 + 1e-9 for x, y in self.points):
            raise ValueError("support must lie inside the unit disk")

    def total(self) -> float:
        return 1.0

    def mass(self, region_poly) -> float:
        if len(region_poly) < 3:
            return 0.0
        r = self.radius
        if r == 0:
            return sum(
                w for (x, y), w in zip(self.points, self.weights) if point_in_convex(region_poly, (x, y))
            )
        disk_area = math.pi * r * r
        total = 0.0
        for (x, y), w in zip(self.points, self.weights):
            total += w * disk_polygon_area(x, y, r, region_poly) / disk_area
        return total


class RasterMeasure(PlanarMeasure):
    """Nonnegative density on a uniform grid of square cells."""

    def __init__(self, origin, cell_size: float, grid):
        self.origin = (float(origin[0]), float(origin[1]))
        self.cell = float(cell_size)
        g = np.asarray(grid, dtype=float)
        if (g < 0).any():
            raise ValueError("densities must be nonnegative")
        if g.sum() <= 0:
            raise ValueError("grid must have positive total mass")
        # normalize so that sum(density * cell_area) = 1
        self.grid = g / (g.sum() * self.cell * self.cell)
        ny, nx = self.grid.shape
        xs = self.origin[0] + self.cell * np.arange(nx + 1)
        ys = self.origin[1] + self.cell * np.arange(ny + 1)
        self._xs, self._ys = xs, ys

    def total(self) -> float:
        return float(self.grid.sum() * self.cell * self.cell)

    def _cells_on_segment(self, p, q):
        """Grid cells crossed by the segment [p, q], by exact grid-line splits."""
        ts = [0.0, 1.0]
        dx, dy = q[0] - p[0], q[1] - p[1]
        if dx != 0:
            for gx in self._xs:
                t = (gx - p[0]) / dx
                if 0.0 < t < 1.0:
                    ts.append(t)
        if dy != 0:
            for gy in self._ys:
                t = (gy - p[1]) / dy
                if 0.0 < t < 1.0:
                    ts.append(t)
        ts.sort()
        out = []
        for i in range(len(ts) - 1):
            tm = (ts[i] + ts[i + 1]) / 2
            mx, my = p[0] + tm * dx, p[1] + tm * dy
            ix = int(math.floor((mx - self.origin[0]) / self.cell))
            iy = int(math.floor((my - self.origin[1]) / self.cell))
            out.append((iy, ix))
        return out

    def mass(self, region_poly) -> float:
        if len(region_poly) < 3:
            return 0.0
        region_poly = dedup_poly(region_poly)
        if len(region_poly) < 3:
            return 0.0
        area = polygon_area(region_poly)
        if abs(area) < 1e-15:
            return 0.0
        poly = region_poly if area > 0 else region_poly[::-1]
        ny, nx = self.grid.shape
        X, Y = np.meshgrid(self._xs, self._ys)  # corner coordinates
        inside = np.ones_like(X, dtype=bool)
        n = len(poly)
        for i in range(n):
            x1, y1 = poly[i]
            x2, y2 = poly[(i + 1) % n]
            inside &= (x2 - x1) * (Y - y1) - (y2 - y1) * (X - x1) >= -GEOM_EPS
        c4 = (
            inside[:-1, :-1].astype(np.int8)
            + inside[:-1, 1:]
            + inside[1:, :-1]
            + inside[1:, 1:]
        )
        cell_area = self.cell * self.cell
        total = float((self.grid[c4 == 4] * cell_area).sum())
        # boundary candidates: cells with mixed corners, plus cells the edges
        # pass through (a thin region can slice a cell missing every corner)
        boundary = (c4 > 0) & (c4 < 4)
        for i in range(n):
            for iy, ix in self._cells_on_segment(poly[i], poly[(i + 1) % n]):
                if 0 <= iy < ny and 0 <= ix < nx and c4[iy, ix] < 4:
                    boundary[iy, ix] = True
        ys_idx, xs_idx = np.nonzero(boundary)
        for iy, ix in zip(ys_idx, xs_idx):
            d = self.grid[iy, ix]
            if d == 0:
                continue
            cellpoly = [
                (self._xs[ix], self._ys[iy]),
                (self._xs[ix + 1], self._ys[iy]),
                (self._xs[ix + 1], self._ys[iy + 1]),
                (self._xs[ix], self._ys[iy + 1]),
            ]
            clipped = cellpoly
            for i in range(n):
                # interior of a CCW polygon is the left side of each edge
                hp = halfplane_through(poly[i], poly[(i + 1) % n])
                clipped = clip(clipped, hp)
                if not clipped:
                    break
            if clipped:
                total += d * abs(polygon_area(clipped))
        return total


def measure_of(measure: PlanarMeasure, region_poly) -> float:
    """Mass of a convex region under a measure, in [0, 1]."""
    return max(0.0, min(1.0, measure.mass(region_poly)))


def uniform_disk_raster(n: int = 60, radius: float = 1.0) -> RasterMeasure:
    """Uniform density on the disk, as a raster (handy test measure)."""
    cell = 2 * radius / n
    ys, xs = np.mgrid[0:n, 0:n]
    cxs = -radius + cell * (xs + 0.5)
    cys = -radius + cell * (ys + 0.5)
    grid = ((cxs * cxs + cys * cys) <= radius * radius).astype(float)
    return RasterMeasure((-radius, -radius), cell, grid)


# -- line transversals -------------------------------------------------------


@dataclass
class TransversalResult:
    exists: bool
    witness: DirectedLine | None = None
    refutation: list | None = None  # per candidate direction: (angle, sep_lo_idx, sep_hi_idx)


def _projection_interval(poly, ux, uy):
    vals = [ux * x + uy * y for x, y in poly]
    return min(vals), max(vals)


def line_transversal_exists(polygons, eps: float = GEOM_EPS) -> TransversalResult:
    """Exact decision: is there a single line meeting every polygon?

    A transversal with direction d exists iff the projections of the polygons
    onto the normal of d share a point.  As the normal u rotates, the active
    min/max vertices only change at angles where u is orthogonal to a
    difference of two input vertices, so checking those angles plus a generic
    angle inside each gap decides the question exactly.
    """
    if len(polygons) > 8:
        raise ValueError("transversal decision limited to 8 polygons")
    if any(len(p) == 0 for p in polygons):
        raise ValueError("empty polygon")
    if len(polygons) <= 1:
        poly = polygons[0] if polygons else [(0.0, 0.0)]
        p = poly[0]
        return TransversalResult(True, DirectedLine(0.0, 1.0, p[1]))

    verts = [v for poly in polygons for v in poly]
    angles = set()
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            dx = verts[j][0] - verts[i][0]
            dy = verts[j][1] - verts[i][1]
            if dx == 0 and dy == 0:
                continue
            # u orthogonal to (dx, dy): angle of (-dy, dx)
            angles.add(math.atan2(dx, -dy) % math.pi)
    if not angles:
        angles = {0.0}
    ordered = sorted(angles)
    candidates = list(ordered)
    for i in range(len(ordered)):
        a = ordered[i]
        b = ordered[(i + 1) % len(ordered)] + (math.pi if i + 1 == len(ordered) else 0.0)
        candidates.append(((a + b) / 2) % math.pi)

    refutation = []
    for ang in candidates:
        ux, uy = math.cos(ang), math.sin(ang)
        intervals = [_projection_interval(p, ux, uy) for p in polygons]
        lo = max(iv[0] for iv in intervals)
        hi = min(iv[1] for iv in intervals)
        if lo <= hi + eps:
            offset = (lo + hi) / 2
            return TransversalResult(True, DirectedLine(ux, uy, offset))
        i_lo = max(range(len(intervals)), key=lambda i: intervals[i][0])
        i_hi = min(range(len(intervals)), key=lambda i: intervals[i][1])
        refutation.append((ang, i_lo, i_hi))
    return TransversalResult(False, None, refutation)
