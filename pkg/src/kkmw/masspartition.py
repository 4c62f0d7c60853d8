"""Disproportionate convex mass partition of the plane by k chords.

A barycentric point x in the (2k-1)-simplex places 2k points on the unit
circle at arc positions given by the prefix sums of x; the k chords joining
antipodal-index pairs cut the disk into 2k convex regions.  The covers
"measure i gives region j at least alpha_j" are admissible by pigeonhole, so
a colorful rainbow cell yields the disproportionate partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import CoverOracle, SolveMachine, default_schedule
from .geometry import (
    HalfPlane,
    PlanarMeasure,
    clip_many,
    dedup_poly,
    halfplane_through,
    measure_of,
    polygon_area,
    regular_polygon,
)

DISK_SIDES = 8192  # inscribed polygon area defect ~3e-7, under the 1e-6 budget
ARC_EPS = 1e-12


class NormalizationError(Exception):
    pass


def circle_point(t: float):
    return (math.cos(2 * math.pi * t), math.sin(2 * math.pi * t))


def _prefix_sums(x):
    out = [0.0]
    acc = 0.0
    for xi in x:
        acc += xi
        out.append(acc)
    return out


@dataclass
class ChordConfig:
    """The k chords and 2k oriented half-planes determined by x."""

    x: tuple[float, ...]
    k: int
    prefix: list[float] = field(init=False)

    def __post_init__(self):
        if len(self.x) != 2 * self.k:
            raise ValueError(f"x must have 2k = {2 * self.k} coordinates")
        if abs(sum(self.x) - 1.0) > 1e-9 or any(xi < -1e-12 for xi in self.x):
            raise NormalizationError(f"x must lie in the simplex, got {self.x}")
        self.prefix = _prefix_sums(self.x)

    def z(self, i: int):
        # z_i at arc position prefix[i], for 0 <= i <= 2k (z_2k = z_0)
        return circle_point(self.prefix[i])

    def arc_length(self, i: int) -> float:
        """Counterclockwise arc from z_i to z_(i+k), as a fraction of the circle.

        Computed from the coordinate sums rather than mod 1 so the 0-arc and
        full-arc degeneracies stay distinguishable.
        """
        if i < self.k:
            return self.prefix[i + self.k] - self.prefix[i]
        return 1.0 - (self.prefix[i] - self.prefix[i - self.k])

    def halfplanes(self, i: int):
        """(H_i+, H_i-) as HalfPlane objects, or the degenerate markers.

        Returns a pair where each element is a HalfPlane, "all", or "empty".
        H+ contains the counterclockwise arc from z_i to z_(i+k).
        """
        s = self.arc_length(i)
        if s <= ARC_EPS:
            return ("empty", "all")
        if s >= 1.0 - ARC_EPS:
            return ("all", "empty")
        a = self.prefix[i]
        p = circle_point(a)
        q = circle_point(a + s)
        if math.hypot(q[0] - p[0], q[1] - p[1]) < 1e-15:
            # numerically coincident endpoints with a genuine arc between them
            return ("all", "empty") if s >= 0.5 else ("empty", "all")
        mid = circle_point(a + s / 2)
        hp = halfplane_through(p, q)
        if hp.signed(mid) <= 0:
            return (hp, hp.complement())
        return (hp.complement(), hp)


def _clip_tag(poly, tag):
    if tag == "all":
        return poly
    if tag == "empty":
        return []
    return clip_many(poly, [tag])


def region_halfplane_lists(x, k: int):
    """The 2k regions as lists of half-plane constraints (before the disk cut).

    Region i (1-based in the construction, 0-based here) is
    C_i = H_0+ ∩ ... ∩ H_(i-1)+ ∩ H_i-  for i in 1..k, and symmetrically with
    the index window starting at k for i in k+1..2k.
    """
    cfg = ChordConfig(tuple(x), k)
    out = []
    for i in range(1, k + 1):
        cons = [cfg.halfplanes(j)[0] for j in range(0, i)]
        cons.append(cfg.halfplanes(i)[1])
        out.append(cons)
    for i in range(k + 1, 2 * k + 1):
        cons = [cfg.halfplanes(j)[0] for j in range(k, i)]
        cons.append(cfg.halfplanes(i % (2 * k))[1])
        out.append(cons)
    return out


_DISK_CACHE: dict[int, list] = {}


def disk_polygon(sides: int = DISK_SIDES):
    if sides not in _DISK_CACHE:
        _DISK_CACHE[sides] = regular_polygon(0.0, 0.0, 1.0, sides)
    return _DISK_CACHE[sides]


_BOX = [(-1.05, -1.05), (1.05, -1.05), (1.05, 1.05), (-1.05, 1.05)]


def regions_from(x, k: int, base=None):
    """The 2k convex regions of the disk cut by the k chords, as polygons."""
    if base is None:
        base = disk_polygon()
    regions = []
    for cons in region_halfplane_lists(x, k):
        poly = base
        for tag in cons:
            poly = _clip_tag(poly, tag)
            if not poly:
                break
        regions.append(poly)
    return regions


def fast_regions(x, k: int):
    """Regions clipped to a box instead of the disk.

    Masses agree with regions_from for measures supported in the disk, and
    the small polygons make oracle queries much cheaper.
    """
    return regions_from(x, k, base=_BOX)


@dataclass
class MassPartitionResult:
    x: tuple[float, ...]
    regions: list
    permutation: list[int]  # permutation[i] = index of the measure assigned region i
    masses: list[list[float]]  # masses[i][j] = measure i mass of region j
    achieved: list[float]  # achieved[j] = mass of region j under its assigned measure
    epsilons: list[float]  # max(0, alpha_j - achieved[j])
    resolution: int

    def to_dict(self) -> dict:
        return {
            "schema": "mass_partition_result.v1",
            "x": list(self.x),
            "regions": [[list(p) for p in poly] for poly in self.regions],
            "permutation": self.permutation,
            "masses": self.masses,
            "achieved": self.achieved,
            "epsilons": self.epsilons,
            "resolution": self.resolution,
        }


def mass_partition_solve(
    measures: list[PlanarMeasure],
    alphas: list[float],
    tolerance: float = 1e-2,
    max_resolution: int = 1 << 11,
) -> MassPartitionResult:
    """Partition the disk by k chords so that, after permuting measures,
    measure pi(j) gives region j at least alphas[j] - epsilon."""
    n = len(measures)
    if n < 2 or n % 2:
        raise ValueError("need an even number of measures, at least 2")
    if len(alphas) != n:
        raise ValueError("need one alpha per measure")
    if any(a <= 0 for a in alphas):
        raise NormalizationError("alphas must be positive")
    if abs(sum(alphas) - 1.0) > 1e-9:
        raise NormalizationError(f"alphas must sum to 1, got {sum(alphas)}")
    k = n // 2

    def query(i, x):
        regions = fast_regions(x, k)
        mu = measures[i]
        return {j for j, poly in enumerate(regions) if measure_of(mu, poly) >= alphas[j] - 1e-12}

    oracle = CoverOracle(k=n, n=n, query_fn=query)

    # the barycentric cell diameter controls the mass defect only up to the
    # measures' modulus of continuity, so tighten until the masses verify
    engine_tol = tolerance / 4
    best = None
    while True:
        schedule = default_schedule(n, engine_tol, max_resolution=max_resolution)
        machine = SolveMachine(n, n, "primal", engine_tol, schedule)
        rainbow = machine.solve(oracle)
        x = rainbow.witness

        # owner i asserted region label[i]; region j goes to its claimant
        perm = [-1] * n
        for owner, label in rainbow.permutation.items():
            perm[label] = owner
        # evaluate masses on the box-clipped regions: same value for measures
        # in the disk, and no loss from raster cells straddling the boundary
        eval_regions = fast_regions(x, k)
        masses = [[measure_of(m, poly) for poly in eval_regions] for m in measures]
        achieved = [masses[perm[j]][j] for j in range(n)]
        eps = [max(0.0, alphas[j] - achieved[j]) for j in range(n)]
        if best is None or max(eps) < max(best[4]):
            best = (x, perm, masses, achieved, eps, rainbow)
        at_max = schedule[-1] >= max_resolution
        if max(eps) <= tolerance or at_max:
            break
        engine_tol /= 2

    x, perm, masses, achieved, eps, rainbow = best
    regions = regions_from(x, k)
    return MassPartitionResult(
        x=tuple(x),
        regions=regions,
        permutation=perm,
        masses=masses,
        achieved=achieved,
        epsilons=eps,
        resolution=rainbow.cell.base.resolution,
    )


def partition_defect(x, k: int) -> float:
    """Disk area minus the summed region areas; near zero when regions tile."""
    regions = regions_from(x, k)
    return math.pi - sum(abs(polygon_area(p)) for p in regions)


def pairwise_overlap(x, k: int) -> float:
    """Largest pairwise intersection area among the regions.

    Intersections are computed from the defining half-plane lists, not the
    region polygons, so the disk boundary is clipped only once per pair.
    """
    cons_lists = region_halfplane_lists(x, k)
    worst = 0.0
    for i in range(len(cons_lists)):
        for j in range(i + 1, len(cons_lists)):
            poly = disk_polygon()
            for tag in cons_lists[i] + cons_lists[j]:
                poly = _clip_tag(poly, tag)
                if not poly:
                    break
            if poly:
                worst = max(worst, abs(polygon_area(dedup_poly(poly))))
    return worst
