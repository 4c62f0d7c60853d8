"""Nested hyperplane partitions of R^d and their two solver applications.

A point x of the (n-1)-simplex and directions v_1..v_(n-1) determine a
partition of R^d into n convex regions: the last coordinate places a
hyperplane orthogonal to v_(n-1), and the prefix recurses on the lower half.
On top of this we run the hyperplane-piercing dual-outcome search and the
envy-free allocation of regions to measures.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .engine import CoverOracle, ResolutionExceeded, SolveMachine, default_schedule
from .simplex import grid_vertices

INTERIOR_SLACK = 1e-9


class PreconditionFailed(Exception):
    pass


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space {y : <y, v> <= c}."""

    v: tuple[float, ...]
    c: float

    def contains(self, y, slack: float = 0.0) -> bool:
        return sum(a * b for a, b in zip(self.v, y)) <= self.c - slack


def threshold_of(alpha: float) -> float:
    """The paper's reparametrized offset; 0 at 1/2, unbounded at the ends."""
    t = 2 * alpha - 1
    return t / (1 - abs(t))


def halfspace(alpha: float, v):
    """(H+, H-) for a direction and a coordinate in [0, 1].

    H+ is {<y, v> <= threshold}, so it grows with alpha and its limits agree
    with the degenerate ends: (empty, all) at alpha = 0, (all, empty) at
    alpha = 1.  That continuity at the simplex boundary is what the solver's
    covers rely on.
    """
    if all(vi == 0 for vi in v):
        raise PreconditionFailed("direction must be nonzero")
    if alpha <= 0:
        return ("empty", "all")
    if alpha >= 1:
        return ("all", "empty")
    c = threshold_of(alpha)
    vt = tuple(float(vi) for vi in v)
    hplus = HalfSpace(vt, c)
    hminus = HalfSpace(tuple(-vi for vi in vt), -c)
    return (hplus, hminus)


@dataclass
class NestedPartition:
    dimension: int
    x: tuple[float, ...]
    directions: list
    regions: list  # constraint lists; each constraint a HalfSpace, "all", or "empty"
    hyperplanes: list  # (v, offset or None) per level, outermost last

    @property
    def n(self) -> int:
        return len(self.regions)

    def region_is_empty(self, i: int) -> bool:
        return any(c == "empty" for c in self.regions[i])


def nested_partition(x, directions) -> NestedPartition:
    n = len(x)
    if len(directions) != n - 1:
        raise PreconditionFailed(f"need {n - 1} directions for n = {n}")
    for v in directions:
        if all(vi == 0 for vi in v):
            raise PreconditionFailed("directions must be nonzero")
    d = len(directions[0])
    regions, planes = _build(list(x), [tuple(map(float, v)) for v in directions])
    return NestedPartition(dimension=d, x=tuple(x), directions=list(directions), regions=regions, hyperplanes=planes)


def _build(x, dirs):
    n = len(x)
    if n == 2:
        hplus, hminus = halfspace(x[0], dirs[0])
        planes = [(dirs[0], threshold_of(x[0]) if 0 < x[0] < 1 else None)]
        return [[hplus], [hminus]], planes
    head = sum(x[:-1])
    if head <= 0:
        # x_n = 1: everything goes to the last region
        planes = [(v, None) for v in dirs]
        return [["empty"] for _ in range(n - 1)] + [["all"]], planes
    xprime = [xi / head for xi in x[:-1]]
    inner_regions, inner_planes = _build(xprime, dirs[:-1])
    hplus, hminus = halfspace(x[-1], dirs[-1])
    regions = [cons + [hminus] for cons in inner_regions] + [[hplus]]
    offset = threshold_of(x[-1]) if 0 < x[-1] < 1 else None
    return regions, inner_planes + [(dirs[-1], offset)]


def classify_point(x, directions, y) -> int:
    """The unique region index owning y, with boundaries broken downward.

    The half-open convention makes this an exact partition function: summing
    indicator masses over regions is exactly additive.
    """
    n = len(x)
    if n == 1:
        return 0
    if n == 2:
        # base case is driven by x_1: region 0 is H+(x_1, v) = {<y,v> <= t}
        if x[0] >= 1:
            return 0
        if x[0] <= 0:
            return 1
        v = directions[0]
        return 0 if sum(a * b for a, b in zip(v, y)) <= threshold_of(x[0]) else 1
    head = sum(x[:-1])
    if head <= 0:
        return n - 1
    v = directions[n - 2]
    if 0 < x[-1] < 1:
        if sum(a * b for a, b in zip(v, y)) <= threshold_of(x[-1]):
            return n - 1
    elif x[-1] >= 1:
        return n - 1
    xprime = [xi / head for xi in x[:-1]]
    return classify_point(xprime, directions[: n - 2], y)


# -- measures in R^d ----------------------------------------------------------


def _ball_offsets(d: int, samples: int):
    """Deterministic unit-ball sample offsets (fixed-seed rejection)."""
    rng = random.Random(1234 + d)
    out = []
    while len(out) < samples:
        p = tuple(rng.uniform(-1, 1) for _ in range(d))
        if sum(c * c for c in p) <= 1.0:
            out.append(p)
    return out


class DMeasure:
    def region_mass(self, constraints) -> float:
        raise NotImplementedError


class PointCloudDMeasure(DMeasure):
    """Weighted points in R^d smeared to balls of radius r.

    The ball overlap is evaluated on a fixed deterministic sample of the
    ball, so masses are reproducible and exactly additive over partitions.
    """

    def __init__(self, points, weights=None, radius: float = 0.05, samples: int = 256):
        self.points = [tuple(map(float, p)) for p in points]
        if not self.points:
            raise ValueError("empty point cloud")
        self.d = len(self.points[0])
        if weights is None:
            weights = [1.0] * len(self.points)
        w = np.asarray(weights, dtype=float)
        if w.sum() <= 0:
            raise ValueError("weights must have positive total")
        self.weights = (w / w.sum()).tolist()
        self.radius = float(radius)
        self._offsets = _ball_offsets(self.d, samples) if self.radius > 0 else [tuple([0.0] * self.d)]

    def region_mass(self, constraints) -> float:
        cons = [c for c in constraints if c != "all"]
        if any(c == "empty" for c in cons):
            return 0.0
        total = 0.0
        r = self.radius
        inv = 1.0 / len(self._offsets)
        for p, w in zip(self.points, self.weights):
            hit = 0
            for off in self._offsets:
                y = tuple(pi + r * oi for pi, oi in zip(p, off))
                if all(h.contains(y) for h in cons):
                    hit += 1
            total += w * hit * inv
        return total


class RasterDMeasure(DMeasure):
    """Product raster density over a box in R^d.

    Each cell's mass is spread over a fixed deterministic set of in-cell
    sample points; mass jumps as a hyperplane sweeps the grid are then a
    cell weight divided by the sample count, small enough for the covers'
    continuity, while partition additivity stays exact.
    """

    def __init__(self, origin, cell_size: float, grid, samples: int = 64):
        self.origin = tuple(map(float, origin))
        self.cell = float(cell_size)
        g = np.asarray(grid, dtype=float)
        if (g < 0).any() or g.sum() <= 0:
            raise ValueError("grid must be nonnegative with positive total")
        self.d = g.ndim
        self.grid = g / g.sum()
        idx = np.indices(g.shape).reshape(self.d, -1).T
        centers = self.origin + self.cell * (idx + 0.5)
        w = self.grid.reshape(-1)
        keep = w > 0
        centers, w = centers[keep], w[keep]
        rng = np.random.default_rng(987)
        offs = (rng.random((samples, self.d)) - 0.5) * self.cell
        self._pts = (centers[:, None, :] + offs[None, :, :]).reshape(-1, self.d)
        self._w = np.repeat(w / samples, samples)

    def region_mass(self, constraints) -> float:
        cons = [c for c in constraints if c != "all"]
        if any(c == "empty" for c in cons):
            return 0.0
        mask = np.ones(len(self._w), dtype=bool)
        for h in cons:
            v = np.asarray(h.v)
            mask &= self._pts @ v <= h.c
        return float(self._w[mask].sum())


def partition_masses(measure: DMeasure, part: NestedPartition) -> list[float]:
    return [measure.region_mass(cons) for cons in part.regions]


# -- hyperplane piercing ------------------------------------------------------


@dataclass
class PiercingCertificate:
    x: tuple[float, ...]
    hyperplanes: list  # (v, offset) with degenerate levels dropped
    resolution: int

    def to_dict(self) -> dict:
        return {
            "schema": "piercing_certificate.v1",
            "x": list(self.x),
            "hyperplanes": [{"v": list(v), "offset": c} for v, c in self.hyperplanes],
            "resolution": self.resolution,
        }


@dataclass
class SaturationWitness:
    x: tuple[float, ...]
    bodies_in_regions: list[int]  # index of a body strictly inside each region interior
    resolution: int

    def to_dict(self) -> dict:
        return {
            "schema": "saturation_witness.v1",
            "x": list(self.x),
            "bodies_in_regions": self.bodies_in_regions,
            "resolution": self.resolution,
        }


def body_in_interior(body, constraints, slack: float = INTERIOR_SLACK) -> bool:
    """Every vertex strictly inside every half-space; convexity does the rest."""
    cons = [c for c in constraints if c != "all"]
    if any(c == "empty" for c in cons):
        return False
    return all(h.contains(v, slack=slack) for h in cons for v in body)


def body_meets_hyperplane(body, v, c, eps: float = 1e-12) -> bool:
    vals = [sum(a * b for a, b in zip(v, p)) for p in body]
    return min(vals) <= c + eps and max(vals) >= c - eps


def verify_piercing(bodies, hyperplanes) -> bool:
    return all(any(body_meets_hyperplane(b, v, c) for v, c in hyperplanes) for b in bodies)


def hyperplane_piercing_search(bodies, directions, max_resolution: int = 64):
    """Either n-1 piercing hyperplanes or a point where every region eats a body.

    Scans the simplex grid at doubling resolutions; both outcomes are
    re-verified directly before they are returned.
    """
    if not bodies:
        raise PreconditionFailed("empty family")
    d = len(directions[0])
    if d not in (2, 3):
        raise PreconditionFailed("dimensions 2 and 3 only")
    n = len(directions) + 1
    m = 1
    while m <= max_resolution:
        for vert in grid_vertices(n, m):
            x = vert.point()
            part = nested_partition(x, directions)
            saturated = []
            for cons in part.regions:
                found = -1
                for bi, b in enumerate(bodies):
                    if body_in_interior(b, cons):
                        found = bi
                        break
                saturated.append(found)
            if all(bi >= 0 for bi in saturated):
                return SaturationWitness(x=x, bodies_in_regions=saturated, resolution=m)
            if all(bi < 0 for bi in saturated):
                planes = [(v, c) for v, c in part.hyperplanes if c is not None]
                if verify_piercing(bodies, planes):
                    return PiercingCertificate(x=x, hyperplanes=planes, resolution=m)
        m = 8 if m == 1 else 2 * m
    raise ResolutionExceeded(max_resolution, "neither piercing nor saturation certified")


# -- envy-free allocation -----------------------------------------------------


@dataclass
class AllocationResult:
    x: tuple[float, ...]
    permutation: list[int]  # permutation[j] = region allocated to measure j
    masses: list[list[float]]  # masses[j][i] = measure j on region i
    envy: list[float]
    partition: NestedPartition
    resolution: int

    def to_dict(self) -> dict:
        return {
            "schema": "allocation_result.v1",
            "x": list(self.x),
            "permutation": self.permutation,
            "masses": self.masses,
            "envy": self.envy,
            "resolution": self.resolution,
        }


def envy_free_nested_allocation(
    measures: list[DMeasure],
    directions,
    tolerance: float = 1e-2,
    max_resolution: int = 1 << 11,
) -> AllocationResult:
    """Allocate the n regions to n measures so nobody prefers another's region.

    Covers: measure j accepts region i when mu_j(C_i) is within a slack of
    the best region; a colorful rainbow cell matches measures to distinct
    regions, and the resolution tightens until the verified envy fits.
    """
    n = len(measures)
    if len(directions) != n - 1:
        raise PreconditionFailed(f"need {n - 1} directions for {n} measures")
    slack = min(tolerance, 1.0 / (2 * n))

    def query(j, x):
        part = nested_partition(x, directions)
        ms = partition_masses(measures[j], part)
        best = max(ms)
        return {i for i, v in enumerate(ms) if v >= best - slack}

    oracle = CoverOracle(k=n, n=n, query_fn=query)
    engine_tol = tolerance
    best_res = None
    while True:
        schedule = default_schedule(n, engine_tol, max_resolution=max_resolution)
        machine = SolveMachine(n, n, "primal", engine_tol, schedule)
        rainbow = machine.solve(oracle)
        x = rainbow.witness
        part = nested_partition(x, directions)
        masses = [partition_masses(m, part) for m in measures]
        perm = [rainbow.permutation[j] for j in range(n)]
        envy = [max(masses[j]) - masses[j][perm[j]] for j in range(n)]
        if best_res is None or max(envy) < max(best_res.envy):
            best_res = AllocationResult(
                x=tuple(x),
                permutation=perm,
                masses=masses,
                envy=envy,
                partition=part,
                resolution=rainbow.cell.base.resolution,
            )
        if max(envy) <= tolerance or schedule[-1] >= max_resolution:
            return best_res
        engine_tol /= 2
