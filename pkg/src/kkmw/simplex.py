"""Lattice discretization of the standard simplex.

The (k-1)-simplex is triangulated with the staircase (Kuhn) scheme at
resolution m: lattice vertices are integer count vectors summing to m, and an
elementary cell is a chain of k vertices obtained from a base vertex by moving
one count unit from coordinate s to s+1, once for each s in a permutation of
[0, k-2].  This gives exactly m^(k-1) cells tiling the simplex, and the owner
coloring below visits all residues along every chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class GridVertex:
    """A lattice point of the dilated simplex: counts sum to the resolution."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError(f"negative counts: {self.counts}")

    @property
    def k(self) -> int:
        return len(self.counts)

    @property
    def resolution(self) -> int:
        return sum(self.counts)

    def point(self) -> tuple[float, ...]:
        m = self.resolution
        return tuple(c / m for c in self.counts)

    def exact_point(self) -> tuple[Fraction, ...]:
        m = self.resolution
        return tuple(Fraction(c, m) for c in self.counts)

    def key(self) -> str:
        return ",".join(str(c) for c in self.counts)


def barycentric_ok(coords, tol=1e-12) -> bool:
    """Check that coords is a valid barycentric point."""
    return all(c >= -tol for c in coords) and abs(sum(coords) - 1.0) <= max(tol, 1e-12)


def owner_of(v: GridVertex, n: int) -> int:
    """Owner color in [0, n) of a lattice vertex.

    Each staircase step (moving a unit from coordinate j to j+1) increments
    sum(j * a_j) by one, so the k vertices of any cell see n consecutive
    residues; with n = k every cell is owner-complete.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(j * a for j, a in enumerate(v.counts)) % n


@dataclass(frozen=True)
class Cell:
    """An elementary simplex of the staircase triangulation."""

    base: GridVertex
    step_order: tuple[int, ...]  # permutation of [0, k-2]

    def vertices(self) -> tuple[GridVertex, ...]:
        verts = [self.base]
        counts = list(self.base.counts)
        for s in self.step_order:
            counts[s] -= 1
            counts[s + 1] += 1
            if counts[s] < 0:
                raise ValueError("cell leaves the nonnegative orthant")
            verts.append(GridVertex(tuple(counts)))
        return tuple(verts)

    def is_valid(self) -> bool:
        counts = list(self.base.counts)
        for s in self.step_order:
            counts[s] -= 1
            counts[s + 1] += 1
            if counts[s] < 0:
                return False
        return True

    def centroid(self) -> tuple[float, ...]:
        verts = self.vertices()
        k = self.base.k
        m = self.base.resolution
        return tuple(sum(v.counts[i] for v in verts) / (k * m) for i in range(k))

    def diameter_l1(self) -> float:
        verts = [v.point() for v in self.vertices()]
        return max(
            sum(abs(a - b) for a, b in zip(u, w))
            for u, w in itertools.combinations(verts, 2)
        )


def _check_km(k: int, m: int):
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")


def grid_vertices(k: int, m: int):
    """All lattice vertices of the resolution-m grid on the (k-1)-simplex."""
    _check_km(k, m)

    def rec(prefix, remaining, slots):
        if slots == 1:
            yield GridVertex(tuple(prefix + [remaining]))
            return
        for c in range(remaining + 1):
            yield from rec(prefix + [c], remaining - c, slots - 1)

    yield from rec([], m, k)


def grid_bases(k: int, m: int):
    """Base vertices, in lexicographic order of their counts."""
    yield from grid_vertices(k, m)


def cells_for_base(base: GridVertex):
    k = base.k
    for perm in itertools.permutations(range(k - 1)):
        cell = Cell(base, perm)
        if cell.is_valid():
            yield cell


def grid_cells(k: int, m: int):
    """All elementary cells; there are exactly m^(k-1)."""
    _check_km(k, m)
    for base in grid_bases(k, m):
        yield from cells_for_base(base)


def nearest_base(point, k: int, m: int) -> GridVertex:
    """Lattice vertex closest to a barycentric point (largest-remainder rounding)."""
    raw = [point[i] * m for i in range(k)]
    counts = [int(c) for c in raw]
    deficit = m - sum(counts)
    order = sorted(range(k), key=lambda i: raw[i] - counts[i], reverse=True)
    for i in range(deficit):
        counts[order[i % k]] += 1
    while sum(counts) > m:  # defensive; deficit can't be negative with floor
        counts[max(range(k), key=lambda i: counts[i])] -= 1
    return GridVertex(tuple(counts))


def ring_bases(center: GridVertex, r: int, m: int):
    """Bases at L-inf distance exactly r from center in the first k-1 counts.

    Ring 0 is the center itself.  Offsets are enumerated in lexicographic
    order so scans are deterministic.
    """
    k = center.k
    c = center.counts

    def offsets(slots):
        if slots == 0:
            yield ()
            return
        for d in range(-r, r + 1):
            for rest in offsets(slots - 1):
                yield (d,) + rest

    for off in offsets(k - 1):
        if max(abs(d) for d in off) != r and r > 0:
            continue
        if r == 0 and any(off):
            continue
        counts = [c[i] + off[i] for i in range(k - 1)]
        last = m - sum(counts)
        if last < 0 or any(x < 0 for x in counts):
            continue
        yield GridVertex(tuple(counts) + (last,))
