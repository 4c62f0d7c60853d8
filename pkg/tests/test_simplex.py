"""Staircase triangulation: counts, tiling volume, owner coloring."""

import itertools
import math

import numpy as np
import pytest

from kkmw.simplex import (
    Cell,
    GridVertex,
    cells_for_base,
    grid_cells,
    grid_vertices,
    nearest_base,
    owner_of,
    ring_bases,
)


def cell_volume(cell: Cell) -> float:
    verts = [v.point() for v in cell.vertices()]
    base = np.array(verts[0][:-1])
    mat = np.array([np.array(v[:-1]) - base for v in verts[1:]])
    k = len(verts[0])
    return abs(np.linalg.det(mat)) / math.factorial(k - 1)


@pytest.mark.parametrize("k,m", [(2, 5), (3, 4), (3, 8), (4, 6), (5, 8)])
def test_cell_count_and_volume(k, m):
    cells = list(grid_cells(k, m))
    assert len(cells) == m ** (k - 1)
    total = sum(cell_volume(c) for c in cells)
    simplex_vol = 1.0 / math.factorial(k - 1)
    assert abs(total - simplex_vol) < 1e-9


@pytest.mark.parametrize("k,m", [(2, 5), (3, 6), (4, 4), (5, 3)])
def test_every_cell_owner_complete(k, m):
    for cell in grid_cells(k, m):
        owners = {owner_of(v, k) for v in cell.vertices()}
        assert owners == set(range(k))


def test_vertex_count():
    # lattice points of the dilated simplex: C(m+k-1, k-1)
    for k, m in [(2, 7), (3, 5), (4, 4)]:
        got = len(list(grid_vertices(k, m)))
        assert got == math.comb(m + k - 1, k - 1)


def test_cells_partition_vertices_validly():
    for cell in grid_cells(3, 4):
        assert cell.is_valid()
        verts = cell.vertices()
        assert len(verts) == 3
        for v in verts:
            assert sum(v.counts) == 4


def test_owner_coloring_residues():
    # owner is sum(j * counts[j]) mod k; moving one unit from s to s+1
    # changes it by exactly 1, so a chain visits all residues
    v = GridVertex((2, 1, 1))
    base = owner_of(v, 3)
    w = GridVertex((1, 2, 1))
    assert owner_of(w, 3) == (base + 1) % 3


def test_nearest_base_rounds_onto_grid():
    b = nearest_base((0.34, 0.33, 0.33), 3, 7)
    assert sum(b.counts) == 7
    assert all(c >= 0 for c in b.counts)
    # exact lattice point round-trips
    b2 = nearest_base(GridVertex((3, 2, 2)).point(), 3, 7)
    assert b2.counts == (3, 2, 2)


def test_ring_bases_cover_grid():
    center = nearest_base((0.5, 0.3, 0.2), 3, 6)
    seen = set()
    for r in range(0, 13):
        for b in ring_bases(center, r, 6):
            assert b.counts not in seen  # rings are disjoint
            seen.add(b.counts)
    everything = {b.counts for b in grid_vertices(3, 6)}
    assert seen == everything


def test_centroid_and_diameter():
    # L1 diameter of a staircase cell is at most 2*floor(k/2)/m
    for cell in itertools.islice(grid_cells(4, 5), 10):
        c = cell.centroid()
        assert abs(sum(c) - 1.0) < 1e-12
        assert cell.diameter_l1() <= 2 * (4 // 2) / 5 + 1e-12


def test_cells_for_base_permutations():
    # corner base: only the staircase order that never goes negative survives
    assert len(list(cells_for_base(GridVertex((3, 0, 0))))) == 1
    # interior base admits all (k-1)! orders
    assert len(list(cells_for_base(GridVertex((3, 3, 3))))) == math.factorial(2)
