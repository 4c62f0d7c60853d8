"""Two-line piercing via the colorful T(4) construction.

A point x of the 3-simplex encodes a vertical line (position set by x1+x2 on
the radius-1/2 circle) and a chord through two arc-proportional boundary
points; the four open quadrants they cut are the cover regions.  Either some
scanned x leaves a family with no member inside any open quadrant, and that
family is pierced by the two lines, or a colorful rainbow cell produces four
sets in distinct quadrants, which no single line can cross.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import CoverOracle, ResolutionExceeded, SolveMachine
from .geometry import DirectedLine, TransversalResult, line_through, line_transversal_exists

OPEN_SLACK = 1e-9
RADIUS = 0.5


@dataclass
class TwoLineConfig:
    x: tuple[float, float, float, float]
    vertical_pos: float  # ell_1 is {X = vertical_pos}
    D: tuple[float, float]
    U: tuple[float, float]
    p: tuple[float, float]
    q: tuple[float, float]
    chord: DirectedLine | None  # None when p = q (ell_2 is a point)
    arc_angles: tuple[float, float, float, float, float]  # D, p, U, q, D+2pi

    def quadrant_constraints(self, i: int):
        """Sign constraints for open quadrant i, or None when it is empty.

        A quadrant is the set of points strictly on the same side of each
        nondegenerate line as the midpoint of its boundary arc.
        """
        a, b = self.arc_angles[i], self.arc_angles[i + 1]
        if b - a <= 1e-12:
            return None
        mid = (RADIUS * math.cos((a + b) / 2), RADIUS * math.sin((a + b) / 2))
        cons = []
        if 1e-12 < self.arc_angles[2] - self.arc_angles[0] < 2 * math.pi - 1e-12:
            # ell_1 nondegenerate (not tangent)
            s = 1.0 if mid[0] > self.vertical_pos else -1.0
            cons.append(("v", s))
        if self.chord is not None:
            s = 1.0 if self.chord.signed(mid) > 0 else -1.0
            cons.append(("c", s))
        return cons

    def point_side_ok(self, pt, cons) -> bool:
        for kind, s in cons:
            val = pt[0] - self.vertical_pos if kind == "v" else self.chord.signed(pt)
            if s * val <= OPEN_SLACK:
                return False
        return True

    def strictly_inside(self, poly, i: int) -> bool:
        cons = self.quadrant_constraints(i)
        if cons is None:
            return False
        return all(self.point_side_ok(v, cons) for v in poly)

    def meets_lines(self, poly) -> bool:
        """Does the set meet ell_1 or ell_2 (the point p when degenerate)?"""
        if _line_x_crossing(poly, self.vertical_pos):
            return True
        if self.chord is not None:
            return self.chord.meets_polygon(poly, eps=1e-12)
        from .geometry import point_in_convex

        return point_in_convex(poly, self.p, eps=1e-12)


def _line_x_crossing(poly, c) -> bool:
    # convex polygon meets the vertical line X = c iff c is within its x-range
    xs = [p[0] for p in poly]
    return min(xs) - 1e-12 <= c <= max(xs) + 1e-12


def two_lines_from(x) -> TwoLineConfig:
    if len(x) != 4 or abs(sum(x) - 1.0) > 1e-9 or any(v < -1e-12 for v in x):
        raise ValueError(f"x must lie in the 3-simplex, got {x}")
    s12 = x[0] + x[1]
    s34 = x[2] + x[3]
    c = RADIUS - s12  # vertical line position; right tangent shifted left
    phi = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * s12)))  # half-arc of ell_1
    D = (RADIUS * math.cos(-phi), RADIUS * math.sin(-phi))
    U = (RADIUS * math.cos(phi), RADIUS * math.sin(phi))
    if s12 > 0:
        ang_p = -phi + (x[0] / s12) * (2 * phi)
    else:
        ang_p = 0.0  # p = U = D = (1/2, 0)
    if s34 > 0:
        ang_q = phi + (x[2] / s34) * (2 * math.pi - 2 * phi)
    else:
        ang_q = math.pi  # q = U = D = (-1/2, 0)
    p = (RADIUS * math.cos(ang_p), RADIUS * math.sin(ang_p))
    q = (RADIUS * math.cos(ang_q), RADIUS * math.sin(ang_q))
    if math.hypot(p[0] - q[0], p[1] - q[1]) < 1e-12:
        chord = None
    else:
        chord = line_through(p, q)
    return TwoLineConfig(
        x=tuple(x),
        vertical_pos=c,
        D=D,
        U=U,
        p=p,
        q=q,
        chord=chord,
        arc_angles=(-phi, ang_p, phi, ang_q, 2 * math.pi - phi),
    )


@dataclass
class T4Piercing:
    family: int
    x: tuple[float, ...]
    config: TwoLineConfig
    resolution: int

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "schema": "t4_outcome.v1",
            "outcome": "piercing",
            "family": self.family,
            "x": list(self.x),
            "vertical_pos": cfg.vertical_pos,
            "chord": None if cfg.chord is None else {"p": list(cfg.p), "q": list(cfg.q)},
            "resolution": self.resolution,
        }


@dataclass
class T4Witness:
    x: tuple[float, ...]
    selection: list  # (family, quadrant, polygon) with distinct quadrants
    refutation: TransversalResult
    resolution: int

    def to_dict(self) -> dict:
        return {
            "schema": "t4_outcome.v1",
            "outcome": "witness",
            "x": list(self.x),
            "selection": [
                {"family": f, "quadrant": qd, "polygon": [list(p) for p in poly]}
                for f, qd, poly in self.selection
            ],
            "transversal_exists": self.refutation.exists,
            "resolution": self.resolution,
        }


class _PiercingFound(Exception):
    def __init__(self, family, x):
        self.family = family
        self.x = x


def _check_scaled(families):
    for fam in families:
        for poly in fam:
            for px, py in poly:
                if math.hypot(px, py) >= RADIUS - 1e-9:
                    raise ValueError("families must lie strictly inside the radius-1/2 disk")


def rescale_families(families, direction=(0.0, 1.0), margin: float = 0.05):
    """Rotate so the fixed direction is vertical and shrink into the disk.

    Returns (scaled_families, transform) where transform maps scaled points
    back to the original frame.
    """
    dx, dy = direction
    nrm = math.hypot(dx, dy)
    if nrm == 0:
        raise ValueError("direction must be nonzero")
    # rotation taking `direction` to the +y axis
    cos_t, sin_t = dy / nrm, dx / nrm

    def rot(p):
        return (cos_t * p[0] - sin_t * p[1], sin_t * p[0] + cos_t * p[1])

    rotated = [[[rot(p) for p in poly] for poly in fam] for fam in families]
    rmax = max(
        (math.hypot(px, py) for fam in rotated for poly in fam for px, py in poly),
        default=0.0,
    )
    scale = (RADIUS * (1 - margin)) / rmax if rmax > 0 else 1.0
    scaled = [[[(px * scale, py * scale) for px, py in poly] for poly in fam] for fam in rotated]

    def back(p):
        ux, uy = p[0] / scale, p[1] / scale
        return (cos_t * ux + sin_t * uy, -sin_t * ux + cos_t * uy)

    return scaled, back


def t4_solve(families, max_resolution: int = 1 << 9):
    """Either two lines piercing one family, or a colorful quadrant witness.

    Families must be pre-scaled into the radius-1/2 disk (see
    rescale_families).  Both outcomes are verified before returning.
    """
    if len(families) != 4 or any(not fam for fam in families):
        raise ValueError("need 4 nonempty families")
    _check_scaled(families)

    def query(i, x):
        cfg = two_lines_from(x)
        labels = {j for j in range(4) if any(cfg.strictly_inside(poly, j) for poly in families[i])}
        if not labels:
            raise _PiercingFound(i, x)
        return labels

    oracle = CoverOracle(k=4, n=4, query_fn=query)
    m = 1
    last_error = None
    while m <= max_resolution:
        schedule = _schedule_to(m)
        machine = SolveMachine(4, 4, "primal", tolerance=3.0 / m, schedule=schedule)
        try:
            rainbow = machine.solve(oracle)
        except _PiercingFound as hit:
            cfg = two_lines_from(hit.x)
            assert all(cfg.meets_lines(poly) for poly in families[hit.family])
            return T4Piercing(family=hit.family, x=tuple(hit.x), config=cfg, resolution=m)
        except ResolutionExceeded as exc:
            last_error = exc
            m = 8 if m == 1 else 2 * m
            continue
        out = _witness_at(rainbow, families)
        if out is not None:
            x, selection = out
            polys = [poly for _, _, poly in selection]
            refutation = line_transversal_exists(polys)
            if not refutation.exists:
                return T4Witness(
                    x=x,
                    selection=selection,
                    refutation=refutation,
                    resolution=rainbow.cell.base.resolution,
                )
        m = 8 if m == 1 else 2 * m
    raise ResolutionExceeded(max_resolution, f"no certificate obtained: {last_error}")


def _schedule_to(m):
    sched = [1]
    r = 8
    while r < m:
        sched.append(r)
        r *= 2
    if m > 1:
        sched.append(m)
    return sched


def _witness_at(rainbow, families):
    """A single point where each owner's set sits in its distinct quadrant."""
    candidates = [rainbow.witness] + [v.point() for v in rainbow.cell.vertices()]
    pairs = sorted(zip(rainbow.owners, rainbow.labels))
    for x in candidates:
        cfg = two_lines_from(x)
        selection = []
        for owner, label in pairs:
            pick = next(
                (poly for poly in families[owner] if cfg.strictly_inside(poly, label)), None
            )
            if pick is None:
                break
            selection.append((owner, label, pick))
        else:
            return tuple(x), selection
    return None
