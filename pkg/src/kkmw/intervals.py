"""Interval piercing: exact Gallai oracles and the simplicial matching route.

A barycentric point x of the (k-1)-simplex encodes the candidate piercing set
{u_1, ..., u_(k-1)} with u_i = x_1 + ... + x_i.  If no k-1 points pierce the
family, some interval hides strictly inside a gap (u_(i-1), u_i), and the gap
indices form a KKM cover whose rainbow cells yield a matching of size k.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .engine import CoverOracle, RainbowCell, ResolutionExceeded, SolveMachine, solve_colorful_kkm
from .simplex import grid_cells, owner_of

STRICT_EPS = 1e-9


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"lo > hi: {self.lo} > {self.hi}")

    def disjoint(self, other: "Interval") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def inside_gap(self, a: float, b: float, eps: float = STRICT_EPS) -> bool:
        """Strict containment in the open gap (a, b), with float slack."""
        return self.lo > a + eps and self.hi < b - eps


@dataclass
class IntervalFamily:
    intervals: list[Interval]
    color: int | None = None

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("empty family")

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)


def normalize_families(families: list[list[tuple[float, float]]], margin: float = 0.01):
    """Affinely map all intervals into (0,1), keeping a margin off 0 and 1."""
    los = [lo for fam in families for lo, _ in fam]
    his = [hi for fam in families for _, hi in fam]
    lo, hi = min(los), max(his)
    span = hi - lo or 1.0
    scale = (1.0 - 2 * margin) / span

    def t(v):
        return margin + (v - lo) * scale

    return [IntervalFamily([Interval(t(a), t(b)) for a, b in fam]) for fam in families]


def brute_nu(family: IntervalFamily) -> int:
    """Matching number by the right-endpoint greedy sweep (exact for intervals)."""
    chosen_hi = None
    count = 0
    for iv in sorted(family, key=lambda i: i.hi):
        if chosen_hi is None or iv.lo > chosen_hi:
            count += 1
            chosen_hi = iv.hi
    return count


def brute_tau(family: IntervalFamily) -> int:
    """Piercing number; equals the matching number for intervals (Gallai)."""
    return brute_nu(family)


def subset_brute_tau(family: IntervalFamily) -> int:
    """Exponential oracle: smallest set of endpoints piercing everything."""
    points = sorted({iv.hi for iv in family})
    for size in range(1, len(points) + 1):
        for combo in itertools.combinations(points, size):
            if all(any(iv.lo <= p <= iv.hi for p in combo) for iv in family):
                return size
    return 0


def subset_brute_nu(family: IntervalFamily) -> int:
    """Exponential oracle: largest pairwise disjoint subfamily."""
    best = 0
    ivs = family.intervals
    for size in range(len(ivs), 0, -1):
        for combo in itertools.combinations(ivs, size):
            if all(a.disjoint(b) for a, b in itertools.combinations(combo, 2)):
                return size
    return best


def piercing_points(x) -> list[float]:
    """Prefix sums u_1..u_(k-1); nondecreasing, inside [0,1]."""
    out = []
    acc = 0.0
    for xi in x[:-1]:
        acc += xi
        out.append(min(acc, 1.0))
    return out


def gaps_of(x) -> list[tuple[float, float]]:
    u = [0.0] + piercing_points(x) + [1.0]
    return [(u[i], u[i + 1]) for i in range(len(x))]


def gallai_oracle(family: IntervalFamily, k: int, n: int = 1, eps: float = STRICT_EPS) -> CoverOracle:
    """Cover oracle returning the gap indices that swallow some interval whole."""
    if k < 1:
        raise ValueError("k must be >= 1")

    def query(_j, x):
        return {
            i
            for i, (a, b) in enumerate(gaps_of(x))
            if any(iv.inside_gap(a, b, eps) for iv in family)
        }

    return CoverOracle(k=k, n=n, query_fn=query)


class PreconditionFailed(Exception):
    pass


def _extract_matching(rainbow, families_by_owner) -> list[Interval] | None:
    """One interval per gap label, certified at the vertex that asserted it.

    Gaps are processed left to right and each pick must clear the previous
    pick's right endpoint, so a successful extraction is pairwise disjoint by
    construction.
    """
    verts = rainbow.cell.vertices()
    by_label = sorted(
        (label, verts[vi], rainbow.owners[vi]) for vi, label in enumerate(rainbow.labels)
    )
    picked = []
    last_hi = float("-inf")
    for label, vert, owner in by_label:
        a, b = gaps_of(vert.point())[label]
        fits = [
            iv
            for iv in families_by_owner[owner]
            if iv.inside_gap(a, b) and iv.lo > last_hi
        ]
        if not fits:
            return None
        iv = min(fits, key=lambda iv: (iv.hi, iv.lo))
        last_hi = iv.hi
        picked.append((owner, iv))
    out = [iv for _, iv in picked]
    assert all(p.disjoint(q) for p, q in itertools.combinations(out, 2))
    return picked


def _matching_schedules(k):
    # refine until extraction yields a disjoint pick; generous upper end
    m = 1
    while m <= (1 << 12):
        yield m
        m = 8 if m == 1 else 2 * m


def _schedule_to(m):
    sched = [1]
    r = 8
    while r < m:
        sched.append(r)
        r *= 2
    if m > 1:
        sched.append(m)
    return sched


_EXHAUSTIVE_CELL_CAP = 300_000


def _exhaustive_extract(k, n, oracle, fams, m):
    """Try extraction on every rainbow cell of the level, not just the first.

    The scanner's first rainbow cell can sit at a spurious accumulation point
    where no disjoint pick exists; some other rainbow cell at the same level
    usually admits one.
    """
    cache = {}

    def label(v):
        owner = owner_of(v, n)
        key = (owner, v.counts)
        if key not in cache:
            cache[key] = oracle.query(owner, v.point())
        carrier = [i for i in sorted(cache[key]) if v.counts[i] > 0]
        return (owner, carrier[0]) if carrier else (owner, None)

    for cell in grid_cells(k, m):
        verts = cell.vertices()
        pairs = [label(v) for v in verts]
        labels = [lab for _, lab in pairs]
        if None in labels or len(set(labels)) != k:
            continue
        rainbow = RainbowCell(
            cell=cell,
            labels=tuple(labels),
            owners=tuple(owner for owner, _ in pairs),
            witness=cell.centroid(),
        )
        picked = _extract_matching(rainbow, fams)
        if picked is not None:
            return picked
    return None


def _solve_and_extract(k, n, oracle, fams, m):
    machine = SolveMachine(k, n, "primal", tolerance=(k - 1) / m, schedule=_schedule_to(m))
    try:
        picked = _extract_matching(machine.solve(oracle), fams)
        if picked is not None:
            return picked
    except ResolutionExceeded:
        pass
    if m ** (k - 1) <= _EXHAUSTIVE_CELL_CAP:
        return _exhaustive_extract(k, n, oracle, fams, m)
    return None


def kkm_matching(family: IntervalFamily) -> list[Interval]:
    """A maximum matching via the rainbow-cell route; size equals brute_nu."""
    k = brute_tau(family)
    if k == 0:
        return []
    if k == 1:
        return [min(family, key=lambda iv: (iv.hi, iv.lo))]
    oracle = gallai_oracle(family, k, n=1)
    fams = {0: family}
    for m in _matching_schedules(k):
        picked = _solve_and_extract(k, 1, oracle, fams, m)
        if picked is not None:
            return [iv for _, iv in picked]
    raise RuntimeError("matching extraction failed at maximum resolution")


def colorful_matching(families: list[IntervalFamily]) -> list[Interval]:
    """One interval per family, pairwise disjoint, via the colorful solve."""
    k = len(families)
    taus = [brute_tau(f) for f in families]
    if any(t < k for t in taus):
        raise PreconditionFailed(f"need tau >= {k} for every family, got {taus}")

    def query(j, x):
        return {
            i
            for i, (a, b) in enumerate(gaps_of(x))
            if any(iv.inside_gap(a, b) for iv in families[j])
        }

    oracle = CoverOracle(k=k, n=k, query_fn=query)
    fams = dict(enumerate(families))
    for m in _matching_schedules(k):
        picked = _solve_and_extract(k, k, oracle, fams, m)
        if picked is not None:
            # one interval per family, reported in family order
            return [iv for _, iv in sorted(picked, key=lambda p: p[0])]
    raise RuntimeError("colorful matching extraction failed at maximum resolution")


# -- d-intervals -------------------------------------------------------------


@dataclass(frozen=True)
class DInterval:
    """Union of at most d compact components; empty components dropped."""

    components: tuple[Interval, ...]

    def hit_by(self, p: float) -> bool:
        return any(c.lo <= p <= c.hi for c in self.components)

    def disjoint(self, other: "DInterval") -> bool:
        return all(a.disjoint(b) for a in self.components for b in other.components)


def d_interval_tau(family: list[DInterval]) -> int:
    points = sorted({c.hi for div in family for c in div.components})
    if not family:
        return 0
    for size in range(1, len(points) + 1):
        for combo in itertools.combinations(points, size):
            if all(any(div.hit_by(p) for p in combo) for div in family):
                return size
    return len(points)


def d_interval_nu(family: list[DInterval]) -> int:
    best = 0
    for size in range(len(family), 0, -1):
        for combo in itertools.combinations(family, size):
            if all(a.disjoint(b) for a, b in itertools.combinations(combo, 2)):
                return size
    return best


@dataclass
class BoundReport:
    d: int
    instances: int
    bound_factor: int
    max_ratio: float = 0.0
    worst: list = field(default_factory=list)
    violations: int = 0


def random_d_interval(rng: random.Random, d: int) -> DInterval:
    comps = []
    ncomp = rng.randint(1, d)
    for _ in range(ncomp):
        lo = rng.uniform(0.01, 0.9)
        hi = min(lo + rng.uniform(0.005, 0.25), 0.99)
        comps.append(Interval(lo, hi))
    return DInterval(tuple(comps))


def d_interval_bound_harness(instances: int, d: int, size: int, seed: int = 0) -> BoundReport:
    """Empirical check of tau <= (d^2 - d + 1) nu on random small instances."""
    if size > 10 or d > 3:
        raise ValueError("harness is exponential; keep size <= 10 and d <= 3")
    rng = random.Random(seed)
    factor = d * d - d + 1
    report = BoundReport(d=d, instances=instances, bound_factor=factor)
    for _ in range(instances):
        fam = [random_d_interval(rng, d) for _ in range(rng.randint(1, size))]
        tau = d_interval_tau(fam)
        nu = d_interval_nu(fam)
        ratio = tau / nu if nu else 0.0
        if ratio > report.max_ratio:
            report.max_ratio = ratio
            report.worst = fam
        if tau > factor * nu:
            report.violations += 1
    return report
