"""Cake cutting, rental harmony, and the exact greedy disproportionate division.

Cut vectors live on the simplex: x_i is the length of the i-th piece and the
cuts are the prefix sums.  Cake allocation uses the colorful primal solve on
preference covers; rental harmony runs the dual solve on the rent simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import CoverOracle, SolveMachine, default_schedule
from .simplex import grid_cells, owner_of


def cuts_of(x) -> list[float]:
    out = []
    acc = 0.0
    for xi in x[:-1]:
        acc += xi
        out.append(min(acc, 1.0))
    return out


def pieces_of(x) -> list[tuple[float, float]]:
    u = [0.0] + cuts_of(x) + [1.0]
    return [(u[i], u[i + 1]) for i in range(len(x))]


class CakeValuation:
    """Piecewise-constant density on [0,1], held exactly as rationals."""

    def __init__(self, breakpoints, densities):
        bps = [Fraction(b) for b in breakpoints]
        dens = [Fraction(d) for d in densities]
        if len(bps) != len(dens) + 1:
            raise ValueError("need one more breakpoint than densities")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must span [0, 1]")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(d < 0 for d in dens):
            raise ValueError("densities must be nonnegative")
        total = sum(d * (c - b) for d, b, c in zip(dens, bps, bps[1:]))
        if total <= 0:
            raise ValueError("valuation must have positive total mass")
        self.breakpoints = bps
        self.densities = [d / total for d in dens]
        self.d_max = float(max(self.densities))

    @classmethod
    def uniform(cls) -> "CakeValuation":
        return cls([0, 1], [1])

    def mass(self, a, b) -> Fraction:
        """Exact measure of [a, b] (clamped to [0, 1])."""
        a, b = Fraction(a), Fraction(b)
        if b <= a:
            return Fraction(0)
        total = Fraction(0)
        for d, lo, hi in zip(self.densities, self.breakpoints, self.breakpoints[1:]):
            left, right = max(a, lo), min(b, hi)
            if right > left:
                total += d * (right - left)
        return total

    def mass_f(self, a: float, b: float) -> float:
        return float(self.mass(a, b))

    def first_hit(self, t, target):
        """Smallest x >= t with mass([t, x]) = target, or None if unreachable."""
        t, target = Fraction(t), Fraction(target)
        if target <= 0:
            return t
        acc = Fraction(0)
        for d, lo, hi in zip(self.densities, self.breakpoints, self.breakpoints[1:]):
            left = max(t, lo)
            if left >= hi:
                continue
            gain = d * (hi - left)
            if acc + gain >= target:
                if d == 0:
                    return left  # target met exactly at the plateau start
                return left + (target - acc) / d
            acc += gain
        return None


class ValuationPlayer:
    """Prefers the argmax-value pieces, keeping exact ties (closed covers)."""

    def __init__(self, valuation: CakeValuation, tie_eps: float = 1e-12):
        self.valuation = valuation
        self.tie_eps = tie_eps

    def preferred(self, x) -> set[int]:
        vals = [self.valuation.mass_f(a, b) for a, b in pieces_of(x)]
        best = max(vals)
        return {i for i, v in enumerate(vals) if v >= best - self.tie_eps}


@dataclass
class CakeResult:
    x: tuple[float, ...]
    cuts: list[float]
    permutation: list[int]  # permutation[j] = piece assigned to player j
    cell_diameter: float
    envy_bounds: list  # 2 * D_max * diameter for valuation players, None otherwise
    measured_envy: list  # measured for valuation players, None otherwise
    resolution: int

    def to_dict(self) -> dict:
        return {
            "schema": "cake_result.v1",
            "x": list(self.x),
            "cuts": self.cuts,
            "permutation": self.permutation,
            "cell_diameter": self.cell_diameter,
            "envy_bounds": self.envy_bounds,
            "measured_envy": self.measured_envy,
            "resolution": self.resolution,
        }


def envy_free_cake(players, tolerance: float = 1e-3, max_resolution: int = 1 << 14) -> CakeResult:
    """Colorful solve over preference covers; player j gets piece permutation[j].

    For valuation-backed players the envy is bounded by 2 * D_max * (cell
    diameter), since moving every cut by at most the cell diameter changes a
    piece value by at most D_max times twice that much.
    """
    n = len(players)
    if n < 2:
        raise ValueError("need at least 2 players")

    def query(j, x):
        return players[j].preferred(x)

    oracle = CoverOracle(k=n, n=n, query_fn=query)
    schedule = default_schedule(n, tolerance, max_resolution=max_resolution)
    machine = SolveMachine(n, n, "primal", tolerance, schedule)
    rainbow = machine.solve(oracle)
    x = rainbow.witness
    delta = rainbow.diameter()
    perm = [rainbow.permutation[j] for j in range(n)]
    bounds, envies = [], []
    for j, player in enumerate(players):
        val = getattr(player, "valuation", None)
        if val is None:
            bounds.append(None)
            envies.append(None)
            continue
        vals = [val.mass_f(a, b) for a, b in pieces_of(x)]
        bounds.append(2 * val.d_max * delta)
        envies.append(max(vals) - vals[perm[j]])
    return CakeResult(
        x=tuple(x),
        cuts=cuts_of(x),
        permutation=perm,
        cell_diameter=delta,
        envy_bounds=bounds,
        measured_envy=envies,
        resolution=rainbow.cell.base.resolution,
    )


# -- rental harmony -----------------------------------------------------------


class QuasilinearPlayer:
    """Utility value - rent, preferring free rooms when any rent is zero."""

    def __init__(self, values, tie_eps: float = 1e-12):
        self.values = [float(v) for v in values]
        self.tie_eps = tie_eps

    def preferred(self, x) -> set[int]:
        free = {i for i, r in enumerate(x) if r <= 0.0}
        if free:
            return free
        utils = [v - r for v, r in zip(self.values, x)]
        best = max(utils)
        return {i for i, u in enumerate(utils) if u >= best - self.tie_eps}


@dataclass
class RentalResult:
    rents: tuple[float, ...]
    assignment: list[int]  # assignment[j] = room of player j
    envy: list  # utility shortfall per player (quasilinear only)
    resolution: int

    def to_dict(self) -> dict:
        return {
            "schema": "rental_result.v1",
            "rents": list(self.rents),
            "assignment": self.assignment,
            "envy": self.envy,
            "resolution": self.resolution,
        }


def rental_harmony(players, tolerance: float = 1e-2, max_resolution: int = 1 << 12) -> RentalResult:
    """Dual colorful solve on the rent simplex; player j gets room assignment[j].

    The adaptive loop tightens the grid until quasilinear envy (utility of the
    best room minus the assigned one) fits the tolerance, or resolution runs
    out; the best iterate is returned.
    """
    n = len(players)
    if n < 2:
        raise ValueError("need at least 2 players")

    def query(j, x):
        return players[j].preferred(x)

    oracle = CoverOracle(k=n, n=n, query_fn=query, mode="dual")

    def measure(rents, assignment):
        envy = []
        for j, player in enumerate(players):
            vals = getattr(player, "values", None)
            if vals is None:
                envy.append(None)
                continue
            utils = [v - r for v, r in zip(vals, rents)]
            envy.append(max(utils) - utils[assignment[j]])
        worst = max((e for e in envy if e is not None), default=0.0)
        return envy, worst

    # the free-room rule puts every room's cover on its whole facet, so the
    # boundary is littered with spurious fully-labeled cells; enumerate the
    # coarse level exhaustively and refine only from the least-envy cell
    seed = _best_coarse_rental_cell(oracle, n, measure)
    engine_tol = tolerance
    best = None
    while True:
        schedule = default_schedule(n, engine_tol, max_resolution=max_resolution)
        machine = SolveMachine(n, n, "dual", engine_tol, schedule, initial_seed=seed)
        rainbow = machine.solve(oracle)
        rents = rainbow.witness
        assignment = [rainbow.permutation[j] for j in range(n)]
        envy, worst = measure(rents, assignment)
        if best is None or worst < best[0]:
            best = (worst, rents, assignment, envy, rainbow.cell.base.resolution)
        if worst <= tolerance or schedule[-1] >= max_resolution:
            break
        engine_tol /= 2
    # no envy-free nonnegative rent vector needs to exist; the dual solve then
    # converges to a boundary point whose quasilinear envy stays positive, so
    # polish with the direct min-max-envy program when values are available
    if best[0] > tolerance and all(getattr(p, "values", None) is not None for p in players):
        polished = _min_max_envy_rents([p.values for p in players])
        if polished is not None and polished[0] < best[0]:
            worst, rents, assignment = polished
            envy, _ = measure(rents, assignment)
            best = (worst, rents, assignment, envy, best[4])
    _, rents, assignment, envy, res = best
    return RentalResult(rents=tuple(rents), assignment=assignment, envy=envy, resolution=res)


def _min_max_envy_rents(values):
    """Min-max quasilinear envy over nonnegative rents summing to 1.

    For each room assignment this is a small LP in (rents, envy); assignments
    are enumerated outright for small n, otherwise only the value-maximizing
    one is tried.  Returns (envy, rents, assignment) or None.
    """
    from itertools import permutations

    import numpy as np
    from scipy.optimize import linear_sum_assignment, linprog

    n = len(values)
    if n <= 6:
        assignments = [list(p) for p in permutations(range(n))]
    else:
        _, cols = linear_sum_assignment(-np.asarray(values, dtype=float))
        assignments = [list(cols)]
    best = None
    for sigma in assignments:
        a_ub, b_ub = [], []
        for j in range(n):
            vj, a = values[j], sigma[j]
            for i in range(n):
                if i == a:
                    continue
                # (vj[i] - r_i) - (vj[a] - r_a) <= e
                row = [0.0] * (n + 1)
                row[i] -= 1.0
                row[a] += 1.0
                row[n] = -1.0
                a_ub.append(row)
                b_ub.append(vj[a] - vj[i])
        res = linprog(
            [0.0] * n + [1.0],
            A_ub=a_ub,
            b_ub=b_ub,
            A_eq=[[1.0] * n + [0.0]],
            b_eq=[1.0],
            bounds=[(0.0, None)] * (n + 1),
        )
        if res.status == 0 and (best is None or res.fun < best[0]):
            rents = [max(0.0, float(r)) for r in res.x[:n]]
            total = sum(rents)
            best = (float(res.fun), [r / total for r in rents], sigma)
    return best


def _best_coarse_rental_cell(oracle, n, measure, m: int | None = None):
    """Centroid of the least-envy fully-labeled cell of the coarse grid."""
    if m is None:
        m = {2: 64, 3: 48, 4: 16}.get(n, 8)  # keep the full scan around 10^4 cells
    cache: dict[tuple, frozenset] = {}

    def label(v):
        owner = owner_of(v, n)
        key = (owner, v.counts)
        if key not in cache:
            cache[key] = frozenset(oracle.query(owner, v.point()))
        ans = cache[key]
        return min(ans, key=lambda i: (v.counts[i], i))

    best = None
    for cell in grid_cells(n, m):
        verts = cell.vertices()
        labels = [label(v) for v in verts]
        if len(set(labels)) != n:
            continue
        centroid = cell.centroid()
        assignment = [None] * n
        for v, lab in zip(verts, labels):
            assignment[owner_of(v, n)] = lab
        _, worst = measure(centroid, assignment)
        if best is None or worst < best[0]:
            best = (worst, centroid)
    return None if best is None else best[1]


# -- greedy disproportionate division ----------------------------------------


@dataclass
class GreedyResult:
    permutation: list[int]  # permutation[i] = measure assigned the i-th piece
    cuts: list[Fraction]
    achieved: list[Fraction]  # achieved[i] = assigned measure's mass of piece i

    @property
    def cuts_float(self) -> list[float]:
        return [float(c) for c in self.cuts]

    def to_dict(self) -> dict:
        return {
            "schema": "greedy_division_result.v1",
            "permutation": self.permutation,
            "cuts": [float(c) for c in self.cuts],
            "cuts_exact": [[c.numerator, c.denominator] for c in self.cuts],
            "achieved": [float(a) for a in self.achieved],
        }


def greedy_division(measures: list[CakeValuation], alphas) -> GreedyResult:
    """Left-to-right first-hit division: repeatedly cut at the smallest point
    where some unassigned measure reaches its target on the remainder.

    The first n-1 assigned measures get their targets exactly (rational
    arithmetic); the last measure takes the remainder, which can fall short
    of its target for some instances.
    """
    n = len(measures)
    # float alphas go through their decimal literal: 0.3 means 3/10 exactly
    targets = [Fraction(str(a)) if isinstance(a, float) else Fraction(a) for a in alphas]
    if len(targets) != n:
        raise ValueError("need one alpha per measure")
    if any(a <= 0 for a in targets):
        raise ValueError("alphas must be positive")
    if sum(targets) != 1:
        # accept float rounding in the inputs but nothing beyond it
        if abs(float(sum(targets)) - 1.0) > 1e-9:
            raise ValueError(f"alphas must sum to 1, got {float(sum(targets))}")
    remaining = list(range(n))
    t = Fraction(0)
    perm: list[int] = []
    cuts: list[Fraction] = []
    achieved: list[Fraction] = []
    while len(remaining) > 1:
        hits = []
        for i in remaining:
            xcut = measures[i].first_hit(t, targets[i])
            if xcut is not None:
                hits.append((xcut, i))
        if not hits:
            break  # nobody can reach a target on the remainder
        xcut, i = min(hits)
        perm.append(i)
        cuts.append(xcut)
        achieved.append(measures[i].mass(t, xcut))
        remaining.remove(i)
        t = xcut
    # the remainder goes to the remaining measures in index order; when the
    # loop broke early, everyone after the first gets an empty piece at 1
    for j, i in enumerate(remaining):
        perm.append(i)
        achieved.append(measures[i].mass(t, 1) if j == 0 else Fraction(0))
        if j < len(remaining) - 1:
            cuts.append(Fraction(1))
        t = Fraction(1)
    return GreedyResult(permutation=perm, cuts=cuts, achieved=achieved)
