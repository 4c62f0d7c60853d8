"""Rainbow-cell search over (colorful / dual) cover oracles.

The solver walks a coarse-to-fine resolution schedule.  The coarsest level is
scanned exhaustively; finer levels are scanned in rings around the previous
witness, which keeps the number of oracle queries small even when the target
tolerance forces resolutions in the thousands.  All oracle answers are cached
by (cover index, lattice vertex), and the scan itself is a deterministic pure
function of the cache, so a solve can be suspended, serialized, and resumed
without drift: replaying the same answers always reproduces the same output.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .simplex import (
    Cell,
    GridVertex,
    cells_for_base,
    grid_bases,
    nearest_base,
    owner_of,
    ring_bases,
)


class EngineError(Exception):
    pass


class AdmissibilityViolation(EngineError):
    def __init__(self, cover: int, vertex: GridVertex, answer):
        self.cover = cover
        self.vertex = vertex
        self.answer = set(answer)
        super().__init__(
            f"cover {cover} returned {sorted(self.answer)} at vertex "
            f"{vertex.counts}, which has no admissible label"
        )


class ResolutionExceeded(EngineError):
    def __init__(self, resolution: int, detail: str = ""):
        self.resolution = resolution
        super().__init__(
            f"no rainbow cell found at resolution {resolution}" + (f" ({detail})" if detail else "")
        )


class UnknownQueryId(EngineError):
    pass


class AnswerShapeInvalid(EngineError):
    pass


class CoverOracle:
    """Membership interface for a family of covers of the simplex.

    query(j, x) returns the set of indices i for which the oracle asserts
    x in A^j_i.  Primal mode promises the answer meets the carrier of x;
    dual mode promises the answer contains every index with x_i = 0.
    """

    def __init__(self, k: int, n: int, query_fn, mode: str = "primal"):
        if mode not in ("primal", "dual"):
            raise ValueError(f"unknown mode {mode!r}")
        if n not in (1, k):
            raise ValueError("n must be 1 (plain) or k (colorful)")
        self.k = k
        self.n = n
        self.mode = mode
        self._query = query_fn

    def query(self, j: int, x) -> frozenset[int]:
        ans = frozenset(self._query(j, x))
        if any(i < 0 or i >= self.k for i in ans):
            raise AnswerShapeInvalid(f"cover {j} returned out-of-range index: {sorted(ans)}")
        return ans


@dataclass(frozen=True)
class PendingQuery:
    query_id: str
    cover: int
    vertex: GridVertex

    def point(self):
        return self.vertex.point()


@dataclass
class NeedAnswers:
    """The solve is suspended until these queries are answered."""

    queries: list[PendingQuery]


@dataclass(frozen=True)
class RainbowCell:
    cell: Cell
    labels: tuple[int, ...]   # label of vertex i of the cell
    owners: tuple[int, ...]   # owner (cover index) of vertex i
    witness: tuple[float, ...]

    @property
    def permutation(self) -> dict[int, int]:
        """owner -> label; a bijection when the solve is colorful."""
        return dict(zip(self.owners, self.labels))

    def diameter(self) -> float:
        return self.cell.diameter_l1()

    def to_dict(self) -> dict:
        return {
            "base": list(self.cell.base.counts),
            "step_order": list(self.cell.step_order),
            "labels": list(self.labels),
            "owners": list(self.owners),
            "witness": list(self.witness),
            "resolution": self.cell.base.resolution,
        }


def default_schedule(k: int, tolerance: float, max_resolution: int = 1 << 14) -> list[int]:
    """Doubling resolutions, ending at the first whose cell diameter fits."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    schedule = []
    m = 1
    while True:
        schedule.append(m)
        if (k - 1) / m <= tolerance:
            return schedule
        if m >= max_resolution:
            return schedule  # final level will not meet tolerance; solve() rejects
        m = min(2 * m if m > 1 else 8, max_resolution)


def _query_id(cover: int, vertex: GridVertex) -> str:
    return f"{cover}:{vertex.key()}"


class SolveMachine:
    """Deterministic, resumable rainbow-cell search.

    The machine's only mutable state is the answer cache.  advance() re-runs
    the scan from the coarsest level against the cache and either completes,
    raises, or reports the next batch of unanswered queries.
    """

    def __init__(
        self,
        k: int,
        n: int,
        mode: str = "primal",
        tolerance: float = 1e-2,
        schedule: list[int] | None = None,
        max_resolution: int = 1 << 14,
        scan_budget: int = 2_000_000,
        initial_seed=None,
    ):
        if k < 2:
            raise ValueError("k must be >= 2")
        if n not in (1, k):
            raise ValueError("n must be 1 or k")
        self.k = k
        self.n = n
        self.mode = mode
        self.tolerance = float(tolerance)
        self.schedule = list(schedule) if schedule else default_schedule(k, tolerance, max_resolution)
        self.scan_budget = scan_budget
        self.cache: dict[str, frozenset[int]] = {}
        self.result: RainbowCell | None = None
        # optional starting point: the first level scans outward from here
        self.initial_seed = tuple(initial_seed) if initial_seed is not None else None

    # -- answers ---------------------------------------------------------

    def supply_answer(self, query_id: str, answer) -> None:
        try:
            cover_s, counts_s = query_id.split(":")
            cover = int(cover_s)
            counts = tuple(int(c) for c in counts_s.split(","))
        except (ValueError, AttributeError):
            raise UnknownQueryId(f"malformed query id {query_id!r}")
        if cover < 0 or cover >= self.n or len(counts) != self.k or any(c < 0 for c in counts):
            raise UnknownQueryId(f"query id {query_id!r} does not belong to this solve")
        ans = frozenset(int(i) for i in answer)
        if not ans:
            raise AnswerShapeInvalid("empty answer set")
        if any(i < 0 or i >= self.k for i in ans):
            raise AnswerShapeInvalid(f"label out of range in {sorted(ans)}")
        if query_id in self.cache and self.cache[query_id] != ans:
            raise AnswerShapeInvalid(f"query {query_id} already answered differently")
        self.cache[query_id] = ans

    def _label(self, vertex: GridVertex) -> int:
        """Deterministic label of an answered vertex, or raise."""
        owner = owner_of(vertex, self.n)
        ans = self.cache[_query_id(owner, vertex)]
        if self.mode == "primal":
            carrier = [i for i in sorted(ans) if vertex.counts[i] > 0]
            if not carrier:
                raise AdmissibilityViolation(owner, vertex, ans)
            return carrier[0]
        # dual: prefer indices sitting at minimal coordinate value
        return min(ans, key=lambda i: (vertex.counts[i], i))

    # -- scanning --------------------------------------------------------

    def advance(self, oracle: CoverOracle | None = None):
        """Run the scan forward.  Returns RainbowCell or NeedAnswers."""
        if self.result is not None:
            return self.result
        seed_point = self.initial_seed
        for m in self.schedule:
            outcome = self._scan_level(m, seed_point, oracle)
            if isinstance(outcome, NeedAnswers):
                return outcome
            if outcome is None:
                # no rainbow at this level: normal for heuristic dual scans at
                # coarse resolutions, fatal at the last scheduled one
                if m == self.schedule[-1]:
                    raise ResolutionExceeded(m, "grid exhausted without a rainbow cell")
                continue
            seed_point = outcome.witness
            if (self.k - 1) / m <= self.tolerance:
                self.result = outcome
                return outcome
        raise ResolutionExceeded(
            self.schedule[-1],
            f"schedule exhausted before reaching tolerance {self.tolerance}",
        )

    def solve(self, oracle: CoverOracle) -> RainbowCell:
        out = self.advance(oracle)
        if isinstance(out, NeedAnswers):
            raise EngineError("oracle failed to answer its own queries")
        return out

    def _ensure_answers(self, vertices, oracle):
        missing = []
        for v in vertices:
            owner = owner_of(v, self.n)
            qid = _query_id(owner, v)
            if qid in self.cache:
                continue
            if oracle is None:
                missing.append(PendingQuery(qid, owner, v))
            else:
                ans = oracle.query(owner, v.point())
                if not ans:
                    raise AdmissibilityViolation(owner, v, ans)
                self.cache[qid] = ans
        if missing:
            missing.sort(key=lambda q: q.query_id)
            # deduplicate while preserving order
            seen = set()
            uniq = [q for q in missing if not (q.query_id in seen or seen.add(q.query_id))]
            return NeedAnswers(uniq)
        return None

    def _scan_level(self, m: int, seed_point, oracle):
        k = self.k
        scanned = 0
        if seed_point is None:
            ring_iter = self._full_rings(m)
        else:
            center = nearest_base(seed_point, k, m)
            ring_iter = self._seeded_rings(center, m)
        for bases in ring_iter:
            cells = []
            vertices = []
            for base in bases:
                for cell in cells_for_base(base):
                    cells.append(cell)
                    vertices.extend(cell.vertices())
            if not cells:
                continue
            need = self._ensure_answers(sorted(set(vertices), key=lambda v: v.counts), oracle)
            if need is not None:
                return need
            for cell in cells:
                scanned += 1
                verts = cell.vertices()
                labels = [self._label(v) for v in verts]
                if len(set(labels)) == k:
                    return RainbowCell(
                        cell=cell,
                        labels=tuple(labels),
                        owners=tuple(owner_of(v, self.n) for v in verts),
                        witness=cell.centroid(),
                    )
            if scanned > self.scan_budget:
                raise ResolutionExceeded(m, f"scan budget {self.scan_budget} exhausted")
        return None

    def _full_rings(self, m: int):
        # one big "ring": the whole grid in lexicographic base order
        yield list(grid_bases(self.k, m))

    def _seeded_rings(self, center: GridVertex, m: int):
        for r in range(0, m + 1):
            ring = list(ring_bases(center, r, m))
            if ring:
                yield ring
            elif r > 2 * m:
                return

    # -- pending / resume ------------------------------------------------

    def next_pending(self) -> list[PendingQuery]:
        out = self.advance(None)
        if isinstance(out, NeedAnswers):
            return out.queries
        return []

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": "engine_state.v1",
            "k": self.k,
            "n": self.n,
            "mode": self.mode,
            "tolerance": self.tolerance,
            "schedule": self.schedule,
            "scan_budget": self.scan_budget,
            "initial_seed": list(self.initial_seed) if self.initial_seed is not None else None,
            "answers": {qid: sorted(ans) for qid, ans in sorted(self.cache.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SolveMachine":
        if d.get("schema") != "engine_state.v1":
            raise ValueError(f"unsupported engine state schema: {d.get('schema')!r}")
        machine = cls(
            k=d["k"],
            n=d["n"],
            mode=d["mode"],
            tolerance=d["tolerance"],
            schedule=d["schedule"],
            scan_budget=d.get("scan_budget", 2_000_000),
            initial_seed=d.get("initial_seed"),
        )
        for qid, ans in d.get("answers", {}).items():
            machine.cache[qid] = frozenset(ans)
        return machine

    @classmethod
    def from_json(cls, s: str) -> "SolveMachine":
        return cls.from_dict(json.loads(s))


# -- convenience entry points -----------------------------------------------


def solve_colorful_kkm(oracle: CoverOracle, tolerance: float, schedule=None, **kw) -> RainbowCell:
    if oracle.n != oracle.k:
        raise ValueError("colorful solve requires n = k covers")
    machine = SolveMachine(oracle.k, oracle.n, oracle.mode, tolerance, schedule, **kw)
    return machine.solve(oracle)


def solve_kkm(oracle: CoverOracle, tolerance: float, schedule=None, **kw) -> RainbowCell:
    if oracle.n != 1:
        raise ValueError("plain solve requires a single cover")
    machine = SolveMachine(oracle.k, 1, oracle.mode, tolerance, schedule, **kw)
    return machine.solve(oracle)


def solve_dual_kkm(oracle: CoverOracle, tolerance: float, schedule=None, **kw) -> RainbowCell:
    machine = SolveMachine(oracle.k, oracle.n, "dual", tolerance, schedule, **kw)
    return machine.solve(oracle)


@dataclass
class CoverReport:
    samples: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_cover(oracle: CoverOracle, samples: int, mode: str | None = None, seed: int = 0) -> CoverReport:
    """Sample random points on random faces and check admissibility.

    A clean report is evidence, not proof.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    mode = mode or oracle.mode
    rng = random.Random(seed)
    k = oracle.k
    report = CoverReport(samples=samples)
    for _ in range(samples):
        face_size = rng.randint(1, k)
        face = sorted(rng.sample(range(k), face_size))
        weights = [rng.random() for _ in face]
        total = sum(weights) or 1.0
        x = [0.0] * k
        for i, w in zip(face, weights):
            x[i] = w / total
        for j in range(oracle.n):
            ans = oracle.query(j, tuple(x))
            if not ans:
                report.violations.append((j, tuple(x), "empty answer"))
                continue
            if mode == "primal":
                if not any(x[i] > 0 for i in ans):
                    report.violations.append((j, tuple(x), "answer misses carrier"))
            else:
                zeros = {i for i in range(k) if x[i] == 0.0}
                if not zeros <= ans:
                    report.violations.append((j, tuple(x), "answer misses a zero coordinate"))
    return report
