"""Command-line front door: versioned JSON in, versioned JSON out.

Exit codes: 0 success, 2 invalid input, 3 solver failure (resolution
exhausted, admissibility violations, and the like).
"""

from __future__ import annotations

import json
import sys

import click

from .deltaspace import (
    PointCloudDMeasure,
    PreconditionFailed,
    RasterDMeasure,
    classify_point,
    envy_free_nested_allocation,
    hyperplane_piercing_search,
    nested_partition,
)
from .engine import CoverOracle, EngineError, ResolutionExceeded, verify_cover
from .fairdivision import (
    CakeValuation,
    QuasilinearPlayer,
    ValuationPlayer,
    envy_free_cake,
    greedy_division,
    rental_harmony,
)
from .geometry import PointCloudMeasure, RasterMeasure, uniform_disk_raster
from .intervals import (
    brute_nu,
    brute_tau,
    colorful_matching,
    kkm_matching,
    normalize_families,
)
from .lines import rescale_families, t4_solve
from .masspartition import NormalizationError, mass_partition_solve
from .session import Config


class InputError(Exception):
    def __init__(self, pointer: str, detail: str):
        self.pointer = pointer
        super().__init__(f"{pointer}: {detail}")


def _load(path: str, schema: str) -> dict:
    try:
        with click.open_file(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(path, str(exc))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg)
    if not isinstance(data, dict):
        raise InputError(path, "top level must be an object")
    got = data.get("schema")
    if got != schema:
        raise InputError(f"{path}#/schema", f"expected {schema!r}, got {got!r}")
    return data


def _field(data: dict, key: str, path: str = "#"):
    if key not in data:
        raise InputError(f"{path}/{key}", "missing required field")
    return data[key]


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _run(fn):
    try:
        fn()
    except InputError as exc:
        click.echo(f"invalid input: {exc}", err=True)
        sys.exit(2)
    except (ValueError, NormalizationError, PreconditionFailed) as exc:
        click.echo(f"invalid input: {exc}", err=True)
        sys.exit(2)
    except (ResolutionExceeded, EngineError, RuntimeError) as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(3)


def _valuation(spec: dict, path: str) -> CakeValuation:
    return CakeValuation(
        _field(spec, "breakpoints", path),
        _field(spec, "densities", path),
    )


def _planar_measure(spec: dict, path: str):
    kind = _field(spec, "type", path)
    if kind == "points":
        return PointCloudMeasure(
            _field(spec, "points", path),
            spec.get("weights"),
            radius=spec.get("radius", 0.01),
        )
    if kind == "raster":
        return RasterMeasure(
            _field(spec, "origin", path),
            _field(spec, "cell_size", path),
            _field(spec, "grid", path),
        )
    if kind == "uniform-disk":
        return uniform_disk_raster(spec.get("resolution", 60))
    raise InputError(f"{path}/type", f"unknown measure type {kind!r}")


def _d_measure(spec: dict, path: str):
    kind = _field(spec, "type", path)
    if kind == "points":
        return PointCloudDMeasure(
            _field(spec, "points", path),
            spec.get("weights"),
            radius=spec.get("radius", 0.05),
        )
    if kind == "raster":
        return RasterDMeasure(
            _field(spec, "origin", path),
            _field(spec, "cell_size", path),
            _field(spec, "grid", path),
        )
    raise InputError(f"{path}/type", f"unknown measure type {kind!r}")


@click.group()
def main():
    """Workbench for simplex-cover solves: piercing, partitions, fair division."""


_out_opt = click.option("--out", default=None, help="Write the result JSON here instead of stdout.")
_tol_opt = click.option("--tol", "tolerance", type=float, default=None, help="Target tolerance.")


@main.command("pierce-intervals")
@click.option("--input", "path", required=True)
@_out_opt
def pierce_intervals(path, out):
    """Matching and piercing numbers of one interval family, or a colorful
    matching when the input carries several families."""

    def go():
        data = _load(path, "interval_families.v1")
        raw = _field(data, "families")
        if not raw or any(not fam for fam in raw):
            raise InputError("#/families", "need at least one nonempty family")
        # the gap oracle works on (0,1); solve there and report back in the
        # input frame
        margin = 0.01
        lo = min(float(a) for fam in raw for a, _ in fam)
        hi = max(float(b) for fam in raw for _, b in fam)
        scale = (1.0 - 2 * margin) / ((hi - lo) or 1.0)
        families = normalize_families(
            [[(float(a), float(b)) for a, b in fam] for fam in raw], margin=margin
        )

        def back(v):
            return lo + (v - margin) / scale

        if len(families) == 1:
            fam = families[0]
            matching = kkm_matching(fam)
            payload = {
                "schema": "interval_matching.v1",
                "mode": "single",
                "tau": brute_tau(fam),
                "nu": brute_nu(fam),
                "matching": [[back(iv.lo), back(iv.hi)] for iv in matching],
            }
        else:
            picked = colorful_matching(families)
            payload = {
                "schema": "interval_matching.v1",
                "mode": "colorful",
                "matching": [[back(iv.lo), back(iv.hi)] for iv in picked],
            }
        _emit(payload, out)

    _run(go)


@main.command("cake-cut")
@click.option("--players", "path", required=True)
@_tol_opt
@_out_opt
def cake_cut(path, tolerance, out):
    """Envy-free cake division for piecewise-constant valuations."""

    def go():
        data = _load(path, "cake_players.v1")
        players = [
            ValuationPlayer(_valuation(spec, f"#/players/{i}"))
            for i, spec in enumerate(_field(data, "players"))
        ]
        res = envy_free_cake(players, tolerance=tolerance or 1e-3)
        _emit(res.to_dict(), out)

    _run(go)


@main.command("rent")
@click.option("--input", "path", required=True)
@_tol_opt
@_out_opt
def rent(path, tolerance, out):
    """Rent division for quasilinear players given a value matrix."""

    def go():
        data = _load(path, "rental.v1")
        values = _field(data, "values")
        total = float(data.get("total_rent", 1.0))
        if total <= 0:
            raise InputError("#/total_rent", "must be positive")
        n = len(values)
        if n < 2 or any(len(row) != n for row in values):
            raise InputError("#/values", "need a square matrix, n >= 2")
        players = [QuasilinearPlayer([v / total for v in row]) for row in values]
        res = rental_harmony(players, tolerance=tolerance or 1e-2)
        payload = res.to_dict()
        payload["total_rent"] = total
        payload["rents"] = [r * total for r in res.rents]
        payload["envy"] = [None if e is None else e * total for e in res.envy]
        _emit(payload, out)

    _run(go)


@main.command("greedy-division")
@click.option("--input", "path", required=True)
@_out_opt
def greedy_division_cmd(path, out):
    """Exact disproportionate division by the sliding-knife first-hit rule."""

    def go():
        data = _load(path, "greedy_division.v1")
        measures = [
            _valuation(spec, f"#/measures/{i}")
            for i, spec in enumerate(_field(data, "measures"))
        ]
        res = greedy_division(measures, _field(data, "alphas"))
        _emit(res.to_dict(), out)

    _run(go)


@main.command("mass-partition")
@click.option("--input", "path", required=True)
@_tol_opt
@_out_opt
def mass_partition(path, tolerance, out):
    """Chord partition of the disk giving each measure its share."""

    def go():
        data = _load(path, "mass_partition.v1")
        measures = [
            _planar_measure(spec, f"#/measures/{i}")
            for i, spec in enumerate(_field(data, "measures"))
        ]
        res = mass_partition_solve(
            measures, _field(data, "alphas"), tolerance=tolerance or 1e-2
        )
        _emit(res.to_dict(), out)

    _run(go)


@main.command("line-pierce-t4")
@click.option("--input", "path", required=True)
@_out_opt
def line_pierce_t4(path, out):
    """Two lines piercing one of four families, or a quadrant witness."""

    def go():
        data = _load(path, "line_pierce_t4.v1")
        raw = _field(data, "families")
        families = [[[tuple(map(float, p)) for p in poly] for poly in fam] for fam in raw]
        direction = tuple(data.get("direction", (0.0, 1.0)))
        scaled, back = rescale_families(families, direction=direction)
        outcome = t4_solve(scaled)
        payload = outcome.to_dict()
        if payload["outcome"] == "piercing":
            cfg = outcome.config
            v = cfg.vertical_pos
            payload["lines"] = [
                [list(back((v, -1.0))), list(back((v, 1.0)))],
                [list(back(cfg.p)), list(back(cfg.q))],
            ]
        else:
            payload["selection"] = [
                {"family": f, "quadrant": qd, "polygon": [list(back(p)) for p in poly]}
                for f, qd, poly in outcome.selection
            ]
        _emit(payload, out)

    _run(go)


@main.command("nested-partition")
@click.option("--input", "path", required=True)
@_out_opt
def nested_partition_cmd(path, out):
    """Evaluate the nested hyperplane partition at a simplex point."""

    def go():
        data = _load(path, "nested_partition.v1")
        x = _field(data, "x")
        directions = _field(data, "directions")
        part = nested_partition(x, directions)
        payload = {
            "schema": "nested_partition.v1",
            "x": list(map(float, x)),
            "hyperplanes": [
                {"normal": list(v), "offset": c} for v, c in part.hyperplanes
            ],
        }
        if "points" in data:
            payload["regions_of_points"] = [
                classify_point(x, directions, y) for y in data["points"]
            ]
        _emit(payload, out)

    _run(go)


@main.command("hyperplane-pierce")
@click.option("--input", "path", required=True)
@_out_opt
def hyperplane_pierce(path, out):
    """Piercing hyperplanes for a family of convex bodies, or a saturation
    witness showing the family cannot be pierced by these directions."""

    def go():
        data = _load(path, "hyperplane_pierce.v1")
        bodies = [[tuple(map(float, p)) for p in body] for body in _field(data, "bodies")]
        directions = [tuple(map(float, v)) for v in _field(data, "directions")]
        outcome = hyperplane_piercing_search(
            bodies, directions, max_resolution=data.get("max_resolution", 64)
        )
        _emit(outcome.to_dict(), out)

    _run(go)


@main.command("envy-allocate")
@click.option("--input", "path", required=True)
@_tol_opt
@_out_opt
def envy_allocate(path, tolerance, out):
    """Envy-free allocation of nested-partition regions to measures."""

    def go():
        data = _load(path, "envy_allocate.v1")
        measures = [
            _d_measure(spec, f"#/measures/{i}")
            for i, spec in enumerate(_field(data, "measures"))
        ]
        directions = [tuple(map(float, v)) for v in _field(data, "directions")]
        res = envy_free_nested_allocation(measures, directions, tolerance=tolerance or 1e-2)
        _emit(res.to_dict(), out)

    _run(go)


@main.command("verify-cover")
@click.option("--input", "path", required=True)
@click.option("--samples", type=int, default=200)
@_out_opt
def verify_cover_cmd(path, samples, out):
    """Spot-check cover admissibility for a cake or rental instance."""

    def go():
        data = _load(path, "verify_cover.v1")
        kind = _field(data, "kind")
        if kind == "cake":
            players = [
                ValuationPlayer(_valuation(spec, f"#/players/{i}"))
                for i, spec in enumerate(_field(data, "players"))
            ]
            mode = "primal"
        elif kind == "rent":
            values = _field(data, "values")
            players = [QuasilinearPlayer(row) for row in values]
            mode = "dual"
        else:
            raise InputError("#/kind", f"expected cake or rent, got {kind!r}")
        n = len(players)
        oracle = CoverOracle(
            k=n, n=n, query_fn=lambda j, x: players[j].preferred(x), mode=mode
        )
        report = verify_cover(oracle, samples=samples, mode=mode)
        _emit(
            {
                "schema": "cover_report.v1",
                "kind": kind,
                "samples": report.samples,
                "ok": report.ok,
                "violations": [
                    {"cover": j, "x": list(x), "reason": why}
                    for j, x, why in report.violations
                ],
            },
            out,
        )

    _run(go)


@main.command("serve")
@click.option("--port", type=int, default=None)
@click.option("--data-dir", default=None)
@click.option("--max-resolution", type=int, default=None)
def serve(port, data_dir, max_resolution):
    """Run the HTTP session service (env: KKMW_DATA_DIR, KKMW_PORT,
    KKMW_MAX_RESOLUTION; flags override env)."""
    from .service import run

    config = Config.from_env(port=port, data_dir=data_dir, max_resolution=max_resolution)
    run(config)


if __name__ == "__main__":
    main()
