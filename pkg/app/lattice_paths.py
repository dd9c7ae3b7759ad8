# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Enumeration of marked nodal subdivisions by lattice paths.

A path runs through lattice points of the polygon in increasing order of
lambda(x, y) = x - eps*y, from the lambda-minimal to the lambda-maximal
vertex. Each side of the path is filled recursively: at the first vertex
where the chain turns towards the unfilled region, either cut the corner
with a triangle or, when the fourth corner stays inside the polygon and in
lambda order, push it out to a parallelogram. A side is complete when the
chain has become the boundary chain of that side.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from threading import Lock
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from app.errors import InternalCheckError, InvalidInputError
from app.gw import GWForm, SquareClass
from app.lattice import LatticePolygon, Point, cross, lattice_length
from app.tropical import (
    DualSubdivision,
    MarkedTropicalCurve,
    curve_multiplicities,
    genus,
    is_irreducible,
    is_nodal,
    marked_subgraph,
)

logger = logging.getLogger(__name__)

Chain = Tuple[Point, ...]
Cell = Tuple[Point, ...]

ORIENTATIONS = ("xy", "yx")


def lambda_key(point: Point) -> Tuple[int, int]:
    """Sort key realizing lambda = x - eps*y for infinitesimal eps."""
    return (point[0], -point[1])


@dataclass(frozen=True)
class LatticePath:
    points: Chain

    def __post_init__(self) -> None:
        keys = [lambda_key(p) for p in self.points]
        if len(keys) < 2 or any(a >= b for a, b in zip(keys, keys[1:])):
            raise InvalidInputError(f"path {self.points} is not lambda-increasing")

    @property
    def steps(self) -> List[Tuple[Point, Point]]:
        return list(zip(self.points, self.points[1:]))

    def __len__(self) -> int:
        return len(self.points) - 1


def boundary_chains(polygon: LatticePolygon) -> Tuple[Chain, Chain]:
    """(clockwise chain, counterclockwise chain) from lambda-min to lambda-max."""
    ring: List[Point] = []
    for a, b in polygon.edges:
        steps = lattice_length(a, b)
        dx, dy = (b[0] - a[0]) // steps, (b[1] - a[1]) // steps
        ring.extend((a[0] + k * dx, a[1] + k * dy) for k in range(steps))
    start = ring.index(min(polygon.vertices, key=lambda_key))
    stop = ring.index(max(polygon.vertices, key=lambda_key))
    ccw = ring[start:] + ring[:start]
    ccw_chain = tuple(ccw[: (stop - start) % len(ring) + 1])
    cw = [ring[start]] + list(reversed(ring[:start])) + list(reversed(ring[start + 1 :]))
    cw_chain = tuple(cw[: (start - stop) % len(ring) + 1])
    return cw_chain, ccw_chain


def enumerate_paths(polygon: LatticePolygon, n: int) -> List[LatticePath]:
    """All lambda-increasing paths with exactly n steps between the extremal vertices."""
    if n < 1:
        raise InvalidInputError(f"number of steps must be positive, got {n}")
    points = sorted(polygon.lattice_points, key=lambda_key)
    first, last, middle = points[0], points[-1], points[1:-1]
    return [
        LatticePath((first,) + inner + (last,))
        for inner in combinations(middle, n - 1)
    ]


class HalfCompletion(NamedTuple):
    cells: Tuple[Cell, ...]
    simple: bool


@lru_cache(maxsize=None)
def _cell_polygon(cell: Cell) -> LatticePolygon:
    return LatticePolygon(cell)


class PathCompleter:
    """Memoized filling of the two sides of lattice paths in one polygon."""

    def __init__(self, polygon: LatticePolygon):
        self.polygon = polygon
        self.upper, self.lower = boundary_chains(polygon)
        self._cache: Dict[Tuple[int, Chain], Tuple[HalfCompletion, ...]] = {}
        self._lock = Lock()

    @property
    def cache_size(self) -> int:
        return len(self._cache)

    def _coarsens(self, chain: Chain, target: Chain) -> bool:
        """Chain runs along the boundary but skips boundary lattice points.

        Every polygon vertex on the target stays on the chain; a chain cutting
        a corner leaves a region no cell can fill.
        """
        corners = set(self.polygon.vertices) & set(target)
        return (
            chain[0] == target[0]
            and chain[-1] == target[-1]
            and set(chain) <= set(target)
            and corners <= set(chain)
        )

    def complete_side(self, chain: Chain, side: int) -> Tuple[HalfCompletion, ...]:
        """Fillings of the region left (side=+1) or right (side=-1) of chain."""
        key = (side, chain)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        target = self.upper if side > 0 else self.lower
        if chain == target:
            result: Tuple[HalfCompletion, ...] = (HalfCompletion((), True),)
        else:
            turn = next(
                (
                    j
                    for j in range(1, len(chain) - 1)
                    if side * cross(chain[j - 1], chain[j], chain[j + 1]) > 0
                ),
                None,
            )
            if turn is None:
                # boundary reached with a long step: a non-simple completion
                coarse = self._coarsens(chain, target)
                result = (HalfCompletion((), False),) if coarse else ()
            else:
                result = self._branch(chain, turn, side)
        with self._lock:
            return self._cache.setdefault(key, result)

    def _branch(self, chain: Chain, j: int, side: int) -> Tuple[HalfCompletion, ...]:
        a, b, c = chain[j - 1], chain[j], chain[j + 1]
        found: List[HalfCompletion] = []
        cut = chain[:j] + chain[j + 1 :]
        for rest in self.complete_side(cut, side):
            found.append(HalfCompletion(((a, b, c),) + rest.cells, rest.simple))
        corner = (a[0] + c[0] - b[0], a[1] + c[1] - b[1])
        if (
            self.polygon.contains(corner)
            and lambda_key(a) < lambda_key(corner) < lambda_key(c)
        ):
            pushed = chain[:j] + (corner,) + chain[j + 1 :]
            for rest in self.complete_side(pushed, side):
                found.append(
                    HalfCompletion(((a, b, c, corner),) + rest.cells, rest.simple)
                )
        return tuple(found)

    def complete_path(self, path: LatticePath) -> List[Tuple[DualSubdivision, bool]]:
        """Nodal subdivisions completing the path, with their simplicity flag."""
        if path.points[0] != self.upper[0] or path.points[-1] != self.upper[-1]:
            raise InvalidInputError(f"path {path.points} does not join the extremal vertices")
        completions = []
        for left in self.complete_side(path.points, 1):
            for right in self.complete_side(path.points, -1):
                cells = tuple(_cell_polygon(c) for c in left.cells + right.cells)
                subdivision = DualSubdivision(self.polygon, cells)
                completions.append((subdivision, left.simple and right.simple))
        return completions


@dataclass(frozen=True)
class CurveRecord:
    curve: MarkedTropicalCurve
    mult_c: int
    mult_r: int
    mult_a1: GWForm

    def sort_key(self) -> Tuple[Any, ...]:
        return (
            tuple(c.vertices for c in self.curve.subdivision.cells),
            self.curve.marked,
        )

    def to_dict(self) -> Dict[str, Any]:
        data = self.curve.to_dict()
        return {
            "cells": data["cells"],
            "marks": data["marks"],
            "mult_c": self.mult_c,
            "mult_r": self.mult_r,
            "mult_a1": self.mult_a1.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], polygon: LatticePolygon) -> "CurveRecord":
        """Inverse of to_dict; the polygon comes from the enclosing report."""
        curve = MarkedTropicalCurve.from_dict(
            {"polygon": polygon.vertices, "cells": data.get("cells"), "marks": data.get("marks")}
        )
        try:
            return cls(
                curve,
                int(data["mult_c"]),
                int(data["mult_r"]),
                GWForm.from_dict(data["mult_a1"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"Invalid curve record: {e}")


@dataclass(frozen=True)
class InvariantReport:
    polygon: LatticePolygon
    genus: int
    n: int
    curves: Tuple[CurveRecord, ...]
    orientation: str = "xy"
    paths: int = 0
    non_simple: int = 0
    reducible: int = 0

    @property
    def N(self) -> int:
        return sum(record.mult_c for record in self.curves)

    @property
    def W(self) -> int:
        return sum(record.mult_r for record in self.curves)

    @property
    def NA1(self) -> GWForm:
        total = GWForm()
        for record in self.curves:
            total = total + record.mult_a1
        return total

    def correspondence_form(self) -> GWForm:
        """(N - W)/2 h + W <1>, the value predicted from N and W alone."""
        n_total, w_total = self.N, self.W
        if (n_total - w_total) % 2 or w_total < 0:
            raise InternalCheckError(f"N={n_total} and W={w_total} have the wrong parity")
        return GWForm.of(*([SquareClass()] * w_total), hyper=(n_total - w_total) // 2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "polygon": [list(v) for v in self.polygon.vertices],
            "genus": self.genus,
            "n": self.n,
            "orientation": self.orientation,
            "paths": self.paths,
            "non_simple": self.non_simple,
            "reducible": self.reducible,
            "curves": [record.to_dict() for record in self.curves],
            "N": self.N,
            "W": self.W,
            "NA1": self.NA1.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InvariantReport":
        try:
            polygon = LatticePolygon(tuple((int(x), int(y)) for x, y in data["polygon"]))
            report = cls(
                polygon=polygon,
                genus=int(data["genus"]),
                n=int(data["n"]),
                curves=tuple(CurveRecord.from_dict(c, polygon) for c in data["curves"]),
                orientation=str(data.get("orientation", "xy")),
                paths=int(data.get("paths", 0)),
                non_simple=int(data.get("non_simple", 0)),
                reducible=int(data.get("reducible", 0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"Invalid invariant report: {e}")
        if "N" in data and (int(data["N"]), int(data["W"])) != (report.N, report.W):
            raise InvalidInputError(
                f"report totals N={data['N']} W={data.get('W')} disagree with its curves"
            )
        return report


def _record(
    subdivision: DualSubdivision, marks: Sequence[Tuple[Point, Point]], genus_value: int
) -> CurveRecord:
    curve = MarkedTropicalCurve(subdivision, tuple(marks))
    if not is_nodal(subdivision):
        raise InternalCheckError(f"completion {subdivision.to_dict()} is not nodal")
    found = genus(subdivision)
    if found != genus_value:
        raise InternalCheckError(
            f"irreducible completion {subdivision.to_dict()} has genus {found}, "
            f"expected {genus_value}"
        )
    classes = [subdivision.extended_index[e] for e in curve.marked]
    if len(set(classes)) != len(classes):
        raise InternalCheckError("two marked edges share an extended edge")
    if not nx.is_connected(marked_subgraph(subdivision, curve.marked)):
        raise InternalCheckError(
            f"marked edges of {subdivision.to_dict()} miss a vertex or are disconnected"
        )
    mult = curve_multiplicities(subdivision)
    return CurveRecord(curve, mult.mult_c, mult.mult_r, mult.mult_a1)


def _swap(point: Point) -> Point:
    return (point[1], point[0])


def _swap_subdivision(s: DualSubdivision) -> DualSubdivision:
    return DualSubdivision(s.polygon.swapped(), tuple(c.swapped() for c in s.cells))


@dataclass
class _Tally:
    records: List[CurveRecord] = field(default_factory=list)
    non_simple: int = 0
    reducible: int = 0


def invariants(
    polygon: LatticePolygon,
    genus_value: int,
    orientation: str = "xy",
    threads: int = 1,
    completer: Optional[PathCompleter] = None,
) -> InvariantReport:
    """N^trop, W^trop and the enriched count through generic points."""
    if not 0 <= genus_value <= polygon.interior_points:
        raise InvalidInputError(
            f"genus {genus_value} out of range 0..{polygon.interior_points} for {polygon}"
        )
    if orientation not in ORIENTATIONS:
        raise InvalidInputError(f"unknown orientation '{orientation}'")
    swap = orientation == "yx"
    working = polygon.swapped() if swap else polygon
    n = len(polygon.boundary_lattice_points) - 1 + genus_value
    paths = enumerate_paths(working, n)
    completer = completer or PathCompleter(working)
    logger.info("%d lattice paths with %d steps in %s", len(paths), n, polygon)

    def tally_path(path: LatticePath) -> _Tally:
        tally = _Tally()
        for subdivision, simple in completer.complete_path(path):
            steps = path.steps
            if swap:
                subdivision = _swap_subdivision(subdivision)
                steps = [(_swap(a), _swap(b)) for a, b in steps]
            if not simple:
                tally.non_simple += 1
                continue
            if not is_irreducible(subdivision):
                tally.reducible += 1
                continue
            tally.records.append(_record(subdivision, steps, genus_value))
        return tally

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        tallies = list(pool.map(tally_path, paths))

    records = sorted((r for t in tallies for r in t.records), key=CurveRecord.sort_key)
    report = InvariantReport(
        polygon=polygon,
        genus=genus_value,
        n=n,
        curves=tuple(records),
        orientation=orientation,
        paths=len(paths),
        non_simple=sum(t.non_simple for t in tallies),
        reducible=sum(t.reducible for t in tallies),
    )
    logger.info(
        "N=%d W=%d from %d curves (%d non-simple, %d reducible, cache %d)",
        report.N,
        report.W,
        len(records),
        report.non_simple,
        report.reducible,
        completer.cache_size,
    )
    _check_report(report)
    return report


def _check_report(report: InvariantReport) -> None:
    total = report.NA1
    if total.rank != report.N or total.signature != report.W:
        raise InternalCheckError(
            f"rank/signature {total.rank}/{total.signature} != N/W {report.N}/{report.W}"
        )
    if total != report.correspondence_form():
        raise InternalCheckError(
            f"enriched count {total.pretty()} breaks the correspondence identity"
        )

