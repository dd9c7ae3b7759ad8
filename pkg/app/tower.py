# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Reconstruction bookkeeping for marked simple tropical curves.

Given a marked curve, the coefficients of the algebraic curves tropicalizing
to it are found in three rounds of root extractions over the base field k:

* F-band: one extension per triangle of the subdivision, in the order in
  which the triangles acquire two known sides along the graph sequence;
* L-band: one extension per extended edge of length at least 2 (the choice
  of deformation pattern);
* M-band: one extension per marked edge (the refined point condition).

Radicands are opaque symbolic units. Tracing the global weight of the
reconstructed curve down the tower must give back the enriched multiplicity
of the tropical curve, with no symbolic unit left over.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from app.errors import (
    InconsistentMarkingError,
    InternalCheckError,
    InvalidInputError,
    NonGenericMarkingError,
    NotNodalError,
    TraceResidueError,
)
from app.gw import (
    ExtensionStep,
    GWForm,
    SquareClass,
    from_witt,
    trace_form,
    witt_image,
)
from app.lattice import Edge, LatticePolygon, edge_key, lattice_length
from app.tropical import (
    TRIANGLE,
    DualSubdivision,
    MarkedTropicalCurve,
    curve_multiplicities,
    is_simple,
    marked_subgraph,
    triangle_weight_class,
    vertex_multiplicities,
)

logger = logging.getLogger(__name__)

F_BAND = "F"
L_BAND = "L"
M_BAND = "M"


@dataclass(frozen=True)
class GraphStep:
    """Classes added when passing from G_{i-1} to G_i."""

    index: int
    bivalent: Tuple[int, ...]
    added: Tuple[int, ...]


@dataclass(frozen=True)
class TriangleOrder:
    """A triangle of S with the two sides known when it became bivalent."""

    cell: int
    known: Tuple[Edge, Edge]
    unknown: Edge
    stage: int


@dataclass(frozen=True)
class MarkedGraphSequence:
    curve: MarkedTropicalCurve
    initial: FrozenSet[int]
    steps: Tuple[GraphStep, ...]
    order: Tuple[TriangleOrder, ...]

    @property
    def length(self) -> int:
        """Number m of steps with G_m = A."""
        return len(self.steps)

    def classes_at(self, stage: int) -> FrozenSet[int]:
        if not 0 <= stage <= self.length:
            raise InvalidInputError(f"graph G_{stage} does not exist (m={self.length})")
        known = set(self.initial)
        for step in self.steps[:stage]:
            known.update(step.added)
        return frozenset(known)

    def graph(self, stage: int) -> FrozenSet[Edge]:
        """Edges of S dual to the edges of G_stage."""
        groups = self.curve.subdivision.extended_edges
        return frozenset(e for c in self.classes_at(stage) for e in groups[c])


def class_names(curve: MarkedTropicalCurve) -> Dict[int, str]:
    """Marked classes are named by their mark index, the others t1, t2, ..."""
    s = curve.subdivision
    names: Dict[int, str] = {}
    for position, edge in enumerate(curve.marked, start=1):
        names[s.extended_index[edge]] = str(position)
    unmarked = 0
    for index in range(len(s.extended_edges)):
        if index not in names:
            unmarked += 1
            names[index] = f"t{unmarked}"
    return names


def _triangle_sides(s: DualSubdivision, cell: int) -> List[Edge]:
    return [edge_key(a, b) for a, b in s.cells[cell].edges]


def _check_initial_graph(curve: MarkedTropicalCurve, initial: FrozenSet[int]) -> None:
    s = curve.subdivision
    index = s.extended_index
    for cell, kind in enumerate(s.kinds):
        if kind != TRIANGLE:
            continue
        known = [e for e in _triangle_sides(s, cell) if index[e] in initial]
        if len(known) > 2:
            raise NonGenericMarkingError(
                "vertex of G_0 with valency 3", where=s.cells[cell].vertices
            )
    dual = marked_subgraph(s, curve.marked)
    if not nx.is_connected(dual):
        isolated = sorted(v for v in s.vertices if dual.degree(v) == 0)
        smallest = min(nx.connected_components(dual), key=len)
        where = isolated[0] if isolated else sorted(smallest)[0]
        raise NonGenericMarkingError(
            "marked edges do not form a connected graph through all vertices of S",
            where=where,
        )


def build_graph_sequence(curve: MarkedTropicalCurve) -> MarkedGraphSequence:
    """The sequence G_0 ⊆ G_1 ⊆ ... ⊆ G_m = A of the marked curve."""
    s = curve.subdivision
    if not is_simple(s):
        raise NotNodalError(f"graph sequence needs a simple curve, got {s.to_dict()}")
    index = s.extended_index
    marked_classes = [index[e] for e in curve.marked]
    if len(set(marked_classes)) != len(marked_classes):
        raise NonGenericMarkingError("two marks on one extended edge")
    initial = frozenset(marked_classes)
    _check_initial_graph(curve, initial)

    known = set(initial)
    triangles = [i for i, kind in enumerate(s.kinds) if kind == TRIANGLE]
    processed: Dict[int, TriangleOrder] = {}
    steps: List[GraphStep] = []
    while len(known) < len(s.extended_edges) or len(processed) < len(triangles):
        stage = len(steps)
        bivalent = []
        for cell in triangles:
            if cell in processed:
                continue
            sides = _triangle_sides(s, cell)
            inside = [e for e in sides if index[e] in known]
            if len(inside) == 3:
                raise NonGenericMarkingError(
                    "triangle with three prescribed sides", where=s.cells[cell].vertices
                )
            if len(inside) == 2:
                (outside,) = [e for e in sides if index[e] not in known]
                bivalent.append(
                    TriangleOrder(cell, (inside[0], inside[1]), outside, stage)
                )
        if not bivalent:
            missing = sorted(set(range(len(s.extended_edges))) - known)
            raise NonGenericMarkingError(
                "graph sequence stops before reaching the whole curve",
                where=sorted(s.extended_edges[missing[0]]) if missing else None,
            )
        ends: Dict[int, List[int]] = {}
        for item in bivalent:
            ends.setdefault(index[item.unknown], []).append(item.cell)
        for added, cells in ends.items():
            if len(cells) != 1:
                raise NonGenericMarkingError(
                    "added edge has two bivalent ends",
                    where=sorted(s.extended_edges[added]),
                )
        for item in bivalent:
            processed[item.cell] = item
        known.update(ends)
        steps.append(
            GraphStep(
                stage + 1,
                tuple(item.cell for item in bivalent),
                tuple(sorted(ends)),
            )
        )
    order = tuple(sorted(processed.values(), key=lambda t: (t.stage, t.cell)))
    logger.debug("graph sequence reaches A after %d steps", len(steps))
    return MarkedGraphSequence(curve, initial, tuple(steps), order)


@dataclass(frozen=True)
class TowerStep:
    band: str
    step: ExtensionStep
    label: str

    def line(self) -> str:
        radicand = self.step.radicand
        if radicand == SquareClass():
            text = "1"
        else:
            text = "*".join(radicand.atoms) or str(radicand.magnitude)
            if radicand.sign < 0:
                text = f"-{text}"
        return f"{self.band} {self.step.degree} {text}"


@dataclass(frozen=True)
class ExtensionTower:
    """k -> F -> L -> M as an ordered list of single-generator steps."""

    steps: Tuple[TowerStep, ...]

    def band(self, name: str) -> List[TowerStep]:
        return [s for s in self.steps if s.band == name]

    def _degree(self, name: str) -> int:
        return prod(s.step.degree for s in self.band(name))

    @property
    def dim_F(self) -> int:
        return self._degree(F_BAND)

    @property
    def dim_L_over_F(self) -> int:
        return self._degree(L_BAND)

    @property
    def dim_M_over_L(self) -> int:
        return self._degree(M_BAND)

    @property
    def dim_M(self) -> int:
        return prod(s.step.degree for s in self.steps)

    def lines(self) -> List[str]:
        return [s.line() for s in self.steps]

    def generators(self) -> List[str]:
        return [s.step.generator for s in self.steps]


def dimension_formula(curve: MarkedTropicalCurve) -> Fraction:
    """prod |D'| * prod_marked |s|^-2 * prod_unmarked |s|^-1 over extended edges."""
    s = curve.subdivision
    marked = {s.extended_index[e] for e in curve.marked}
    value = Fraction(prod(t.double_area for t in s.triangles))
    for index in range(len(s.extended_edges)):
        length = s.extended_length(index)
        value /= length ** 2 if index in marked else length
    return value


def build_tower(
    curve: MarkedTropicalCurve, sequence: Optional[MarkedGraphSequence] = None
) -> ExtensionTower:
    s = curve.subdivision
    sequence = sequence or build_graph_sequence(curve)
    names = class_names(curve)
    steps: List[TowerStep] = []

    for position, item in enumerate(sequence.order, start=1):
        cell = s.cells[item.cell]
        divisor = lattice_length(*item.known[0]) * lattice_length(*item.known[1])
        if cell.double_area % divisor:
            raise InconsistentMarkingError(
                f"inconsistent marking: |{cell}| = {cell.double_area} is not divisible "
                f"by the known side lengths {divisor}"
            )
        degree = cell.double_area // divisor
        steps.append(
            TowerStep(
                F_BAND,
                ExtensionStep(degree, SquareClass.atom(f"dT_{position}"), f"beta_{position}"),
                f"triangle {cell.to_text()}",
            )
        )

    for index in range(len(s.extended_edges)):
        length = s.extended_length(index)
        if length < 2:
            continue
        name = names[index]
        radicand = SquareClass() if length % 2 else SquareClass.atom(f"ac_{name}")
        steps.append(
            TowerStep(L_BAND, ExtensionStep(length, radicand, f"u_{name}"), f"class {name}")
        )

    for position, edge in enumerate(curve.marked, start=1):
        steps.append(
            TowerStep(
                M_BAND,
                ExtensionStep(
                    lattice_length(*edge), SquareClass.atom(f"d_{position}"), f"w_{position}"
                ),
                f"mark {position}",
            )
        )

    tower = ExtensionTower(tuple(steps))
    expected = dimension_formula(curve)
    if expected.denominator != 1:
        raise InconsistentMarkingError(
            f"inconsistent marking: dim_k F = {expected} is not an integer"
        )
    if tower.dim_F != expected:
        raise InconsistentMarkingError(
            f"inconsistent marking: F-band degrees give {tower.dim_F}, expected {expected}"
        )
    total = prod(t.double_area for t in s.triangles)
    if tower.dim_M != total:
        raise InconsistentMarkingError(
            f"inconsistent marking: dim_k M = {tower.dim_M} differs from {total}"
        )
    return tower


def global_weight(curve: MarkedTropicalCurve, tower: ExtensionTower) -> GWForm:
    """Rank-1 weight of the reconstructed curve over M."""
    s = curve.subdivision
    names = class_names(curve)
    generators = set(tower.generators())
    weight = SquareClass()
    for triangle in s.triangles:
        weight = weight * triangle_weight_class(triangle)
    for index in range(len(s.extended_edges)):
        if s.extended_length(index) % 2:
            continue
        generator = f"u_{names[index]}"
        if generator not in generators:
            raise InternalCheckError(f"tower has no step for even class {names[index]}")
        weight = weight * SquareClass.atom(generator, sign=-1)

    closed = SquareClass()
    for triangle in s.triangles:
        area = triangle.double_area
        closed = closed.times((-1) ** triangle.interior_points * area ** (area % 2))
    for index in range(len(s.extended_edges)):
        if s.extended_length(index) % 2 == 0:
            closed = closed * SquareClass.atom(f"u_{names[index]}", sign=-1)
    if closed != weight:
        raise InternalCheckError(f"weight {weight} differs from the collapsed product {closed}")
    return GWForm.of(weight)


def trace_to_base(weight: GWForm, tower: ExtensionTower) -> GWForm:
    """Trace from M down to k, carrying the Witt class and rank alongside."""
    form = weight
    witt = witt_image(weight)
    rank = weight.rank
    for item in reversed(tower.steps):
        form = trace_form(item.step, form)
        witt = witt_image(trace_form(item.step, witt))
        rank *= item.step.degree
        logger.debug("after %s (%s): %s", item.label, item.line(), form.pretty())
    recombined = from_witt(witt, rank)
    if recombined != form or form.rank != rank:
        raise InternalCheckError(
            f"Witt bookkeeping {recombined.pretty()} differs from {form.pretty()}"
        )
    if form.atoms():
        logger.warning("symbolic units survived the trace: %s", ", ".join(form.atoms()))
        raise TraceResidueError(form.atoms())
    return form


@dataclass(frozen=True)
class TowerReport:
    sequence: MarkedGraphSequence
    tower: ExtensionTower
    weight: GWForm
    traced: GWForm
    expected: GWForm

    @property
    def matches(self) -> bool:
        return self.traced == self.expected

    def lines(self) -> List[str]:
        lines = [f"G_0 classes {sorted(self.sequence.initial)}"]
        for step in self.sequence.steps:
            lines.append(
                f"G_{step.index} adds {list(step.added)} from triangles {list(step.bivalent)}"
            )
        lines.extend(self.tower.lines())
        lines.append(f"dim_k F = {self.tower.dim_F}")
        lines.append(f"dim_F L = {self.tower.dim_L_over_F}")
        lines.append(f"dim_L M = {self.tower.dim_M_over_L}")
        lines.append(f"dim_k M = {self.tower.dim_M}")
        lines.append(f"weight {self.weight.pretty()}")
        lines.append(f"trace {self.traced.pretty()}")
        return lines


def reconstruct(curve: MarkedTropicalCurve) -> TowerReport:
    """Graph sequence, tower, weight and trace, compared with mult_A1."""
    sequence = build_graph_sequence(curve)
    tower = build_tower(curve, sequence)
    weight = global_weight(curve, tower)
    traced = trace_to_base(weight, tower)
    expected = curve_multiplicities(curve.subdivision).mult_a1
    report = TowerReport(sequence, tower, weight, traced, expected)
    if not report.matches:
        raise InternalCheckError(
            f"trace {traced.pretty()} differs from the multiplicity {expected.pretty()}"
        )
    return report


def vertex_trace(triangle: LatticePolygon, unmarked: Optional[Edge] = None) -> GWForm:
    """Enriched count of the one-vertex curve dual to a triangle.

    Two sides are marked; ``unmarked`` names the third (default: the side
    opposite the lexicographically smallest vertex). With all sides odd the
    weight is traced through the side extensions and then through F; with an
    even side the count is |T|/2 h.
    """
    if not triangle.is_triangle:
        raise NotNodalError(f"vertex trace needs a triangle, got {triangle}")
    sides = [edge_key(a, b) for a, b in triangle.edges]
    if unmarked is None:
        unmarked = next(e for e in sides if triangle.vertices[0] not in e)
    unmarked = edge_key(*unmarked)
    if unmarked not in sides:
        raise InvalidInputError(f"{unmarked} is not a side of {triangle}")
    lengths = [lattice_length(*e) for e in sides]
    area = triangle.double_area
    if any(length % 2 == 0 for length in lengths):
        return GWForm.hyperbolic(area // 2)

    marked = [e for e in sides if e != unmarked]
    first, second = (lattice_length(*e) for e in marked)
    third = lattice_length(*unmarked)
    weight = GWForm.of(
        SquareClass.of(Fraction((-1) ** triangle.interior_points * area, first * second * third))
    )
    steps = [
        ExtensionStep(area // (first * second), SquareClass.atom("D"), "w"),
        ExtensionStep(first, SquareClass.atom("d"), "x"),
        ExtensionStep(second, SquareClass.atom("d'"), "x'"),
    ]
    tower = ExtensionTower(
        tuple(TowerStep(band, step, band) for band, step in zip("FMM", steps))
    )
    traced = trace_to_base(weight, tower)
    expected = vertex_multiplicities(triangle).m_a1
    if traced != expected:
        raise InternalCheckError(
            f"vertex trace {traced.pretty()} differs from {expected.pretty()} for {triangle}"
        )
    return traced


def check_curves(curves: Sequence[MarkedTropicalCurve]) -> List[TowerReport]:
    return [reconstruct(curve) for curve in curves]
