# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Tropical polynomials, dual subdivisions and multiplicities of nodal curves."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import networkx as nx
from networkx.utils import UnionFind

from app.errors import (
    InternalCheckError,
    InvalidInputError,
    NotNodalError,
)
from app.gw import GWForm, SquareClass
from app.lattice import (
    Edge,
    LatticePolygon,
    Point,
    convex_hull,
    cross,
    edge_key,
    lattice_length,
    primitive,
)

logger = logging.getLogger(__name__)

RationalPoint = Tuple[Fraction, Fraction]

TRIANGLE = "triangle"
PARALLELOGRAM = "parallelogram"
OTHER = "other"


@dataclass(frozen=True)
class TropicalPolynomial:
    """max over the support of a_ij + i*x + j*y."""

    terms: Tuple[Tuple[Point, Fraction], ...]

    def __post_init__(self) -> None:
        merged: Dict[Point, Fraction] = {}
        for point, height in self.terms:
            point = (int(point[0]), int(point[1]))
            if point in merged:
                raise InvalidInputError(f"monomial {point} appears twice")
            merged[point] = Fraction(height)
        if not merged:
            raise InvalidInputError("tropical polynomial has empty support")
        object.__setattr__(self, "terms", tuple(sorted(merged.items())))
        if len(convex_hull(merged)) < 3:
            raise InvalidInputError("support does not span a 2-dimensional polygon")

    @classmethod
    def from_mapping(cls, heights: Mapping[Point, object]) -> "TropicalPolynomial":
        return cls(tuple((p, Fraction(str(h))) for p, h in heights.items()))

    @property
    def heights(self) -> Dict[Point, Fraction]:
        return dict(self.terms)

    @property
    def newton_polygon(self) -> LatticePolygon:
        return LatticePolygon.from_points(p for p, _ in self.terms)

    def evaluate(self, x: Fraction, y: Fraction) -> Fraction:
        return max(h + i * x + j * y for (i, j), h in self.terms)


class VertexMultiplicity(NamedTuple):
    m_c: int
    m_r: int
    m_a1: GWForm


class CurveMultiplicity(NamedTuple):
    mult_c: int
    mult_r: int
    mult_a1: GWForm


def _point(value: Any) -> Point:
    x, y = value
    return (int(x), int(y))


@dataclass(frozen=True)
class DualSubdivision:
    """Cells subdividing the Newton polygon, with edges and extended edges."""

    polygon: LatticePolygon
    cells: Tuple[LatticePolygon, ...]

    def __post_init__(self) -> None:
        cells = tuple(sorted(self.cells, key=lambda c: c.vertices))
        object.__setattr__(self, "cells", cells)
        covered = sum(c.double_area for c in cells)
        if covered != self.polygon.double_area:
            raise InternalCheckError(
                f"cells cover double area {covered}, polygon has {self.polygon.double_area}"
            )
        for key, owners in self.edge_cells.items():
            if len(owners) > 2:
                raise InternalCheckError(f"edge {key} is shared by {len(owners)} cells")
            if len(owners) == 1 and not self.polygon.on_boundary(*key):
                raise InternalCheckError(f"interior edge {key} has only one cell")

    @cached_property
    def edge_cells(self) -> Dict[Edge, Tuple[int, ...]]:
        owners: Dict[Edge, List[int]] = {}
        for index, cell in enumerate(self.cells):
            for a, b in cell.edges:
                owners.setdefault(edge_key(a, b), []).append(index)
        return {key: tuple(value) for key, value in sorted(owners.items())}

    @property
    def edges(self) -> List[Edge]:
        return list(self.edge_cells)

    def length(self, edge: Edge) -> int:
        return lattice_length(*edge)

    @property
    def interior_edges(self) -> List[Edge]:
        return [e for e, owners in self.edge_cells.items() if len(owners) == 2]

    @property
    def boundary_edges(self) -> List[Edge]:
        return [e for e, owners in self.edge_cells.items() if len(owners) == 1]

    @cached_property
    def vertices(self) -> FrozenSet[Point]:
        return frozenset(v for cell in self.cells for v in cell.vertices)

    def kind(self, index: int) -> str:
        cell = self.cells[index]
        if cell.is_triangle:
            return TRIANGLE
        if cell.is_parallelogram:
            return PARALLELOGRAM
        return OTHER

    @property
    def kinds(self) -> List[str]:
        return [self.kind(i) for i in range(len(self.cells))]

    @property
    def triangles(self) -> List[LatticePolygon]:
        return [c for i, c in enumerate(self.cells) if self.kind(i) == TRIANGLE]

    @cached_property
    def extended_edges(self) -> Tuple[FrozenSet[Edge], ...]:
        """Classes of edges identified across opposite sides of parallelograms."""
        classes = UnionFind(self.edges)
        for index, cell in enumerate(self.cells):
            if self.kind(index) != PARALLELOGRAM:
                continue
            sides = [edge_key(a, b) for a, b in cell.edges]
            classes.union(sides[0], sides[2])
            classes.union(sides[1], sides[3])
        groups = sorted((frozenset(g) for g in classes.to_sets()), key=sorted)
        for group in groups:
            if len({self.length(e) for e in group}) != 1:
                raise InternalCheckError(f"extended edge {sorted(group)} mixes lengths")
        return tuple(groups)

    @cached_property
    def extended_index(self) -> Dict[Edge, int]:
        return {e: i for i, group in enumerate(self.extended_edges) for e in group}

    def extended_length(self, index: int) -> int:
        return self.length(next(iter(self.extended_edges[index])))

    def to_dict(self) -> Dict[str, object]:
        return {
            "polygon": [list(v) for v in self.polygon.vertices],
            "cells": [[list(v) for v in c.vertices] for c in self.cells],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DualSubdivision":
        try:
            polygon = LatticePolygon(tuple(_point(v) for v in data["polygon"]))
            cells = tuple(
                LatticePolygon(tuple(_point(v) for v in cell)) for cell in data["cells"]
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"Invalid subdivision record: {e}")
        return cls(polygon, cells)


def is_nodal(s: DualSubdivision) -> bool:
    return all(kind != OTHER for kind in s.kinds)


def is_simple(s: DualSubdivision) -> bool:
    return is_nodal(s) and set(s.polygon.boundary_lattice_points) <= s.vertices


def _plane_offset(
    lifted: Mapping[Point, Fraction], a: Point, b: Point, c: Point
) -> Callable[[Point], Fraction]:
    """Height of a lifted point above the plane through the lifts of a, b, c."""
    det = cross(a, b, c)
    za, zb, zc = lifted[a], lifted[b], lifted[c]
    # plane z = za + alpha*(x - ax) + beta*(y - ay)
    alpha = Fraction((zb - za) * (c[1] - a[1]) - (zc - za) * (b[1] - a[1]), det)
    beta = Fraction((zc - za) * (b[0] - a[0]) - (zb - za) * (c[0] - a[0]), det)

    def offset(p: Point) -> Fraction:
        return lifted[p] - (za + alpha * (p[0] - a[0]) + beta * (p[1] - a[1]))

    return offset


def _facet_left_of(
    lifted: Mapping[Point, Fraction], points: List[Point], a: Point, b: Point
) -> Optional[FrozenSet[Point]]:
    """Lower facet containing the segment a -> b and lying to its left."""
    candidates = [p for p in points if cross(a, b, p) > 0]
    if not candidates:
        return None
    best = candidates[0]
    offset = _plane_offset(lifted, a, b, best)
    for p in candidates[1:]:
        if offset(p) < 0:
            best = p
            offset = _plane_offset(lifted, a, b, best)
    return frozenset(p for p in points if offset(p) == 0)


def _lower_faces(heights: Mapping[Point, Fraction]) -> List[FrozenSet[Point]]:
    """Point sets of the lower facets of the lifted points (i, j, -a_ij).

    Starts from the facet on a boundary edge of the Newton polygon and pivots
    across every facet edge into its neighbour.
    """
    lifted = {p: -h for p, h in heights.items()}
    points = sorted(lifted)
    hull = convex_hull(points)
    faces: Set[FrozenSet[Point]] = set()
    crossed: Set[Tuple[Point, Point]] = set()
    pending = [(hull[0], hull[1])]
    while pending:
        a, b = pending.pop()
        if (a, b) in crossed:
            continue
        crossed.add((a, b))
        face = _facet_left_of(lifted, points, a, b)
        if face is None or face in faces:
            continue
        faces.add(face)
        ring = convex_hull(face)
        for p, q in zip(ring, ring[1:] + ring[:1]):
            pending.append((q, p))
    return sorted(faces, key=sorted)


def dual_subdivision(f: TropicalPolynomial) -> DualSubdivision:
    """Regular subdivision induced by the heights, via the exact lower hull."""
    cells = [LatticePolygon.from_points(face) for face in _lower_faces(f.heights)]
    subdivision = DualSubdivision(f.newton_polygon, tuple(cells))
    logger.debug("dual subdivision with %d cells", len(cells))
    return subdivision


@dataclass(frozen=True)
class CurveEdge:
    """Bounded edge (two cells) or ray (one cell) of a tropical curve."""

    dual: Edge
    cells: Tuple[int, ...]
    weight: int
    direction: Point

    @property
    def is_ray(self) -> bool:
        return len(self.cells) == 1


@dataclass(frozen=True)
class TropicalCurve:
    """Embedded weighted graph dual to a subdivision."""

    subdivision: DualSubdivision
    vertices: Tuple[RationalPoint, ...]
    edges: Tuple[CurveEdge, ...] = field(default=())

    def incident(self, index: int) -> List[CurveEdge]:
        return [e for e in self.edges if index in e.cells]


@dataclass(frozen=True)
class MarkedTropicalCurve:
    """A nodal curve with marked edges sigma_1..sigma_n of its subdivision."""

    subdivision: DualSubdivision
    marked: Tuple[Edge, ...]
    marks: Optional[Tuple[RationalPoint, ...]] = None

    def __post_init__(self) -> None:
        keys = tuple(edge_key(*e) for e in self.marked)
        object.__setattr__(self, "marked", keys)
        unknown = [e for e in keys if e not in self.subdivision.edge_cells]
        if unknown:
            raise InvalidInputError(f"marked edges {unknown} are not edges of S")
        if len(set(keys)) != len(keys):
            raise InvalidInputError("an edge carries more than one mark")
        if self.marks is not None and len(self.marks) != len(keys):
            raise InvalidInputError("every marked edge needs exactly one mark")

    @property
    def n(self) -> int:
        return len(self.marked)

    def expected_marks(self, genus_value: int) -> int:
        return len(self.subdivision.polygon.boundary_lattice_points) - 1 + genus_value

    def to_dict(self) -> Dict[str, object]:
        data = self.subdivision.to_dict()
        data["marks"] = [[list(a), list(b)] for a, b in self.marked]
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MarkedTropicalCurve":
        subdivision = DualSubdivision.from_dict(data)
        try:
            marked = tuple((_point(a), _point(b)) for a, b in data["marks"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"Invalid marked curve record: {e}")
        return cls(subdivision, marked)


def _outward_normal(a: Point, b: Point) -> Point:
    """Primitive outward normal of a counterclockwise edge a -> b."""
    return primitive((b[1] - a[1], a[0] - b[0]))


def _vertex_position(
    heights: Mapping[Point, Fraction], cell: LatticePolygon
) -> RationalPoint:
    """Point where all the cell's monomials tie."""
    (i0, j0), (i1, j1), (i2, j2) = cell.vertices[:3]
    a0, a1, a2 = heights[(i0, j0)], heights[(i1, j1)], heights[(i2, j2)]
    # (i1-i0) x + (j1-j0) y = a0 - a1, likewise for the second vertex
    det = (i1 - i0) * (j2 - j0) - (j1 - j0) * (i2 - i0)
    r1, r2 = a0 - a1, a0 - a2
    x = Fraction(r1 * (j2 - j0) - r2 * (j1 - j0), det)
    y = Fraction(r2 * (i1 - i0) - r1 * (i2 - i0), det)
    values = {heights[v] + v[0] * x + v[1] * y for v in cell.vertices}
    if len(values) != 1:
        raise InternalCheckError(f"inconsistent tie system for cell {cell}")
    return (x, y)


def curve_of(f: TropicalPolynomial) -> TropicalCurve:
    """Vertices, edges and rays of the tropical curve of f."""
    s = dual_subdivision(f)
    heights = f.heights
    positions = tuple(_vertex_position(heights, cell) for cell in s.cells)
    edges = []
    for key, owners in s.edge_cells.items():
        weight = s.length(key)
        if len(owners) == 1:
            cell = s.cells[owners[0]]
            (a, b) = next(e for e in cell.edges if edge_key(*e) == key)
            edges.append(CurveEdge(key, owners, weight, _outward_normal(a, b)))
            continue
        start, end = positions[owners[0]], positions[owners[1]]
        delta = (end[0] - start[0], end[1] - start[1])
        scale = _common_denominator(delta)
        direction = primitive((int(delta[0] * scale), int(delta[1] * scale)))
        dual = (key[1][0] - key[0][0], key[1][1] - key[0][1])
        if direction[0] * dual[0] + direction[1] * dual[1] != 0:
            raise InternalCheckError(f"edge dual to {key} is not orthogonal to it")
        edges.append(CurveEdge(key, owners, weight, direction))
    curve = TropicalCurve(s, positions, tuple(edges))
    defects = balancing_defects(curve)
    if defects:
        raise InternalCheckError(f"balancing fails at vertices {defects}")
    return curve


def _common_denominator(values: Iterable[Fraction]) -> int:
    return lcm(*(value.denominator for value in values))


def balancing_defects(curve: TropicalCurve) -> List[int]:
    """Vertices where the weighted outgoing directions do not sum to zero."""
    bad = []
    for index in range(len(curve.vertices)):
        total_x, total_y = 0, 0
        for edge in curve.incident(index):
            sign = 1 if edge.is_ray or edge.cells[0] == index else -1
            total_x += sign * edge.weight * edge.direction[0]
            total_y += sign * edge.weight * edge.direction[1]
        if (total_x, total_y) != (0, 0):
            bad.append(index)
    return bad


def subdivision_balancing_defects(s: DualSubdivision) -> List[int]:
    """Balancing read off the dual cells: weighted outward normals cancel."""
    bad = []
    for index, cell in enumerate(s.cells):
        total = [0, 0]
        for a, b in cell.edges:
            normal = _outward_normal(a, b)
            weight = lattice_length(a, b)
            total[0] += weight * normal[0]
            total[1] += weight * normal[1]
        if total != [0, 0]:
            bad.append(index)
    return bad


def genus(curve: object) -> int:
    """First Betti number of the embedded graph minus its 4-valent vertices."""
    s = curve
    if isinstance(curve, (TropicalCurve, MarkedTropicalCurve)):
        s = curve.subdivision
    if not isinstance(s, DualSubdivision):
        raise InvalidInputError(f"cannot take the genus of {type(curve).__name__}")
    if not is_nodal(s):
        raise NotNodalError()
    graph = nx.Graph()
    graph.add_nodes_from(range(len(s.cells)))
    graph.add_edges_from(
        (owners[0], owners[1]) for owners in s.edge_cells.values() if len(owners) == 2
    )
    betti = (
        graph.number_of_edges()
        - graph.number_of_nodes()
        + nx.number_connected_components(graph)
    )
    return betti - s.kinds.count(PARALLELOGRAM)


def components(s: DualSubdivision) -> int:
    """Irreducible components: extended edges are branches joined at triangles."""
    if not is_nodal(s):
        raise NotNodalError()
    index = s.extended_index
    graph = nx.Graph()
    graph.add_nodes_from(range(len(s.extended_edges)))
    for cell in s.triangles:
        a, b, c = (index[edge_key(*e)] for e in cell.edges)
        graph.add_edges_from([(a, b), (b, c)])
    return nx.number_connected_components(graph)


def is_irreducible(s: DualSubdivision) -> bool:
    return components(s) == 1


def marked_subgraph(s: DualSubdivision, marked: Sequence[Edge]) -> "nx.Graph":
    """S_0: the vertices of S with every edge of a marked extended edge."""
    index = s.extended_index
    classes = {index[edge_key(*e)] for e in marked}
    graph = nx.Graph()
    graph.add_nodes_from(s.vertices)
    graph.add_edges_from(e for c in classes for e in s.extended_edges[c])
    return graph


def triangle_weight_class(triangle: LatticePolygon) -> SquareClass:
    """<(-1)^Int * |T|^|T| / prod |e|^|e|> over the three edges."""
    value = triangle.double_area ** (triangle.double_area % 2)
    for a, b in triangle.edges:
        length = lattice_length(a, b)
        value *= length ** (length % 2)
    return SquareClass.of((-1) ** triangle.interior_points * value)


def vertex_multiplicities(triangle: LatticePolygon) -> VertexMultiplicity:
    """Complex, real and quadratically enriched multiplicity of a vertex."""
    if not triangle.is_triangle:
        raise NotNodalError(f"vertex multiplicity needs a triangle, got {triangle}")
    area = triangle.double_area
    lengths = [lattice_length(a, b) for a, b in triangle.edges]
    if any(length % 2 == 0 for length in lengths):
        return VertexMultiplicity(area, 0, GWForm.hyperbolic(area // 2))
    if area % 2 == 0:
        raise InternalCheckError(f"{triangle} has odd edges but even double area")
    sign = (-1) ** triangle.interior_points
    product = lengths[0] * lengths[1] * lengths[2]
    form = GWForm.of(SquareClass.of(sign * product), hyper=(area - 1) // 2)
    return VertexMultiplicity(area, sign, form)


def closed_form_multiplicity(s: DualSubdivision) -> GWForm:
    """(prod/2) h with an even edge, else (prod-1)/2 h + <(-1)^Int(S)>."""
    product = 1
    for triangle in s.triangles:
        product *= triangle.double_area
    if any(s.length(e) % 2 == 0 for e in s.edges):
        return GWForm.hyperbolic(product // 2)
    interior = sum(t.interior_points for t in s.triangles)
    return GWForm.of(SquareClass.of((-1) ** interior), hyper=(product - 1) // 2)


def curve_multiplicities(s: DualSubdivision) -> CurveMultiplicity:
    """Products of the vertex multiplicities over the triangles of S.

    The closed form is compared only on simple subdivisions: a boundary edge
    of length at least 2 keeps its length class in the vertex product.
    """
    if not is_nodal(s):
        raise NotNodalError()
    mult_c, mult_r, mult_a1 = 1, 1, GWForm.of(SquareClass())
    for triangle in s.triangles:
        vertex = vertex_multiplicities(triangle)
        mult_c *= vertex.m_c
        mult_r *= vertex.m_r
        mult_a1 = mult_a1 * vertex.m_a1
    if is_simple(s):
        closed = closed_form_multiplicity(s)
        if closed != mult_a1:
            raise InternalCheckError(
                f"vertex product {mult_a1.pretty()} differs from closed form {closed.pretty()}"
            )
    return CurveMultiplicity(mult_c, mult_r, mult_a1)
